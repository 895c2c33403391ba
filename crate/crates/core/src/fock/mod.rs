//! Truncated photon-number (Fock) representation of the whole pipeline.
//!
//! Nothing here uses the coherent-label algebra: states are dense vectors in
//! `|0>, ..., |n_cut - 1>`, the beam splitter is the matrix exponential of
//! its generator, loss is the Kraus set of the amplitude-damping channel and
//! homodyne projection uses Hermite functions. Agreement with
//! [`crate::cstate`] and [`crate::protocol`] is therefore a genuine check.
//!
//! Two-mode pure states are stored as `n_cut x n_cut` amplitude matrices,
//! entry `(m, n)` being the coefficient of `|m>|n>`.

mod beam_splitter;
mod loss;
mod pipeline;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::cstate::{DyadMix, PureCSS};
use crate::error::{Error, Result};

pub use beam_splitter::FockBeamSplitter;
pub use loss::{kraus_branches, kraus_operators, loss_kraus};
pub use pipeline::{compare_with_engine, FockAmplifier, OracleComparison};

pub type FockVec = DVector<Complex64>;
pub type FockMat = DMatrix<Complex64>;
/// Two-mode amplitude matrix.
pub type TwoModeFock = DMatrix<Complex64>;

pub const DEFAULT_CUTOFF: usize = 40;
/// Largest tolerated `1 - <a|a>` for a truncated coherent state.
pub const NORM_DEFICIT_LIMIT: f64 = 1e-10;

/// Cutoff that guarantees a norm deficit below [`NORM_DEFICIT_LIMIT`] for a
/// coherent state of amplitude `a`.
pub fn recommended_cutoff(a: Complex64) -> usize {
    let m = a.norm_sqr();
    (m + 10.0 * (m + 1.0).sqrt() + 20.0).ceil() as usize
}

/// `sum_{n >= n_cut} |<n|a>|^2`, summed directly over the tail.
pub fn norm_deficit(a: Complex64, n_cut: usize) -> f64 {
    let m = a.norm_sqr();
    // ln |<n|a>|^2 = -m + n ln m - ln n!
    if m == 0.0 {
        return if n_cut == 0 { 1.0 } else { 0.0 };
    }
    let mut ln_term = -m + n_cut as f64 * m.ln() - ln_factorial(n_cut);
    let mut sum = 0.0;
    let mut n = n_cut;
    loop {
        let term = ln_term.exp();
        sum += term;
        n += 1;
        ln_term += m.ln() - (n as f64).ln();
        if (n as f64) > m && term < sum * 1e-17 + 1e-300 {
            break;
        }
        if n > n_cut + 100_000 {
            break;
        }
    }
    sum
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// `<n|a> = exp(-|a|^2/2) a^n / sqrt(n!)` for `n < n_cut`, without checking
/// the truncation error.
pub fn coherent_fock_unchecked(a: Complex64, n_cut: usize) -> FockVec {
    let mut v = FockVec::zeros(n_cut);
    if n_cut == 0 {
        return v;
    }
    v[0] = Complex64::new((-0.5 * a.norm_sqr()).exp(), 0.0);
    for n in 1..n_cut {
        v[n] = v[n - 1] * a / (n as f64).sqrt();
    }
    v
}

/// Truncated coherent state; fails if the discarded tail exceeds
/// [`NORM_DEFICIT_LIMIT`].
pub fn coherent_fock(a: Complex64, n_cut: usize) -> Result<FockVec> {
    if n_cut == 0 {
        return Err(Error::CutoffTooSmall { cutoff: 0, deficit: 1.0, limit: NORM_DEFICIT_LIMIT });
    }
    let deficit = norm_deficit(a, n_cut);
    if deficit > NORM_DEFICIT_LIMIT {
        return Err(Error::CutoffTooSmall { cutoff: n_cut, deficit, limit: NORM_DEFICIT_LIMIT });
    }
    Ok(coherent_fock_unchecked(a, n_cut))
}

/// Doubles `start` until every label of `s` fits, and returns the cutoff.
pub fn auto_cutoff(s: &PureCSS, start: usize) -> usize {
    let worst = s
        .terms()
        .iter()
        .flat_map(|t| t.labels.iter())
        .map(|l| l.amp())
        .fold(Complex64::new(0.0, 0.0), |w, a| if a.norm() > w.norm() { a } else { w });
    let mut n = start.max(1);
    while norm_deficit(worst, n) > NORM_DEFICIT_LIMIT {
        n *= 2;
    }
    n
}

/// Single-mode superposition in the Fock basis.
pub fn pure_to_fock(s: &PureCSS, n_cut: usize) -> Result<FockVec> {
    if s.modes() != 1 {
        return Err(Error::NotSingleMode(s.modes()));
    }
    let mut v = FockVec::zeros(n_cut);
    for t in s.terms() {
        v += coherent_fock(t.labels[0].amp(), n_cut)? * t.coeff;
    }
    Ok(v)
}

/// Two-mode superposition as an amplitude matrix.
pub fn two_mode_to_fock(s: &PureCSS, n_cut: usize) -> Result<TwoModeFock> {
    if s.modes() != 2 {
        return Err(Error::ModeMismatch { left: 2, right: s.modes() });
    }
    let mut m = TwoModeFock::zeros(n_cut, n_cut);
    for t in s.terms() {
        let a = coherent_fock(t.labels[0].amp(), n_cut)?;
        let b = coherent_fock(t.labels[1].amp(), n_cut)?;
        m += (&a * b.transpose()) * t.coeff;
    }
    Ok(m)
}

/// Single-mode dyad mixture as a density matrix.
pub fn dyads_to_fock(m: &DyadMix, n_cut: usize) -> Result<FockMat> {
    if m.modes() != 1 {
        return Err(Error::NotSingleMode(m.modes()));
    }
    let mut rho = FockMat::zeros(n_cut, n_cut);
    for t in m.terms() {
        let k = coherent_fock(t.ket[0].amp(), n_cut)?;
        let b = coherent_fock(t.bra[0].amp(), n_cut)?;
        rho += (&k * b.adjoint()) * t.coeff;
    }
    Ok(rho)
}

/// Cat state `N(|a> ± |-a>)` built and normalized in the Fock basis.
pub fn scs_fock(alpha: f64, parity: crate::cstate::Parity, n_cut: usize) -> Result<FockVec> {
    let a = coherent_fock(Complex64::new(alpha, 0.0), n_cut)?;
    let b = coherent_fock(Complex64::new(-alpha, 0.0), n_cut)?;
    let v = a + b * Complex64::new(parity.sign(), 0.0);
    let n = v.norm();
    if n == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(v / Complex64::new(n, 0.0))
}

/// `<x|n>` for `n < n_cut`, from the normalized Hermite-function recurrence
/// `phi_{n+1} = sqrt(2/(n+1)) x phi_n - sqrt(n/(n+1)) phi_{n-1}`.
pub fn quadrature_eigvec(x: f64, n_cut: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n_cut);
    if n_cut == 0 {
        return v;
    }
    v[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n_cut > 1 {
        v[1] = std::f64::consts::SQRT_2 * x * v[0];
    }
    for n in 1..n_cut.saturating_sub(1) {
        let nf = n as f64;
        v[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * v[n] - (nf / (nf + 1.0)).sqrt() * v[n - 1];
    }
    v
}

/// Projects mode 0 of a two-mode pure state onto `<x|`. Returns the
/// unnormalized state of mode 1 and its squared norm.
pub fn homodyne_project_fock(state: &TwoModeFock, x: f64) -> (FockVec, f64) {
    let phi = quadrature_eigvec(x, state.nrows()).map(|v| Complex64::new(v, 0.0));
    let reduced = state.transpose() * phi;
    let p = reduced.norm_squared();
    (reduced, p)
}

/// Displacement operator `D(beta)` on an `n_cut`-dimensional truncation.
pub fn displacement(beta: Complex64, n_cut: usize) -> FockMat {
    let mut gen = FockMat::zeros(n_cut, n_cut);
    for n in 1..n_cut {
        let s = (n as f64).sqrt();
        // beta a^dag - conj(beta) a
        gen[(n, n - 1)] = beta * s;
        gen[(n - 1, n)] = -beta.conj() * s;
    }
    gen.exp()
}

/// Wigner function `(2/pi) Tr[rho D(beta) P D(beta)^dag]` with `P` the
/// photon-number parity, in complex-amplitude units (`∫ W d^2 beta = Tr rho`).
pub fn wigner_parity(rho: &FockMat, beta: Complex64) -> f64 {
    let n = rho.nrows();
    let big = n + 40 + (4.0 * beta.norm_sqr()).ceil() as usize;
    let d = displacement(-beta, big);
    let cols = d.columns(0, n);
    let shifted = &cols * rho * cols.adjoint();
    let mut acc = 0.0;
    for m in 0..big {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * shifted[(m, m)].re;
    }
    2.0 / std::f64::consts::PI * acc
}
