use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{FockMat, FockVec};
use crate::cstate::check_loss;
use crate::error::Result;

/// Branches whose weight falls below this are dropped.
const BRANCH_WEIGHT_FLOOR: f64 = 1e-14;

fn ln_binomial(n: usize, k: usize) -> f64 {
    let lf = |m: usize| (1..=m).map(|j| (j as f64).ln()).sum::<f64>();
    lf(n) - lf(k) - lf(n - k)
}

/// Kraus operators of the loss channel with rate `r2` on an `n_cut`
/// truncation: `<n-k| K_k |n> = sqrt(C(n, k)) t^{n-k} r^k`.
pub fn kraus_operators(r2: f64, n_cut: usize) -> Result<Vec<DMatrix<f64>>> {
    check_loss(r2)?;
    let t2 = 1.0 - r2;
    let max_k = if r2 == 0.0 { 0 } else { n_cut.saturating_sub(1) };
    Ok((0..=max_k)
        .map(|k| {
            let mut m = DMatrix::zeros(n_cut, n_cut);
            for n in k..n_cut {
                let ln = 0.5 * ln_binomial(n, k) + 0.5 * (n - k) as f64 * t2.ln()
                    + if k > 0 { 0.5 * k as f64 * r2.ln() } else { 0.0 };
                m[(n - k, n)] = ln.exp();
            }
            m
        })
        .collect())
}

/// `sum_k K_k rho K_k^dag`.
pub fn loss_kraus(rho: &FockMat, r2: f64) -> Result<FockMat> {
    let n = rho.nrows();
    let mut out = FockMat::zeros(n, n);
    for k in kraus_operators(r2, n)? {
        let kc = k.map(|v| Complex64::new(v, 0.0));
        out += &kc * rho * kc.transpose();
    }
    Ok(out)
}

/// The unnormalized pure states `K_k |psi>` whose mixture is the lossy
/// state; negligible branches are dropped.
pub fn kraus_branches(psi: &FockVec, r2: f64) -> Result<Vec<FockVec>> {
    let n = psi.len();
    Ok(kraus_operators(r2, n)?
        .into_iter()
        .map(|k| k.map(|v| Complex64::new(v, 0.0)) * psi)
        .filter(|b| b.norm_squared() >= BRANCH_WEIGHT_FLOOR)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstate::Parity;
    use crate::fock::{coherent_fock, scs_fock};

    #[test]
    fn kraus_set_is_trace_preserving() {
        let ks = kraus_operators(0.3, 30).unwrap();
        let mut sum = DMatrix::<f64>::zeros(30, 30);
        for k in &ks {
            sum += k.transpose() * k;
        }
        assert!((sum - DMatrix::identity(30, 30)).amax() < 1e-10);
    }

    #[test]
    fn zero_loss_is_identity() {
        let ks = kraus_operators(0.0, 8).unwrap();
        assert_eq!(ks.len(), 1);
        assert_eq!(ks[0], DMatrix::identity(8, 8));
    }

    #[test]
    fn coherent_state_is_attenuated() {
        let r2 = 0.2;
        let a = Complex64::new(1.0, 0.0);
        let v = coherent_fock(a, 40).unwrap();
        let rho = loss_kraus(&(&v * v.adjoint()), r2).unwrap();
        let w = coherent_fock(a * (1.0 - r2).sqrt(), 40).unwrap();
        let want = &w * w.adjoint();
        assert!((rho - want).camax() < 1e-12);
    }

    #[test]
    fn lossy_odd_cat_has_damped_coherence() {
        // rho ∝ |ta><ta| + |-ta><-ta| - e^{-2 r2 a^2}(|ta><-ta| + |-ta><ta|)
        let (a, r2, n) = (1.0_f64, 0.2_f64, 40);
        let t = (1.0 - r2).sqrt();
        let psi = scs_fock(a, Parity::Odd, n).unwrap();
        let rho = loss_kraus(&(&psi * psi.adjoint()), r2).unwrap();
        let p = coherent_fock(Complex64::new(t * a, 0.0), n).unwrap();
        let m = coherent_fock(Complex64::new(-t * a, 0.0), n).unwrap();
        let d = Complex64::new((-2.0 * r2 * a * a).exp(), 0.0);
        let mut want = &p * p.adjoint() + &m * m.adjoint() - (&p * m.adjoint() + &m * p.adjoint()) * d;
        let tr = want.trace();
        want /= tr;
        assert!((rho - want).camax() < 1e-8);
    }

    #[test]
    fn branches_carry_the_full_weight() {
        let psi = scs_fock(1.5, Parity::Even, 40).unwrap();
        let total: f64 = kraus_branches(&psi, 0.1).unwrap().iter().map(|b| b.norm_squared()).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }
}
