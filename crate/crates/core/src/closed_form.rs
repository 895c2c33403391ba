//! Closed-form lossless densities and fidelities, written directly in terms
//! of the real quadrature wavefunctions `psi_a(x)` and the cat normalizations
//! `N±(a)`. Used only to cross-check [`crate::protocol::Amplifier`].
//!
//! With `b = sqrt(2) alpha`, `S = psi_b(x) + psi_-b(x)`,
//! `D = psi_b(x) - psi_-b(x)` and `psi0 = psi_0(x)`:
//!
//! ```text
//! odd-odd   p = N-^4 [S^2 + psi0^2 N+(b)^-2 - 4 psi0 S e^{-alpha^2}]
//!           F = N-^4 [psi0 / N+(b) - 2 e^{-alpha^2} N+(b) S]^2 / p
//! even-even p = N+^4 [S^2 + psi0^2 N+(b)^-2 + 4 psi0 S e^{-alpha^2}]
//!           F = N+^4 [psi0 / N+(b) + 2 e^{-alpha^2} N+(b) S]^2 / p
//! even-odd  p = N+^2 N-^2 [psi0^2 N-(b)^-2 + D^2]
//!           F = N+^2 N-^2 psi0^2 / (N-(b)^2 p)
//! ```
//!
//! The normalization of the cat part carries the exponent `-2` in both the
//! same-parity and the opposite-parity density; with `+2` the opposite-parity
//! fidelity would exceed one.

use std::f64::consts::{PI, SQRT_2};

use crate::cstate::{scs_normalization, Parity};
use crate::protocol::Pairing;

fn psi(a: f64, x: f64) -> f64 {
    PI.powf(-0.25) * (-(x - SQRT_2 * a).powi(2) / 2.0).exp()
}

struct Pieces {
    alpha: f64,
    psi0: f64,
    sum: f64,
    diff: f64,
    n_plus: f64,
    n_minus: f64,
    n_plus_b: f64,
    n_minus_b: f64,
}

fn pieces(alpha: f64, x: f64) -> Pieces {
    let b = SQRT_2 * alpha;
    let (pb, mb) = (psi(b, x), psi(-b, x));
    Pieces {
        alpha,
        psi0: psi(0.0, x),
        sum: pb + mb,
        diff: pb - mb,
        n_plus: scs_normalization(alpha, Parity::Even),
        n_minus: scs_normalization(alpha, Parity::Odd),
        n_plus_b: scs_normalization(b, Parity::Even),
        n_minus_b: scs_normalization(b, Parity::Odd),
    }
}

/// Outcome density `p(x)` for a lossless configuration.
pub fn density(pairing: Pairing, alpha: f64, x: f64) -> f64 {
    let q = pieces(alpha, x);
    let overlap = (-q.alpha * q.alpha).exp();
    match pairing {
        Pairing::OddOdd => {
            q.n_minus.powi(4)
                * (q.sum.powi(2) + q.psi0.powi(2) * q.n_plus_b.powi(-2)
                    - 4.0 * q.psi0 * q.sum * overlap)
        }
        Pairing::EvenEven => {
            q.n_plus.powi(4)
                * (q.sum.powi(2)
                    + q.psi0.powi(2) * q.n_plus_b.powi(-2)
                    + 4.0 * q.psi0 * q.sum * overlap)
        }
        Pairing::EvenOdd => {
            (q.n_plus * q.n_minus).powi(2) * (q.psi0.powi(2) * q.n_minus_b.powi(-2) + q.diff.powi(2))
        }
    }
}

/// Fidelity of the heralded state to the amplified target cat, lossless.
pub fn fidelity(pairing: Pairing, alpha: f64, x: f64) -> f64 {
    let q = pieces(alpha, x);
    let p = density(pairing, alpha, x);
    let overlap = (-q.alpha * q.alpha).exp();
    match pairing {
        Pairing::OddOdd => {
            q.n_minus.powi(4) / p
                * (q.psi0 / q.n_plus_b - 2.0 * overlap * q.n_plus_b * q.sum).powi(2)
        }
        Pairing::EvenEven => {
            q.n_plus.powi(4) / p
                * (q.psi0 / q.n_plus_b + 2.0 * overlap * q.n_plus_b * q.sum).powi(2)
        }
        Pairing::EvenOdd => {
            (q.n_plus * q.n_minus).powi(2) / q.n_minus_b.powi(2) * q.psi0.powi(2) / p
        }
    }
}

/// Quadrature profiles compared when judging where amplification works:
/// the vacuum `psi_0(x)` and `psi_b(x) ± psi_-b(x)` with `b = sqrt(2) alpha`.
pub fn quadrature_curves(alpha: f64, x: f64) -> (f64, f64, f64) {
    let q = pieces(alpha, x);
    (q.psi0, q.sum, q.diff)
}
