use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Complex amplitude labelling a coherent state `|a>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoherentLabel(pub Complex64);

impl CoherentLabel {
    pub const VACUUM: CoherentLabel = CoherentLabel(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        CoherentLabel(Complex64::new(re, im))
    }

    pub fn real(a: f64) -> Self {
        CoherentLabel(Complex64::new(a, 0.0))
    }

    #[inline]
    pub fn amp(self) -> Complex64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.re.is_finite() && self.0.im.is_finite()
    }

    pub fn scaled(self, t: f64) -> Self {
        CoherentLabel(self.0 * t)
    }
}

impl From<f64> for CoherentLabel {
    fn from(a: f64) -> Self {
        CoherentLabel::real(a)
    }
}

impl From<Complex64> for CoherentLabel {
    fn from(a: Complex64) -> Self {
        CoherentLabel(a)
    }
}

impl fmt::Display for CoherentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.im == 0.0 {
            write!(f, "|{}>", self.0.re)
        } else {
            write!(f, "|{}{:+}i>", self.0.re, self.0.im)
        }
    }
}

/// Photon-number parity of a cat state `N(|a> ± |-a>)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Relative sign between the `|a>` and `|-a>` branches.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Parity of the product of two states with parities `self` and `other`.
    pub fn combine(self, other: Parity) -> Self {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// `ln <a|b>`. The real part is always `<= 0`.
#[inline]
pub fn ln_coherent_overlap(a: CoherentLabel, b: CoherentLabel) -> Complex64 {
    let (a, b) = (a.0, b.0);
    a.conj() * b - 0.5 * (a.norm_sqr() + b.norm_sqr())
}

/// `<a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)`.
#[inline]
pub fn coherent_overlap(a: CoherentLabel, b: CoherentLabel) -> Complex64 {
    ln_coherent_overlap(a, b).exp()
}

/// `ln <x|a>` for the quadrature `x = (a + a^dag)/sqrt(2)`.
#[inline]
pub fn ln_quadrature_wavefunction(a: CoherentLabel, x: f64) -> Complex64 {
    let a = a.0;
    let quarter_ln_pi = 0.25 * PI.ln();
    Complex64::new(-0.5 * x * x - quarter_ln_pi - 0.5 * a.norm_sqr(), 0.0) + SQRT_2 * x * a
        - 0.5 * a * a
}

/// `<x|a> = pi^{-1/4} exp(-x^2/2 + sqrt(2) a x - a^2/2 - |a|^2/2)`.
///
/// For real `a` this is `pi^{-1/4} exp(-(x - sqrt(2) a)^2 / 2)`.
#[inline]
pub fn quadrature_wavefunction(a: CoherentLabel, x: f64) -> Complex64 {
    ln_quadrature_wavefunction(a, x).exp()
}

/// Label map of the 50:50 beam splitter.
#[inline]
pub fn beam_split_labels(a: CoherentLabel, b: CoherentLabel) -> (CoherentLabel, CoherentLabel) {
    (
        CoherentLabel((a.0 - b.0) * FRAC_1_SQRT_2),
        CoherentLabel((a.0 + b.0) * FRAC_1_SQRT_2),
    )
}
