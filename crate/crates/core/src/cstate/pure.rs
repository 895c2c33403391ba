use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::label::{
    beam_split_labels, ln_coherent_overlap, ln_quadrature_wavefunction, CoherentLabel, Parity,
};
use super::quantize;
use crate::error::{Error, Result};

/// One product term `coeff * |labels[0]> ⊗ ... ⊗ |labels[M-1]>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KetTerm {
    pub coeff: Complex64,
    pub labels: Vec<CoherentLabel>,
}

/// Finite superposition of M-mode coherent product states. Need not be
/// normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureCSS {
    modes: usize,
    terms: Vec<KetTerm>,
}

impl PureCSS {
    /// Empty (zero) state on `modes` modes.
    pub fn zero(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidMode { index: 0, modes });
        }
        Ok(PureCSS { modes, terms: Vec::new() })
    }

    pub fn from_terms(modes: usize, terms: Vec<KetTerm>) -> Result<Self> {
        let mut s = Self::zero(modes)?;
        for t in terms {
            s.push(t.coeff, t.labels)?;
        }
        Ok(s)
    }

    /// Single-mode coherent state `|a>`.
    pub fn coherent(a: impl Into<CoherentLabel>) -> Self {
        PureCSS {
            modes: 1,
            terms: vec![KetTerm { coeff: Complex64::new(1.0, 0.0), labels: vec![a.into()] }],
        }
    }

    pub fn vacuum(modes: usize) -> Result<Self> {
        let mut s = Self::zero(modes)?;
        s.terms.push(KetTerm {
            coeff: Complex64::new(1.0, 0.0),
            labels: vec![CoherentLabel::VACUUM; modes],
        });
        Ok(s)
    }

    /// Normalized cat state `N(|alpha> ± |-alpha>)`.
    pub fn scs(alpha: f64, parity: Parity) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidAmplitude(alpha));
        }
        let n = scs_normalization(alpha, parity);
        Ok(PureCSS {
            modes: 1,
            terms: vec![
                KetTerm { coeff: Complex64::new(n, 0.0), labels: vec![CoherentLabel::real(alpha)] },
                KetTerm {
                    coeff: Complex64::new(parity.sign() * n, 0.0),
                    labels: vec![CoherentLabel::real(-alpha)],
                },
            ],
        })
    }

    pub fn push(&mut self, coeff: Complex64, labels: Vec<CoherentLabel>) -> Result<()> {
        if labels.len() != self.modes {
            return Err(Error::ModeMismatch { left: self.modes, right: labels.len() });
        }
        if !(coeff.re.is_finite() && coeff.im.is_finite()) || labels.iter().any(|l| !l.is_finite())
        {
            return Err(Error::NonFinite("ket term"));
        }
        self.terms.push(KetTerm { coeff, labels });
        Ok(())
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn terms(&self) -> &[KetTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &PureCSS) -> Result<Complex64> {
        if self.modes != other.modes {
            return Err(Error::ModeMismatch { left: self.modes, right: other.modes });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for u in &self.terms {
            for v in &other.terms {
                acc += u.coeff.conj() * v.coeff * product_overlap(&u.labels, &v.labels).exp();
            }
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> f64 {
        // Same mode count by construction.
        self.inner(self).map(|z| z.re.max(0.0)).unwrap_or(0.0)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(n.sqrt().recip(), 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        PureCSS {
            modes: self.modes,
            terms: self
                .terms
                .iter()
                .map(|t| KetTerm { coeff: t.coeff * c, labels: t.labels.clone() })
                .collect(),
        }
    }

    /// Superposition `self + other`.
    pub fn plus(&self, other: &PureCSS) -> Result<Self> {
        if self.modes != other.modes {
            return Err(Error::ModeMismatch { left: self.modes, right: other.modes });
        }
        let mut s = self.clone();
        s.terms.extend(other.terms.iter().cloned());
        Ok(s)
    }

    /// `self ⊗ other`; modes of `other` follow those of `self`.
    pub fn tensor(&self, other: &PureCSS) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for u in &self.terms {
            for v in &other.terms {
                let mut labels = Vec::with_capacity(self.modes + other.modes);
                labels.extend_from_slice(&u.labels);
                labels.extend_from_slice(&v.labels);
                terms.push(KetTerm { coeff: u.coeff * v.coeff, labels });
            }
        }
        PureCSS { modes: self.modes + other.modes, terms }
    }

    /// 50:50 beam splitter on modes `(i, j)`.
    pub fn beam_splitter(&self, i: usize, j: usize) -> Result<Self> {
        check_pair(self.modes, i, j)?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut labels = t.labels.clone();
                let (a, b) = beam_split_labels(labels[i], labels[j]);
                labels[i] = a;
                labels[j] = b;
                KetTerm { coeff: t.coeff, labels }
            })
            .collect();
        Ok(PureCSS { modes: self.modes, terms })
    }

    /// Projects `mode` onto the quadrature eigenstate `<x0|`.
    ///
    /// Returns the unnormalized state of the remaining modes and its squared
    /// norm, which is the probability density of the outcome when `self` is
    /// normalized.
    pub fn homodyne_project(&self, mode: usize, x0: f64) -> Result<(PureCSS, f64)> {
        if mode >= self.modes || self.modes < 2 {
            return Err(Error::InvalidMode { index: mode, modes: self.modes });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut labels = t.labels.clone();
                let projected = labels.remove(mode);
                let factor = ln_quadrature_wavefunction(projected, x0).exp();
                KetTerm { coeff: t.coeff * factor, labels }
            })
            .collect();
        let reduced = PureCSS { modes: self.modes - 1, terms };
        let density = reduced.norm_sqr();
        Ok((reduced, density))
    }

    /// `<x|self>` for a single-mode state.
    pub fn wavefunction(&self, x: f64) -> Result<Complex64> {
        if self.modes != 1 {
            return Err(Error::NotSingleMode(self.modes));
        }
        Ok(self
            .terms
            .iter()
            .map(|t| t.coeff * ln_quadrature_wavefunction(t.labels[0], x).exp())
            .sum())
    }

    /// Merges terms whose labels coincide (to about 1e-12) and orders terms
    /// lexicographically by `(Re, Im)` of their labels.
    pub fn canonicalize(&self) -> Self {
        let mut merged: BTreeMap<Vec<i64>, KetTerm> = BTreeMap::new();
        for t in &self.terms {
            let key = label_key(&t.labels);
            merged
                .entry(key)
                .and_modify(|m| m.coeff += t.coeff)
                .or_insert_with(|| t.clone());
        }
        PureCSS { modes: self.modes, terms: merged.into_values().collect() }
    }

    /// Largest `|label|` over all terms and modes.
    pub fn max_label_norm(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|t| t.labels.iter())
            .map(|l| l.0.norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: PureCSS =
            serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        Self::from_terms(raw.modes, raw.terms)
    }
}

/// `N±(alpha) = (2 ± 2 exp(-2 alpha^2))^{-1/2}`.
pub fn scs_normalization(alpha: f64, parity: Parity) -> f64 {
    let e = (-2.0 * alpha * alpha).exp();
    (2.0 + parity.sign() * 2.0 * e).sqrt().recip()
}

/// `ln prod_m <u_m|v_m>`.
#[inline]
pub(crate) fn product_overlap(u: &[CoherentLabel], v: &[CoherentLabel]) -> Complex64 {
    u.iter().zip(v).map(|(&a, &b)| ln_coherent_overlap(a, b)).sum()
}

pub(crate) fn label_key(labels: &[CoherentLabel]) -> Vec<i64> {
    labels.iter().flat_map(|l| [quantize(l.0.re), quantize(l.0.im)]).collect()
}

pub(crate) fn check_pair(modes: usize, i: usize, j: usize) -> Result<()> {
    for &k in &[i, j] {
        if k >= modes {
            return Err(Error::InvalidMode { index: k, modes });
        }
    }
    if i == j {
        return Err(Error::SameMode(i));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn scs_coefficients_at_unit_amplitude() {
        let odd = PureCSS::scs(1.0, Parity::Odd).unwrap();
        let even = PureCSS::scs(1.0, Parity::Even).unwrap();
        // (2 ∓ 2e^{-2})^{-1/2}
        assert!((odd.terms()[0].coeff.re - 0.760_433_311_589_407).abs() < 1e-12);
        assert!((odd.terms()[1].coeff.re + 0.760_433_311_589_407).abs() < 1e-12);
        assert!((even.terms()[0].coeff.re - 0.663_625_300_142_288).abs() < 1e-12);
        assert!((odd.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((even.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scs_large_amplitude_tends_to_equal_weights() {
        let s = PureCSS::scs(8.0, Parity::Odd).unwrap();
        assert!((s.terms()[0].coeff.re - SQRT_2.recip()).abs() < 1e-15);
    }

    #[test]
    fn scs_rejects_nonpositive_amplitude() {
        assert_eq!(PureCSS::scs(0.0, Parity::Even), Err(Error::InvalidAmplitude(0.0)));
        assert!(PureCSS::scs(-1.0, Parity::Odd).is_err());
        assert!(PureCSS::scs(f64::NAN, Parity::Odd).is_err());
    }

    #[test]
    fn opposite_parity_cats_are_orthogonal() {
        for &a in &[0.1, 0.7, 1.0, 2.3] {
            let odd = PureCSS::scs(a, Parity::Odd).unwrap();
            let even = PureCSS::scs(a, Parity::Even).unwrap();
            assert!(odd.inner(&even).unwrap().norm() < 1e-15);
            let vac = PureCSS::vacuum(1).unwrap();
            assert!(vac.inner(&odd).unwrap().norm() < 1e-15);
            assert!((odd.inner(&odd).unwrap() - c(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn inner_rejects_mode_mismatch() {
        let a = PureCSS::vacuum(1).unwrap();
        let b = PureCSS::vacuum(2).unwrap();
        assert_eq!(a.inner(&b), Err(Error::ModeMismatch { left: 1, right: 2 }));
    }

    #[test]
    fn tensor_of_coherent_states() {
        let t = PureCSS::coherent(0.4).tensor(&PureCSS::coherent(0.4));
        assert_eq!(t.modes(), 2);
        assert_eq!(t.len(), 1);
        assert_eq!(t.terms()[0].labels, vec![CoherentLabel::real(0.4); 2]);
        let odd = PureCSS::scs(1.0, Parity::Odd).unwrap();
        assert_eq!(odd.tensor(&odd).len(), 4);
    }

    #[test]
    fn beam_splitter_on_coherent_pair() {
        let a = 0.9;
        let out = PureCSS::coherent(a).tensor(&PureCSS::coherent(a)).beam_splitter(0, 1).unwrap();
        let want = PureCSS::coherent(0.0).tensor(&PureCSS::coherent(SQRT_2 * a));
        assert!((out.inner(&want).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn beam_splitter_on_odd_pair_matches_displayed_expansion() {
        let a = 0.8;
        let b = SQRT_2 * a;
        let odd = PureCSS::scs(a, Parity::Odd).unwrap();
        let out = odd.tensor(&odd).beam_splitter(0, 1).unwrap();
        // |0>(|b> + |-b>) - (|b> + |-b>)|0>, unnormalized
        let mut want = PureCSS::zero(2).unwrap();
        let (z, p, m) = (CoherentLabel::VACUUM, CoherentLabel::real(b), CoherentLabel::real(-b));
        want.push(c(1.0), vec![z, p]).unwrap();
        want.push(c(1.0), vec![z, m]).unwrap();
        want.push(c(-1.0), vec![p, z]).unwrap();
        want.push(c(-1.0), vec![m, z]).unwrap();
        let want = want.normalized().unwrap();
        let ov = out.inner(&want).unwrap();
        assert!((ov - c(1.0)).norm() < 1e-12, "{ov}");
    }

    #[test]
    fn beam_splitter_index_errors() {
        let s = PureCSS::vacuum(2).unwrap();
        assert_eq!(s.beam_splitter(0, 0), Err(Error::SameMode(0)));
        assert_eq!(s.beam_splitter(0, 2), Err(Error::InvalidMode { index: 2, modes: 2 }));
    }

    #[test]
    fn homodyne_needs_a_remaining_mode() {
        let s = PureCSS::coherent(0.3);
        assert!(s.homodyne_project(0, 0.0).is_err());
        let s2 = PureCSS::vacuum(2).unwrap();
        assert!(s2.homodyne_project(2, 0.0).is_err());
        let (r, p) = s2.homodyne_project(1, 0.0).unwrap();
        assert_eq!(r.modes(), 1);
        assert!((p - std::f64::consts::PI.powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn canonicalize_merges_duplicate_labels() {
        let mut s = PureCSS::zero(1).unwrap();
        s.push(c(0.5), vec![0.3.into()]).unwrap();
        s.push(c(0.25), vec![(-0.3).into()]).unwrap();
        s.push(c(0.5), vec![(0.1 + 0.2).into()]).unwrap();
        let m = s.canonicalize();
        assert_eq!(m.len(), 2);
        assert_eq!(m.terms()[0].labels[0], CoherentLabel::real(-0.3));
        assert!((m.terms()[1].coeff - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn json_round_trip_keeps_mode_count() {
        let odd = PureCSS::scs(1.0, Parity::Odd).unwrap();
        let s = odd.tensor(&odd);
        let back = PureCSS::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(PureCSS::from_json(r#"{"modes":2,"terms":[{"coeff":[1,0],"labels":[[0,0]]}]}"#)
            .is_err());
    }
}
