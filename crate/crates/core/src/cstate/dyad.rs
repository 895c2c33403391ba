use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::label::{beam_split_labels, ln_quadrature_wavefunction, CoherentLabel};
use super::pure::{check_pair, label_key, product_overlap, PureCSS};
use crate::error::{Error, Result};

/// One operator term `coeff * |ket><bra|` on M modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadTerm {
    pub coeff: Complex64,
    pub ket: Vec<CoherentLabel>,
    pub bra: Vec<CoherentLabel>,
}

/// Finite weighted sum of coherent dyads. Represents mixed and unnormalized
/// states exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadMix {
    modes: usize,
    terms: Vec<DyadTerm>,
}

impl From<&PureCSS> for DyadMix {
    fn from(s: &PureCSS) -> Self {
        let mut terms = Vec::with_capacity(s.len() * s.len());
        for u in s.terms() {
            for v in s.terms() {
                terms.push(DyadTerm {
                    coeff: u.coeff * v.coeff.conj(),
                    ket: u.labels.clone(),
                    bra: v.labels.clone(),
                });
            }
        }
        DyadMix { modes: s.modes(), terms }
    }
}

impl From<PureCSS> for DyadMix {
    fn from(s: PureCSS) -> Self {
        DyadMix::from(&s)
    }
}

impl DyadMix {
    pub fn zero(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidMode { index: 0, modes });
        }
        Ok(DyadMix { modes, terms: Vec::new() })
    }

    pub fn from_terms(modes: usize, terms: Vec<DyadTerm>) -> Result<Self> {
        let mut m = Self::zero(modes)?;
        for t in terms {
            m.push(t.coeff, t.ket, t.bra)?;
        }
        Ok(m)
    }

    pub fn push(
        &mut self,
        coeff: Complex64,
        ket: Vec<CoherentLabel>,
        bra: Vec<CoherentLabel>,
    ) -> Result<()> {
        for n in [ket.len(), bra.len()] {
            if n != self.modes {
                return Err(Error::ModeMismatch { left: self.modes, right: n });
            }
        }
        if !(coeff.re.is_finite() && coeff.im.is_finite())
            || ket.iter().chain(&bra).any(|l| !l.is_finite())
        {
            return Err(Error::NonFinite("dyad term"));
        }
        self.terms.push(DyadTerm { coeff, ket, bra });
        Ok(())
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn terms(&self) -> &[DyadTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Tr = sum_t c_t <bra_t|ket_t>`.
    pub fn trace(&self) -> Complex64 {
        self.terms.iter().map(|t| t.coeff * product_overlap(&t.bra, &t.ket).exp()).sum()
    }

    /// `<target| self |target>` without any normalization.
    pub fn expectation(&self, target: &PureCSS) -> Result<Complex64> {
        if target.modes() != self.modes {
            return Err(Error::ModeMismatch { left: self.modes, right: target.modes() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let mut left = Complex64::new(0.0, 0.0);
            let mut right = Complex64::new(0.0, 0.0);
            for u in target.terms() {
                left += u.coeff.conj() * product_overlap(&u.labels, &t.ket).exp();
                right += u.coeff * product_overlap(&t.bra, &u.labels).exp();
            }
            acc += t.coeff * left * right;
        }
        Ok(acc)
    }

    /// `<target|rho|target> / (Tr rho <target|target>)`.
    pub fn fidelity_with_pure(&self, target: &PureCSS) -> Result<f64> {
        let tr = self.trace().re;
        let tn = target.norm_sqr();
        if tr <= 0.0 || tn <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.expectation(target)?.re / (tr * tn))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        DyadMix {
            modes: self.modes,
            terms: self
                .terms
                .iter()
                .map(|t| DyadTerm { coeff: t.coeff * c, ket: t.ket.clone(), bra: t.bra.clone() })
                .collect(),
        }
    }

    /// Divides by the (real part of the) trace.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace().re;
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(tr.recip(), 0.0)))
    }

    /// Operator sum `self + other`.
    pub fn plus(&self, other: &DyadMix) -> Result<Self> {
        if self.modes != other.modes {
            return Err(Error::ModeMismatch { left: self.modes, right: other.modes });
        }
        let mut m = self.clone();
        m.terms.extend(other.terms.iter().cloned());
        Ok(m)
    }

    /// Appends `other`'s terms in place.
    pub fn absorb(&mut self, other: DyadMix) -> Result<()> {
        if self.modes != other.modes {
            return Err(Error::ModeMismatch { left: self.modes, right: other.modes });
        }
        self.terms.extend(other.terms);
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        DyadMix {
            modes: self.modes,
            terms: self
                .terms
                .iter()
                .map(|t| DyadTerm { coeff: t.coeff.conj(), ket: t.bra.clone(), bra: t.ket.clone() })
                .collect(),
        }
    }

    /// `(rho + rho^dag) / 2`, canonicalized.
    pub fn hermitized(&self) -> Self {
        let half = Complex64::new(0.5, 0.0);
        let mut m = self.scaled(half);
        m.terms.extend(self.adjoint().scaled(half).terms);
        m.canonicalize()
    }

    pub fn tensor(&self, other: &DyadMix) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for u in &self.terms {
            for v in &other.terms {
                let mut ket = u.ket.clone();
                ket.extend_from_slice(&v.ket);
                let mut bra = u.bra.clone();
                bra.extend_from_slice(&v.bra);
                terms.push(DyadTerm { coeff: u.coeff * v.coeff, ket, bra });
            }
        }
        DyadMix { modes: self.modes + other.modes, terms }
    }

    /// 50:50 beam splitter on modes `(i, j)`, applied to kets and bras alike.
    pub fn beam_splitter(&self, i: usize, j: usize) -> Result<Self> {
        check_pair(self.modes, i, j)?;
        let split = |labels: &[CoherentLabel]| {
            let mut l = labels.to_vec();
            let (a, b) = beam_split_labels(l[i], l[j]);
            l[i] = a;
            l[j] = b;
            l
        };
        let terms = self
            .terms
            .iter()
            .map(|t| DyadTerm { coeff: t.coeff, ket: split(&t.ket), bra: split(&t.bra) })
            .collect();
        Ok(DyadMix { modes: self.modes, terms })
    }

    /// Photon loss with rate `r2` on every mode.
    ///
    /// Each mode sends `|a><b|` to
    /// `exp(-r2 (|a|^2 + |b|^2)/2 + r2 conj(b) a) |t a><t b|`, `t = sqrt(1 - r2)`.
    pub fn loss_channel(&self, r2: f64) -> Result<Self> {
        check_loss(r2)?;
        if r2 == 0.0 {
            return Ok(self.clone());
        }
        let t = (1.0 - r2).sqrt();
        let terms = self
            .terms
            .iter()
            .map(|d| {
                let ln_factor: Complex64 = d
                    .ket
                    .iter()
                    .zip(&d.bra)
                    .map(|(a, b)| {
                        let (a, b) = (a.amp(), b.amp());
                        r2 * (b.conj() * a - 0.5 * (a.norm_sqr() + b.norm_sqr()))
                    })
                    .sum();
                DyadTerm {
                    coeff: d.coeff * ln_factor.exp(),
                    ket: d.ket.iter().map(|l| l.scaled(t)).collect(),
                    bra: d.bra.iter().map(|l| l.scaled(t)).collect(),
                }
            })
            .collect();
        Ok(DyadMix { modes: self.modes, terms })
    }

    /// `<x0|_mode rho |x0>_mode`: the unnormalized conditional state of the
    /// other modes and its trace (the outcome density).
    pub fn homodyne_project(&self, mode: usize, x0: f64) -> Result<(DyadMix, f64)> {
        if mode >= self.modes || self.modes < 2 {
            return Err(Error::InvalidMode { index: mode, modes: self.modes });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut ket = t.ket.clone();
                let mut bra = t.bra.clone();
                let k = ket.remove(mode);
                let b = bra.remove(mode);
                let ln = ln_quadrature_wavefunction(k, x0) + ln_quadrature_wavefunction(b, x0).conj();
                DyadTerm { coeff: t.coeff * ln.exp(), ket, bra }
            })
            .collect();
        let reduced = DyadMix { modes: self.modes - 1, terms };
        let density = reduced.trace().re;
        Ok((reduced, density))
    }

    /// Merges dyads with coinciding `(ket, bra)` labels and sorts terms
    /// lexicographically by `(Re, Im)` of ket labels, then bra labels.
    pub fn canonicalize(&self) -> Self {
        let mut merged: BTreeMap<Vec<i64>, DyadTerm> = BTreeMap::new();
        for t in &self.terms {
            let mut key = label_key(&t.ket);
            key.extend(label_key(&t.bra));
            merged
                .entry(key)
                .and_modify(|m| m.coeff += t.coeff)
                .or_insert_with(|| t.clone());
        }
        DyadMix { modes: self.modes, terms: merged.into_values().collect() }
    }

    /// Canonicalizes, then drops dyads with `|coeff| < tol`.
    ///
    /// Every coherent dyad has unit operator norm, so each dropped term moves
    /// the trace by less than `tol`.
    pub fn prune(&self, tol: f64) -> Result<Self> {
        if !(tol >= 0.0) {
            return Err(Error::NegativeTolerance(tol));
        }
        let mut m = self.canonicalize();
        m.terms.retain(|t| t.coeff.norm() >= tol);
        Ok(m)
    }

    /// `<x|rho|x>` for a single-mode state.
    pub fn quadrature_density(&self, x: f64) -> Result<f64> {
        if self.modes != 1 {
            return Err(Error::NotSingleMode(self.modes));
        }
        Ok(self
            .terms
            .iter()
            .map(|t| {
                let ln = ln_quadrature_wavefunction(t.ket[0], x)
                    + ln_quadrature_wavefunction(t.bra[0], x).conj();
                t.coeff * ln.exp()
            })
            .sum::<Complex64>()
            .re)
    }

    /// Distinct single-mode labels appearing in kets or bras.
    pub fn label_set(&self) -> Vec<CoherentLabel> {
        let mut seen: BTreeMap<Vec<i64>, CoherentLabel> = BTreeMap::new();
        for t in &self.terms {
            for l in t.ket.iter().chain(&t.bra) {
                seen.entry(label_key(std::slice::from_ref(l))).or_insert(*l);
            }
        }
        seen.into_values().collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: DyadMix =
            serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        Self::from_terms(raw.modes, raw.terms)
    }
}

pub(crate) fn check_loss(r2: f64) -> Result<()> {
    if (0.0..1.0).contains(&r2) {
        Ok(())
    } else {
        Err(Error::InvalidLoss(r2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstate::Parity;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn pure_state_fidelity_with_itself_is_one() {
        let s = PureCSS::scs(1.3, Parity::Odd).unwrap();
        let m = DyadMix::from(&s);
        assert!((m.fidelity_with_pure(&s).unwrap() - 1.0).abs() < 1e-12);
        assert!((m.trace() - re(1.0)).norm() < 1e-12);
    }

    #[test]
    fn loss_with_zero_rate_is_identity() {
        let s = PureCSS::scs(0.9, Parity::Even).unwrap();
        let m = DyadMix::from(&s);
        assert_eq!(m.loss_channel(0.0).unwrap(), m);
    }

    #[test]
    fn loss_damps_cross_dyad_by_gaussian_factor() {
        let (a, r2) = (1.1_f64, 0.2_f64);
        let t = (1.0 - r2).sqrt();
        let mut m = DyadMix::zero(1).unwrap();
        m.push(re(1.0), vec![a.into()], vec![(-a).into()]).unwrap();
        let out = m.loss_channel(r2).unwrap();
        let d = &out.terms()[0];
        assert!((d.coeff - re((-2.0 * r2 * a * a).exp())).norm() < 1e-15);
        assert!((d.ket[0].amp() - re(t * a)).norm() < 1e-15);
        assert!((d.bra[0].amp() - re(-t * a)).norm() < 1e-15);
    }

    #[test]
    fn loss_rate_out_of_range() {
        let m = DyadMix::zero(1).unwrap();
        assert_eq!(m.loss_channel(1.0), Err(Error::InvalidLoss(1.0)));
        assert_eq!(m.loss_channel(-0.1), Err(Error::InvalidLoss(-0.1)));
    }

    #[test]
    fn prune_rejects_negative_tolerance() {
        let m = DyadMix::zero(1).unwrap();
        assert_eq!(m.prune(-1.0), Err(Error::NegativeTolerance(-1.0)));
    }

    #[test]
    fn prune_drops_small_terms_within_trace_budget() {
        let s = PureCSS::scs(2.0, Parity::Odd).unwrap();
        let mut m = DyadMix::from(&s);
        m.push(re(1e-16), vec![0.2.into()], vec![0.4.into()]).unwrap();
        m.push(re(3e-15), vec![0.1.into()], vec![0.4.into()]).unwrap();
        let before = m.trace();
        let p = m.prune(1e-14).unwrap();
        assert_eq!(p.len(), 4);
        assert!((p.trace() - before).norm() < 1e-14 * m.len() as f64);
    }

    #[test]
    fn hermitized_state_has_real_trace() {
        let s = PureCSS::scs(0.7, Parity::Odd).unwrap();
        let mut m = DyadMix::from(&s).loss_channel(0.3).unwrap();
        m.push(Complex64::new(0.0, 0.2), vec![0.1.into()], vec![0.5.into()]).unwrap();
        let h = m.hermitized();
        assert!(h.trace().im.abs() < 1e-15);
    }

    #[test]
    fn homodyne_on_dyads_matches_pure_path() {
        let odd = PureCSS::scs(1.0, Parity::Odd).unwrap();
        let two = odd.tensor(&odd).beam_splitter(0, 1).unwrap();
        let mix = DyadMix::from(&two);
        for &x in &[-1.2, 0.0, 0.35, 2.0] {
            let (pr, pp) = two.homodyne_project(0, x).unwrap();
            let (mr, mp) = mix.homodyne_project(0, x).unwrap();
            assert!((pp - mp).abs() < 1e-14);
            let target = PureCSS::scs(std::f64::consts::SQRT_2, Parity::Even).unwrap();
            let fp = pr.inner(&target).unwrap().norm_sqr() / pp;
            let fm = mr.fidelity_with_pure(&target).unwrap();
            assert!((fp - fm).abs() < 1e-13);
        }
    }

    #[test]
    fn label_set_of_cat() {
        let s = PureCSS::scs(0.5, Parity::Even).unwrap();
        assert_eq!(DyadMix::from(&s).label_set().len(), 2);
    }
}
