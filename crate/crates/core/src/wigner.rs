//! Wigner functions of single-mode coherent-dyad mixtures.
//!
//! The kernel for one dyad `|a><b|` at phase-space point `beta` is
//! `(2/pi) <b|a> exp(-2 (beta - a)(conj(beta) - conj(b)))`, normalized so that
//! `∫ W d^2 beta = <b|a>` with `d^2 beta = d(Re beta) d(Im beta)`. It equals
//! the displaced-parity expectation `(2/pi) Tr[|a><b| D(beta) P D(beta)^dag]`
//! (checked against the Fock oracle in the tests).
//!
//! Grids come in two coordinate systems, see [`Axes`].

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cstate::{ln_coherent_overlap, CoherentLabel, DyadMix};
use crate::error::{Error, Result};
use crate::table::{ResultTable, Value};

/// Coordinates of a [`PhaseGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axes {
    /// `(Re beta, Im beta)`; `W(0,0) = (2/pi) * parity`, `∫∫ W = 1`.
    #[default]
    Amplitude,
    /// Quadratures `(x, p)` with `x = (a + a^dag)/sqrt(2)`, i.e.
    /// `beta = (x + i p)/sqrt(2)`; `∫∫ W dx dp = 1` and `∫ W dp = |<x|psi>|^2`.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub step: f64,
    #[serde(default)]
    pub axes: Axes,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { x_min: -4.0, x_max: 4.0, p_min: -4.0, p_max: 4.0, step: 0.05, axes: Axes::Amplitude }
    }
}

impl GridSpec {
    pub fn square(half: f64, step: f64, axes: Axes) -> Self {
        GridSpec { x_min: -half, x_max: half, p_min: -half, p_max: half, step, axes }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) {
            return Err(Error::NonPositive { what: "grid step", value: self.step });
        }
        if !(self.x_max >= self.x_min) {
            return Err(Error::NonPositive { what: "x extent", value: self.x_max - self.x_min });
        }
        if !(self.p_max >= self.p_min) {
            return Err(Error::NonPositive { what: "p extent", value: self.p_max - self.p_min });
        }
        Ok(())
    }
}

fn axis(min: f64, max: f64, step: f64) -> Vec<f64> {
    let n = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| min + step * i as f64).collect()
}

/// Wigner function sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub axes: Axes,
    pub step: f64,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    /// Row-major, `values[ix * p.len() + ip]`.
    pub values: Vec<f64>,
    /// Largest `|Im W|` dropped after Hermitization.
    pub max_imag_residue: f64,
}

impl PhaseGrid {
    pub fn at(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix * self.p.len() + ip]
    }

    /// Riemann sum `step^2 * sum W`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step * self.step
    }

    /// `∫ W dp` at every `x` sample.
    pub fn x_marginal(&self) -> Vec<f64> {
        let np = self.p.len();
        self.values.chunks(np).map(|row| row.iter().sum::<f64>() * self.step).collect()
    }

    /// `W(x_near, p)` for the `x` sample closest to `x`.
    pub fn p_slice(&self, x: f64) -> Vec<f64> {
        let ix = nearest(&self.x, x);
        let np = self.p.len();
        self.values[ix * np..(ix + 1) * np].to_vec()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Long-format table with columns `x, p, W`.
    pub fn to_table(&self, name: &str) -> ResultTable {
        let (cx, cp) = match self.axes {
            Axes::Amplitude => ("re_beta", "im_beta"),
            Axes::Quadrature => ("x", "p"),
        };
        let mut t = ResultTable::new(name, &[cx, cp, "w"]);
        for (ix, &x) in self.x.iter().enumerate() {
            for (ip, &p) in self.p.iter().enumerate() {
                t.push(vec![Value::Num(x), Value::Num(p), Value::Num(self.at(ix, ip))]);
            }
        }
        t
    }
}

fn nearest(axis: &[f64], v: f64) -> usize {
    axis.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - v).abs().total_cmp(&(b.1 - v).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Wigner kernel of `|a><b|` at `beta`, amplitude units.
pub fn wigner_dyad(a: CoherentLabel, b: CoherentLabel, beta: Complex64) -> Complex64 {
    let (ka, kb) = (a.amp(), b.amp());
    let ln = -2.0 * (beta - ka) * (beta.conj() - kb.conj()) + ln_coherent_overlap(b, a);
    2.0 / PI * ln.exp()
}

fn evaluate(m: &DyadMix, beta: Complex64) -> Complex64 {
    m.terms().iter().map(|t| t.coeff * wigner_dyad(t.ket[0], t.bra[0], beta)).sum()
}

/// `W(beta)` of a single-mode mixture, amplitude units, before taking the
/// real part.
pub fn wigner_point(m: &DyadMix, beta: Complex64) -> Result<Complex64> {
    if m.modes() != 1 {
        return Err(Error::NotSingleMode(m.modes()));
    }
    Ok(evaluate(m, beta))
}

/// Samples the Wigner function of `m` on `spec`.
pub fn wigner_state(m: &DyadMix, spec: &GridSpec) -> Result<PhaseGrid> {
    if m.modes() != 1 {
        return Err(Error::NotSingleMode(m.modes()));
    }
    spec.validate()?;
    let h = m.hermitized();
    let xs = axis(spec.x_min, spec.x_max, spec.step);
    let ps = axis(spec.p_min, spec.p_max, spec.step);
    let (to_beta, scale) = match spec.axes {
        Axes::Amplitude => (1.0, 1.0),
        Axes::Quadrature => (FRAC_1_SQRT_2, 0.5),
    };
    let rows: Vec<(Vec<f64>, f64)> = xs
        .par_iter()
        .map(|&x| {
            let mut residue: f64 = 0.0;
            let row = ps
                .iter()
                .map(|&p| {
                    let w = evaluate(&h, Complex64::new(x, p) * to_beta) * scale;
                    residue = residue.max(w.im.abs());
                    w.re
                })
                .collect();
            (row, residue)
        })
        .collect();
    let max_imag_residue = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let values = rows.into_iter().flat_map(|r| r.0).collect();
    Ok(PhaseGrid { axes: spec.axes, step: spec.step, x: xs, p: ps, values, max_imag_residue })
}

/// Sign changes along `values`, skipping samples with `|v| < floor`.
pub fn zero_crossings(values: &[f64], floor: f64) -> usize {
    let mut last: Option<bool> = None;
    let mut count = 0;
    for &v in values {
        if v.abs() < floor {
            continue;
        }
        let pos = v > 0.0;
        if let Some(prev) = last {
            if prev != pos {
                count += 1;
            }
        }
        last = Some(pos);
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstate::{Parity, PureCSS};

    #[test]
    fn coherent_state_kernel() {
        let a = CoherentLabel::new(0.4, -0.3);
        let beta = Complex64::new(0.1, 0.2);
        let w = wigner_dyad(a, a, beta);
        let want = 2.0 / PI * (-2.0 * (beta - a.amp()).norm_sqr()).exp();
        assert!((w.re - want).abs() < 1e-15 && w.im.abs() < 1e-15);
    }

    #[test]
    fn vacuum_peak() {
        let m = DyadMix::from(PureCSS::vacuum(1).unwrap());
        let w = wigner_point(&m, Complex64::new(0.0, 0.0)).unwrap();
        assert!((w.re - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn cat_parity_at_origin() {
        for (parity, sign) in [(Parity::Odd, -1.0), (Parity::Even, 1.0)] {
            let m = DyadMix::from(PureCSS::scs(1.2, parity).unwrap());
            let w = wigner_point(&m, Complex64::new(0.0, 0.0)).unwrap();
            assert!((w.re * PI / 2.0 - sign).abs() < 1e-10);
        }
    }

    #[test]
    fn multi_mode_rejected() {
        let m = DyadMix::from(PureCSS::vacuum(2).unwrap());
        assert_eq!(wigner_state(&m, &GridSpec::default()), Err(Error::NotSingleMode(2)));
    }

    #[test]
    fn axis_includes_endpoints() {
        let a = axis(-4.0, 4.0, 0.05);
        assert_eq!(a.len(), 161);
        assert!((a[160] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn crossings_skip_small_values() {
        assert_eq!(zero_crossings(&[1.0, -1.0, 1e-20, -1e-20, 1.0], 1e-12), 2);
        assert_eq!(zero_crossings(&[], 0.0), 0);
    }
}
