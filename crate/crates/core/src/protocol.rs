//! The amplification experiment.
//!
//! Two cat states of amplitude `alpha` (optionally passed through a loss
//! channel) meet on a 50:50 beam splitter. Mode 0 of the output is measured
//! with a homodyne detector; conditioned on outcome `x0`, mode 1 is close to
//! a cat state of amplitude `sqrt(2) alpha`.
//!
//! Same-parity pairs (odd-odd, even-even) target an even cat; the
//! opposite-parity pair targets an odd cat. For the opposite-parity pair the
//! odd cat enters on mode 0, which puts the `|0>` admixture of the heralded
//! state in phase with the cat part for positive outcomes. Quantities
//! integrated over symmetric windows do not depend on this choice.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cstate::{DyadMix, Parity, PureCSS};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};

/// Homodyne-measured output port.
pub const MEASURED_MODE: usize = 0;
/// Grid step of the coarse window scan.
pub const SCAN_STEP: f64 = 0.01;
/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pairing {
    #[serde(rename = "odd-odd")]
    OddOdd,
    #[serde(rename = "even-even")]
    EvenEven,
    #[serde(rename = "even-odd")]
    EvenOdd,
}

impl Pairing {
    pub const ALL: [Pairing; 3] = [Pairing::OddOdd, Pairing::EvenEven, Pairing::EvenOdd];

    /// Parities entering modes 0 and 1.
    pub fn input_parities(self) -> (Parity, Parity) {
        match self {
            Pairing::OddOdd => (Parity::Odd, Parity::Odd),
            Pairing::EvenEven => (Parity::Even, Parity::Even),
            Pairing::EvenOdd => (Parity::Odd, Parity::Even),
        }
    }

    pub fn target_parity(self) -> Parity {
        let (a, b) = self.input_parities();
        a.combine(b)
    }

    pub fn is_opposite(self) -> bool {
        self == Pairing::EvenOdd
    }

    pub fn from_parities(a: Parity, b: Parity) -> Self {
        match (a, b) {
            (Parity::Odd, Parity::Odd) => Pairing::OddOdd,
            (Parity::Even, Parity::Even) => Pairing::EvenEven,
            _ => Pairing::EvenOdd,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pairing::OddOdd => "odd-odd",
            Pairing::EvenEven => "even-even",
            Pairing::EvenOdd => "even-odd",
        }
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pairing {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "odd-odd" => Ok(Pairing::OddOdd),
            "even-even" => Ok(Pairing::EvenEven),
            "even-odd" | "odd-even" => Ok(Pairing::EvenOdd),
            other => Err(format!("unknown pairing '{other}' (odd-odd, even-even, even-odd)")),
        }
    }
}

/// Amplitude of the cat the heralded state is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetAmplitude {
    /// `sqrt(2) alpha`, regardless of loss.
    #[default]
    Ideal,
    /// `sqrt(2) t alpha` with `t = sqrt(1 - r2)`.
    Attenuated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmpConfig {
    pub alpha: f64,
    pub pairing: Pairing,
    pub loss_r2: f64,
    #[serde(default)]
    pub target: TargetAmplitude,
}

impl AmpConfig {
    pub fn new(alpha: f64, pairing: Pairing) -> Result<Self> {
        Self::with_loss(alpha, pairing, 0.0)
    }

    pub fn with_loss(alpha: f64, pairing: Pairing, loss_r2: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidAmplitude(alpha));
        }
        crate::cstate::check_loss(loss_r2)?;
        Ok(AmpConfig { alpha, pairing, loss_r2, target: TargetAmplitude::Ideal })
    }

    pub fn target_parity(&self) -> Parity {
        self.pairing.target_parity()
    }

    pub fn target_alpha(&self) -> f64 {
        match self.target {
            TargetAmplitude::Ideal => SQRT_2 * self.alpha,
            TargetAmplitude::Attenuated => SQRT_2 * self.alpha * (1.0 - self.loss_r2).sqrt(),
        }
    }

    pub fn target_state(&self) -> PureCSS {
        PureCSS::scs(self.target_alpha(), self.target_parity()).expect("alpha validated")
    }

    /// Lossless two-mode input, mode 0 first.
    pub fn input_state(&self) -> PureCSS {
        let (p0, p1) = self.pairing.input_parities();
        let a = PureCSS::scs(self.alpha, p0).expect("alpha validated");
        let b = PureCSS::scs(self.alpha, p1).expect("alpha validated");
        a.tensor(&b)
    }

    /// Outcome range that carries essentially all of the homodyne density.
    pub fn scan_limit(&self) -> f64 {
        2.0 * SQRT_2 * self.alpha + 4.0
    }
}

/// Post-selection window `[-half_width, half_width]` and what it yields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub half_width: f64,
    pub probability: f64,
    pub avg_fidelity: f64,
}

/// Heralded state of the unmeasured mode, normalized.
#[derive(Debug, Clone, PartialEq)]
pub enum Conditional {
    Pure(PureCSS),
    Mixed(DyadMix),
}

impl Conditional {
    pub fn to_dyads(&self) -> DyadMix {
        match self {
            Conditional::Pure(s) => DyadMix::from(s),
            Conditional::Mixed(m) => m.clone(),
        }
    }
}

#[derive(Debug, Clone)]
enum Prepared {
    Pure(PureCSS),
    Mixed(DyadMix),
}

/// Precomputed post-beam-splitter state for one [`AmpConfig`].
#[derive(Debug, Clone)]
pub struct Amplifier {
    cfg: AmpConfig,
    prepared: Prepared,
    target: PureCSS,
}

impl Amplifier {
    /// Lossless configurations use the pure-state path; lossy ones the dyad
    /// path.
    pub fn new(cfg: AmpConfig) -> Self {
        if cfg.loss_r2 == 0.0 {
            Self::pure(cfg)
        } else {
            Self::mixed(cfg)
        }
    }

    fn pure(cfg: AmpConfig) -> Self {
        let post = cfg.input_state().beam_splitter(0, 1).expect("two modes");
        Amplifier { cfg, prepared: Prepared::Pure(post), target: cfg.target_state() }
    }

    /// Dyad path, also for `loss_r2 == 0`.
    pub fn mixed(cfg: AmpConfig) -> Self {
        let post = Self::lossy_input(&cfg).beam_splitter(0, 1).expect("two modes");
        Amplifier { cfg, prepared: Prepared::Mixed(post), target: cfg.target_state() }
    }

    fn lossy_input(cfg: &AmpConfig) -> DyadMix {
        let (p0, p1) = cfg.pairing.input_parities();
        let one = |p| {
            DyadMix::from(PureCSS::scs(cfg.alpha, p).expect("alpha validated"))
                .loss_channel(cfg.loss_r2)
                .expect("loss validated")
        };
        one(p0).tensor(&one(p1))
    }

    pub fn config(&self) -> &AmpConfig {
        &self.cfg
    }

    pub fn target(&self) -> &PureCSS {
        &self.target
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.prepared, Prepared::Pure(_))
    }

    /// Two-mode state right after the beam splitter, as dyads.
    pub fn post_beam_splitter(&self) -> DyadMix {
        match &self.prepared {
            Prepared::Pure(s) => DyadMix::from(s),
            Prepared::Mixed(m) => m.clone(),
        }
    }

    /// Unnormalized heralded state of mode 1 at outcome `x0` and the
    /// outcome density.
    pub fn project(&self, x0: f64) -> (Conditional, f64) {
        match &self.prepared {
            Prepared::Pure(s) => {
                let (r, p) = s.homodyne_project(MEASURED_MODE, x0).expect("two modes");
                (Conditional::Pure(r), p)
            }
            Prepared::Mixed(m) => {
                let (r, p) = m.homodyne_project(MEASURED_MODE, x0).expect("two modes");
                (Conditional::Mixed(r), p)
            }
        }
    }

    /// Normalized heralded state at `x0`.
    pub fn projected_state(&self, x0: f64) -> Result<Conditional> {
        match self.project(x0) {
            (Conditional::Pure(r), _) => Ok(Conditional::Pure(r.normalized()?)),
            (Conditional::Mixed(r), _) => Ok(Conditional::Mixed(r.normalized()?)),
        }
    }

    /// `[p(x0), p(x0) F(x0)]`: the outcome density and the unnormalized
    /// overlap with the target. Both are smooth in `x0`.
    pub fn weighted(&self, x0: f64) -> [f64; 2] {
        let tn = self.target.norm_sqr();
        match self.project(x0) {
            (Conditional::Pure(r), p) => {
                let ov: Complex64 = self.target.inner(&r).expect("single mode");
                [p, ov.norm_sqr() / tn]
            }
            (Conditional::Mixed(r), p) => {
                let e = r.expectation(&self.target).expect("single mode");
                [p, e.re / tn]
            }
        }
    }

    pub fn density(&self, x0: f64) -> f64 {
        self.weighted(x0)[0]
    }

    /// Fidelity of the heralded state to the target cat. Zero where the
    /// outcome density vanishes.
    pub fn fidelity(&self, x0: f64) -> f64 {
        let [p, pf] = self.weighted(x0);
        if p > 0.0 {
            pf / p
        } else {
            0.0
        }
    }

    /// `(p(x0), F(x0))`.
    pub fn point(&self, x0: f64) -> (f64, f64) {
        let [p, pf] = self.weighted(x0);
        (p, if p > 0.0 { pf / p } else { 0.0 })
    }

    fn window_integrals(&self, lo: f64, hi: f64) -> [f64; 2] {
        let opts = QuadOptions::default();
        let right = integrate(|x| self.weighted(x), lo, hi, opts).value;
        let left = integrate(|x| self.weighted(x), -hi, -lo, opts).value;
        [right[0] + left[0], right[1] + left[1]]
    }

    /// Success probability and average fidelity over `[-x0, x0]`.
    pub fn window(&self, x0: f64) -> Result<WindowStats> {
        if !(x0 >= 0.0) {
            return Err(Error::NegativeWindow(x0));
        }
        if x0 == 0.0 {
            return Ok(WindowStats { half_width: 0.0, probability: 0.0, avg_fidelity: self.fidelity(0.0) });
        }
        let [p, pf] = self.window_integrals(0.0, x0);
        Ok(WindowStats { half_width: x0, probability: p, avg_fidelity: stats_ratio(pf, p, || self.fidelity(0.0)) })
    }

    /// `∫ p(x) dx` over the whole line.
    pub fn total_probability(&self) -> f64 {
        let reach = SQRT_2 * self.post_beam_splitter_reach() + 12.0;
        self.window_integrals(0.0, reach)[0]
    }

    fn post_beam_splitter_reach(&self) -> f64 {
        match &self.prepared {
            Prepared::Pure(s) => s.max_label_norm(),
            Prepared::Mixed(m) => m.label_set().iter().map(|l| l.amp().norm()).fold(0.0, f64::max),
        }
    }

    /// Widest symmetric window whose average fidelity still reaches
    /// `f_target`.
    ///
    /// Scans `[0, scan_limit]` in steps of [`SCAN_STEP`], takes the last grid
    /// point meeting the target, then bisects the following step. If the
    /// point fidelity at zero already misses the target the result is the
    /// empty window.
    pub fn max_prob_at_target(&self, f_target: f64) -> Result<WindowStats> {
        if !(f_target > 0.0 && f_target < 1.0) {
            return Err(Error::InvalidTarget(f_target));
        }
        let f0 = self.fidelity(0.0);
        if f0 < f_target {
            return Ok(WindowStats { half_width: 0.0, probability: 0.0, avg_fidelity: f0 });
        }
        let limit = self.cfg.scan_limit();
        let steps = (limit / SCAN_STEP).ceil() as usize;
        let grid: Vec<f64> = (0..=steps).map(|i| (i as f64 * SCAN_STEP).min(limit)).collect();
        let pieces: Vec<[f64; 2]> =
            grid.par_windows(2).map(|w| self.window_integrals(w[0], w[1])).collect();

        let mut cumulative = Vec::with_capacity(grid.len());
        let mut acc = [0.0, 0.0];
        cumulative.push(acc);
        for piece in &pieces {
            acc = [acc[0] + piece[0], acc[1] + piece[1]];
            cumulative.push(acc);
        }
        let avg = |c: &[f64; 2]| stats_ratio(c[1], c[0], || f0);
        let best = (0..grid.len()).rev().find(|&i| avg(&cumulative[i]) >= f_target).unwrap_or(0);

        if best + 1 == grid.len() {
            let c = cumulative[best];
            return Ok(WindowStats { half_width: grid[best], probability: c[0], avg_fidelity: avg(&c) });
        }

        let base = cumulative[best];
        let at = |x: f64| {
            let extra = self.window_integrals(grid[best], x);
            [base[0] + extra[0], base[1] + extra[1]]
        };
        let (mut lo, mut hi) = (grid[best], grid[best + 1]);
        let mut lo_val = base;
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            let v = at(mid);
            if avg(&v) >= f_target {
                lo = mid;
                lo_val = v;
            } else {
                hi = mid;
            }
        }
        Ok(WindowStats { half_width: lo, probability: lo_val[0], avg_fidelity: avg(&lo_val) })
    }
}

fn stats_ratio(pf: f64, p: f64, at_zero: impl FnOnce() -> f64) -> f64 {
    if p > 0.0 {
        pf / p
    } else {
        at_zero()
    }
}
