//! Repeated amplification: the heralded output of one stage feeds the next,
//! so nominal amplitudes grow as `alpha, sqrt(2) alpha, 2 alpha, ...`.
//!
//! Window conditioning replaces the continuous mixture
//! `∫_{-w}^{w} <x|rho|x> dx` by a Gauss–Legendre sum over `K` nodes, which
//! keeps every stage an exact finite dyad mixture. Terms are merged by label
//! after each stage, so the label set (and with it the term count) stays
//! small: labels of stage `s` are sums of `±(sqrt 2)^{s-1} alpha t^j`
//! combinations closed under the beam-splitter map.
//!
//! Two rules decide what enters a stage after the first:
//!
//! - [`PairingRule::CloneState`]: two copies of the previous output. This
//!   assumes two independently heralded, identical outputs are available.
//!   Two copies always have equal parity, so the stage is a same-parity one.
//! - [`PairingRule::IdealRefresh`]: the previous output together with a
//!   freshly prepared ideal cat of the same nominal amplitude. For an
//!   opposite-parity seed the fresh cat takes the opposite parity of the
//!   output, so every stage stays opposite-parity; for a same-parity seed it
//!   takes the same parity.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cstate::{DyadMix, Parity, PureCSS, DEFAULT_PRUNE_TOL};
use crate::error::{Error, Result};
use crate::protocol::{AmpConfig, Amplifier, Pairing, MEASURED_MODE};
use crate::quad::gauss_legendre;

pub const DEFAULT_MAX_TERMS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Conditioning {
    /// Keep only the outcome `x0`.
    Exact { x0: f64 },
    /// Accept outcomes in `[-half_width, half_width]`, discretized with
    /// `nodes` Gauss–Legendre points.
    Window { half_width: f64, nodes: usize },
}

impl Conditioning {
    fn validate(&self) -> Result<()> {
        match *self {
            Conditioning::Exact { x0 } if !x0.is_finite() => Err(Error::NonFinite("outcome")),
            Conditioning::Window { half_width, .. } if !(half_width > 0.0 && half_width.is_finite()) => {
                Err(Error::NonPositive { what: "window half-width", value: half_width })
            }
            Conditioning::Window { nodes, .. } if nodes < 3 || nodes % 2 == 0 => {
                Err(Error::InvalidNodeCount(nodes))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingRule {
    #[default]
    CloneState,
    IdealRefresh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadePolicy {
    pub stages: usize,
    pub conditioning: Conditioning,
    pub rule: PairingRule,
    /// Loss applied to both inputs of every stage.
    pub loss_r2: f64,
    pub prune_tol: f64,
    pub max_terms: usize,
}

impl CascadePolicy {
    pub fn new(stages: usize, conditioning: Conditioning, rule: PairingRule) -> Self {
        CascadePolicy {
            stages,
            conditioning,
            rule,
            loss_r2: 0.0,
            prune_tol: DEFAULT_PRUNE_TOL,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }

    pub fn with_loss(mut self, r2: f64) -> Self {
        self.loss_r2 = r2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages == 0 {
            return Err(Error::NonPositive { what: "stage count", value: 0.0 });
        }
        if self.max_terms == 0 {
            return Err(Error::NonPositive { what: "term cap", value: 0.0 });
        }
        if !(self.prune_tol >= 0.0) {
            return Err(Error::NegativeTolerance(self.prune_tol));
        }
        crate::cstate::check_loss(self.loss_r2)?;
        self.conditioning.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: usize,
    pub pairing: Pairing,
    pub input_alpha: f64,
    pub target_alpha: f64,
    pub target_parity: Parity,
    /// Fidelity of the normalized heralded state to the ideal target cat.
    pub fidelity: f64,
    /// Success probability of the stage; for exact conditioning this is the
    /// outcome density.
    pub probability: f64,
    pub cumulative_probability: f64,
    pub dyad_terms: usize,
    pub label_count: usize,
}

/// Reports plus the normalized heralded state after every stage.
#[derive(Debug, Clone)]
pub struct CascadeRun {
    pub reports: Vec<StageReport>,
    pub states: Vec<DyadMix>,
}

/// Applies the conditioning to a two-mode post-beam-splitter state.
/// Returns the unnormalized heralded state (merged by label) and the success
/// probability.
pub fn condition(post_bs: &DyadMix, cond: &Conditioning) -> Result<(DyadMix, f64)> {
    cond.validate()?;
    match *cond {
        Conditioning::Exact { x0 } => {
            let (r, p) = post_bs.homodyne_project(MEASURED_MODE, x0)?;
            Ok((r.canonicalize(), p))
        }
        Conditioning::Window { half_width, nodes } => {
            let (xs, ws) = gauss_legendre(nodes, -half_width, half_width);
            let parts: Vec<DyadMix> = xs
                .par_iter()
                .zip(ws.par_iter())
                .map(|(&x, &w)| {
                    let (r, _) = post_bs.homodyne_project(MEASURED_MODE, x)?;
                    Ok(r.scaled(w.into()).canonicalize())
                })
                .collect::<Result<_>>()?;
            let mut acc = DyadMix::zero(post_bs.modes() - 1)?;
            for part in parts {
                acc.absorb(part)?;
                acc = acc.canonicalize();
            }
            let p = acc.trace().re;
            Ok((acc, p))
        }
    }
}

/// Windowed heralded state of one amplification step, normalized, with the
/// window's success probability.
pub fn window_discretize(cfg: &AmpConfig, half_width: f64, nodes: usize) -> Result<(DyadMix, f64)> {
    let post = Amplifier::new(*cfg).post_beam_splitter();
    let (state, p) = condition(&post, &Conditioning::Window { half_width, nodes })?;
    Ok((state.normalized()?, p))
}

fn run_stage(
    mode0: &DyadMix,
    mode1: &DyadMix,
    policy: &CascadePolicy,
    stage: usize,
) -> Result<(DyadMix, f64)> {
    let a = mode0.loss_channel(policy.loss_r2)?;
    let b = mode1.loss_channel(policy.loss_r2)?;
    let count = a.len().saturating_mul(b.len());
    if count > policy.max_terms {
        return Err(Error::DyadExplosion { stage, count, cap: policy.max_terms });
    }
    let post = a.tensor(&b).beam_splitter(0, 1)?;
    let (raw, p) = condition(&post, &policy.conditioning)?;
    let state = raw.prune(policy.prune_tol)?;
    if state.len() > policy.max_terms {
        return Err(Error::DyadExplosion { stage, count: state.len(), cap: policy.max_terms });
    }
    Ok((state.normalized()?, p))
}

/// Runs the cascade and keeps every intermediate state.
pub fn cascade_run_full(alpha: f64, seed: Pairing, policy: &CascadePolicy) -> Result<CascadeRun> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidAmplitude(alpha));
    }
    policy.validate()?;
    let mut reports = Vec::with_capacity(policy.stages);
    let mut states: Vec<DyadMix> = Vec::with_capacity(policy.stages);
    let mut cumulative = 1.0;
    let mut previous: Option<(DyadMix, Parity)> = None;

    for stage in 1..=policy.stages {
        let input_alpha = alpha * SQRT_2.powi(stage as i32 - 1);
        let ((m0, q0), (m1, q1)) = match &previous {
            None => {
                let (q0, q1) = seed.input_parities();
                (
                    (DyadMix::from(PureCSS::scs(input_alpha, q0)?), q0),
                    (DyadMix::from(PureCSS::scs(input_alpha, q1)?), q1),
                )
            }
            Some((prev, q)) => match policy.rule {
                PairingRule::CloneState => ((prev.clone(), *q), (prev.clone(), *q)),
                PairingRule::IdealRefresh => {
                    let partner_parity = if seed.is_opposite() { q.flipped() } else { *q };
                    let partner = DyadMix::from(PureCSS::scs(input_alpha, partner_parity)?);
                    if *q == Parity::Odd {
                        ((prev.clone(), *q), (partner, partner_parity))
                    } else {
                        ((partner, partner_parity), (prev.clone(), *q))
                    }
                }
            },
        };
        let pairing = Pairing::from_parities(q0, q1);
        let target_parity = q0.combine(q1);
        let target_alpha = SQRT_2 * input_alpha;
        let target = PureCSS::scs(target_alpha, target_parity)?;

        let (state, probability) = run_stage(&m0, &m1, policy, stage)?;
        let fidelity = state.fidelity_with_pure(&target)?;
        cumulative *= probability;
        reports.push(StageReport {
            stage,
            pairing,
            input_alpha,
            target_alpha,
            target_parity,
            fidelity,
            probability,
            cumulative_probability: cumulative,
            dyad_terms: state.len(),
            label_count: state.label_set().len(),
        });
        states.push(state.clone());
        previous = Some((state, target_parity));
    }
    Ok(CascadeRun { reports, states })
}

pub fn cascade_run(alpha: f64, seed: Pairing, policy: &CascadePolicy) -> Result<Vec<StageReport>> {
    cascade_run_full(alpha, seed, policy).map(|r| r.reports)
}
