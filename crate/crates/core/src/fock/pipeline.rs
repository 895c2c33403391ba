use serde::{Deserialize, Serialize};

use super::{
    homodyne_project_fock, kraus_branches, scs_fock, FockBeamSplitter, FockMat, FockVec,
    TwoModeFock,
};
use crate::error::Result;
use crate::protocol::{AmpConfig, Amplifier};

/// The amplification pipeline in the truncated Fock basis.
///
/// Each lossy input is unravelled into its Kraus branches; every pair of
/// branches is a two-mode pure state that goes through the beam splitter
/// separately, and the heralded state is the mixture of the projected
/// branches.
#[derive(Debug, Clone)]
pub struct FockAmplifier {
    cutoff: usize,
    branches: Vec<TwoModeFock>,
    target: FockVec,
}

impl FockAmplifier {
    pub fn new(cfg: &AmpConfig, n_cut: usize) -> Result<Self> {
        let (p0, p1) = cfg.pairing.input_parities();
        let a = scs_fock(cfg.alpha, p0, n_cut)?;
        let b = scs_fock(cfg.alpha, p1, n_cut)?;
        let target = scs_fock(cfg.target_alpha(), cfg.target_parity(), n_cut)?;
        let bs = FockBeamSplitter::new(n_cut);
        let left = kraus_branches(&a, cfg.loss_r2)?;
        let right = kraus_branches(&b, cfg.loss_r2)?;
        let mut branches = Vec::with_capacity(left.len() * right.len());
        for u in &left {
            for v in &right {
                branches.push(bs.apply(&(u * v.transpose())));
            }
        }
        Ok(FockAmplifier { cutoff: n_cut, branches, target })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// `(p(x), F(x))`.
    pub fn point(&self, x: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut pf = 0.0;
        for b in &self.branches {
            let (r, w) = homodyne_project_fock(b, x);
            p += w;
            pf += self.target.dotc(&r).norm_sqr();
        }
        (p, if p > 0.0 { pf / p } else { 0.0 })
    }

    /// Normalized heralded density matrix at outcome `x`.
    pub fn conditional_state(&self, x: f64) -> FockMat {
        let n = self.cutoff;
        let mut rho = FockMat::zeros(n, n);
        for b in &self.branches {
            let (r, _) = homodyne_project_fock(b, x);
            rho += &r * r.adjoint();
        }
        let tr = rho.trace();
        if tr.norm() > 0.0 {
            rho /= tr;
        }
        rho
    }
}

/// One row of an engine-versus-oracle comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub alpha: f64,
    pub pairing: crate::protocol::Pairing,
    pub loss_r2: f64,
    pub x0: f64,
    pub cutoff: usize,
    pub density_engine: f64,
    pub density_oracle: f64,
    pub fidelity_engine: f64,
    pub fidelity_oracle: f64,
}

impl OracleComparison {
    pub fn density_error(&self) -> f64 {
        (self.density_engine - self.density_oracle).abs()
    }

    pub fn fidelity_error(&self) -> f64 {
        (self.fidelity_engine - self.fidelity_oracle).abs()
    }
}

/// Evaluates engine and oracle at each outcome in `xs`.
pub fn compare_with_engine(cfg: &AmpConfig, xs: &[f64], n_cut: usize) -> Result<Vec<OracleComparison>> {
    let engine = Amplifier::new(*cfg);
    let oracle = FockAmplifier::new(cfg, n_cut)?;
    Ok(xs
        .iter()
        .map(|&x| {
            let (pe, fe) = engine.point(x);
            let (po, fo) = oracle.point(x);
            OracleComparison {
                alpha: cfg.alpha,
                pairing: cfg.pairing,
                loss_r2: cfg.loss_r2,
                x0: x,
                cutoff: n_cut,
                density_engine: pe,
                density_oracle: po,
                fidelity_engine: fe,
                fidelity_oracle: fo,
            }
        })
        .collect())
}
