//! Exact algebra over finite superpositions of coherent states.
//!
//! Every state handled here is a finite sum of tensor products of coherent
//! states `|a_1> ⊗ ... ⊗ |a_M>` (kets, [`PureCSS`]) or of coherent dyads
//! `|k><b|` ([`DyadMix`]). All matrix elements reduce to the closed-form
//! overlap `<a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)`, so no truncation
//! is involved anywhere in this module.
//!
//! Quadrature conventions: `x = (a + a^dag)/sqrt(2)`, so a coherent state of
//! real amplitude `a` has its `x` wavefunction centred at `sqrt(2) a`.
//!
//! Beam-splitter convention: a 50:50 beam splitter acting on modes `(i, j)`
//! maps coherent labels `(a, b)` to `((a - b)/sqrt(2), (a + b)/sqrt(2))`.
//! This is the only place the convention is fixed; the Fock oracle is
//! checked against it.

mod dyad;
mod label;
mod pure;

pub use dyad::{DyadMix, DyadTerm};
pub(crate) use dyad::check_loss;
pub use label::{
    beam_split_labels, coherent_overlap, ln_coherent_overlap, ln_quadrature_wavefunction,
    quadrature_wavefunction, CoherentLabel, Parity,
};
pub use pure::{scs_normalization, KetTerm, PureCSS};

/// Default drop threshold for [`DyadMix::prune`].
pub const DEFAULT_PRUNE_TOL: f64 = 1e-14;

/// Resolution used when deciding whether two labels are the same point.
/// Labels that agree to about 1e-12 are merged by canonicalization.
const LABEL_QUANTUM: f64 = 1.0 / ((1u64 << 40) as f64);

pub(crate) fn quantize(x: f64) -> i64 {
    (x / LABEL_QUANTUM).round() as i64
}
