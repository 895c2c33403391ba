//! Amplification of cat states (superpositions of coherent states) by mixing
//! two of them on a 50:50 beam splitter and post-selecting on a homodyne
//! measurement of one output port.
//!
//! Layout:
//!
//! - [`cstate`]: exact algebra over finite superpositions of coherent states
//!   and coherent dyads (overlaps, beam splitter, homodyne projection, loss).
//! - [`protocol`]: the amplification experiment for same- and opposite-parity
//!   input pairs: outcome density, conditional fidelity, window statistics and
//!   target-fidelity window search.
//! - [`closed_form`]: the textbook closed forms for the lossless densities and
//!   fidelities, used as a cross-check of the engine.
//! - [`fock`]: truncated photon-number oracle for the whole pipeline.
//! - [`wigner`]: Wigner functions on phase-space grids.
//! - [`cascade`]: repeated amplification stages.
//! - [`table`]: tidy result tables with CSV/JSON export.

pub mod cascade;
pub mod closed_form;
pub mod cstate;
pub mod error;
pub mod fock;
pub mod protocol;
pub mod quad;
pub mod table;
pub mod wigner;

pub use cstate::{CoherentLabel, DyadMix, Parity, PureCSS};
pub use error::{Error, Result};
pub use protocol::{AmpConfig, Amplifier, Pairing, TargetAmplitude, WindowStats};
