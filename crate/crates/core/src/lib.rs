//! Temporal quantum correlations of qubit channels.
//!
//! Three quantifiers are computed side by side for the same dynamics:
//! the negativity of the two-time pseudo density matrix (the f-function),
//! temporal steering robustness (a small semidefinite program), and the
//! optimized temporal CHSH violation. Their vanishing times are ordered,
//! and spatio-temporal steering separates common-cause from direct-cause
//! correlations in a three-qubit network.

pub mod bell;
pub mod causal;
pub mod channels;
pub mod error;
pub mod matcore;
pub mod pdm;
pub mod sdpsolver;
pub mod steering;
pub mod sweep;

pub use error::{Error, Result};
