//! # qmono
//!
//! Bipartite entanglement measures, convex-roof optimization and numerical
//! verification tools for entanglement monogamy.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`] and [`state`]: dense complex matrices, pure states, density
//!   matrices, reductions, partial transposes and the vector/matrix
//!   isomorphism `|x> = (X ⊗ I) Σ_i |ii>`.
//! - [`sample`]: seed-deterministic random states and isometries.
//! - [`measures`]: pure-state functionals (concurrence, G-concurrence,
//!   entropies), negativity and the closed-form two-qubit Wootters quantities.
//! - [`roof`]: pure-state decompositions, convex-roof optimization for
//!   formation/assistance, and the zero-G-tail construction.
//! - [`monogamy`]: disentangling condition, power-law monogamy deficits,
//!   exponent root solving and scans, Markov states, flag states.
//! - [`charstates`]: nilpotent subspaces, G-monogamous support states,
//!   W-class states, product-split detection, face sampling.
//!
//! All numeric work is in `f64`; all randomness flows from explicit seeds.

#![forbid(unsafe_code)]

pub mod charstates;
mod error;
pub mod linalg;
pub mod measures;
pub mod monogamy;
pub mod roof;
pub mod sample;
pub mod state;
mod tolerance;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use measures::{MeasureId, WoottersRecord};
pub use roof::{RoofConfig, RoofMode, RoofResult};
pub use state::{Cut, Decomposition, DensityMatrix, PureState};
pub use tolerance::Tolerances;
