//! Fixed spaces of positive trace-preserving super-operators.
//!
//! The crate computes the projection onto the fixed space of a PTP or CPTP
//! super-operator, splits the support of that projection into invariant
//! blocks `X_1 ⊕ … ⊕ X_l` on which it acts as `μ ↦ Tr(μ)ρ_i`, and certifies
//! how the projection couples blocks of equal dimension:
//!
//! * [`projector`] builds the projection from the eigenvalue-1 eigenspaces of
//!   the natural matrix (with a Cesàro-mean cross-check);
//! * [`decompose`] runs the minimum-rank fixed-state walk that yields the
//!   blocks;
//! * [`structure`] aligns singular vectors across blocks and classifies each
//!   coupled class as symmetrizing (`Half`) or partition-shaped, and for
//!   completely positive maps extracts the `⊕ Id_{L(Y_i)} ⊗ Γ^{ρ_i}` form;
//! * [`oracles`] evaluates the positivity lemmas the structure rests on, as
//!   runnable checks;
//! * [`zoo`] generates channels and projectors with planted answers.
//!
//! Operators are dense `d × d` complex matrices ([`CMatrix`]); super-operators
//! are stored as their `d² × d²` natural matrix acting on column-stacked
//! vectorizations.

#![allow(clippy::needless_range_loop)]

pub mod channel;
pub mod cli;
pub mod decompose;
pub mod io;
pub mod numerics;
pub mod oracles;
pub mod projector;
pub mod structure;
pub mod zoo;

pub use channel::{ChannelFlags, PositivityWitness, Representation, SuperOperator};
pub use decompose::{Block, BlockDecomposition};
pub use numerics::{CMatrix, TolerancePolicy, C64};
pub use projector::{FixedSpace, Subspace};
pub use structure::{CaseKind, CrossBlockCase, Status, StructureReport};

use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent user input.
    #[error("invalid input: {0}")]
    Input(String),

    /// A factorization did not converge, or an iterative step failed to make
    /// progress.
    #[error("numerical failure in {what} on a {rows}x{cols} matrix")]
    NumericalFailure {
        what: &'static str,
        rows: usize,
        cols: usize,
    },

    /// A documented precondition of an operation was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The input passed its gates but produced a state that is impossible for
    /// a PTP map (empty fixed space, singular eigenvalue-1 pairing, ...).
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    /// A positive semi-definite value came out with a negative eigenvalue.
    #[error("positivity violation: {0}")]
    Positivity(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
