//! Exact-arithmetic limits of logarithmic connections on the projective line.
//!
//! Starting from a Fuchsian system with parabolic structure (trivial bundle,
//! rational residue matrices summing to zero, weighted eigenspace flags), the
//! crate iterates the destabilizing-modification step on Griffiths-transverse
//! filtrations until the associated graded Higgs bundle is semistable, then
//! reports the limiting system of Hodge bundles, its stratum signature,
//! Kostov-genericity and chamber data, and deformation dimensions.
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point anywhere in the core, so every slope comparison and every
//! certification is an exact decision.

pub mod bundle;
pub mod cohom;
pub mod connection;
pub mod exactalg;
pub mod hodge;
pub mod sample;
pub mod strata;

pub use exactalg::{Poly, PolyMatrix, Rat};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("rank-deficient input where full rank is required: {0}")]
    RankDeficient(String),
    #[error("step budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("rank {0} is outside the certified search range; pass the heuristic override to proceed")]
    UnsupportedRank(usize),
    #[error("internal certification failure: {0}")]
    Certification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
