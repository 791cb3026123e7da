//! Solver and verifier for two-player perfect-information games on finite
//! directed graphs.
//!
//! The pipeline: [`zerosum`] computes each player's guaranteed value at every
//! vertex; [`alpha`] runs the viability fixed point on top of those labels;
//! [`spe`] assembles threat plays into a finite-memory strategy profile; and
//! [`verify`] / [`folk`] independently check the result by brute force —
//! product-graph deviation search, exhaustive backward induction, and
//! exhaustive play enumeration.
//!
//! All arithmetic is exact: payoffs are [`Q`] (64-bit rationals), never
//! floats, so fixed points and comparisons are decided without tolerance.

pub mod alpha;
pub mod dot;
pub mod error;
pub mod folk;
pub mod game;
pub mod generate;
pub mod rational;
pub mod scenarios;
pub mod spe;
pub mod verify;
pub mod zerosum;

pub use error::{Error, Result};
pub use game::{
    Action, GameBuilder, GameGraph, InfiniteRule, Lasso, LassoTail, PayoffVector, PlayerId,
    TailTable, VertexId,
};
pub use rational::{parse_rational, Q};
