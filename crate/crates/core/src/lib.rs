//! Computable closures of the cone of sums of `2d`-powers in `R[X_1, ..., X_n]`.
//!
//! The crate evaluates the evaluation-seminorm topology, sup-norms over
//! compact regions and weighted l1 norms; builds certificates that a
//! nonnegative polynomial is approximated by sums of `2d`-powers in each
//! of them; tests Zariski density through vanishing ideals of point sets;
//! and checks and recovers truncated moment functionals.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod cli;
pub mod error;
pub mod moments;
pub mod poly;
pub mod spectrum;
pub mod topologies;

pub use error::{Error, Result};
pub use poly::{Coefficient, Dyadic, Monomial, Polynomial};
