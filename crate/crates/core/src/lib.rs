//! Utility–probability duality.
//!
//! A normalized utility function and a cumulative distribution are the
//! same kind of object: a nondecreasing curve from 0 to 1 on a bounded
//! domain. Swapping their roles in the expected-utility integral gives the
//! expected disutility and, through the lottery's inverse, the aspiration
//! equivalent, which is the dual of the certain equivalent.

// `!(x > y)` checks deliberately reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approximations;
pub mod cli;
pub mod curves;
pub mod delegation;
pub mod dominance;
pub mod duality;
pub mod error;
pub mod numerics;
pub mod report;
pub mod scenario;
pub mod selection;

pub use curves::{Curve, CurveKind, Domain, Role, Tolerance};
pub use duality::{DualityResult, Evaluator};
pub use error::{Error, Result};
