// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispatch;
pub mod engine;
pub mod error;
pub mod exec;
pub mod fluctuations;
pub mod grid;
pub mod market;
pub mod report;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
