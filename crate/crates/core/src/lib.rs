//! Invariant-density estimation for ergodic diffusions with jumps from continuous observations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod cli;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod kernel;
pub mod levy;
pub mod linalg;
pub mod models;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
