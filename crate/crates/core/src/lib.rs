//! Exact computations on the Dickson invariant plane curve `F = D1/D2` over `F_q`.

pub mod census;
pub mod check;
pub mod config;
pub mod curve;
pub mod error;
pub mod gf;
pub mod group;
pub mod local;
pub mod matrix;
pub mod plane;
pub mod poly;
pub mod quotient;
pub mod report;

pub use error::{Error, Result};
