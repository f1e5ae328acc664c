//! Desk-scale numerical verification of the identities behind weight-aspect
//! moments of GL(3)×GL(2) Rankin–Selberg L-functions.

pub mod arith;
pub mod error;
pub mod gl3;
pub mod identities;
pub mod lfunctions;
pub mod modforms;
pub mod moments;
pub mod numeric;
pub mod special;

pub use error::{Error, Result};
