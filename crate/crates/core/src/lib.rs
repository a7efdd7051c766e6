#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod blowdown;
pub mod blowup;
pub mod error;
pub mod lattice;
pub mod scenario;
pub mod series;
pub mod strata;

pub use error::{Error, Result};
pub use series::{geometric_range, projective_space, rat, ratio, Polynomial, Rational, RationalSeries};
