pub mod daniell;
pub mod error;
pub mod formal_sums;
pub mod gauge;
pub mod integral;
pub mod intervals;
pub mod measures;
pub mod numerics;
pub mod sample;
pub mod selftest;

pub use error::{Error, Result};
pub use formal_sums::{FormalSum, StepProfile, Term};
pub use intervals::{AtomPartition, Interval};
pub use measures::{JordanTriple, RealMeasure};
pub use numerics::{Rat, XNonneg, XReal};
