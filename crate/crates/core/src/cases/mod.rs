//! The worked families: the Euler family on ℝ⁶ and Dirac brackets on
//! constraint submanifolds.

pub mod dirac;
pub mod euler;

pub use dirac::{DiracData, DiracInstance};
pub use euler::{table_rows, EulerInstance, Reading};
