pub mod error;
pub mod linalg;
pub mod multivector;
pub mod scalar;

pub use error::{Error, Result};
pub mod convention;
pub mod random;
pub mod poisson;
pub mod sampling;
pub mod homological;
pub mod family;
pub mod report;
pub mod flows;
pub mod cases;
