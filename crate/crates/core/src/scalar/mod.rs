//! Exact and numeric scalar fields over a named coordinate chart.

pub mod chart;
pub mod field;
pub mod parse;
pub mod poly;
pub mod ratfun;

pub use chart::{Chart, DomainFn, Point};
pub use field::{fd_step, Body, NumFn, ScalarField, POLE_EPS};
pub use parse::{parse_expr, parse_ratfn};
pub use poly::{q, qf, Monomial, Poly, Q};
pub use ratfun::RatFn;
