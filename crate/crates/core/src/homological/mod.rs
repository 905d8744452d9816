//! Lie-transform recursion and the solver for [[X, Ψ]] = Φ on regular
//! symplectic foliations.

pub mod foliation;
pub mod forms;
pub mod homotopy;
pub mod kv;
pub mod series;

pub use foliation::{FoliationData, FoliationReport};
pub use forms::{is_vertical, sharp, sharp_invert, vertical_d, vertical_eq, VerticalForm};
pub use homotopy::{homotopy_operator, homotopy_primitive};
pub use kv::{hamiltonian_potential, kv_solve, kv_solve_detailed, KvSolution};
pub use series::{lie_transform, recursive_rhs, transform_tensor, DeformationSeries, GeneratorSeries};
