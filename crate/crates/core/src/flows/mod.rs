//! The generator ODE dγ/dε = X_ε(γ): integration, pullbacks along the flow
//! and checks of the homological equation [[X_ε, A_ε]] = −∂_ε A_ε.

pub mod field;
pub mod flow;
pub mod ode;
pub mod order;

pub use field::EpsVectorField;
pub use flow::{check_triviality, integrate_flow, pullback_along_flow, FlowMap, FlowResult};
pub use order::{loglog_slope, order_test, OrderResult};
pub use ode::{solve, OdeOptions, OdeSolution, StepStats, Trajectory};
