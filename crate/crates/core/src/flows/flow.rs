//! Flow maps γ_ε of the generator ODE, pulled-back tensors along them and
//! the triviality check.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::family::EpsFamily;
use crate::flows::field::EpsVectorField;
use crate::flows::ode::{self, OdeOptions, StepStats};
use crate::multivector::pullback::{invert_jacobian, transform_components, DiffeoMap};
use crate::report::CheckReport;

pub const FD_JACOBIAN_STEP: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct FlowMap {
    field: EpsVectorField,
    eps: f64,
    tol: f64,
}

#[derive(Clone, Debug)]
pub struct FlowResult {
    pub point: Vec<f64>,
    pub eps: f64,
    pub stats: StepStats,
    pub map: FlowMap,
}

/// γ_ε(x0) from dγ/dε = X_ε(γ), γ_0 = id.
pub fn integrate_flow(x: &EpsVectorField, x0: &[f64], eps: f64, tol: f64) -> Result<FlowResult> {
    if x0.len() != x.dim() {
        return Err(Error::Invalid(format!("point of length {} on a {}-dimensional chart", x0.len(), x.dim())));
    }
    if !x.in_domain(x0) {
        return Err(Error::DomainExit(0.0));
    }
    let s = ode::solve(|e, y| x.velocity(e, y), 0.0, x0, &[eps], &OdeOptions::tol(tol))?;
    let map = FlowMap { field: x.clone(), eps, tol };
    Ok(FlowResult { point: s.outputs[0].clone(), eps, stats: s.stats, map })
}

impl FlowMap {
    pub fn new(field: &EpsVectorField, eps: f64, tol: f64) -> FlowMap {
        FlowMap { field: field.clone(), eps, tol }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(integrate_flow(&self.field, x, self.eps, self.tol)?.point)
    }

    /// Image and Jacobian together, from the variational equation
    /// J' = DX_ε(γ)·J, J_0 = I.
    pub fn apply_with_jacobian(&self, x: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let n = x.len();
        let f = &self.field;
        let mut state = x.to_vec();
        state.extend(DMatrix::<f64>::identity(n, n).iter());
        let rhs = |e: f64, s: &[f64]| -> Result<Vec<f64>> {
            let y = &s[..n];
            let mut out = f.velocity(e, y)?;
            let dx = f.jacobian(e, y)?;
            let j = DMatrix::from_column_slice(n, n, &s[n..]);
            out.extend((dx * j).iter());
            Ok(out)
        };
        if !f.in_domain(x) {
            return Err(Error::DomainExit(0.0));
        }
        let s = ode::solve(rhs, 0.0, &state, &[self.eps], &OdeOptions::tol(self.tol))?;
        let out = &s.outputs[0];
        Ok((out[..n].to_vec(), DMatrix::from_column_slice(n, n, &out[n..])))
    }

    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.apply_with_jacobian(x)?.1)
    }

    /// Central differences with step 1e−6, all perturbed points integrated on
    /// the mesh chosen adaptively for `x` so that the quotient is smooth.
    pub fn jacobian_fd(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = x.len();
        let s = ode::solve(|e, y| self.field.velocity(e, y), 0.0, x, &[self.eps], &OdeOptions::tol(self.tol))?;
        let mesh = s.trajectory.t;
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[j] += FD_JACOBIAN_STEP;
            b[j] -= FD_JACOBIAN_STEP;
            let fa = ode::solve_on_mesh(|e, y| self.field.velocity(e, y), &mesh, &a)?;
            let fb = ode::solve_on_mesh(|e, y| self.field.velocity(e, y), &mesh, &b)?;
            for i in 0..n {
                m[(i, j)] = (fa[i] - fb[i]) / (2.0 * FD_JACOBIAN_STEP);
            }
        }
        Ok(m)
    }

    pub fn to_diffeo(&self) -> DiffeoMap {
        let (fwd, jac) = (self.clone(), self.clone());
        let back = FlowMap { field: self.field.clone(), eps: self.eps, tol: self.tol };
        DiffeoMap::new(self.field.chart(), Arc::new(move |x| fwd.apply(x)))
            .with_jacobian(Arc::new(move |x| jac.jacobian(x)))
            .with_inverse(Arc::new(move |y| back.apply_inverse(y)))
    }

    /// γ_ε⁻¹ by integrating from ε back to 0.
    pub fn apply_inverse(&self, y: &[f64]) -> Result<Vec<f64>> {
        let s = ode::solve(|e, p| self.field.velocity(e, p), self.eps, y, &[0.0], &OdeOptions::tol(self.tol))?;
        Ok(s.outputs[0].clone())
    }
}

/// γ_ε*A_ε at each point: (Dγ)⁻¹ applied to A_ε(γ_ε(x)), dense components.
pub fn pullback_along_flow(a: &EpsFamily, x: &EpsVectorField, eps: f64, points: &[Vec<f64>], tol: f64) -> Result<Vec<Vec<f64>>> {
    a.base().check(x.chart())?;
    let map = FlowMap::new(x, eps, tol);
    points
        .par_iter()
        .map(|p| {
            if eps == 0.0 {
                return a.values_at(0.0, p);
            }
            let (y, j) = map.apply_with_jacobian(p)?;
            let vals = a.values_at(eps, &y)?;
            Ok(transform_components(&invert_jacobian(&j)?, a.degree(), &vals))
        })
        .collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

/// Max over the grid of ‖γ_ε*A_ε − A_0‖ and ‖[[X_ε, A_ε]] + ∂_ε A_ε‖ at each
/// point. Points where the flow fails get an infinite residual.
pub fn check_triviality(a: &EpsFamily, x: &EpsVectorField, eps_grid: &[f64], points: &[Vec<f64>], tol: f64) -> Result<CheckReport> {
    a.base().check(x.chart())?;
    let residual_field = x.family().schouten(a)?.add(&a.d_eps()?)?.normalized();
    let flow_tol = (tol * 1e-3).max(1e-12);
    let rows: Vec<(f64, f64)> = points
        .par_iter()
        .map(|p| {
            let mut straight: f64 = 0.0;
            let mut homological: f64 = 0.0;
            let a0 = match a.values_at(0.0, p) {
                Ok(v) => v,
                Err(_) => return (f64::INFINITY, f64::INFINITY),
            };
            for &e in eps_grid {
                match residual_field.values_at(e, p) {
                    Ok(r) => homological = homological.max(r.iter().fold(0.0, |m, v| m.max(v.abs()))),
                    Err(_) => homological = f64::INFINITY,
                }
                match pullback_along_flow(a, x, e, std::slice::from_ref(p), flow_tol) {
                    Ok(v) => straight = straight.max(max_abs_diff(&v[0], &a0)),
                    Err(_) => straight = f64::INFINITY,
                }
            }
            (straight, homological)
        })
        .collect();
    let per_point: Vec<f64> = rows.iter().map(|(s, h)| s.max(*h)).collect();
    let straight = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let homological = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(CheckReport::new("triviality", eps_grid.to_vec(), per_point, tol)
        .with_param("points", points.len())
        .with_param("straightening_max", json!(straight))
        .with_param("homological_max", json!(homological))
        .with_param("flow_tol", json!(flow_tol)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multivector::Multivector;
    use crate::scalar::{parse_expr, Chart};

    #[test]
    fn straight_line_and_zero_flows() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let dx = EpsVectorField::frozen(&Multivector::basis(&c, &[0]).unwrap()).unwrap();
        let r = integrate_flow(&dx, &[0.3, -1.0], 0.7, 1e-10).unwrap();
        assert!((r.point[0] - 1.0).abs() < 1e-12 && (r.point[1] + 1.0).abs() < 1e-12);
        let zero = EpsVectorField::frozen(&Multivector::zero(&c, 1)).unwrap();
        assert_eq!(integrate_flow(&zero, &[0.3, -1.0], 0.5, 1e-10).unwrap().point, vec![0.3, -1.0]);
    }

    #[test]
    fn jacobians_agree() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let f = |s: &str| parse_expr(&c, s).unwrap();
        let x = EpsVectorField::frozen(&Multivector::vector(&c, vec![f("y"), f("-x + x^2/5")]).unwrap()).unwrap();
        let m = FlowMap::new(&x, 0.8, 1e-11);
        let (_, jv) = m.apply_with_jacobian(&[0.4, 0.1]).unwrap();
        let jf = m.jacobian_fd(&[0.4, 0.1]).unwrap();
        assert!((jv - jf).abs().max() < 1e-6);
        let back = m.apply_inverse(&m.apply(&[0.4, 0.1]).unwrap()).unwrap();
        assert!(max_abs_diff(&back, &[0.4, 0.1]) < 1e-9);
    }

    #[test]
    fn zero_deformation_is_trivial() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let a = EpsFamily::constant(&Multivector::basis(&c, &[0, 1]).unwrap());
        let x = EpsVectorField::frozen(&Multivector::zero(&c, 1)).unwrap();
        let r = check_triviality(&a, &x, &[0.1, -0.1], &[vec![0.5, 0.5]], 1e-12).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_residual, 0.0);
    }
}
