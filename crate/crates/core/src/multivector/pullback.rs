//! Pullback of multivectors by diffeomorphisms:
//! (γ*A)(x) = (Dγ(x))^{-1} applied slotwise to A(γ(x)).

use std::sync::Arc;

use nalgebra::DMatrix;

use super::{all_keys, indices_of, Multivector};
use crate::error::{Error, Result};
use crate::linalg::{self, FieldMatrix};
use crate::scalar::{fd_step, Chart, Point, ScalarField};

pub type PointMap = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync>;

#[derive(Clone)]
pub struct DiffeoMap {
    chart: Chart,
    forward: PointMap,
    inverse: Option<PointMap>,
    jacobian: Option<JacobianFn>,
}

impl DiffeoMap {
    pub fn new(chart: &Chart, forward: PointMap) -> DiffeoMap {
        DiffeoMap { chart: chart.clone(), forward, inverse: None, jacobian: None }
    }

    pub fn identity(chart: &Chart) -> DiffeoMap {
        let n = chart.dim();
        DiffeoMap::new(chart, Arc::new(|x: &[f64]| Ok(x.to_vec())))
            .with_inverse(Arc::new(|x: &[f64]| Ok(x.to_vec())))
            .with_jacobian(Arc::new(move |_: &[f64]| Ok(DMatrix::identity(n, n))))
    }

    pub fn with_inverse(mut self, inv: PointMap) -> DiffeoMap {
        self.inverse = Some(inv);
        self
    }

    pub fn with_jacobian(mut self, j: JacobianFn) -> DiffeoMap {
        self.jacobian = Some(j);
        self
    }

    /// Map given by exact component fields; the Jacobian is exact.
    pub fn from_fields(chart: &Chart, forward: Vec<ScalarField>, inverse: Option<Vec<ScalarField>>) -> Result<DiffeoMap> {
        let n = chart.dim();
        if forward.len() != n || inverse.as_ref().is_some_and(|v| v.len() != n) {
            return Err(Error::Invalid("map needs one component per coordinate".into()));
        }
        let jac: FieldMatrix = forward.iter().map(|f| f.gradient()).collect::<Result<_>>()?;
        let fwd = forward.clone();
        let mut m = DiffeoMap::new(chart, Arc::new(move |x: &[f64]| fwd.iter().map(|f| f.eval(x)).collect()))
            .with_jacobian(Arc::new(move |x: &[f64]| linalg::eval_matrix(&jac, x)));
        if let Some(inv) = inverse {
            m = m.with_inverse(Arc::new(move |x: &[f64]| inv.iter().map(|f| f.eval(x)).collect()));
        }
        Ok(m)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        (self.forward)(x)
    }

    pub fn apply_inverse(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        self.inverse.as_ref().map(|f| f(x))
    }

    /// Exact Jacobian when available, else central differences.
    pub fn jacobian_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        if let Some(j) = &self.jacobian {
            return j(x);
        }
        let n = self.chart.dim();
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            let h = fd_step(x[k]);
            let mut p = x.to_vec();
            p[k] = x[k] + h;
            let fp = self.apply(&p)?;
            p[k] = x[k] - h;
            let fm = self.apply(&p)?;
            for i in 0..n {
                m[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        Ok(m)
    }
}

/// Inverse of a Jacobian, rejecting numerically singular matrices.
pub fn invert_jacobian(j: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sv = j.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if !(min > 1e-12 * max.max(1.0)) {
        return Err(Error::JacobianSingular);
    }
    j.clone().try_inverse().ok_or(Error::JacobianSingular)
}

/// Transports dense component values (ordered as `all_keys(n, p)`) by a
/// linear map acting on each slot.
pub fn transform_components(m: &DMatrix<f64>, p: usize, values: &[f64]) -> Vec<f64> {
    let n = m.nrows();
    let keys = all_keys(n, p);
    if p == 0 {
        return values.to_vec();
    }
    keys.iter()
        .map(|ki| {
            let rows = indices_of(*ki);
            keys.iter()
                .zip(values)
                .filter(|(_, v)| **v != 0.0)
                .map(|(kk, v)| {
                    let cols = indices_of(*kk);
                    let sub = DMatrix::from_fn(p, p, |a, b| m[(rows[a], cols[b])]);
                    sub.determinant() * v
                })
                .sum()
        })
        .collect()
}

/// Components of γ*A at `x`, ordered as [`all_keys`].
pub fn pullback_at(a: &Multivector, map: &DiffeoMap, x: &Point) -> Result<Vec<f64>> {
    a.chart().check(map.chart())?;
    a.chart().check(&x.chart)?;
    let y = map.apply(&x.coords)?;
    if let Some(back) = map.apply_inverse(&y) {
        let back = back?;
        let scale = 1.0 + x.coords.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if back.iter().zip(&x.coords).any(|(u, v)| (u - v).abs() > 1e-8 * scale) {
            return Err(Error::MapNotInvertibleNear(x.coords.clone()));
        }
    }
    let j = map.jacobian_at(&x.coords)?;
    let jinv = invert_jacobian(&j)?;
    let vals = a.values_at(&y)?;
    Ok(transform_components(&jinv, a.degree(), &vals))
}

/// Exact pullback for a map with exact forward and inverse components.
pub fn pullback_exact(a: &Multivector, forward: &[ScalarField], inverse: &[ScalarField]) -> Result<Multivector> {
    let chart = a.chart().clone();
    let n = chart.dim();
    let dg: FieldMatrix = inverse.iter().map(|g| g.gradient()).collect::<Result<_>>()?;
    let m: FieldMatrix = dg
        .iter()
        .map(|row| row.iter().map(|f| f.compose(forward)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let p = a.degree();
    let mut entries = Vec::new();
    for ki in all_keys(n, p) {
        let rows = indices_of(ki);
        let mut acc = ScalarField::zero(&chart);
        for (idx, c) in a.components() {
            let c = c.compose(forward)?;
            let d = linalg::det(&linalg::submatrix(&m, &rows, &idx), &chart)?;
            if d.is_zero() {
                continue;
            }
            acc = acc.add(&d.mul(&c)?)?;
        }
        entries.push((rows, acc));
    }
    Multivector::from_components(&chart, p, entries)
}
