//! Order test for truncated generators: for B_ε = [[A_ε, C]] and the flow
//! γ_ε of X_0 + … + ε^{k−1}/(k−1)!·X_{k−1}, the residual
//! ‖γ_ε*B_ε − [[A_0, C_ε]]‖ is O(ε^{k+1}) when C_ε is the order-k Lie
//! transform of C.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::EpsFamily;
use crate::flows::field::EpsVectorField;
use crate::flows::flow::pullback_along_flow;
use crate::homological::{lie_transform, DeformationSeries, GeneratorSeries};
use crate::multivector::Multivector;

#[derive(Clone, Debug, Serialize)]
pub struct OrderResult {
    pub order: usize,
    pub eps: Vec<f64>,
    pub residuals: Vec<f64>,
    pub slope: f64,
}

/// Least-squares slope of log r against log ε.
pub fn loglog_slope(eps: &[f64], r: &[f64]) -> f64 {
    let xs: Vec<f64> = eps.iter().map(|e| e.abs().ln()).collect();
    let ys: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn order_test(a: &EpsFamily, gens: &GeneratorSeries, c: &Multivector, eps_grid: &[f64], points: &[Vec<f64>], tol: f64) -> Result<OrderResult> {
    let k = gens.len();
    if k == 0 {
        return Err(Error::InsufficientSeriesOrder { need: 1, have: 0 });
    }
    let a0 = a.at(&crate::scalar::q(0))?;
    let b = a.schouten(&EpsFamily::constant(c))?.normalized();
    let cs = lie_transform(gens, c, k)?;
    let target = DeformationSeries::new(cs.coeffs().iter().map(|ci| a0.schouten(ci).map(|m| m.normalized())).collect::<Result<Vec<_>>>()?)?;
    let x = EpsVectorField::from_series(gens.clone())?;
    let residuals = eps_grid
        .par_iter()
        .map(|&e| {
            let pulled = pullback_along_flow(&b, &x, e, points, tol)?;
            let mut worst: f64 = 0.0;
            for (p, v) in points.iter().zip(&pulled) {
                let t = target.values_at(e, p)?;
                worst = worst.max(v.iter().zip(&t).map(|(u, w)| (u - w).abs()).fold(0.0, f64::max));
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    let slope = loglog_slope(eps_grid, &residuals);
    Ok(OrderResult { order: k, eps: eps_grid.to_vec(), residuals, slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let e = [0.1, 0.05, 0.025];
        let r: Vec<f64> = e.iter().map(|x: &f64| 3.0 * x.powi(3)).collect();
        assert!((loglog_slope(&e, &r) - 3.0).abs() < 1e-12);
    }
}
