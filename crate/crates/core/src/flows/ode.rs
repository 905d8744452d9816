//! Dormand–Prince 5(4) with step-size control, exact landing on requested
//! output times and cubic Hermite dense output.

use serde::Serialize;

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

#[derive(Clone, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: Option<f64>,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn tol(tol: f64) -> OdeOptions {
        OdeOptions { rtol: tol, atol: tol, h0: None, max_steps: 200_000 }
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest accepted scaled error estimate (≤ 1 by construction).
    pub max_error_estimate: f64,
}

/// Accepted steps, for dense output.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
}

impl Trajectory {
    /// Cubic Hermite interpolation between accepted steps.
    pub fn at(&self, t: f64) -> Option<Vec<f64>> {
        let n = self.t.len();
        if n == 0 {
            return None;
        }
        let (lo, hi) = (self.t[0].min(self.t[n - 1]), self.t[0].max(self.t[n - 1]));
        if t < lo || t > hi {
            return None;
        }
        let fwd = self.t[n - 1] >= self.t[0];
        let i = (1..n).find(|&i| if fwd { self.t[i] >= t } else { self.t[i] <= t }).unwrap_or(n - 1).max(1);
        let (t0, t1) = (self.t[i - 1], self.t[i]);
        let h = t1 - t0;
        if h == 0.0 {
            return Some(self.x[i].clone());
        }
        let s = (t - t0) / h;
        let (h00, h10, h01, h11) = (2.0 * s.powi(3) - 3.0 * s * s + 1.0, s.powi(3) - 2.0 * s * s + s, -2.0 * s.powi(3) + 3.0 * s * s, s.powi(3) - s * s);
        Some(
            (0..self.x[i].len())
                .map(|k| h00 * self.x[i - 1][k] + h10 * h * self.f[i - 1][k] + h01 * self.x[i][k] + h11 * h * self.f[i][k])
                .collect(),
        )
    }
}

#[derive(Clone, Debug)]
pub struct OdeSolution {
    /// States at the requested output times, in order.
    pub outputs: Vec<Vec<f64>>,
    pub trajectory: Trajectory,
    pub stats: StepStats,
}

fn norm(err: &[f64], x: &[f64], xn: &[f64], o: &OdeOptions) -> f64 {
    let s: f64 = err
        .iter()
        .zip(x.iter().zip(xn))
        .map(|(e, (a, b))| {
            let sc = o.atol + o.rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (s / err.len().max(1) as f64).sqrt()
}

fn domain_like(e: &Error) -> bool {
    matches!(e, Error::DomainExit(_) | Error::PoleAtPoint(_))
}

/// Integrates x' = f(t, x) from t0 through every time in `outputs`, which
/// must be monotone in one direction away from t0.
pub fn solve<F>(mut f: F, t0: f64, x0: &[f64], outputs: &[f64], o: &OdeOptions) -> Result<OdeSolution>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    let n = x0.len();
    let mut stats = StepStats::default();
    let mut t = t0;
    let mut x = x0.to_vec();
    let mut fx = f(t, &x).map_err(|e| if domain_like(&e) { Error::DomainExit(t) } else { e })?;
    stats.evaluations += 1;
    let mut traj = Trajectory { t: vec![t], x: vec![x.clone()], f: vec![fx.clone()] };
    let mut out = Vec::with_capacity(outputs.len());
    let span = outputs.iter().map(|s| (s - t0).abs()).fold(0.0, f64::max);
    let mut h = o.h0.unwrap_or_else(|| (0.01 * span).max(1e-6));
    let mut k = vec![vec![0.0; n]; 7];
    for &target in outputs {
        let dir = if target >= t { 1.0 } else { -1.0 };
        while (target - t).abs() > 0.0 {
            if stats.accepted + stats.rejected > o.max_steps {
                return Err(Error::StepSizeUnderflow(h));
            }
            let h_min = 1e-14 * t.abs().max(1.0);
            let remaining = (target - t).abs();
            let mut step = h.abs().min(remaining);
            // Avoid a sliver of a last step.
            if remaining - step < 1e-3 * step {
                step = remaining;
            }
            let hs = dir * step;
            k[0].clone_from(&fx);
            let mut failed = None;
            for s in 1..7 {
                let xs: Vec<f64> = (0..n).map(|i| x[i] + hs * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>()).collect();
                stats.evaluations += 1;
                match f(t + C[s] * hs, &xs) {
                    Ok(v) => k[s] = v,
                    Err(e) if domain_like(&e) => {
                        failed = Some(e);
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if failed.is_some() {
                stats.rejected += 1;
                h = step * 0.25;
                if h < h_min {
                    return Err(Error::DomainExit(t));
                }
                continue;
            }
            let xn: Vec<f64> = (0..n).map(|i| x[i] + hs * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>()).collect();
            let err: Vec<f64> = (0..n).map(|i| hs * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>()).collect();
            let en = norm(&err, &x, &xn, o);
            if !en.is_finite() {
                stats.rejected += 1;
                h = step * 0.25;
                if h < h_min {
                    return Err(Error::StepSizeUnderflow(h));
                }
                continue;
            }
            let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            if en <= 1.0 {
                stats.accepted += 1;
                stats.max_error_estimate = stats.max_error_estimate.max(en);
                t = if step == remaining { target } else { t + hs };
                x = xn;
                fx = k[6].clone();
                traj.t.push(t);
                traj.x.push(x.clone());
                traj.f.push(fx.clone());
                h = step * factor;
            } else {
                stats.rejected += 1;
                h = step * factor.min(1.0);
                if h < h_min {
                    return Err(Error::StepSizeUnderflow(h));
                }
            }
        }
        out.push(x.clone());
    }
    Ok(OdeSolution { outputs: out, trajectory: traj, stats })
}

/// One fifth-order step per mesh interval, without error control. Used to
/// difference flows of nearby points on a shared mesh.
pub fn solve_on_mesh<F>(mut f: F, mesh: &[f64], x0: &[f64]) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    for w in mesh.windows(2) {
        let (t, hs) = (w[0], w[1] - w[0]);
        for s in 0..7 {
            let xs: Vec<f64> = (0..n).map(|i| x[i] + hs * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>()).collect();
            k[s] = f(t + C[s] * hs, &xs)?;
        }
        x = (0..n).map(|i| x[i] + hs * (0..6).map(|j| A[6][j] * k[j][i]).sum::<f64>()).collect();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_and_oscillator() {
        let s = solve(|_, x| Ok(vec![x[0]]), 0.0, &[1.0], &[0.5, 1.0], &OdeOptions::tol(1e-10)).unwrap();
        assert!((s.outputs[1][0] - 1f64.exp()).abs() < 1e-8);
        assert!((s.outputs[0][0] - 0.5f64.exp()).abs() < 1e-8);
        let mid = s.trajectory.at(0.73).unwrap();
        assert!((mid[0] - 0.73f64.exp()).abs() < 1e-6);
        let back = solve(|_, x| Ok(vec![x[1], -x[0]]), 0.0, &[0.0, 1.0], &[-2.0], &OdeOptions::tol(1e-10)).unwrap();
        assert!((back.outputs[0][0] - (-2f64).sin()).abs() < 1e-8);
    }

    #[test]
    fn blow_up_is_reported() {
        // x' = x², x(0) = 1 blows up at t = 1.
        let r = solve(
            |t, x| if x[0].abs() > 1e8 { Err(Error::DomainExit(t)) } else { Ok(vec![x[0] * x[0]]) },
            0.0,
            &[1.0],
            &[2.0],
            &OdeOptions::tol(1e-8),
        );
        assert!(matches!(r, Err(Error::DomainExit(_)) | Err(Error::StepSizeUnderflow(_))));
    }
}
