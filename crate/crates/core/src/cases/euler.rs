//! The six-dimensional Euler family Ψ_{η,ε} = Ψ_{η,0} + εΦ_η on ℝ⁶(y, z).
//!
//! Ψ_{η,ε}(df, dg) = (η(y)×∇_y f + η(z)×∇_z f)·∇_y g
//!                 + (η(z)×∇_y f + ε η(y)×∇_z f)·∇_z g,
//! with Φ_η(df, dg) = (η(y)×∇_z f)·∇_z g.
//!
//! The explicit generators are available in two readings. `Printed` is the
//! closed form exactly as usually stated. It solves [[X, Ψ_ε]] = +Φ, so its
//! flow maps Ψ_{η,ε} to Ψ_{η,−ε}. `Resolved` flips the sign of the
//! generator. This is equivalent to ε ↦ −ε in the flow and in α, and it
//! satisfies [[X_ε, Ψ_ε]] = −∂_ε Ψ_ε.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::EpsFamily;
use crate::flows::{solve, EpsVectorField, OdeOptions};
use crate::homological::{kv_solve, recursive_rhs, DeformationSeries, FoliationData, GeneratorSeries};
use crate::multivector::Multivector;
use crate::poisson::PoissonTensor;
use crate::sampling::BoxSampler;
use crate::scalar::{q, qf, Chart, ScalarField, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Reading {
    Printed,
    Resolved,
}

impl Reading {
    fn sign(self) -> f64 {
        match self {
            Reading::Printed => 1.0,
            Reading::Resolved => -1.0,
        }
    }
}

/// The (η, ε) rows of the Lie-algebra table: so(4)*, e(3)*, so(2,2)*, l(3)*, so(3,1)*.
pub fn table_rows() -> Vec<(&'static str, [i64; 3], Q)> {
    vec![
        ("so(4)*", [1, 1, 1], q(1)),
        ("e(3)*", [1, 1, 1], q(0)),
        ("so(2,2)*", [1, 1, -1], q(1)),
        ("l(3)*", [1, 1, -1], q(0)),
        ("so(3,1)*", [1, 1, 1], q(-1)),
    ]
}

#[derive(Clone, Debug)]
pub struct EulerInstance {
    pub eta: [Q; 3],
    chart: Chart,
}

fn levi(a: usize, b: usize, c: usize) -> i64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

fn f64_of(v: &Q) -> f64 {
    num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

impl EulerInstance {
    pub fn new(eta: [Q; 3]) -> EulerInstance {
        EulerInstance { eta, chart: Chart::new(&["y1", "y2", "y3", "z1", "z2", "z3"]).unwrap() }
    }

    pub fn from_ints(eta: [i64; 3]) -> EulerInstance {
        EulerInstance::new(eta.map(q))
    }

    pub fn identity() -> EulerInstance {
        EulerInstance::from_ints([1, 1, 1])
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    fn eta_f(&self) -> [f64; 3] {
        [f64_of(&self.eta[0]), f64_of(&self.eta[1]), f64_of(&self.eta[2])]
    }

    fn y(&self, i: usize) -> ScalarField {
        ScalarField::coord(&self.chart, i)
    }

    fn z(&self, i: usize) -> ScalarField {
        ScalarField::coord(&self.chart, 3 + i)
    }

    /// Components of η(y) (or η(z)) as fields.
    fn eta_of(&self, zpart: bool) -> Vec<ScalarField> {
        (0..3).map(|i| (if zpart { self.z(i) } else { self.y(i) }).scale(&self.eta[i])).collect()
    }

    fn bivector(&self, eps: &Q, with_base: bool) -> Multivector {
        let ey = self.eta_of(false);
        let ez = self.eta_of(true);
        let mut entries = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let s = levi(a, b, c);
                    if s == 0 {
                        continue;
                    }
                    let s = q(s);
                    if with_base {
                        if a < b {
                            entries.push((vec![a, b], ey[c].scale(&s)));
                        }
                        entries.push((vec![a, 3 + b], ez[c].scale(&s)));
                    }
                    if a < b {
                        entries.push((vec![3 + a, 3 + b], ey[c].scale(&(s * eps.clone()))));
                    }
                }
            }
        }
        Multivector::from_components(&self.chart, 2, entries).unwrap().normalized()
    }

    /// Ψ_{η,ε}, verified exactly.
    pub fn tensor(&self, eps: &Q) -> Result<PoissonTensor> {
        let psi = self.bivector(eps, true);
        PoissonTensor::verify(psi, &[])
    }

    pub fn phi(&self) -> Multivector {
        self.bivector(&q(1), false)
    }

    /// Ψ_{η,0} + εΦ_η as a family.
    pub fn family(&self) -> Result<EpsFamily> {
        let ext = self.chart.extended(crate::family::EPS_NAME);
        let eps = ScalarField::coord(&ext, 6);
        let f = self.bivector(&q(0), true).lift(&ext).add(&self.phi().lift(&ext).scale_field(&eps)?)?;
        EpsFamily::new(&self.chart, f)
    }

    /// k¹ = η(y)·z and k² = ½ε η(y)·y + ½ η(z)·z.
    pub fn casimirs(&self, eps: &Q) -> Result<(ScalarField, ScalarField)> {
        let ey = self.eta_of(false);
        let ez = self.eta_of(true);
        let mut k1 = ScalarField::zero(&self.chart);
        let mut yy = ScalarField::zero(&self.chart);
        let mut zz = ScalarField::zero(&self.chart);
        for i in 0..3 {
            k1 = k1.add(&ey[i].mul(&self.z(i))?)?;
            yy = yy.add(&ey[i].mul(&self.y(i))?)?;
            zz = zz.add(&ez[i].mul(&self.z(i))?)?;
        }
        let k2 = yy.scale(&(eps.clone() * qf(1, 2))).add(&zz.scale(&qf(1, 2)))?;
        Ok((k1, k2))
    }

    /// The ε-family of Casimirs (k¹, k²_ε) on the extended chart.
    pub fn casimir_family(&self) -> Result<(EpsFamily, EpsFamily)> {
        let ext = self.chart.extended(crate::family::EPS_NAME);
        let eps = ScalarField::coord(&ext, 6);
        let (k1, k20) = self.casimirs(&q(0))?;
        let (_, k21) = self.casimirs(&q(1))?;
        let slope = k21.sub(&k20)?.lift(&ext);
        let k2 = k20.lift(&ext).add(&slope.mul(&eps)?)?;
        Ok((
            EpsFamily::new(&self.chart, Multivector::scalar(k1.lift(&ext)))?,
            EpsFamily::new(&self.chart, Multivector::scalar(k2))?,
        ))
    }

    /// η(y)×(z×y), the common direction of the explicit generators.
    fn direction(&self) -> Result<Vec<ScalarField>> {
        let ey = self.eta_of(false);
        let y: Vec<ScalarField> = (0..3).map(|i| self.y(i)).collect();
        let z: Vec<ScalarField> = (0..3).map(|i| self.z(i)).collect();
        let zy = cross_fields(&z, &y)?;
        cross_fields(&ey, &zy)
    }

    /// D = (η(y)×η(z))·(y×z).
    pub fn d_field(&self) -> Result<ScalarField> {
        let ey = self.eta_of(false);
        let ez = self.eta_of(true);
        let y: Vec<ScalarField> = (0..3).map(|i| self.y(i)).collect();
        let z: Vec<ScalarField> = (0..3).map(|i| self.z(i)).collect();
        dot_fields(&cross_fields(&ey, &ez)?, &cross_fields(&y, &z)?)
    }

    pub fn d_value(&self, x: &[f64]) -> f64 {
        let e = self.eta_f();
        let ey = [e[0] * x[0], e[1] * x[1], e[2] * x[2]];
        let ez = [e[0] * x[3], e[1] * x[4], e[2] * x[5]];
        dot(&cross(&ey, &ez), &cross(&x[..3], &x[3..]))
    }

    fn eta_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let e = self.eta_f();
        (0..3).map(|i| e[i] * a[i] * b[i]).sum()
    }

    /// The domain 𝒩 = {D ≠ 0}.
    pub fn in_n(&self, x: &[f64]) -> bool {
        self.d_value(x) != 0.0
    }

    /// The domain where the first-order generator is defined: η(z)·z ≠ 0.
    pub fn in_d(&self, x: &[f64]) -> bool {
        self.eta_dot(&x[3..], &x[3..]) != 0.0
    }

    /// The closed-form generator [η(y)·y / (2D)]·η(y)×(z×y)·∂_z, signed per reading.
    pub fn generator_field(&self, reading: Reading) -> Result<Multivector> {
        let ey = self.eta_of(false);
        let y: Vec<ScalarField> = (0..3).map(|i| self.y(i)).collect();
        let coeff = dot_fields(&ey, &y)?.div(&self.d_field()?.scale(&q(2)))?;
        let coeff = if reading == Reading::Resolved { coeff.neg() } else { coeff };
        let dir = self.direction()?;
        let mut comps = vec![ScalarField::zero(&self.chart); 3];
        for d in dir {
            comps.push(coeff.mul(&d)?.normalized());
        }
        Multivector::vector(&self.chart, comps)
    }

    /// X_ε as an ε-independent field restricted to 𝒩.
    pub fn generator(&self, reading: Reading) -> Result<EpsVectorField> {
        let me = self.clone();
        Ok(EpsVectorField::frozen(&self.generator_field(reading)?)?.with_domain(Arc::new(move |x| me.in_n(x))))
    }

    /// α² = 1 ± ε(η(y)·y)²/D (+ for the printed reading).
    pub fn alpha(&self, eps: f64, x: &[f64], reading: Reading) -> Result<f64> {
        let d = self.d_value(x);
        if d == 0.0 {
            return Err(Error::DenominatorZero);
        }
        let yy = self.eta_dot(&x[..3], &x[..3]);
        let rad = 1.0 + reading.sign() * eps * yy * yy / d;
        if rad <= 0.0 {
            return Err(Error::RadicandNonpositive(rad));
        }
        Ok(rad.sqrt())
    }

    /// γ_ε(y, z) = (y, αz + (1 − α)(η(y)·z / η(y)·y) y).
    pub fn flow(&self, eps: f64, x: &[f64], reading: Reading) -> Result<Vec<f64>> {
        let yy = self.eta_dot(&x[..3], &x[..3]);
        if yy == 0.0 {
            return Err(Error::DenominatorZero);
        }
        let a = self.alpha(eps, x, reading)?;
        let yz = self.eta_dot(&x[..3], &x[3..]);
        let mut out = x[..3].to_vec();
        for i in 0..3 {
            out.push(a * x[3 + i] + (1.0 - a) * yz / yy * x[i]);
        }
        Ok(out)
    }

    /// γ_ε⁻¹ in closed form. γ_ε keeps y and η(y)·z and scales both η(y)×η(z)
    /// and y×z by α, so D' = α²D = D ± εY² with Y = η(y)·y.
    pub fn inverse_flow(&self, eps: f64, x: &[f64], reading: Reading) -> Result<Vec<f64>> {
        let yy = self.eta_dot(&x[..3], &x[..3]);
        let dp = self.d_value(x);
        let d = dp - reading.sign() * eps * yy * yy;
        if yy == 0.0 || d == 0.0 {
            return Err(Error::DenominatorZero);
        }
        if dp / d <= 0.0 {
            return Err(Error::RadicandNonpositive(dp / d));
        }
        let a = (dp / d).sqrt();
        let yz = self.eta_dot(&x[..3], &x[3..]);
        let mut out = x[..3].to_vec();
        for i in 0..3 {
            out.push((x[3 + i] - (1.0 - a) * yz / yy * x[i]) / a);
        }
        Ok(out)
    }

    /// H_ε = H∘γ_ε, numeric.
    pub fn normal_form(&self, h: &ScalarField, eps: f64, reading: Reading) -> Result<ScalarField> {
        self.chart.check(h.chart())?;
        if eps == 0.0 {
            return Ok(h.clone());
        }
        let me = self.clone();
        let h = h.clone();
        Ok(ScalarField::from_fn(&self.chart, move |x| match me.flow(eps, x, reading) {
            Ok(y) => h.value(&y),
            Err(_) => f64::NAN,
        }))
    }

    /// [1/(2η(z)·z)]·η(y)×(z×y)·∂_z, signed per reading.
    pub fn first_order_generator(&self, reading: Reading) -> Result<Multivector> {
        let ez = self.eta_of(true);
        let z: Vec<ScalarField> = (0..3).map(|i| self.z(i)).collect();
        let mut coeff = ScalarField::int(&self.chart, 1).div(&dot_fields(&ez, &z)?.scale(&q(2)))?;
        if reading == Reading::Resolved {
            coeff = coeff.neg();
        }
        let mut comps = vec![ScalarField::zero(&self.chart); 3];
        for d in self.direction()? {
            comps.push(coeff.mul(&d)?.normalized());
        }
        Multivector::vector(&self.chart, comps)
    }

    /// The foliation of Ψ_{η,0}: Casimirs k¹, k², duals V₁ = z·∂_y/(η(z)·z)
    /// and V₂ = η(y)×(z×y)·∂_z/D, leaf coordinates (y1, y2, y3, z1) and the
    /// retraction P(y, z) = ((η(y)·z / η(z)·z) z, z).
    pub fn foliation(&self) -> Result<FoliationData> {
        let psi = self.tensor(&q(0))?;
        let (k1, k2) = self.casimirs(&q(0))?;
        let ez = self.eta_of(true);
        let z: Vec<ScalarField> = (0..3).map(|i| self.z(i)).collect();
        let zz = dot_fields(&ez, &z)?;
        let mut v1 = Vec::new();
        for zi in &z {
            v1.push(zi.div(&zz)?.normalized());
        }
        v1.extend(vec![ScalarField::zero(&self.chart); 3]);
        let d = self.d_field()?;
        let mut v2 = vec![ScalarField::zero(&self.chart); 3];
        for c in self.direction()? {
            v2.push(c.div(&d)?.normalized());
        }
        let duals = vec![Multivector::vector(&self.chart, v1)?, Multivector::vector(&self.chart, v2)?];
        let ratio = k1.div(&zz)?;
        let mut p = Vec::new();
        for zi in &z {
            p.push(ratio.mul(zi)?.normalized());
        }
        p.extend(z.iter().cloned());
        FoliationData::new(psi, vec![k1, k2], duals, vec![0, 1, 2, 3])?.with_retraction(p)
    }
}

impl EulerInstance {
    /// Points of the box [−1.5, 1.5]⁶ well inside 𝒩 ∩ 𝒟: |D|, |η(y)·y| and
    /// |η(z)·z| at least 0.1, and radicand ≥ 0.1 for both readings at every
    /// |ε| ≤ eps_max.
    pub fn sample_points(&self, seed: u64, count: usize, eps_max: f64) -> Result<Vec<Vec<f64>>> {
        self.sample_points_with_margin(seed, count, eps_max, 0.1)
    }

    /// As [`sample_points`](Self::sample_points) with `margin` in place of
    /// 0.1 for the three denominators.
    pub fn sample_points_with_margin(&self, seed: u64, count: usize, eps_max: f64, margin: f64) -> Result<Vec<Vec<f64>>> {
        let me = self.clone();
        BoxSampler::cube(seed, 6, 1.5).take(count, move |x| me.well_inside(x, eps_max, margin))
    }

    pub fn well_inside(&self, x: &[f64], eps_max: f64, margin: f64) -> bool {
        let d = self.d_value(x);
        let yy = self.eta_dot(&x[..3], &x[..3]);
        let zz = self.eta_dot(&x[3..], &x[3..]);
        if d.abs() < margin || yy.abs() < margin || zz.abs() < margin {
            return false;
        }
        1.0 - eps_max * yy * yy / d.abs() >= 0.1
    }

    /// Whether the normal-form trajectory from x0 stays well inside the
    /// domain for t ∈ [0, t_end], tested on γ_ε⁻¹ of every solver step of the
    /// perturbed trajectory from γ_ε(x0). For indefinite η the singular set
    /// crosses the sampling box and some trajectories run into it.
    pub fn trajectory_well_inside(&self, h: &ScalarField, eps: f64, x0: &[f64], t_end: f64, margin: f64) -> bool {
        let Ok(start) = self.flow(eps, x0, Reading::Resolved) else { return false };
        let Ok(xh) = self.hamiltonian_family(h) else { return false };
        match solve(|_, x| xh.values_at(eps, x), 0.0, &start, &[t_end], &OdeOptions::tol(1e-8)) {
            Ok(s) => {
                // Steps are coarse, so also require that no denominator changes
                // sign between them.
                let signs = |y: &[f64]| [self.d_value(y), self.eta_dot(&y[..3], &y[..3]), self.eta_dot(&y[3..], &y[3..])].map(f64::signum);
                let first = signs(x0);
                s.trajectory.x.iter().all(|p| match self.inverse_flow(eps, p, Reading::Resolved) {
                    Ok(y) => self.well_inside(&y, eps, margin) && signs(&y) == first,
                    Err(_) => false,
                })
            }
            Err(_) => false,
        }
    }

    /// Sample points whose unit-time trajectories under `h` stay inside the domain.
    pub fn trajectory_points(&self, h: &ScalarField, seed: u64, count: usize, eps: f64, t_end: f64) -> Result<Vec<Vec<f64>>> {
        let me = self.clone();
        let h = h.clone();
        BoxSampler::cube(seed, 6, 1.5).take(count, move |x| me.well_inside(x, eps, 0.1) && me.trajectory_well_inside(&h, eps, x, t_end, 0.1))
    }

    /// X_H = [[Ψ_{η,ε}, H]] as an ε-family: the perturbed equations of motion.
    pub fn hamiltonian_family(&self, h: &ScalarField) -> Result<EpsFamily> {
        self.chart.check(h.chart())?;
        let fam = self.family()?;
        let hf = EpsFamily::constant(&Multivector::scalar(h.clone()));
        Ok(fam.schouten(&hf)?.normalized())
    }

    /// Velocity of the unperturbed system with the transformed Hamiltonian
    /// H∘γ_ε: X^b = Σ_a ∂_a(H∘γ_ε) Ψ_{η,0}^{ab}, with ∇(H∘γ_ε) = Dγ_εᵀ ∇H(γ_ε)
    /// and Dγ_ε by central differences of the closed form.
    pub fn normal_form_velocity(&self, h: &ScalarField, eps: f64, x: &[f64], reading: Reading) -> Result<Vec<f64>> {
        let psi0 = self.bivector(&q(0), true);
        let gx = self.flow(eps, x, reading).map_err(|_| Error::DomainExit(eps))?;
        let grad_h = h.gradient()?.iter().map(|g| g.eval(&gx)).collect::<Result<Vec<_>>>()?;
        let mut grad = [0.0; 6];
        for j in 0..6 {
            let step = crate::scalar::fd_step(x[j]);
            let (mut a, mut b) = (x.to_vec(), x.to_vec());
            a[j] += step;
            b[j] -= step;
            let (fa, fb) = (self.flow(eps, &a, reading)?, self.flow(eps, &b, reading)?);
            grad[j] = (0..6).map(|i| grad_h[i] * (fa[i] - fb[i]) / (2.0 * step)).sum();
        }
        let m = psi0.matrix_at(x)?;
        Ok((0..6).map(|b| (0..6).map(|a| grad[a] * m[(a, b)]).sum()).collect())
    }

    /// Max coordinate discrepancy over t ∈ {¼, ½, ¾, 1}·t_end between the
    /// perturbed trajectory from γ_ε(x0) and the image under γ_ε of the
    /// normal-form trajectory from x0.
    pub fn normal_form_discrepancy(&self, h: &ScalarField, eps: f64, x0: &[f64], t_end: f64, tol: f64, reading: Reading) -> Result<f64> {
        let xh = self.hamiltonian_family(h)?;
        let times: Vec<f64> = (1..=4).map(|i| t_end * i as f64 / 4.0).collect();
        let opts = OdeOptions::tol(tol);
        let start = self.flow(eps, x0, reading)?;
        let pert = solve(|_, x| xh.values_at(eps, x), 0.0, &start, &times, &opts)?;
        let nf = solve(|_, x| self.normal_form_velocity(h, eps, x, reading), 0.0, x0, &times, &opts)?;
        let mut worst: f64 = 0.0;
        for (p, y) in pert.outputs.iter().zip(&nf.outputs) {
            let g = self.flow(eps, y, reading)?;
            worst = worst.max(p.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
        Ok(worst)
    }
}

impl EulerInstance {
    /// Ψ_{η,0} + εΦ_η as a Taylor series (A_0, A_1, A_2 = 0).
    pub fn series(&self) -> Result<DeformationSeries> {
        DeformationSeries::new(vec![self.bivector(&q(0), true), self.phi(), Multivector::zero(&self.chart, 2)])
    }

    /// X_0, …, X_{k−1} of the recursive equations: X_0 is the closed-form
    /// first-order generator (resolved reading), later terms come from
    /// kv_solve on the foliation of Ψ_{η,0}.
    pub fn recursive_generators(&self, k: usize) -> Result<GeneratorSeries> {
        let mut gens = GeneratorSeries::new(&self.chart, vec![])?;
        if k == 0 {
            return Ok(gens);
        }
        gens.push(self.first_order_generator(Reading::Resolved)?)?;
        if k == 1 {
            return Ok(gens);
        }
        let fol = self.foliation()?;
        let mut series = self.series()?;
        for j in 1..k {
            while series.order() < j + 1 {
                let mut c = series.coeffs().to_vec();
                c.push(Multivector::zero(&self.chart, 2));
                series = DeformationSeries::new(c)?;
            }
            let rhs = recursive_rhs(j, &series, &gens)?;
            gens.push(kv_solve(&fol, &rhs)?.normalized())?;
        }
        Ok(gens)
    }
}

fn cross_fields(a: &[ScalarField], b: &[ScalarField]) -> Result<Vec<ScalarField>> {
    Ok(vec![
        a[1].mul(&b[2])?.sub(&a[2].mul(&b[1])?)?,
        a[2].mul(&b[0])?.sub(&a[0].mul(&b[2])?)?,
        a[0].mul(&b[1])?.sub(&a[1].mul(&b[0])?)?,
    ])
}

fn dot_fields(a: &[ScalarField], b: &[ScalarField]) -> Result<ScalarField> {
    let mut s = ScalarField::zero(a[0].chart());
    for (u, v) in a.iter().zip(b) {
        s = s.add(&u.mul(v)?)?;
    }
    Ok(s)
}
