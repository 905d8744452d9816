//! Named check suites. Every check produces one or more [`CheckReport`]s;
//! mathematical failures become failing reports, never process errors.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use schouten_core::cases::{table_rows, DiracInstance, EulerInstance, Reading};
use schouten_core::convention::{run_axiom_suite, AxiomConfig};
use schouten_core::error::{Error, Result};
use schouten_core::family::EpsFamily;
use schouten_core::flows::{check_triviality, integrate_flow, order_test, solve, EpsVectorField, OdeOptions};
use schouten_core::homological::{kv_solve, FoliationData, GeneratorSeries};
use schouten_core::multivector::Multivector;
use schouten_core::poisson::{is_casimir, is_poisson_vf, PoissonTensor};
use schouten_core::random;
use schouten_core::report::CheckReport;
use schouten_core::sampling::BoxSampler;
use schouten_core::scalar::{parse_expr, q, Chart, ScalarField, Q};

use crate::problem::Problem;

/// A deferred check: name plus the work that produces its reports.
pub struct Check {
    pub name: String,
    run: Box<dyn Fn() -> Result<Vec<CheckReport>> + Send + Sync>,
}

impl Check {
    pub fn new(name: &str, run: impl Fn() -> Result<Vec<CheckReport>> + Send + Sync + 'static) -> Check {
        Check { name: name.to_string(), run: Box::new(run) }
    }

    /// Runs the check; an error becomes a failing report under the check's name.
    pub fn execute(&self) -> Vec<CheckReport> {
        let t = Instant::now();
        let mut out = match (self.run)() {
            Ok(r) => r,
            Err(e) => vec![CheckReport::exact(&self.name, false, f64::INFINITY).fail(e.to_string())],
        };
        let dt = t.elapsed().as_secs_f64();
        for r in &mut out {
            if r.wall_time == 0.0 {
                r.wall_time = dt;
            }
        }
        out
    }
}

/// Exact rational from a decimal string such as "0.1" or "-1".
pub fn rational(s: &str) -> Result<Q> {
    parse_expr(&Chart::new(&["_"])?, s)?
        .constant_value()
        .ok_or_else(|| Error::Invalid(format!("`{s}` is not a number")))
}

/// The shortest decimal of an f64, read exactly.
pub fn rational_of(v: f64) -> Result<Q> {
    rational(&format!("{v}"))
}

fn exact_zero(check: &str, m: &Multivector) -> CheckReport {
    let z = m.normalized();
    match z.is_exact() {
        true => CheckReport::exact(check, z.is_zero(), z.len() as f64),
        false => CheckReport::exact(check, false, f64::NAN).fail("residual is not exact"),
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[derive(Clone, Debug)]
pub struct AxiomArgs {
    pub seed: u64,
    pub trials: usize,
    pub dim: Option<usize>,
}

pub fn axiom_checks(a: &AxiomArgs) -> Vec<Check> {
    let a = a.clone();
    vec![Check::new("axioms", move || {
        let dims = a.dim.map_or((3, 6), |d| (d, d));
        let cfg = AxiomConfig { seed: a.seed, trials: a.trials, dims, ..Default::default() };
        let r = run_axiom_suite(&cfg)?;
        let mut out = Vec::new();
        for t in r.tallies.iter().filter(|t| t.adopted) {
            out.push(
                CheckReport::exact(&format!("axioms/{}", t.identity), t.failures == 0, t.failures as f64)
                    .with_param("variant", t.variant.clone())
                    .with_param("trials", t.trials),
            );
        }
        let rejected: Vec<String> = r.tallies.iter().filter(|t| !t.adopted).map(|t| format!("{}: {}/{} failed", t.variant, t.failures, t.trials)).collect();
        out.push(
            CheckReport::exact("axioms/rejected-variants-fail", r.rejected_fail(), 0.0)
                .with_param("variants", rejected)
                .with_param("multivectors", r.multivectors),
        );
        Ok(out)
    })]
}

// Poisson and homological checks on problem files.

fn poisson_report(name: &str, psi: &Multivector) -> Result<CheckReport> {
    let p = PoissonTensor::verify(psi.clone(), &[])?;
    Ok(CheckReport::exact(&format!("jacobi/{name}"), p.is_verified(), 0.0))
}

fn foliation_reports(fol: &FoliationData, seed: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let psi = fol.poisson();
    for (i, k) in fol.casimirs().iter().enumerate() {
        let r = is_casimir(psi, k, &[])?;
        out.push(CheckReport::exact(&format!("foliation/casimir-{i}"), r.holds, r.max_defect));
    }
    for (i, v) in fol.duals().iter().enumerate() {
        let r = is_poisson_vf(psi, v, &[])?;
        out.push(CheckReport::exact(&format!("foliation/dual-poisson-{i}"), r.holds, r.max_defect));
    }
    let pts = BoxSampler::cube(seed, fol.chart().dim(), 1.0).take(20, |_| true)?;
    let rep = fol.validate(&pts)?;
    out.push(
        CheckReport::new("foliation/duality", vec![], vec![rep.duality_max], 1e-10)
            .with_param("rank_ok", rep.rank_ok)
            .with_param("casimir_max", json!(rep.casimir_max)),
    );
    Ok(out)
}

pub fn problem_poisson_checks(p: &Problem, seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    // The right-hand side of the homological equation is a cocycle, not a
    // Poisson tensor.
    for (name, t) in p.bivectors().filter(|(n, _)| p.raw.rhs.as_ref() != Some(*n)) {
        let (name, t) = (name.clone(), t.clone());
        checks.push(Check::new(&format!("jacobi/{name}"), move || Ok(vec![poisson_report(&name, &t)?])));
    }
    if p.raw.foliation.is_some() {
        let p = p.clone();
        checks.push(Check::new("foliation", move || match p.foliation()? {
            Some(f) => foliation_reports(&f, seed),
            None => Ok(vec![]),
        }));
    }
    checks
}

pub fn problem_homological_checks(p: &Problem) -> Vec<Check> {
    let p = p.clone();
    vec![Check::new("kv-solve", move || {
        let fol = p.foliation()?.ok_or_else(|| Error::Invalid("homological-solve needs a foliation".into()))?;
        let name = p.raw.rhs.clone().ok_or_else(|| Error::Invalid("homological-solve needs `rhs`".into()))?;
        let phi = p.tensor(&name)?.clone();
        let x = kv_solve(&fol, &phi)?;
        let res = x.schouten(fol.poisson().body())?.sub(&phi)?;
        Ok(vec![exact_zero("kv-solve", &res).with_param("rhs", name).with_param("solution", x.display())])
    })]
}

// Euler family.

#[derive(Clone, Debug)]
pub struct EulerArgs {
    pub eta: [Q; 3],
    pub eps: Q,
    pub hamiltonian: Option<String>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub eps_grid: Option<Vec<f64>>,
    pub samples: Option<usize>,
}

pub const EULER_CHECKS: [&str; 9] = ["casimir", "conservation", "first-order", "flow", "homological", "kv-gauge", "normal-form", "table", "triviality"];

fn default_hamiltonian(e: &EulerInstance) -> Result<ScalarField> {
    parse_expr(e.chart(), "(y1^2 + y2^2 + y3^2 + z1^2 + z2^2 + z3^2)/2")
}

/// ±ε, ±ε/2, ±ε/4, ±ε/8; the default grid for ε = 0.1.
fn symmetric_grid(eps: f64) -> Vec<f64> {
    [-1.0, -0.5, -0.25, -0.125, 0.125, 0.25, 0.5, 1.0].iter().map(|k| k * eps).collect()
}

pub fn euler_checks(a: &EulerArgs, names: &[String]) -> Result<Vec<Check>> {
    let e = EulerInstance::new(a.eta.clone());
    let eps_f = num_traits::ToPrimitive::to_f64(&a.eps).unwrap_or(0.1);
    let mut out = Vec::new();
    for n in names {
        let (e, a) = (e.clone(), a.clone());
        let check = match n.as_str() {
            "table" => Check::new("table", || {
                table_rows()
                    .into_iter()
                    .map(|(name, eta, eps)| {
                        let e = EulerInstance::from_ints(eta);
                        let psi = e.tensor(&eps)?;
                        let (k1, k2) = e.casimirs(&eps)?;
                        let ok = psi.is_verified() && is_casimir(&psi, &k1, &[])?.holds && is_casimir(&psi, &k2, &[])?.holds;
                        Ok(CheckReport::exact(&format!("table/{name}"), ok, 0.0).with_param("eta", eta.to_vec()).with_param("eps", eps.to_string()))
                    })
                    .collect()
            }),
            "casimir" => Check::new("casimir", move || {
                let psi = e.tensor(&a.eps)?;
                let (k1, k2) = e.casimirs(&a.eps)?;
                let (_, k2_fam) = e.casimir_family()?;
                let fam = e.family()?;
                // [[Φ, k_ε]] + [[Ψ_ε, ∂_ε k_ε]] = 0
                let ident = EpsFamily::constant(&e.phi()).schouten(&k2_fam)?.add(&fam.schouten(&k2_fam.d_eps()?)?)?;
                Ok(vec![
                    CheckReport::exact("casimir/jacobi", psi.is_verified(), 0.0).with_param("eps", a.eps.to_string()),
                    CheckReport::exact("casimir/k1", is_casimir(&psi, &k1, &[])?.holds, 0.0),
                    CheckReport::exact("casimir/k2", is_casimir(&psi, &k2, &[])?.holds, 0.0),
                    exact_zero("casimir/eps-derivative", ident.field()),
                ])
            }),
            "first-order" => Check::new("first-order", move || {
                let psi0 = e.tensor(&q(0))?;
                let x0 = e.first_order_generator(Reading::Resolved)?;
                let res = x0.schouten(psi0.body())?.add(&e.phi())?;
                let printed = e.first_order_generator(Reading::Printed)?.schouten(psi0.body())?.add(&e.phi())?.normalized();
                Ok(vec![exact_zero("first-order", &res).with_param("printed_sign_residual_zero", printed.is_zero())])
            }),
            "homological" => Check::new("homological", move || {
                let tol = a.tol.unwrap_or(1e-8);
                let grid = a.eps_grid.clone().unwrap_or_else(|| vec![-0.2, -0.1, 0.1, 0.2]);
                let emax = max_abs(&grid);
                let pts = e.sample_points(a.seed, a.samples.unwrap_or(100), emax)?;
                let x = e.generator(Reading::Resolved)?;
                let fam = e.family()?;
                let res = x.family().schouten(&fam)?.add(&fam.d_eps()?)?.normalized();
                let per: Vec<f64> = pts
                    .iter()
                    .map(|p| grid.iter().map(|&g| res.values_at(g, p).map(|v| max_abs(&v)).unwrap_or(f64::INFINITY)).fold(0.0, f64::max))
                    .collect();
                let printed = e.generator(Reading::Printed)?.family().schouten(&fam)?.add(&fam.d_eps()?)?.normalized();
                let printed_max = pts.iter().map(|p| printed.values_at(grid[0], p).map(|v| max_abs(&v)).unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
                Ok(vec![CheckReport::new("homological", grid, per, tol)
                    .with_param("reading", "resolved")
                    .with_param("exact_zero", res.field().is_zero())
                    .with_param("printed_reading_max", json!(printed_max))])
            }),
            "triviality" => Check::new("triviality", move || {
                let tol = a.tol.unwrap_or(1e-6);
                let grid = a.eps_grid.clone().unwrap_or_else(|| symmetric_grid(eps_f));
                let pts = e.sample_points(a.seed, a.samples.unwrap_or(50), max_abs(&grid))?;
                let r = check_triviality(&e.family()?, &e.generator(Reading::Resolved)?, &grid, &pts, tol)?;
                Ok(vec![r.with_param("reading", "resolved")])
            }),
            "flow" => Check::new("flow", move || {
                let tol = a.tol.unwrap_or(1e-6);
                let grid = a.eps_grid.clone().unwrap_or_else(|| symmetric_grid(eps_f.min(0.1)));
                let pts = e.sample_points(a.seed, a.samples.unwrap_or(50), max_abs(&grid))?;
                let mut out = Vec::new();
                for (reading, label) in [(Reading::Resolved, "resolved"), (Reading::Printed, "printed")] {
                    let x = e.generator(reading)?;
                    let per: Vec<f64> = pts
                        .iter()
                        .map(|p| {
                            grid.iter()
                                .map(|&g| {
                                    let num = integrate_flow(&x, p, g, 1e-9).map(|r| r.point);
                                    match (num, e.flow(g, p, reading)) {
                                        (Ok(u), Ok(v)) => u.iter().zip(&v).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max),
                                        _ => f64::INFINITY,
                                    }
                                })
                                .fold(0.0, f64::max)
                        })
                        .collect();
                    out.push(CheckReport::new(&format!("flow/{label}"), grid.clone(), per, tol).with_param("integrator_tol", json!(1e-9)));
                }
                // The worked point: η = identity, y = e₁, z = e₂, printed reading at ε = 0.21.
                let id = EulerInstance::identity();
                let p = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
                let alpha = id.alpha(0.21, &p, Reading::Printed)?;
                let img = id.flow(0.21, &p, Reading::Printed)?;
                let err = (alpha - 1.1).abs().max((img[4] - 1.1).abs()).max(max_abs(&[img[3], img[5]]));
                out.push(CheckReport::new("flow/spot", vec![0.21], vec![err], 1e-12).with_param("alpha", json!(alpha)));
                Ok(out)
            }),
            "normal-form" => Check::new("normal-form", move || {
                let tol = a.tol.unwrap_or(1e-5);
                let eps = a.eps_grid.as_deref().map_or(0.05, max_abs);
                let h = match &a.hamiltonian {
                    Some(s) => parse_expr(e.chart(), s)?,
                    None => default_hamiltonian(&e)?,
                };
                let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
                let hr = random::field(&mut rng, e.chart(), 2, 4);
                let n = a.samples.unwrap_or(5).min(10);
                let mut out = Vec::new();
                for (label, hh) in [("given", &h), ("random", &hr)] {
                    let pts = e.trajectory_points(hh, a.seed, n, eps, 1.0)?;
                    let res: Vec<Result<f64>> = pts.par_iter().map(|p| e.normal_form_discrepancy(hh, eps, p, 1.0, 1e-10, Reading::Resolved)).collect();
                    let per = res.iter().map(|r| *r.as_ref().unwrap_or(&f64::INFINITY)).collect();
                    let mut rep = CheckReport::new(&format!("normal-form/{label}"), vec![eps], per, tol)
                        .with_param("hamiltonian", hh.display())
                        .with_param("selection", "trajectory stays inside the domain");
                    if let Some(Err(err)) = res.iter().find(|r| r.is_err()) {
                        rep = rep.with_param("first_error", err.to_string());
                    }
                    out.push(rep);
                }
                let id = EulerInstance::identity();
                let nf = id.normal_form(&parse_expr(id.chart(), "(z1^2 + z2^2 + z3^2)/2")?, 0.21, Reading::Printed)?;
                let v = nf.value(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
                out.push(CheckReport::new("normal-form/spot", vec![0.21], vec![(v - 0.605).abs()], 1e-12).with_param("value", json!(v)));
                Ok(out)
            }),
            "conservation" => Check::new("conservation", move || {
                let tol = a.tol.unwrap_or(1e-6);
                let h = match &a.hamiltonian {
                    Some(s) => parse_expr(e.chart(), s)?,
                    None => default_hamiltonian(&e)?,
                };
                let (k1, k2) = e.casimirs(&a.eps)?;
                let xh = e.hamiltonian_family(&h)?;
                let pts = e.sample_points(a.seed, a.samples.unwrap_or(10).min(20), eps_f.abs())?;
                let per: Vec<f64> = pts
                    .iter()
                    .map(|p| {
                        let s = match solve(|_, x| xh.values_at(eps_f, x), 0.0, p, &[0.5, 1.0], &OdeOptions::tol(1e-9)) {
                            Ok(s) => s,
                            Err(_) => return f64::INFINITY,
                        };
                        s.outputs
                            .iter()
                            .flat_map(|q| [&h, &k1, &k2].map(|f| (f.value(q) - f.value(p)).abs()))
                            .fold(0.0, f64::max)
                    })
                    .collect();
                Ok(vec![CheckReport::new("conservation", vec![eps_f], per, tol).with_param("hamiltonian", h.display())])
            }),
            "kv-gauge" => Check::new("kv-gauge", move || {
                let fol = e.foliation()?;
                let x = kv_solve(&fol, &e.phi().neg())?;
                let x0 = e.first_order_generator(Reading::Resolved)?;
                let psi0 = fol.poisson().body();
                let res = x.schouten(psi0)?.add(&e.phi())?;
                let gauge = psi0.schouten(&x.sub(&x0)?)?;
                Ok(vec![exact_zero("kv-gauge/solution", &res), exact_zero("kv-gauge/poisson-difference", &gauge)])
            }),
            other => return Err(Error::UnknownKey(other.to_string())),
        };
        out.push(check);
    }
    Ok(out)
}

// Dirac demo.

#[derive(Clone, Debug)]
pub struct DiracArgs {
    pub dim: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    pub eps_grid: Option<Vec<f64>>,
    pub samples: Option<usize>,
}

pub const DIRAC_CHECKS: [&str; 5] = ["casimir", "generator", "normalization", "poisson-field", "rank"];

fn dirac_instance(dim: usize) -> Result<DiracInstance> {
    match dim {
        4 => Ok(DiracInstance::demo()),
        6 => Ok(DiracInstance::demo6()),
        d => Err(Error::Invalid(format!("no Dirac demo in dimension {d} (use 4 or 6)"))),
    }
}

fn dirac_grid(a: &DiracArgs) -> Vec<f64> {
    a.eps_grid.clone().unwrap_or_else(|| symmetric_grid(0.1))
}

fn dirac_points(inst: &DiracInstance, a: &DiracArgs, n: usize) -> Result<Vec<Vec<f64>>> {
    BoxSampler::cube(a.seed, inst.chart().dim(), 1.0).take(a.samples.unwrap_or(n), |_| true)
}

pub fn dirac_checks(a: &DiracArgs, names: &[String]) -> Result<Vec<Check>> {
    let inst = dirac_instance(a.dim)?;
    let mut out = Vec::new();
    for n in names {
        let (inst, a) = (inst.clone(), a.clone());
        let check = match n.as_str() {
            "casimir" => Check::new("casimir", move || {
                let mut out = Vec::new();
                for g in dirac_grid(&a) {
                    let e = rational_of(g)?;
                    let psi = inst.dirac_tensor(&e)?;
                    let mut ok = psi.is_verified();
                    for c in inst.constraints_at(&e)? {
                        ok &= is_casimir(&psi, &c, &[])?.holds;
                    }
                    out.push(CheckReport::exact(&format!("casimir/eps={g}"), ok, 0.0));
                }
                Ok(out)
            }),
            "poisson-field" => Check::new("poisson-field", move || {
                let fam = inst.dirac_family()?;
                let zs = inst.transversal_fields()?;
                let mut out = Vec::new();
                for (i, z) in zs.iter().enumerate() {
                    // [[Ψ^DIR_ε, Z_i]] = 0 identically in ε
                    let d = fam.schouten(z)?;
                    out.push(exact_zero(&format!("poisson-field/Z{}", i + 1), d.field()));
                }
                Ok(out)
            }),
            "normalization" => Check::new("normalization", move || {
                let tol = a.tol.unwrap_or(1e-10);
                let zs = inst.transversal_fields()?;
                let pts = dirac_points(&inst, &a, 50)?;
                let grid = dirac_grid(&a);
                let cons: Vec<EpsFamily> = inst
                    .constraints()
                    .iter()
                    .map(|c| EpsFamily::new(inst.chart(), Multivector::scalar(c.clone())))
                    .collect::<Result<_>>()?;
                let pairs = zs
                    .iter()
                    .map(|z| cons.iter().map(|c| z.schouten(c)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let per: Vec<f64> = pts
                    .iter()
                    .map(|p| {
                        let mut worst: f64 = 0.0;
                        for &g in &grid {
                            for (i, row) in pairs.iter().enumerate() {
                                for (j, v) in row.iter().enumerate() {
                                    let want = if i == j { 1.0 } else { 0.0 };
                                    let got = v.values_at(g, p).map(|x| x[0]).unwrap_or(f64::INFINITY);
                                    worst = worst.max((got - want).abs());
                                }
                            }
                        }
                        worst
                    })
                    .collect();
                Ok(vec![CheckReport::new("normalization", grid, per, tol)])
            }),
            "generator" => Check::new("generator", move || {
                let tol = a.tol.unwrap_or(1e-7);
                let grid = dirac_grid(&a);
                let pts = dirac_points(&inst, &a, 50)?;
                let exact = exact_zero("generator/exact-residual", inst.generator_residual()?.field());
                let x = EpsVectorField::new(inst.generator()?)?;
                let r = check_triviality(&inst.dirac_family()?, &x, &grid, &pts, tol)?;
                Ok(vec![exact, CheckReport { check: "generator/triviality".into(), ..r }])
            }),
            "rank" => Check::new("rank", move || {
                let pts = dirac_points(&inst, &a, 20)?;
                let want = schouten_core::cases::dirac::expected_rank(&inst);
                let mut per = Vec::new();
                for g in dirac_grid(&a) {
                    let psi = PoissonTensor::unverified(inst.dirac_family()?.at(&rational_of(g)?)?)?;
                    for p in &pts {
                        let r = schouten_core::poisson::rank_at(&psi, p)?;
                        per.push((r as f64 - want as f64).abs());
                    }
                }
                Ok(vec![CheckReport::new("rank", dirac_grid(&a), per, 0.0).with_param("expected_rank", want)])
            }),
            other => return Err(Error::UnknownKey(other.to_string())),
        };
        out.push(check);
    }
    Ok(out)
}

/// Kv solver on the built-in cases: the first-order Euler equation and the
/// Dirac deformation at ε = 0.
pub fn case_homological_checks(case: &str, eta: [Q; 3]) -> Result<Vec<Check>> {
    match case {
        "euler" => {
            let e = EulerInstance::new(eta);
            Ok(vec![Check::new("kv-solve/euler", move || {
                let fol = e.foliation()?;
                let x = kv_solve(&fol, &e.phi().neg())?;
                let res = x.schouten(fol.poisson().body())?.add(&e.phi())?;
                Ok(vec![exact_zero("kv-solve/euler", &res).with_param("solution", x.display())])
            })])
        }
        "dirac" => Ok(vec![Check::new("kv-solve/dirac", || {
            let inst = DiracInstance::demo();
            let zero = rational("0")?;
            let fam = inst.dirac_family()?;
            let psi = PoissonTensor::verify(fam.at(&zero)?, &[])?;
            let cas = inst.constraints_at(&zero)?;
            let duals = inst.transversal_fields()?.iter().map(|z| z.at(&zero)).collect::<Result<Vec<_>>>()?;
            let fol = FoliationData::new(psi, cas, duals, vec![0, 1])?;
            let rhs = fam.d_eps()?.at(&zero)?.neg();
            let x = kv_solve(&fol, &rhs)?;
            let res = x.schouten(fol.poisson().body())?.sub(&rhs)?;
            Ok(vec![exact_zero("kv-solve/dirac", &res).with_param("solution", x.display())])
        })]),
        other => Err(Error::UnknownKey(other.to_string())),
    }
}

pub fn case_poisson_checks(case: &str, a: &DiracArgs) -> Result<Vec<Check>> {
    match case {
        "euler" => euler_checks(
            &EulerArgs { eta: [1, 1, 1].map(q), eps: q(0), hamiltonian: None, seed: a.seed, tol: None, eps_grid: None, samples: None },
            &["table".to_string()],
        ),
        "dirac" => dirac_checks(a, &["casimir".to_string(), "poisson-field".to_string()]),
        other => Err(Error::UnknownKey(other.to_string())),
    }
}

// Order test.

#[derive(Clone, Debug)]
pub struct SlopeArgs {
    pub eta: [Q; 3],
    pub hamiltonian: Option<String>,
    pub seed: u64,
    pub eps_grid: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub orders: Vec<usize>,
}

pub const SLOPE_GRID: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
pub const SLOPE_HAMILTONIAN: &str = "y1*z2 + y3^2 - 2*z1*z3 + y2*z2^2/3";

pub fn slope_checks(a: &SlopeArgs) -> Vec<Check> {
    let a2 = a.clone();
    let gens = std::sync::Arc::new(std::sync::OnceLock::new());
    a.orders
        .iter()
        .map(|&k| {
            let (a, gens) = (a2.clone(), gens.clone());
            Check::new(&format!("slope/k={k}"), move || {
                let e = EulerInstance::new(a.eta.clone());
                let all: &Result<GeneratorSeries> = gens.get_or_init(|| e.recursive_generators(a.orders.iter().copied().max().unwrap_or(1)));
                let all = all.clone()?;
                let g = GeneratorSeries::new(e.chart(), all.coeffs()[..k].to_vec())?;
                let h = Multivector::scalar(parse_expr(e.chart(), a.hamiltonian.as_deref().unwrap_or(SLOPE_HAMILTONIAN))?);
                let grid = a.eps_grid.clone().unwrap_or_else(|| SLOPE_GRID.to_vec());
                let pts = e.sample_points(a.seed, a.samples.unwrap_or(20), max_abs(&grid))?;
                let r = order_test(&e.family()?, &g, &h, &grid, &pts, 1e-13)?;
                let need = k as f64 + 0.8;
                let mut rep = CheckReport::new(&format!("slope/k={k}"), grid, r.residuals.clone(), f64::INFINITY)
                    .with_param("slope", json!(r.slope))
                    .with_param("required_slope", json!(need))
                    .with_param("hamiltonian", h.as_scalar().display());
                rep.max_residual = r.residuals.iter().copied().fold(0.0, f64::max);
                if !(r.slope >= need) {
                    rep = rep.fail(format!("slope {:.3} below {need}", r.slope));
                }
                Ok(vec![rep])
            })
        })
        .collect()
}

pub fn eta_of(s: &str) -> Result<[Q; 3]> {
    let v = s.split(',').map(rational).collect::<Result<Vec<_>>>()?;
    v.try_into().map_err(|_| Error::Invalid(format!("--eta needs three entries, got `{s}`")))
}
