//! One pass/fail line per acceptance criterion. Run with
//! `cargo test -p schouten-lab --test acceptance -- --nocapture` to see them.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use schouten_core::convention::{run_axiom_suite, AxiomConfig};
use schouten_core::homological::kv_solve;
use schouten_core::scalar::q;
use schouten_lab::suites::{dirac_checks, euler_checks, slope_checks, DiracArgs, EulerArgs, SlopeArgs};
use schouten_lab::{run_checks, RunReport};

struct Line {
    id: usize,
    pass: bool,
    what: &'static str,
    detail: String,
}

fn euler_args(eta: [i64; 3], seed: u64) -> EulerArgs {
    EulerArgs { eta: eta.map(q), eps: schouten_core::scalar::qf(1, 10), hamiltonian: None, seed, tol: None, eps_grid: None, samples: None }
}

fn euler_run(eta: [i64; 3], checks: &[&str], seed: u64) -> RunReport {
    let names: Vec<String> = checks.iter().map(|s| s.to_string()).collect();
    run_checks("euler", seed, euler_checks(&euler_args(eta, seed), &names).unwrap(), None).unwrap()
}

fn worst(r: &RunReport) -> String {
    let failing: Vec<String> = r.reports.iter().filter(|c| !c.pass).map(|c| format!("{} {:.2e}", c.check, c.max_residual)).collect();
    if failing.is_empty() {
        let m = r.reports.iter().map(|c| c.max_residual).fold(0.0, f64::max);
        format!("{} reports, max residual {m:.2e}", r.reports.len())
    } else {
        format!("failing: {}", failing.join(", "))
    }
}

fn both_eta(checks: &[&str], seed: u64) -> (bool, String) {
    let a = euler_run([1, 1, 1], checks, seed);
    let b = euler_run([1, 1, -1], checks, seed);
    (a.pass && b.pass, format!("η=(1,1,1): {}; η=(1,1,-1): {}", worst(&a), worst(&b)))
}

fn stable(r: &RunReport) -> Value {
    let mut v: Value = serde_json::from_str(&r.to_json()).unwrap();
    for c in v["reports"].as_array_mut().unwrap() {
        c.as_object_mut().unwrap().remove("wall_time");
    }
    v
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let seed = 7;

    let t = Instant::now();
    let ax = run_axiom_suite(&AxiomConfig { seed, trials: 200, dims: (3, 6), max_degree: 3, coeff_degree: 2 }).unwrap();
    let el = t.elapsed();
    lines.push(Line {
        id: 1,
        pass: ax.adopted_hold() && ax.rejected_fail() && ax.trials >= 200 && el <= Duration::from_secs(300),
        what: "bracket identities hold exactly on random multivectors",
        detail: format!("{} trials, {} multivectors, rejected variants fail: {}, {:.1}s", ax.trials, ax.multivectors, ax.rejected_fail(), el.as_secs_f64()),
    });

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let agree = (0..100).filter(|_| {
        let (a, b) = support::oracle_instance(&mut rng);
        a.schouten(&b).unwrap().exact_eq(&support::oracle_schouten(&a, &b)) == Some(true)
    });
    let n = agree.count();
    lines.push(Line { id: 2, pass: n == 100, what: "bracket equals the decomposition oracle", detail: format!("{n}/100 exact agreements") });

    let r = euler_run([1, 1, 1], &["table"], seed);
    lines.push(Line { id: 3, pass: r.pass && r.reports.len() == 5, what: "Lie-algebra table rows are Poisson with both Casimirs", detail: worst(&r) });

    let (pass, detail) = both_eta(&["first-order"], seed);
    lines.push(Line { id: 4, pass, what: "first-order generator solves its equation exactly", detail });

    let (pass, detail) = both_eta(&["homological"], seed);
    lines.push(Line { id: 5, pass, what: "homological residual <= 1e-8 at 100 points, |eps| <= 0.2", detail });

    let (pass, detail) = both_eta(&["flow"], seed);
    lines.push(Line { id: 6, pass, what: "closed-form flow vs integration <= 1e-6, alpha = 1.1 spot", detail });

    let (pass, detail) = both_eta(&["triviality"], seed);
    lines.push(Line { id: 7, pass, what: "straightening within 1e-6 at 50 points", detail });

    let (pass, detail) = both_eta(&["normal-form"], seed);
    lines.push(Line { id: 8, pass, what: "normal-form trajectories agree within 1e-5 over unit time", detail });

    let sl = SlopeArgs { eta: [1, 1, 1].map(q), hamiltonian: None, seed, eps_grid: None, samples: None, orders: vec![1, 2] };
    let r = run_checks("slope", seed, slope_checks(&sl), None).unwrap();
    let slopes: Vec<String> = r.reports.iter().map(|c| format!("{} slope {:.2}", c.check, c.parameters["slope"].as_f64().unwrap_or(f64::NAN))).collect();
    lines.push(Line { id: 9, pass: r.pass, what: "order test slope >= k + 0.8 for k = 1, 2", detail: slopes.join(", ") });

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut ok = 0;
    for _ in 0..20 {
        let (fol, x_true) = support::kv_instance(&mut rng);
        let psi = fol.poisson().body().clone();
        let phi = x_true.schouten(&psi).unwrap();
        if let Ok(x) = kv_solve(&fol, &phi) {
            let same = x.schouten(&psi).unwrap().exact_eq(&phi) == Some(true);
            let gauge = psi.schouten(&x.sub(&x_true).unwrap()).unwrap().normalized().is_zero();
            ok += usize::from(same && gauge);
        }
    }
    lines.push(Line { id: 10, pass: ok == 20, what: "kv_solve recovers manufactured generators exactly", detail: format!("{ok}/20 instances") });

    let names: Vec<String> = ["casimir", "poisson-field", "normalization", "generator"].iter().map(|s| s.to_string()).collect();
    let da = DiracArgs { dim: 4, seed, tol: None, eps_grid: None, samples: None };
    let r = run_checks("dirac", seed, dirac_checks(&da, &names).unwrap(), None).unwrap();
    lines.push(Line { id: 11, pass: r.pass, what: "Dirac demo: Casimirs, transversal fields, generator", detail: worst(&r) });

    let runs = || {
        vec![
            euler_run([1, 1, -1], &["triviality", "normal-form", "flow"], 3),
            run_checks("dirac", 5, dirac_checks(&DiracArgs { dim: 6, seed: 5, tol: None, eps_grid: None, samples: None }, &names).unwrap(), Some(1)).unwrap(),
        ]
    };
    let (a, b) = (runs(), runs());
    let same = a.iter().zip(&b).all(|(x, y)| stable(x) == stable(y));
    let total = start.elapsed();
    lines.push(Line {
        id: 12,
        pass: same && total <= Duration::from_secs(900),
        what: "identical reports for the same seed, suite within 15 minutes",
        detail: format!("reports identical: {same}, total {:.1}s", total.as_secs_f64()),
    });

    println!();
    for l in &lines {
        println!("C{:<2} {}  {}: {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.what, l.detail);
    }
    let failed: Vec<usize> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
