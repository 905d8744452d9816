use schouten_core::cases::{table_rows, EulerInstance, Reading};
use schouten_core::flows::{check_triviality, integrate_flow, order_test};
use schouten_core::poisson::is_casimir;
use schouten_core::scalar::{parse_expr, q};

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn table_rows_are_poisson_with_casimirs() {
    let rows = table_rows();
    assert_eq!(rows.len(), 5);
    for (name, eta, eps) in rows {
        let e = EulerInstance::from_ints(eta);
        let psi = e.tensor(&eps).unwrap();
        assert!(psi.is_verified(), "{name}");
        let (k1, k2) = e.casimirs(&eps).unwrap();
        assert!(is_casimir(&psi, &k1, &[]).unwrap().holds, "{name} k1");
        assert!(is_casimir(&psi, &k2, &[]).unwrap().holds, "{name} k2");
    }
}

#[test]
fn first_order_generator_is_exact() {
    for eta in [[1, 1, 1], [1, 1, -1]] {
        let e = EulerInstance::from_ints(eta);
        let psi0 = e.tensor(&q(0)).unwrap();
        let x0 = e.first_order_generator(Reading::Resolved).unwrap();
        assert!(x0.is_exact());
        let res = x0.schouten(psi0.body()).unwrap().add(&e.phi()).unwrap().normalized();
        assert!(res.is_zero(), "{eta:?}: {}", res.display());
    }
}

#[test]
fn homological_residual_on_the_domain() {
    let grid: Vec<f64> = (-4..=4).map(|k| k as f64 * 0.05).collect();
    for eta in [[1, 1, 1], [1, 1, -1]] {
        let e = EulerInstance::from_ints(eta);
        let pts = e.sample_points(5, 100, 0.2).unwrap();
        let fam = e.family().unwrap();
        let res = e.generator(Reading::Resolved).unwrap().family().schouten(&fam).unwrap().add(&fam.d_eps().unwrap()).unwrap();
        let worst = pts.iter().flat_map(|p| grid.iter().map(|&g| max_abs(&res.values_at(g, p).unwrap()))).fold(0.0, f64::max);
        assert!(worst <= 1e-8, "{eta:?}: {worst:e}");
    }
}

#[test]
fn closed_form_flow_matches_integration() {
    let e = EulerInstance::from_ints([1, 1, -1]);
    let pts = e.sample_points(6, 50, 0.1).unwrap();
    for reading in [Reading::Resolved, Reading::Printed] {
        let x = e.generator(reading).unwrap();
        for p in &pts {
            for eps in [-0.1, 0.05, 0.1] {
                let num = integrate_flow(&x, p, eps, 1e-9).unwrap().point;
                let exact = e.flow(eps, p, reading).unwrap();
                let d = num.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(d <= 1e-6, "{reading:?} ε={eps} {p:?}: {d:e}");
            }
        }
    }
    let id = EulerInstance::identity();
    let p = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    assert!((id.alpha(0.21, &p, Reading::Printed).unwrap() - 1.1).abs() < 1e-12);
}

#[test]
fn flow_straightens_the_family() {
    for eta in [[1, 1, 1], [1, 1, -1]] {
        let e = EulerInstance::from_ints(eta);
        let pts = e.sample_points(8, 50, 0.1).unwrap();
        let r = check_triviality(&e.family().unwrap(), &e.generator(Reading::Resolved).unwrap(), &[-0.1, -0.05, 0.05, 0.1], &pts, 1e-6).unwrap();
        assert!(r.pass, "{eta:?}: {:e}", r.max_residual);
    }
}

#[test]
fn normal_form_trajectories_agree() {
    let e = EulerInstance::from_ints([1, 1, -1]);
    let c = e.chart().clone();
    let hs = [
        parse_expr(&c, "(y1^2 + y2^2 + y3^2 + z1^2 + z2^2 + z3^2)/2").unwrap(),
        parse_expr(&c, "y1*z3 - 2*y2^2 + z1*z2/3 + y3").unwrap(),
    ];
    for h in &hs {
        for p in e.trajectory_points(h, 3, 5, 0.05, 1.0).unwrap() {
            let d = e.normal_form_discrepancy(h, 0.05, &p, 1.0, 1e-10, Reading::Resolved).unwrap();
            assert!(d <= 1e-5, "{}: {d:e}", h.display());
        }
    }
    let id = EulerInstance::identity();
    let nf = id.normal_form(&parse_expr(id.chart(), "(z1^2 + z2^2 + z3^2)/2").unwrap(), 0.21, Reading::Printed).unwrap();
    assert!((nf.value(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]) - 0.605).abs() < 1e-12);
}

#[test]
fn lie_transform_order() {
    let e = EulerInstance::identity();
    let h = parse_expr(e.chart(), "y1*z2 + y3^2 - 2*z1*z3 + y2*z2^2/3").unwrap();
    let a = e.family().unwrap();
    let c = schouten_core::multivector::Multivector::scalar(h);
    let grid = [0.1, 0.05, 0.025, 0.0125];
    for k in 1..=2 {
        let gens = e.recursive_generators(k).unwrap();
        let pts = e.sample_points(7, 20, 0.1).unwrap();
        let r = order_test(&a, &gens, &c, &grid, &pts, 1e-13).unwrap();
        assert!(r.slope >= k as f64 + 0.8, "k={k}: slope {} residuals {:?}", r.slope, r.residuals);
    }
}
