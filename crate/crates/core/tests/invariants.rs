use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schouten_core::cases::{EulerInstance, Reading};
use schouten_core::convention::{jacobi_defect, leibniz_defect, symmetry_defect, JACOBI_VARIANTS, LEIBNIZ_VARIANTS, SYMMETRY_VARIANTS};
use schouten_core::multivector::{pullback_exact, Multivector};
use schouten_core::poisson::{is_casimir, jacobi_defect as poisson_defect, poisson_bracket, PoissonTensor};
use schouten_core::random;
use schouten_core::scalar::{q, Chart, ScalarField};

fn chart_and_rng(seed: u64) -> (Chart, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=5);
    (Chart::numbered("x", n), rng)
}

fn mv(rng: &mut ChaCha8Rng, c: &Chart, max_degree: usize) -> Multivector {
    let d = rng.gen_range(0..=max_degree);
    random::multivector(rng, c, d, 2, 2, 2)
}

fn zero(m: &Multivector) -> bool {
    m.normalized().is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn graded_symmetry_and_leibniz(seed in any::<u64>()) {
        let (c, mut rng) = chart_and_rng(seed);
        let (a, b, d) = (mv(&mut rng, &c, 3), mv(&mut rng, &c, 2), mv(&mut rng, &c, 2));
        prop_assume!(a.degree() + b.degree() >= 1 && a.degree() + d.degree() >= 1);
        prop_assert!(zero(&symmetry_defect(&a, &b, &SYMMETRY_VARIANTS[0]).unwrap()));
        prop_assert!(zero(&leibniz_defect(&a, &b, &d, &LEIBNIZ_VARIANTS[0]).unwrap()));
    }

    #[test]
    fn graded_jacobi(seed in any::<u64>()) {
        let (c, mut rng) = chart_and_rng(seed);
        let (a, b, d) = (mv(&mut rng, &c, 2), mv(&mut rng, &c, 2), mv(&mut rng, &c, 2));
        prop_assume!(a.degree() + b.degree() >= 1 && b.degree() + d.degree() >= 1 && d.degree() + a.degree() >= 1);
        prop_assume!(a.degree() + b.degree() + d.degree() >= 2);
        prop_assert!(zero(&jacobi_defect(&a, &b, &d, &JACOBI_VARIANTS[0]).unwrap()));
    }

    #[test]
    fn wedge_is_graded_commutative(seed in any::<u64>()) {
        let (c, mut rng) = chart_and_rng(seed);
        let (a, b) = (mv(&mut rng, &c, 3), mv(&mut rng, &c, 2));
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let ba = if (a.degree() * b.degree()) % 2 == 0 { ba } else { ba.neg() };
        prop_assert_eq!(ab.exact_eq(&ba), Some(true));
    }

    /// A triangular polynomial diffeomorphism x1 ↦ x1 + p(x2, …), others fixed,
    /// commutes with the bracket.
    #[test]
    fn pullback_is_natural(seed in any::<u64>()) {
        let (c, mut rng) = chart_and_rng(seed);
        let n = c.dim();
        let shift = random::field(&mut rng, &Chart::numbered("x", n - 1), 2, 2).remap(&c, &(1..n).collect::<Vec<_>>());
        let x1 = ScalarField::coord(&c, 0);
        let mut fwd: Vec<ScalarField> = (0..n).map(|i| ScalarField::coord(&c, i)).collect();
        let mut inv = fwd.clone();
        fwd[0] = x1.add(&shift).unwrap();
        inv[0] = x1.sub(&shift).unwrap();
        let (a, b) = (mv(&mut rng, &c, 2), mv(&mut rng, &c, 2));
        prop_assume!(a.degree() + b.degree() >= 1);
        let lhs = pullback_exact(&a.schouten(&b).unwrap(), &fwd, &inv).unwrap();
        let rhs = pullback_exact(&a, &fwd, &inv).unwrap().schouten(&pullback_exact(&b, &fwd, &inv).unwrap()).unwrap();
        prop_assert_eq!(lhs.exact_eq(&rhs), Some(true));
    }

    /// Every (η, ε) with small integer entries gives a Poisson tensor with the
    /// two Casimirs, not only the rows of the table.
    #[test]
    fn euler_family_is_poisson(e0 in -2i64..=2, e1 in -2i64..=2, e2 in -2i64..=2, num in -3i64..=3, den in 1i64..=3) {
        prop_assume!(e0 != 0 && e1 != 0 && e2 != 0);
        let inst = EulerInstance::from_ints([e0, e1, e2]);
        let eps = schouten_core::scalar::qf(num, den);
        let psi = inst.tensor(&eps).unwrap();
        prop_assert!(zero(&poisson_defect(psi.body()).unwrap()));
        let (k1, k2) = inst.casimirs(&eps).unwrap();
        prop_assert!(is_casimir(&psi, &k1, &[]).unwrap().holds);
        prop_assert!(is_casimir(&psi, &k2, &[]).unwrap().holds);
        let f = ScalarField::coord(inst.chart(), 0);
        let g = ScalarField::coord(inst.chart(), 4);
        let fg = poisson_bracket(&psi, &f, &g).unwrap();
        let gf = poisson_bracket(&psi, &g, &f).unwrap();
        prop_assert_eq!(fg.exact_eq(&gf.neg()), Some(true));
    }

    /// γ_ε keeps y and η(y)·z, and inverts in closed form.
    #[test]
    fn euler_flow_invariants(seed in 0u64..1000, indefinite in any::<bool>(), eps in -0.15f64..0.15) {
        let inst = EulerInstance::from_ints(if indefinite { [1, 1, -1] } else { [1, 1, 1] });
        let p = inst.sample_points(seed, 1, eps.abs()).unwrap().remove(0);
        let img = inst.flow(eps, &p, Reading::Resolved).unwrap();
        prop_assert_eq!(&img[..3], &p[..3]);
        let (k1, _) = inst.casimirs(&q(0)).unwrap();
        prop_assert!((k1.value(&img) - k1.value(&p)).abs() < 1e-12);
        let back = inst.inverse_flow(eps, &img, Reading::Resolved).unwrap();
        prop_assert!(back.iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}

#[test]
fn non_jacobi_tensor_is_flagged() {
    let c = Chart::new(&["x1", "x2", "x3"]).unwrap();
    let f = |s: &str| schouten_core::scalar::parse_expr(&c, s).unwrap();
    let bad = Multivector::from_components(&c, 2, vec![(vec![0, 1], f("x3")), (vec![1, 2], f("1")), (vec![0, 2], f("-x1"))]).unwrap();
    let t = PoissonTensor::verify(bad, &[]).unwrap();
    assert!(!t.is_verified());
    // In 3-D the defect is J·curl J for J = (1, x1, x3): here x3.
    let d = poisson_defect(t.body()).unwrap();
    assert!(d.values_at(&[0.0, 0.0, 1.0]).unwrap().iter().any(|v| *v != 0.0));
    assert!(d.values_at(&[1.0, 2.0, 0.0]).unwrap().iter().all(|v| *v == 0.0));
}
