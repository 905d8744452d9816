use schouten_core::cases::dirac::expected_rank;
use schouten_core::cases::DiracInstance;
use schouten_core::family::EpsFamily;
use schouten_core::flows::{check_triviality, EpsVectorField};
use schouten_core::multivector::Multivector;
use schouten_core::poisson::{is_casimir, is_poisson_vf, rank_at, PoissonTensor};
use schouten_core::sampling::BoxSampler;
use schouten_core::scalar::{q, qf, Chart};
use schouten_core::Error;

const GRID: [f64; 8] = [-0.1, -0.05, -0.025, -0.0125, 0.0125, 0.025, 0.05, 0.1];

fn grid_q() -> Vec<schouten_core::scalar::Q> {
    [-8, -4, -2, -1, 1, 2, 4, 8].iter().map(|&k| qf(k, 80)).collect()
}

fn demos() -> Vec<DiracInstance> {
    vec![DiracInstance::demo(), DiracInstance::demo6()]
}

/// Canonical ℝ⁴ with 𝒜 = (q2, p2): Δ^{12} = Ψ(dq2, dp2) = 1 by hand, and the
/// correction cancels the q2–p2 block.
#[test]
fn canonical_delta_and_tensor() {
    let c = Chart::new(&["q1", "p1", "q2", "p2"]).unwrap();
    let inst = DiracInstance::from_exprs(&c, &[(0, 1, "1"), (2, 3, "1")], &["q2", "p2"], None).unwrap();
    let d = inst.data().unwrap();
    let want = [[0, 1], [-1, 0]];
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(d.delta[i][j].constant_value(), Some(q(want[i][j])), "Δ[{i}][{j}]");
        }
    }
    let block = Multivector::basis(inst.ext_chart(), &[0, 1]).unwrap();
    assert_eq!(d.dirac.exact_eq(&block), Some(true), "{}", d.dirac.display());
    let single = DiracInstance::from_exprs(&c, &[(0, 1, "1"), (2, 3, "1")], &["q2"], None).unwrap();
    assert!(matches!(single.data(), Err(Error::SingularDelta)));
}

#[test]
fn constraints_are_exact_casimirs() {
    for inst in demos() {
        for e in grid_q() {
            let psi = inst.dirac_tensor(&e).unwrap();
            assert!(psi.is_verified());
            for k in inst.constraints_at(&e).unwrap() {
                assert!(is_casimir(&psi, &k, &[]).unwrap().holds, "ε = {e}");
            }
        }
    }
}

#[test]
fn transversal_fields_are_normalized_poisson_fields() {
    for inst in demos() {
        let n = inst.chart().dim();
        let pts = BoxSampler::cube(11, n, 1.0).take(50, |_| true).unwrap();
        let zs = inst.transversal_fields().unwrap();
        let cons: Vec<EpsFamily> = inst.constraints().iter().map(|k| EpsFamily::new(inst.chart(), Multivector::scalar(k.clone())).unwrap()).collect();
        for e in grid_q() {
            let psi = inst.dirac_tensor(&e).unwrap();
            for z in &zs {
                assert!(is_poisson_vf(&psi, &z.at(&e).unwrap(), &[]).unwrap().holds);
            }
        }
        for (i, z) in zs.iter().enumerate() {
            for (j, k) in cons.iter().enumerate() {
                let pairing = z.schouten(k).unwrap();
                for p in &pts {
                    for &g in &GRID {
                        let v = pairing.values_at(g, p).unwrap()[0];
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((v - want).abs() <= 1e-10, "dA^{j}(Z_{i}) = {v}");
                    }
                }
            }
        }
    }
}

#[test]
fn generator_trivializes_the_dirac_family() {
    for inst in demos() {
        let pts = BoxSampler::cube(12, inst.chart().dim(), 1.0).take(50, |_| true).unwrap();
        assert!(inst.generator_residual().unwrap().field().normalized().is_zero());
        let x = EpsVectorField::new(inst.generator().unwrap()).unwrap();
        let r = check_triviality(&inst.dirac_family().unwrap(), &x, &GRID, &pts, 1e-7).unwrap();
        assert!(r.pass, "{:e}", r.max_residual);
        assert!(matches!(inst.clone().without_theta().generator(), Err(Error::MissingThetaFamily)));
    }
}

#[test]
fn rank_drops_by_the_number_of_constraints() {
    let inst = DiracInstance::demo6();
    let psi = PoissonTensor::unverified(inst.dirac_family().unwrap().at(&qf(1, 20)).unwrap()).unwrap();
    for p in BoxSampler::cube(13, 6, 1.0).take(10, |_| true).unwrap() {
        assert_eq!(rank_at(&psi, &p).unwrap(), expected_rank(&inst));
    }
    assert_eq!(expected_rank(&inst), 4);
}
