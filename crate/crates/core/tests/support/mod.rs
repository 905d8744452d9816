//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use schouten_core::homological::FoliationData;
use schouten_core::multivector::Multivector;
use schouten_core::poisson::PoissonTensor;
use schouten_core::random;
use schouten_core::scalar::{Chart, ScalarField};

type Vf = Vec<ScalarField>;

fn apply(x: &Vf, f: &ScalarField) -> ScalarField {
    let mut out = ScalarField::zero(f.chart());
    for (k, xk) in x.iter().enumerate() {
        out = out.add(&xk.mul(&f.partial(k).unwrap()).unwrap()).unwrap();
    }
    out
}

/// [X, Y]^k = X(Y^k) − Y(X^k).
fn lie(x: &Vf, y: &Vf) -> Vf {
    (0..x.len()).map(|k| apply(x, &y[k]).sub(&apply(y, &x[k])).unwrap()).collect()
}

fn basis(chart: &Chart, i: usize, coeff: &ScalarField) -> Vf {
    (0..chart.dim()).map(|k| if k == i { coeff.clone() } else { ScalarField::zero(chart) }).collect()
}

fn wedge_all(chart: &Chart, vs: &[Vf]) -> Multivector {
    let mut out = Multivector::scalar(ScalarField::int(chart, 1));
    for v in vs {
        out = out.wedge(&Multivector::vector(chart, v.clone()).unwrap()).unwrap();
    }
    out
}

fn without(vs: &[Vf], i: usize) -> Vec<Vf> {
    vs.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, v)| v.clone()).collect()
}

fn sign(n: usize) -> i64 {
    if n % 2 == 0 { 1 } else { -1 }
}

/// Σ_i (−1)^i X_i(g) X_0∧…X̂_i…, the contraction of dg into the first slot.
fn insert(chart: &Chart, xs: &[Vf], g: &ScalarField, degree: usize) -> Multivector {
    let mut out = Multivector::zero(chart, degree);
    for i in 0..xs.len() {
        let c = apply(&xs[i], g).scale(&schouten_core::scalar::q(sign(i)));
        out = out.add(&wedge_all(chart, &without(xs, i)).scale_field(&c).unwrap()).unwrap();
    }
    out
}

/// The bracket from a decomposition into wedges of vector fields:
/// each component f ∂_{i1}∧…∧∂_{ip} is (f∂_{i1})∧∂_{i2}∧…∧∂_{ip}, and
///   [[X_1∧…∧X_p, Y_1∧…∧Y_q]] = (−1)^{p+1} Σ (−1)^{i+j} [X_i, Y_j]∧X̂∧Ŷ,
///   [[X_1∧…∧X_p, g]] = [[g, X_1∧…∧X_p]] = Σ (−1)^{i−1} X_i(g) X̂_i.
/// Only vector-field Lie brackets and directional derivatives are used.
pub fn oracle_schouten(a: &Multivector, b: &Multivector) -> Multivector {
    let chart = a.chart().clone();
    let (p, q) = (a.degree(), b.degree());
    assert!(p + q >= 1);
    let degree = p + q - 1;
    let one = ScalarField::int(&chart, 1);
    let gens = |idx: &[usize], f: &ScalarField| -> Vec<Vf> {
        idx.iter().enumerate().map(|(k, &i)| basis(&chart, i, if k == 0 { f } else { &one })).collect()
    };
    let mut out = Multivector::zero(&chart, degree);
    for (ia, fa) in a.components() {
        for (ib, fb) in b.components() {
            let term = match (p, q) {
                (_, 0) => insert(&chart, &gens(&ia, fa), fb, degree),
                (0, _) => insert(&chart, &gens(&ib, fb), fa, degree),
                _ => {
                    let (xs, ys) = (gens(&ia, fa), gens(&ib, fb));
                    let mut t = Multivector::zero(&chart, degree);
                    for i in 0..p {
                        for j in 0..q {
                            let mut vs = vec![lie(&xs[i], &ys[j])];
                            vs.extend(without(&xs, i));
                            vs.extend(without(&ys, j));
                            t = t.add(&wedge_all(&chart, &vs).scale(&schouten_core::scalar::q(sign(i + j + p + 1)))).unwrap();
                        }
                    }
                    t
                }
            };
            out = out.add(&term).unwrap();
        }
    }
    out.normalized()
}

/// A random pair for the oracle comparison: dimension 3–6, degrees ≤ 3 with
/// at least one positive, coefficients of degree ≤ 2.
pub fn oracle_instance(rng: &mut ChaCha8Rng) -> (Multivector, Multivector) {
    let n = rng.gen_range(3..=6);
    let chart = Chart::numbered("x", n);
    let p = rng.gen_range(0..=3usize);
    let q = if p == 0 { rng.gen_range(1..=3) } else { rng.gen_range(0..=3) };
    let a = random::multivector(rng, &chart, p, 3, 2, 3);
    let b = random::multivector(rng, &chart, q, 3, 2, 3);
    (a, b)
}

/// Ψ = canonical on ℝ^{2m} ⊕ zero on ℝ^r, with the zero-block coordinates as
/// Casimirs and their ∂'s as duals, and a random polynomial X_true.
pub fn kv_instance(rng: &mut ChaCha8Rng) -> (FoliationData, Multivector) {
    let m = rng.gen_range(1..=2usize);
    let r = rng.gen_range(1..=2usize);
    let n = 2 * m + r;
    let chart = Chart::numbered("x", n);
    let mut psi = Multivector::zero(&chart, 2);
    for i in 0..m {
        psi = psi.add(&Multivector::basis(&chart, &[2 * i, 2 * i + 1]).unwrap()).unwrap();
    }
    let psi = PoissonTensor::verify(psi, &[]).unwrap();
    let casimirs = (2 * m..n).map(|i| ScalarField::coord(&chart, i)).collect();
    let duals = (2 * m..n).map(|i| Multivector::basis(&chart, &[i]).unwrap()).collect();
    let fol = FoliationData::new(psi, casimirs, duals, (0..2 * m).collect()).unwrap();
    let x_true = random::vector_field(rng, &chart, 2, 3);
    (fol, x_true)
}
