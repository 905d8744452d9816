//! Seeded random exact inputs for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::multivector::{all_keys, indices_of, Multivector};
use crate::scalar::{q, Chart, Monomial, Poly, ScalarField};

/// Polynomial with at most `terms` terms of total degree ≤ `max_deg` and
/// small nonzero integer coefficients.
pub fn poly<R: Rng>(rng: &mut R, nvars: usize, max_deg: u32, terms: usize) -> Poly {
    let mut p = Poly::zero(nvars);
    for _ in 0..terms {
        let deg = rng.gen_range(0..=max_deg);
        let mut m = Monomial::one();
        for _ in 0..deg {
            m = m.mul(Monomial::var(rng.gen_range(0..nvars)));
        }
        let mut c = rng.gen_range(-3i64..=3);
        if c == 0 {
            c = 1;
        }
        p.add_term(m, q(c));
    }
    p
}

pub fn field<R: Rng>(rng: &mut R, chart: &Chart, max_deg: u32, terms: usize) -> ScalarField {
    ScalarField::poly(chart, poly(rng, chart.dim(), max_deg, terms))
}

/// Multivector of the given degree with up to `comps` nonzero components.
pub fn multivector<R: Rng>(rng: &mut R, chart: &Chart, degree: usize, comps: usize, max_deg: u32, terms: usize) -> Multivector {
    let mut keys = all_keys(chart.dim(), degree);
    keys.shuffle(rng);
    let n = rng.gen_range(1..=comps.max(1)).min(keys.len());
    let entries = keys[..n].iter().map(|k| (indices_of(*k), field(rng, chart, max_deg, terms))).collect();
    Multivector::from_components(chart, degree, entries).expect("valid random multivector")
}

pub fn vector_field<R: Rng>(rng: &mut R, chart: &Chart, max_deg: u32, terms: usize) -> Multivector {
    multivector(rng, chart, 1, chart.dim(), max_deg, terms)
}
