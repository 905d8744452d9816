//! The sign conventions of this crate, and machinery that checks them.
//!
//! The ledger text is hashed into every report so that results produced under
//! different conventions cannot be confused.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::multivector::Multivector;
use crate::random;
use crate::scalar::{Chart, ScalarField};

pub const LEDGER: &str = "\
bracket: [[A,B]] = sum_i (dxi_i A)^(d_i B) + (-1)^(pq) (dxi_i B)^(d_i A), dxi_i the left odd derivative
wedge: xi_I ^ xi_J = sign(sort(I,J)) xi_(I u J)
graded symmetry: [[A,B]] = (-1)^(pq) [[B,A]]
leibniz: [[A,B^C]] = [[A,B]]^C + (-1)^(pq+q) B^[[A,C]]
jacobi: (-1)^(pr)[[[[A,B]],C]] + (-1)^(qp)[[[[B,C]],A]] + (-1)^(rq)[[[[C,A]],B]] = 0
vector fields: [[X,f]] = X(f), [[X,Y]] = XY - YX, lie derivative L_X A = [[X,A]]
contraction: [[A,f]] = df inserted into the first slot of A
hamiltonian field: X_f = [[Psi,f]], poisson bracket {f,g} = [[[[Psi,f]],g]] = Psi(df,dg)
sharp: (Psi# a)(df_1..df_r) = a(X_f_1..X_f_r), (Psi# a)^i = Psi^(ij) a_j for r = 1
symplectic inverse: Psi# o w_flat = id with w_flat(v) = i_v w
one-forms: Psi# dg = -[[Psi,g]]
euler generator: resolved = -printed, [[X_eps,Psi_eps]] = -d_eps Psi_eps
dirac: Psi = -W^-1, Delta^ij = [[[[Psi,A^i]],A^j]], Z_i = sum_k Delta_ik X_(A^k)
";

pub fn ledger_hash() -> String {
    hex::encode(Sha256::digest(LEDGER.as_bytes()))
}

fn sgn(e: usize) -> i32 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

fn signed(a: &Multivector, s: i32) -> Multivector {
    if s > 0 {
        a.clone()
    } else {
        a.neg()
    }
}

/// A sign rule for one of the bracket identities, as a function of degrees.
#[derive(Clone, Copy, Debug)]
pub struct Variant {
    pub name: &'static str,
    pub adopted: bool,
    pub sign: fn(usize, usize, usize) -> i32,
}

pub const SYMMETRY_VARIANTS: [Variant; 2] = [
    Variant { name: "[[A,B]] = (-1)^(pq) [[B,A]]", adopted: true, sign: |p, q, _| sgn(p * q) },
    Variant { name: "[[A,B]] = -(-1)^((p-1)(q-1)) [[B,A]]", adopted: false, sign: |p, q, _| -sgn((p + 1) * (q + 1)) },
];

pub const LEIBNIZ_VARIANTS: [Variant; 3] = [
    Variant { name: "(-1)^(pq+q)", adopted: true, sign: |p, q, _| sgn(p * q + q) },
    Variant { name: "(-1)^(pq)", adopted: false, sign: |p, q, _| sgn(p * q) },
    Variant { name: "(-1)^((p-1)(q-1))", adopted: false, sign: |p, q, _| sgn((p + 1) * (q + 1)) },
];

pub const JACOBI_VARIANTS: [Variant; 2] = [
    Variant { name: "weights (-1)^(pr), (-1)^(qp), (-1)^(rq)", adopted: true, sign: |x, y, _| sgn(x * y) },
    Variant { name: "weights (-1)^((p-1)(r-1)), (-1)^((q-1)(p-1)), (-1)^((r-1)(q-1))", adopted: false, sign: |x, y, _| sgn((x + 1) * (y + 1)) },
];

pub fn symmetry_defect(a: &Multivector, b: &Multivector, v: &Variant) -> Result<Multivector> {
    let s = (v.sign)(a.degree(), b.degree(), 0);
    a.schouten(b)?.sub(&signed(&b.schouten(a)?, s))
}

pub fn leibniz_defect(a: &Multivector, b: &Multivector, c: &Multivector, v: &Variant) -> Result<Multivector> {
    let s = (v.sign)(a.degree(), b.degree(), 0);
    let lhs = a.schouten(&b.wedge(c)?)?;
    let rhs = a.schouten(b)?.wedge(c)?.add(&signed(&b.wedge(&a.schouten(c)?)?, s))?;
    lhs.sub(&rhs)
}

pub fn jacobi_defect(a: &Multivector, b: &Multivector, c: &Multivector, v: &Variant) -> Result<Multivector> {
    let (p, q, r) = (a.degree(), b.degree(), c.degree());
    let w = |x: usize, y: usize| (v.sign)(x, y, 0);
    let t1 = signed(&a.schouten(b)?.schouten(c)?, w(p, r));
    let t2 = signed(&b.schouten(c)?.schouten(a)?, w(q, p));
    let t3 = signed(&c.schouten(a)?.schouten(b)?, w(r, q));
    t1.add(&t2)?.add(&t3)
}

/// [[X,f]] against the directional derivative Σ X^i ∂_i f.
pub fn derivation_defect(x: &Multivector, f: &ScalarField) -> Result<ScalarField> {
    let mut d = ScalarField::zero(f.chart());
    for i in 0..f.chart().dim() {
        d = d.add(&x.get(&[i]).mul(&f.partial(i)?)?)?;
    }
    x.schouten(&Multivector::scalar(f.clone()))?.as_scalar().sub(&d)
}

/// [[X,Y]] against the coordinate Lie bracket (XY − YX)^i = X^j ∂_j Y^i − Y^j ∂_j X^i.
pub fn lie_bracket_defect(x: &Multivector, y: &Multivector) -> Result<Multivector> {
    let chart = x.chart().clone();
    let n = chart.dim();
    let mut comps = Vec::new();
    for i in 0..n {
        let mut c = ScalarField::zero(&chart);
        for j in 0..n {
            c = c.add(&x.get(&[j]).mul(&y.get(&[i]).partial(j)?)?)?;
            c = c.sub(&y.get(&[j]).mul(&x.get(&[i]).partial(j)?)?)?;
        }
        comps.push(c);
    }
    x.schouten(y)?.sub(&Multivector::vector(&chart, comps)?)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct IdentityTally {
    pub identity: String,
    pub variant: String,
    pub adopted: bool,
    pub trials: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct AxiomReport {
    pub seed: u64,
    pub trials: usize,
    pub multivectors: usize,
    pub tallies: Vec<IdentityTally>,
}

impl AxiomReport {
    /// Adopted variants never fail.
    pub fn adopted_hold(&self) -> bool {
        self.tallies.iter().filter(|t| t.adopted).all(|t| t.failures == 0)
    }

    /// Every rejected variant fails at least once, so the ledger is not vacuous.
    pub fn rejected_fail(&self) -> bool {
        self.tallies.iter().filter(|t| !t.adopted).all(|t| t.failures > 0)
    }
}

#[derive(Clone, Debug)]
pub struct AxiomConfig {
    pub seed: u64,
    pub trials: usize,
    pub dims: (usize, usize),
    pub max_degree: usize,
    pub coeff_degree: u32,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        AxiomConfig { seed: 7, trials: 100, dims: (3, 6), max_degree: 3, coeff_degree: 2 }
    }
}

/// Random exact checks of every bracket identity. Each trial draws three
/// multivectors, a vector-field pair and a function.
pub fn run_axiom_suite(cfg: &AxiomConfig) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tallies: Vec<IdentityTally> = Vec::new();
    let mut tally = |identity: &str, variant: &str, adopted: bool, ok: bool| {
        match tallies.iter_mut().find(|t| t.identity == identity && t.variant == variant) {
            Some(t) => {
                t.trials += 1;
                t.failures += (!ok) as usize;
            }
            None => tallies.push(IdentityTally {
                identity: identity.into(),
                variant: variant.into(),
                adopted,
                trials: 1,
                failures: (!ok) as usize,
            }),
        }
    };
    let mut multivectors = 0;
    for _ in 0..cfg.trials {
        let n = rng.gen_range(cfg.dims.0..=cfg.dims.1);
        let chart = Chart::numbered("x", n);
        let md = cfg.max_degree.min(n);
        let cd = cfg.coeff_degree;
        let x = random::vector_field(&mut rng, &chart, cd, 2);
        let y = random::vector_field(&mut rng, &chart, cd, 2);
        let f = random::field(&mut rng, &chart, cd, 3);
        tally("vector field on function", "[[X,f]] = X(f)", true, derivation_defect(&x, &f)?.is_zero());
        tally("vector field pair", "[[X,Y]] = XY - YX", true, lie_bracket_defect(&x, &y)?.is_zero());
        let p = rng.gen_range(0..=md);
        let q = rng.gen_range(if p == 0 { 1 } else { 0 }..=md);
        let r = rng.gen_range(0..=md);
        let a = random::multivector(&mut rng, &chart, p, 3, cd, 2);
        let b = random::multivector(&mut rng, &chart, q, 3, cd, 2);
        let c = random::multivector(&mut rng, &chart, r, 3, cd, 2);
        multivectors += 3;
        for v in &SYMMETRY_VARIANTS {
            tally("graded symmetry", v.name, v.adopted, symmetry_defect(&a, &b, v)?.is_zero());
        }
        if q + r <= n && (p, q + r) != (0, 0) && (p, q) != (0, 0) && (p, r) != (0, 0) {
            for v in &LEIBNIZ_VARIANTS {
                tally("leibniz", v.name, v.adopted, leibniz_defect(&a, &b, &c, v)?.is_zero());
            }
        }
        if p + q >= 1 && q + r >= 1 && r + p >= 1 && p + q + r >= 2 {
            for v in &JACOBI_VARIANTS {
                tally("graded jacobi", v.name, v.adopted, jacobi_defect(&a, &b, &c, v)?.is_zero());
            }
        }
    }
    Ok(AxiomReport { seed: cfg.seed, trials: cfg.trials, multivectors, tallies })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_hash_is_stable() {
        assert_eq!(ledger_hash().len(), 64);
        assert_eq!(ledger_hash(), ledger_hash());
    }

    #[test]
    fn small_suite_holds() {
        let r = run_axiom_suite(&AxiomConfig { trials: 12, ..Default::default() }).unwrap();
        assert!(r.adopted_hold(), "{:#?}", r.tallies);
    }
}
