//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

const HIGH: u128 = 0x8080_8080_8080_8080_8080_8080_8080_8080;

/// Exponent vector packed one byte per variable, variable 0 in the most
/// significant byte, so integer order is lexicographic order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(u128);

impl Monomial {
    pub const MAX_VARS: usize = 16;

    pub fn one() -> Self {
        Monomial(0)
    }

    fn shift(i: usize) -> u32 {
        debug_assert!(i < Self::MAX_VARS);
        ((Self::MAX_VARS - 1 - i) * 8) as u32
    }

    pub fn var(i: usize) -> Self {
        Monomial(1u128 << Self::shift(i))
    }

    pub fn exp(self, i: usize) -> u32 {
        ((self.0 >> Self::shift(i)) & 0xff) as u32
    }

    pub fn with_exp(self, i: usize, e: u32) -> Self {
        assert!(e < 256, "exponent overflow");
        let s = Self::shift(i);
        Monomial((self.0 & !(0xffu128 << s)) | ((e as u128) << s))
    }

    pub fn mul(self, o: Self) -> Self {
        let (a, b) = (self.0, o.0);
        let t = (a & !HIGH) + (b & !HIGH);
        let carry = ((a & b) | ((a ^ b) & t)) & HIGH;
        assert!(carry == 0, "exponent overflow");
        Monomial(a + b)
    }

    pub fn divides(self, o: Self) -> bool {
        (0..Self::MAX_VARS).all(|i| self.exp(i) <= o.exp(i))
    }

    /// `o / self`, assuming `self` divides `o`.
    pub fn quotient_of(self, o: Self) -> Self {
        Monomial(o.0 - self.0)
    }

    pub fn degree(self) -> u32 {
        (0..Self::MAX_VARS).map(|i| self.exp(i)).sum()
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= Monomial::MAX_VARS, "too many variables");
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut p = Poly::zero(nvars);
        p.terms.insert(Monomial::var(i), Q::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::one())
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_constant() {
            Some(self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Q::zero))
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, o.nvars);
        let (big, small) = if self.len() >= o.len() { (self, o) } else { (o, self) };
        let mut r = big.clone();
        for (m, c) in &small.terms {
            r.add_term(*m, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, -c);
        }
        r
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, o.nvars);
        let mut r = Poly::zero(self.nvars);
        if self.is_zero() || o.is_zero() {
            return r;
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                r.add_term(ma.mul(*mb), ca * cb);
            }
        }
        r
    }

    pub fn mul_monomial(&self, m: Monomial, c: &Q) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(mm, cc)| (mm.mul(m), cc * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::one(self.nvars);
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    pub fn partial(&self, i: usize) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e > 0 {
                r.add_term(m.with_exp(i, e - 1), c * q(e as i64));
            }
        }
        r
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(i)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading()?;
        let (lm, lc) = (*lm, lc.clone());
        let mut r = self.clone();
        let mut quo = Poly::zero(self.nvars);
        while let Some((rm, rc)) = r.leading() {
            if !lm.divides(*rm) {
                return None;
            }
            let m = lm.quotient_of(*rm);
            let c = rc / &lc;
            r = r.sub(&d.mul_monomial(m, &c));
            quo.add_term(m, c);
        }
        Some(quo)
    }

    /// Splits into (leading coefficient, monic part).
    pub fn monic(&self) -> (Q, Poly) {
        match self.leading() {
            None => (Q::zero(), self.clone()),
            Some((_, lc)) => {
                let lc = lc.clone();
                let inv = lc.recip();
                (lc, self.scale(&inv))
            }
        }
    }

    /// If the polynomial is a single term, returns it.
    pub fn as_monomial(&self) -> Option<(Monomial, Q)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((*m, c.clone()))
        } else {
            None
        }
    }

    /// Re-embeds into a larger variable set; existing variables keep their indices.
    pub fn extend_vars(&self, nvars: usize) -> Poly {
        assert!(nvars >= self.nvars && nvars <= Monomial::MAX_VARS);
        Poly { nvars, terms: self.terms.clone() }
    }

    /// Drops trailing variables that do not occur.
    pub fn restrict_vars(&self, nvars: usize) -> Option<Poly> {
        if (nvars..self.nvars).any(|i| self.degree_in(i) > 0) {
            return None;
        }
        Some(Poly { nvars, terms: self.terms.clone() })
    }

    /// Substitutes a rational value for variable `i`; the variable stays in the chart.
    pub fn substitute(&self, i: usize, v: &Q) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            let mut k = c.clone();
            for _ in 0..e {
                k *= v;
            }
            r.add_term(m.with_exp(i, 0), k);
        }
        r
    }

    /// Applies a variable map: variable `i` is moved to index `map[i]` in a chart of `nvars`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Poly {
        let mut r = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut nm = Monomial::one();
            for (i, &j) in map.iter().enumerate().take(self.nvars) {
                let e = m.exp(i);
                if e > 0 {
                    nm = nm.mul(Monomial::one().with_exp(j, e));
                }
            }
            r.add_term(nm, c.clone());
        }
        r
    }

    pub fn eval_q(&self, x: &[Q]) -> Q {
        let mut s = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, xi) in x.iter().enumerate().take(self.nvars) {
                for _ in 0..m.exp(i) {
                    t *= xi;
                }
            }
            s += t;
        }
        s
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let exps: Vec<(usize, i32)> = (0..self.nvars)
                        .filter(|&i| m.exp(i) > 0)
                        .map(|i| (i, m.exp(i) as i32))
                        .collect();
                    (c.to_f64().unwrap_or(f64::NAN), exps)
                })
                .collect(),
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.compile().eval(x)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || *m == Monomial::one() {
                factors.push(a.to_string());
            }
            for (i, name) in names.iter().enumerate().take(self.nvars) {
                match m.exp(i) {
                    0 => {}
                    1 => factors.push(name.clone()),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            let _ = write!(s, "{}", factors.join("*"));
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert!(x.len() >= self.nvars);
        let mut s = 0.0;
        for (c, exps) in &self.terms {
            let mut t = *c;
            for &(i, e) in exps {
                t *= x[i].powi(e);
            }
            s += t;
        }
        s
    }
}
