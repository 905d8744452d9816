//! Rational functions as a polynomial numerator over a product of monic
//! polynomial factors. No GCDs: a normalization pass cancels factors by exact
//! division, and equality is decided by subtracting.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::poly::{CompiledPoly, Monomial, Poly, Q};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFn {
    num: Poly,
    /// Monic, non-constant factors with positive multiplicities.
    den: BTreeMap<Poly, u32>,
}

fn push_factor(den: &mut BTreeMap<Poly, u32>, p: &Poly, e: u32) -> Q {
    if e == 0 {
        return Q::one();
    }
    if let Some((m, c)) = p.as_monomial() {
        for i in 0..p.nvars() {
            let k = m.exp(i);
            if k > 0 {
                *den.entry(Poly::var(p.nvars(), i)).or_insert(0) += k * e;
            }
        }
        return c.pow(e as i32);
    }
    let (lc, m) = p.monic();
    *den.entry(m).or_insert(0) += e;
    lc.pow(e as i32)
}

impl RatFn {
    pub fn from_poly(p: Poly) -> Self {
        RatFn { num: p, den: BTreeMap::new() }
    }

    pub fn zero(nvars: usize) -> Self {
        RatFn::from_poly(Poly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        RatFn::from_poly(Poly::one(nvars))
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        RatFn::from_poly(Poly::constant(nvars, c))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        RatFn::from_poly(Poly::var(nvars, i))
    }

    /// `num / den`, `None` if `den` is zero.
    pub fn quotient(num: Poly, den: &Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let mut d = BTreeMap::new();
        let c = push_factor(&mut d, den, 1);
        let mut r = RatFn { num: num.scale(&c.recip()), den: d };
        r.normalize();
        Some(r)
    }

    /// Same denominator, new numerator.
    pub fn with_numerator(&self, num: Poly) -> RatFn {
        let mut r = RatFn { num, den: self.den.clone() };
        r.normalize();
        r
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn factors(&self) -> &BTreeMap<Poly, u32> {
        &self.den
    }

    pub fn denominator(&self) -> Poly {
        let mut d = Poly::one(self.nvars());
        for (f, e) in &self.den {
            d = d.mul(&f.pow(*e));
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        if self.den.is_empty() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.den.is_empty() {
            self.num.constant_value()
        } else if self.num.is_zero() {
            Some(Q::zero())
        } else {
            None
        }
    }

    fn canonical(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
        }
        self
    }

    fn over_common(&self, o: &RatFn) -> (Poly, Poly, BTreeMap<Poly, u32>) {
        if self.den == o.den {
            return (self.num.clone(), o.num.clone(), self.den.clone());
        }
        let mut den = self.den.clone();
        for (f, e) in &o.den {
            let m = den.entry(f.clone()).or_insert(0);
            *m = (*m).max(*e);
        }
        let lift = |r: &RatFn| {
            let mut n = r.num.clone();
            for (f, e) in &den {
                let have = r.den.get(f).copied().unwrap_or(0);
                if *e > have {
                    n = n.mul(&f.pow(e - have));
                }
            }
            n
        };
        (lift(self), lift(o), den)
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let (a, b, den) = self.over_common(o);
        RatFn { num: a.add(&b), den }.canonical()
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        if o.is_zero() {
            return self.clone();
        }
        let (a, b, den) = self.over_common(o);
        RatFn { num: a.sub(&b), den }.canonical()
    }

    pub fn neg(&self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, k: &Q) -> RatFn {
        RatFn { num: self.num.scale(k), den: self.den.clone() }.canonical()
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        if self.is_zero() || o.is_zero() {
            return RatFn::zero(self.nvars());
        }
        let mut den = self.den.clone();
        for (f, e) in &o.den {
            *den.entry(f.clone()).or_insert(0) += e;
        }
        let mut r = RatFn { num: self.num.mul(&o.num), den };
        if !r.den.is_empty() {
            r.cancel_cheap();
        }
        r
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFn {
        RatFn { num: self.num.mul(p), den: self.den.clone() }.canonical()
    }

    /// `None` when dividing by zero.
    pub fn div(&self, o: &RatFn) -> Option<RatFn> {
        if o.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(RatFn::zero(self.nvars()));
        }
        let mut den = self.den.clone();
        let c = push_factor(&mut den, &o.num, 1);
        let mut num = self.num.scale(&c.recip());
        for (f, e) in &o.den {
            num = num.mul(&f.pow(*e));
        }
        let mut r = RatFn { num, den };
        r.normalize();
        Some(r)
    }

    pub fn pow(&self, e: u32) -> RatFn {
        RatFn {
            num: self.num.pow(e),
            den: self.den.iter().map(|(f, m)| (f.clone(), m * e)).collect(),
        }
        .canonical()
    }

    pub fn partial(&self, i: usize) -> RatFn {
        let active: Vec<(&Poly, u32, Poly)> = self
            .den
            .iter()
            .filter_map(|(f, e)| {
                let d = f.partial(i);
                if d.is_zero() {
                    None
                } else {
                    Some((f, *e, d))
                }
            })
            .collect();
        if active.is_empty() {
            return RatFn { num: self.num.partial(i), den: self.den.clone() }.canonical();
        }
        let mut prod_all = Poly::one(self.nvars());
        for (f, _, _) in &active {
            prod_all = prod_all.mul(f);
        }
        let mut num = self.num.partial(i).mul(&prod_all);
        for (k, (_, e, df)) in active.iter().enumerate() {
            let mut others = Poly::one(self.nvars());
            for (j, (g, _, _)) in active.iter().enumerate() {
                if j != k {
                    others = others.mul(g);
                }
            }
            num = num.sub(&self.num.mul(df).mul(&others).scale(&Q::from_integer((*e).into())));
        }
        let mut den = self.den.clone();
        for (f, _, _) in &active {
            *den.get_mut(*f).unwrap() += 1;
        }
        let mut r = RatFn { num, den }.canonical();
        r.cancel_cheap();
        r
    }

    /// Cancels denominator factors that divide the numerator.
    pub fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        if self.num.is_constant() {
            return;
        }
        let keys: Vec<Poly> = self.den.keys().cloned().collect();
        for f in keys {
            loop {
                let e = self.den[&f];
                if e == 0 {
                    break;
                }
                match self.num.div_exact(&f) {
                    Some(qt) => {
                        self.num = qt;
                        *self.den.get_mut(&f).unwrap() -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|_, e| *e > 0);
    }

    pub fn normalized(&self) -> RatFn {
        let mut r = self.clone();
        r.normalize();
        r
    }

    /// Cancellation restricted to single-variable factors, which is cheap.
    fn cancel_cheap(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let n = self.nvars();
        let vars: Vec<(usize, Poly)> = self
            .den
            .keys()
            .filter_map(|f| f.as_monomial().filter(|(m, _)| m.degree() == 1).map(|(m, _)| ((0..n).find(|&i| m.exp(i) == 1).unwrap(), f.clone())))
            .collect();
        for (i, f) in vars {
            let lowest = self.num.terms().keys().map(|m| m.exp(i)).min().unwrap_or(0);
            let e = self.den[&f];
            let k = lowest.min(e);
            if k > 0 {
                let shift = Monomial::one().with_exp(i, k);
                self.num = Poly::from_terms(
                    n,
                    self.num.terms().iter().map(|(m, c)| (shift.quotient_of(*m), c.clone())),
                );
                *self.den.get_mut(&f).unwrap() -= k;
            }
        }
        self.den.retain(|_, e| *e > 0);
    }

    pub fn extend_vars(&self, nvars: usize) -> RatFn {
        RatFn {
            num: self.num.extend_vars(nvars),
            den: self.den.iter().map(|(f, e)| (f.extend_vars(nvars), *e)).collect(),
        }
    }

    pub fn restrict_vars(&self, nvars: usize) -> Option<RatFn> {
        let mut den = BTreeMap::new();
        for (f, e) in &self.den {
            den.insert(f.restrict_vars(nvars)?, *e);
        }
        Some(RatFn { num: self.num.restrict_vars(nvars)?, den })
    }

    pub fn remap(&self, nvars: usize, map: &[usize]) -> RatFn {
        let mut den = BTreeMap::new();
        let mut c = Q::one();
        for (f, e) in &self.den {
            c *= push_factor(&mut den, &f.remap(nvars, map), *e);
        }
        RatFn { num: self.num.remap(nvars, map).scale(&c.recip()), den }
    }

    /// `None` if a denominator factor vanishes identically after substitution.
    pub fn substitute(&self, i: usize, v: &Q) -> Option<RatFn> {
        let mut r = RatFn::from_poly(self.num.substitute(i, v));
        for (f, e) in &self.den {
            let fs = RatFn::from_poly(f.substitute(i, v).clone());
            r = r.div(&fs.pow(*e))?;
        }
        Some(r)
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.num.degree_in(i) > 0 || self.den.keys().any(|f| f.degree_in(i) > 0)
    }

    pub fn den_depends_on(&self, i: usize) -> bool {
        self.den.keys().any(|f| f.degree_in(i) > 0)
    }

    /// Substitutes `subs[i]` for variable `i`; all substitutes share one chart.
    pub fn compose(&self, subs: &[RatFn]) -> Option<RatFn> {
        let n = subs.first().map(|s| s.nvars()).unwrap_or(self.nvars());
        let mut cache: Vec<Vec<RatFn>> = subs.iter().map(|s| vec![RatFn::one(n), s.clone()]).collect();
        let mut power = |i: usize, e: u32| -> RatFn {
            while cache[i].len() <= e as usize {
                let next = cache[i].last().unwrap().mul(&subs[i]);
                cache[i].push(next);
            }
            cache[i][e as usize].clone()
        };
        let mut compose_poly = |p: &Poly| -> RatFn {
            let mut acc = RatFn::zero(n);
            for (m, c) in p.terms() {
                let mut t = RatFn::constant(n, c.clone());
                for i in 0..p.nvars() {
                    let e = m.exp(i);
                    if e > 0 {
                        t = t.mul(&power(i, e));
                    }
                }
                acc = acc.add(&t);
            }
            acc
        };
        let mut r = compose_poly(&self.num);
        for (f, e) in &self.den {
            let fc = compose_poly(f);
            r = r.div(&fc.pow(*e))?;
        }
        Some(r)
    }

    pub fn eval_q(&self, x: &[Q]) -> Option<Q> {
        let mut d = Q::one();
        for (f, e) in &self.den {
            d *= f.eval_q(x).pow(*e as i32);
        }
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval_q(x) / d)
        }
    }

    pub fn compile(&self) -> CompiledRat {
        CompiledRat {
            num: self.num.compile(),
            den: self.den.iter().map(|(f, e)| (f.compile(), *e as i32)).collect(),
        }
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        let n = self.num.fmt_with(names);
        if self.den.is_empty() {
            return n;
        }
        let d: Vec<String> = self
            .den
            .iter()
            .map(|(f, e)| {
                let s = f.fmt_with(names);
                let s = if f.len() > 1 { format!("({s})") } else { s };
                if *e == 1 {
                    s
                } else {
                    format!("{s}^{e}")
                }
            })
            .collect();
        format!("({n})/({})", d.join("*"))
    }
}

#[derive(Clone, Debug)]
pub struct CompiledRat {
    num: CompiledPoly,
    den: Vec<(CompiledPoly, i32)>,
}

impl CompiledRat {
    /// Returns (value, denominator value).
    pub fn eval(&self, x: &[f64]) -> (f64, f64) {
        let mut d = 1.0;
        for (f, e) in &self.den {
            d *= f.eval(x).powi(*e);
        }
        (self.num.eval(x) / d, d)
    }
}

#[cfg(test)]
mod tests {
    use super::super::poly::{q, qf};
    use super::*;

    fn x(i: usize) -> RatFn {
        RatFn::var(2, i)
    }

    #[test]
    fn division_and_cancel() {
        let num = x(0).mul(&x(0)).sub(&RatFn::one(2));
        let den = x(0).sub(&RatFn::one(2));
        let r = num.div(&den).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r.eval_q(&[q(3), q(0)]).unwrap(), q(4));
    }

    #[test]
    fn quotient_rule() {
        let f = RatFn::one(2).div(&x(0).add(&x(1))).unwrap();
        let df = f.partial(0);
        let expect = RatFn::one(2).div(&x(0).add(&x(1)).pow(2)).unwrap().neg();
        assert!(df.sub(&expect).is_zero());
    }

    #[test]
    fn compose_substitutes() {
        let f = x(0).mul(&x(1)).div(&x(0).add(&RatFn::one(2))).unwrap();
        let g = f.compose(&[x(1), x(0).scale(&qf(1, 2))]).unwrap();
        let v = g.eval_q(&[q(2), q(3)]).unwrap();
        assert_eq!(v, qf(3, 4));
    }
}
