//! Contravariant antisymmetric tensor fields on a single chart.
//!
//! A p-vector is stored as a sparse map from index sets (bitmasks, i.e.
//! strictly increasing tuples) to coefficients, and is treated as a function
//! of odd variables ξ_i = ∂_i. The bracket is
//!
//! [[A,B]] = Σ_i (∂ξ_i A)∧(∂x_i B) + (−1)^{pq} (∂ξ_i B)∧(∂x_i A)
//!
//! with ∂ξ_i the left derivative. Under this convention the graded symmetry,
//! Leibniz and Jacobi identities hold with the signs recorded in
//! [`crate::convention`], [[X,f]] = X(f), [[X,Y]] is the Lie bracket, and
//! [[Ψ,f]] is the contraction of df into the first slot of Ψ.

pub mod pullback;
pub mod serial;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::scalar::{Chart, ScalarField, Q};

pub use pullback::{pullback_at, pullback_exact, DiffeoMap};

pub type Key = u32;

pub fn key_of(indices: &[usize]) -> Key {
    indices.iter().fold(0, |k, &i| k | (1 << i))
}

pub fn indices_of(k: Key) -> Vec<usize> {
    (0..32).filter(|i| k & (1 << i) != 0).collect()
}

/// Sign of ξ_I ∧ ξ_J relative to ξ_{I∪J}, for disjoint I, J.
pub fn wedge_sign(i: Key, j: Key) -> i32 {
    let mut n = 0;
    let mut rest = j;
    while rest != 0 {
        let b = rest.trailing_zeros();
        n += (i >> (b + 1)).count_ones();
        rest &= rest - 1;
    }
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of the left derivative ∂ξ_i applied to ξ_I (i ∈ I).
pub fn left_sign(set: Key, i: usize) -> i32 {
    if (set & ((1u32 << i) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sorts an index tuple, returning the permutation sign, or `None` on repeats.
pub fn sort_with_sign(indices: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    for a in 0..v.len() {
        for b in 0..v.len() - 1 - a {
            if v[b] > v[b + 1] {
                v.swap(b, b + 1);
                sign = -sign;
            } else if v[b] == v[b + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// All index sets of size `p` in dimension `n`, in lexicographic tuple order.
pub fn all_keys(n: usize, p: usize) -> Vec<Key> {
    fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Key>) {
        if cur.len() == p {
            out.push(key_of(cur));
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= n {
        rec(0, n, p, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Debug)]
pub struct Multivector {
    chart: Chart,
    degree: usize,
    comps: BTreeMap<Key, ScalarField>,
}

fn sign_field(f: &ScalarField, s: i32) -> ScalarField {
    if s >= 0 {
        f.clone()
    } else {
        f.neg()
    }
}

struct Acc {
    chart: Chart,
    map: BTreeMap<Key, ScalarField>,
}

impl Acc {
    fn new(chart: &Chart) -> Acc {
        Acc { chart: chart.clone(), map: BTreeMap::new() }
    }

    fn push(&mut self, k: Key, f: ScalarField) -> Result<()> {
        if f.is_zero() {
            return Ok(());
        }
        let v = match self.map.remove(&k) {
            Some(old) => old.add(&f)?,
            None => f,
        };
        if !v.is_zero() {
            self.map.insert(k, v);
        }
        Ok(())
    }

    fn finish(self, degree: usize) -> Multivector {
        let comps = self
            .map
            .into_iter()
            .map(|(k, f)| (k, f.normalized()))
            .filter(|(_, f)| !f.is_zero())
            .collect();
        Multivector { chart: self.chart, degree, comps }
    }
}

impl Multivector {
    pub fn zero(chart: &Chart, degree: usize) -> Multivector {
        Multivector { chart: chart.clone(), degree, comps: BTreeMap::new() }
    }

    pub fn scalar(f: ScalarField) -> Multivector {
        let chart = f.chart().clone();
        let mut comps = BTreeMap::new();
        if !f.is_zero() {
            comps.insert(0, f);
        }
        Multivector { chart, degree: 0, comps }
    }

    /// Builds from (index tuple, coefficient) pairs; tuples may be unsorted
    /// (the permutation sign is applied) and repeated tuples add up.
    pub fn from_components(chart: &Chart, degree: usize, entries: Vec<(Vec<usize>, ScalarField)>) -> Result<Multivector> {
        if degree > chart.dim() {
            return Err(Error::DegreeOverflow(degree, chart.dim()));
        }
        let mut acc = Acc::new(chart);
        for (idx, f) in entries {
            chart.check(f.chart())?;
            if idx.len() != degree {
                return Err(Error::WrongDegree { expected: degree, got: idx.len() });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= chart.dim()) {
                return Err(Error::IndexOutOfRange(bad, chart.dim()));
            }
            if let Some((sorted, s)) = sort_with_sign(&idx) {
                acc.push(key_of(&sorted), sign_field(&f, s))?;
            }
        }
        Ok(acc.finish(degree))
    }

    pub fn vector(chart: &Chart, comps: Vec<ScalarField>) -> Result<Multivector> {
        if comps.len() != chart.dim() {
            return Err(Error::Invalid("vector field needs one component per coordinate".into()));
        }
        Multivector::from_components(chart, 1, comps.into_iter().enumerate().map(|(i, f)| (vec![i], f)).collect())
    }

    /// ∂_{i1}∧…∧∂_{ip} with unit coefficient.
    pub fn basis(chart: &Chart, indices: &[usize]) -> Result<Multivector> {
        Multivector::from_components(chart, indices.len(), vec![(indices.to_vec(), ScalarField::int(chart, 1))])
    }

    /// Bivector from a full antisymmetric component matrix (upper triangle used).
    pub fn bivector_from_matrix(chart: &Chart, m: &[Vec<ScalarField>]) -> Result<Multivector> {
        let n = chart.dim();
        let mut entries = Vec::new();
        for (a, row) in m.iter().enumerate().take(n) {
            for (b, f) in row.iter().enumerate().take(n).skip(a + 1) {
                entries.push((vec![a, b], f.clone()));
            }
        }
        Multivector::from_components(chart, 2, entries)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn raw(&self) -> &BTreeMap<Key, ScalarField> {
        &self.comps
    }

    pub fn components(&self) -> impl Iterator<Item = (Vec<usize>, &ScalarField)> {
        self.comps.iter().map(|(k, f)| (indices_of(*k), f))
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    /// Component on an index tuple, with the permutation sign applied.
    pub fn get(&self, indices: &[usize]) -> ScalarField {
        match sort_with_sign(indices) {
            Some((sorted, s)) => match self.comps.get(&key_of(&sorted)) {
                Some(f) => sign_field(f, s),
                None => ScalarField::zero(&self.chart),
            },
            None => ScalarField::zero(&self.chart),
        }
    }

    /// The degree-0 coefficient (zero for other degrees).
    pub fn as_scalar(&self) -> ScalarField {
        if self.degree == 0 {
            self.comps.get(&0).cloned().unwrap_or_else(|| ScalarField::zero(&self.chart))
        } else {
            ScalarField::zero(&self.chart)
        }
    }

    /// Structural zero: no stored components.
    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.comps.values().all(|f| f.is_exact())
    }

    fn check(&self, o: &Multivector) -> Result<()> {
        self.chart.check(&o.chart)
    }

    fn same_degree(&self, o: &Multivector) -> Result<()> {
        self.check(o)?;
        if self.degree != o.degree && !self.is_zero() && !o.is_zero() {
            return Err(Error::WrongDegree { expected: self.degree, got: o.degree });
        }
        Ok(())
    }

    pub fn add(&self, o: &Multivector) -> Result<Multivector> {
        self.same_degree(o)?;
        let degree = if self.is_zero() { o.degree } else { self.degree };
        let mut acc = Acc::new(&self.chart);
        for (k, f) in self.comps.iter().chain(o.comps.iter()) {
            acc.push(*k, f.clone())?;
        }
        Ok(acc.finish(degree))
    }

    pub fn sub(&self, o: &Multivector) -> Result<Multivector> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Multivector {
        self.map(|f| f.neg())
    }

    pub fn scale(&self, k: &Q) -> Multivector {
        self.map(|f| f.scale(k))
    }

    pub fn scale_field(&self, g: &ScalarField) -> Result<Multivector> {
        self.chart.check(g.chart())?;
        let mut acc = Acc::new(&self.chart);
        for (k, f) in &self.comps {
            acc.push(*k, f.mul(g)?)?;
        }
        Ok(acc.finish(self.degree))
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Multivector {
        let comps = self.comps.iter().map(|(k, c)| (*k, f(c))).filter(|(_, c)| !c.is_zero()).collect();
        Multivector { chart: self.chart.clone(), degree: self.degree, comps }
    }

    pub fn try_map(&self, f: impl Fn(&ScalarField) -> Result<ScalarField>) -> Result<Multivector> {
        let mut comps = BTreeMap::new();
        for (k, c) in &self.comps {
            let v = f(c)?;
            if !v.is_zero() {
                comps.insert(*k, v);
            }
        }
        Ok(Multivector { chart: self.chart.clone(), degree: self.degree, comps })
    }

    pub fn normalized(&self) -> Multivector {
        self.map(|f| f.normalized())
    }

    /// Componentwise partial derivative.
    pub fn partial(&self, i: usize) -> Result<Multivector> {
        self.try_map(|f| f.partial(i))
    }

    /// Left derivative with respect to the odd variable ξ_i.
    pub fn left_derivative(&self, i: usize) -> Multivector {
        let mut comps = BTreeMap::new();
        for (k, f) in &self.comps {
            if k & (1 << i) != 0 {
                comps.insert(k & !(1 << i), sign_field(f, left_sign(*k, i)));
            }
        }
        Multivector { chart: self.chart.clone(), degree: self.degree.saturating_sub(1), comps }
    }

    /// Moves to another chart with coordinate `i` sent to `map[i]`.
    pub fn remap(&self, chart: &Chart, map: &[usize]) -> Multivector {
        let comps = self
            .comps
            .iter()
            .map(|(k, f)| (key_of(&indices_of(*k).iter().map(|&i| map[i]).collect::<Vec<_>>()), f.remap(chart, map)))
            .collect();
        Multivector { chart: chart.clone(), degree: self.degree, comps }
    }

    /// Lifts to a chart extending this one by trailing coordinates.
    pub fn lift(&self, chart: &Chart) -> Multivector {
        let map: Vec<usize> = (0..self.dim()).collect();
        self.remap(chart, &map)
    }

    pub fn wedge(&self, o: &Multivector) -> Result<Multivector> {
        self.check(o)?;
        let mut acc = Acc::new(&self.chart);
        for (i, a) in &self.comps {
            for (j, b) in &o.comps {
                if i & j != 0 {
                    continue;
                }
                acc.push(i | j, sign_field(&a.mul(b)?, wedge_sign(*i, *j)))?;
            }
        }
        Ok(acc.finish(self.degree + o.degree))
    }

    pub fn schouten(&self, o: &Multivector) -> Result<Multivector> {
        self.check(o)?;
        let (p, q) = (self.degree, o.degree);
        if p == 0 && q == 0 {
            return Err(Error::DegreeUnderflow);
        }
        let mut acc = Acc::new(&self.chart);
        let mut cache: HashMap<(bool, Key, usize), ScalarField> = HashMap::new();
        let mut half = |a_side: &Multivector, b_side: &Multivector, flip: bool, sign: i32, acc: &mut Acc| -> Result<()> {
            for (ka, a) in &a_side.comps {
                let mut rest = *ka;
                while rest != 0 {
                    let i = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    let s = left_sign(*ka, i) * sign;
                    let ka2 = ka & !(1 << i);
                    for (kb, b) in &b_side.comps {
                        if ka2 & kb != 0 {
                            continue;
                        }
                        let db = match cache.get(&(flip, *kb, i)) {
                            Some(d) => d.clone(),
                            None => {
                                let d = b.partial(i)?;
                                cache.insert((flip, *kb, i), d.clone());
                                d
                            }
                        };
                        if db.is_zero() {
                            continue;
                        }
                        let t = a.mul(&db)?;
                        acc.push(ka2 | kb, sign_field(&t, s * wedge_sign(ka2, *kb)))?;
                    }
                }
            }
            Ok(())
        };
        half(self, o, false, 1, &mut acc)?;
        let s2 = if (p * q) % 2 == 0 { 1 } else { -1 };
        half(o, self, true, s2, &mut acc)?;
        Ok(acc.finish(p + q - 1))
    }

    /// L_X A, equal to [[X, A]] with no extra sign.
    pub fn lie_derivative(x: &Multivector, a: &Multivector) -> Result<Multivector> {
        if x.degree != 1 {
            return Err(Error::WrongDegree { expected: 1, got: x.degree });
        }
        x.schouten(a)
    }

    /// Inserts df into the first slot: Σ_a ∂_a f · ∂ξ_a A.
    pub fn contract(&self, f: &ScalarField) -> Result<Multivector> {
        self.chart.check(f.chart())?;
        if self.degree == 0 {
            return Err(Error::TooManyArguments(1, 0));
        }
        let mut acc = Acc::new(&self.chart);
        let mut grads: HashMap<usize, ScalarField> = HashMap::new();
        for (k, c) in &self.comps {
            let mut rest = *k;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let g = match grads.get(&i) {
                    Some(g) => g.clone(),
                    None => {
                        let g = f.partial(i)?;
                        grads.insert(i, g.clone());
                        g
                    }
                };
                if g.is_zero() {
                    continue;
                }
                acc.push(k & !(1 << i), sign_field(&c.mul(&g)?, left_sign(*k, i)))?;
            }
        }
        Ok(acc.finish(self.degree - 1))
    }

    /// Substitutes df_1, …, df_k into the first k slots.
    pub fn contract_differentials(&self, fs: &[ScalarField]) -> Result<Multivector> {
        if fs.len() > self.degree {
            return Err(Error::TooManyArguments(fs.len(), self.degree));
        }
        let mut r = self.clone();
        for f in fs {
            r = r.contract(f)?;
        }
        Ok(r)
    }

    /// Inserts a covector (1-form components) into the first slot.
    pub fn contract_form(&self, theta: &[ScalarField]) -> Result<Multivector> {
        if self.degree == 0 {
            return Err(Error::TooManyArguments(1, 0));
        }
        let mut acc = Acc::new(&self.chart);
        for (k, c) in &self.comps {
            let mut rest = *k;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if theta[i].is_zero() {
                    continue;
                }
                acc.push(k & !(1 << i), sign_field(&c.mul(&theta[i])?, left_sign(*k, i)))?;
            }
        }
        Ok(acc.finish(self.degree - 1))
    }

    /// Dense component values at `x`, ordered as [`all_keys`].
    pub fn values_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        all_keys(self.dim(), self.degree)
            .into_iter()
            .map(|k| match self.comps.get(&k) {
                Some(f) => f.eval(x),
                None => Ok(0.0),
            })
            .collect()
    }

    /// Max-norm of the component values at `x`.
    pub fn norm_at(&self, x: &[f64]) -> Result<f64> {
        let mut m: f64 = 0.0;
        for f in self.comps.values() {
            m = m.max(f.eval(x)?.abs());
        }
        Ok(m)
    }

    /// Component matrix of a bivector at `x`.
    pub fn matrix_at(&self, x: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
        if self.degree != 2 {
            return Err(Error::WrongDegree { expected: 2, got: self.degree });
        }
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for (k, f) in &self.comps {
            let idx = indices_of(*k);
            let v = f.eval(x)?;
            m[(idx[0], idx[1])] = v;
            m[(idx[1], idx[0])] = -v;
        }
        Ok(m)
    }

    /// Exact equality; `None` when a numeric component is involved.
    pub fn exact_eq(&self, o: &Multivector) -> Option<bool> {
        if self.chart != o.chart {
            return Some(false);
        }
        let d = self.sub(o).ok()?;
        if d.is_exact() {
            Some(d.is_zero())
        } else {
            None
        }
    }

    pub fn display(&self) -> String {
        if self.comps.is_empty() {
            return "0".into();
        }
        let names = self.chart.names();
        let mut keys: Vec<Key> = self.comps.keys().copied().collect();
        keys.sort_by_key(|k| indices_of(*k));
        keys.iter()
            .map(|k| {
                let basis: Vec<String> = indices_of(*k).iter().map(|&i| format!("∂{}", names[i])).collect();
                let c = self.comps[k].display();
                if basis.is_empty() {
                    c
                } else {
                    format!("({c})·{}", basis.join("∧"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}
