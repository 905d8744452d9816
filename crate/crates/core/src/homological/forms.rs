//! Vertical forms: ambient differential forms read modulo the ideal generated
//! by the Casimir differentials. Two forms are equal as vertical forms when
//! their images under sharp agree.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::homological::foliation::FoliationData;
use crate::linalg::{self, FieldMatrix};
use crate::multivector::{all_keys, indices_of, key_of, left_sign, sort_with_sign, wedge_sign, Key, Multivector};
use crate::scalar::{Chart, ScalarField};

#[derive(Clone, Debug)]
pub struct VerticalForm {
    chart: Chart,
    degree: usize,
    comps: BTreeMap<Key, ScalarField>,
}

impl VerticalForm {
    pub fn zero(chart: &Chart, degree: usize) -> VerticalForm {
        VerticalForm { chart: chart.clone(), degree, comps: BTreeMap::new() }
    }

    pub fn function(f: ScalarField) -> VerticalForm {
        let mut v = VerticalForm::zero(&f.chart().clone(), 0);
        if !f.is_zero() {
            v.comps.insert(0, f);
        }
        v
    }

    /// From (index tuple, coefficient) pairs of dx_{i1}∧…∧dx_{ir}; unsorted
    /// tuples carry their permutation sign.
    pub fn from_components(chart: &Chart, degree: usize, entries: Vec<(Vec<usize>, ScalarField)>) -> Result<VerticalForm> {
        let mut comps: BTreeMap<Key, ScalarField> = BTreeMap::new();
        for (idx, f) in entries {
            if idx.len() != degree {
                return Err(Error::WrongDegree { expected: degree, got: idx.len() });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= chart.dim()) {
                return Err(Error::IndexOutOfRange(bad, chart.dim()));
            }
            if let Some((sorted, s)) = sort_with_sign(&idx) {
                let f = if s < 0 { f.neg() } else { f };
                let k = key_of(&sorted);
                let v = match comps.remove(&k) {
                    Some(old) => old.add(&f)?,
                    None => f,
                };
                if !v.is_zero() {
                    comps.insert(k, v);
                }
            }
        }
        Ok(VerticalForm { chart: chart.clone(), degree, comps })
    }

    /// The differential df as a 1-form.
    pub fn differential(f: &ScalarField) -> Result<VerticalForm> {
        let entries = (0..f.chart().dim()).map(|i| Ok((vec![i], f.partial(i)?))).collect::<Result<Vec<_>>>()?;
        VerticalForm::from_components(f.chart(), 1, entries)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> impl Iterator<Item = (Vec<usize>, &ScalarField)> {
        self.comps.iter().map(|(k, f)| (indices_of(*k), f))
    }

    pub fn get(&self, indices: &[usize]) -> ScalarField {
        match sort_with_sign(indices) {
            Some((sorted, s)) => match self.comps.get(&key_of(&sorted)) {
                Some(f) if s < 0 => f.neg(),
                Some(f) => f.clone(),
                None => ScalarField::zero(&self.chart),
            },
            None => ScalarField::zero(&self.chart),
        }
    }

    /// The coefficient of a 0-form.
    pub fn as_function(&self) -> ScalarField {
        self.comps.get(&0).cloned().unwrap_or_else(|| ScalarField::zero(&self.chart))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.comps.values().all(|f| f.is_exact())
    }

    pub fn add(&self, o: &VerticalForm) -> Result<VerticalForm> {
        self.chart.check(&o.chart)?;
        let entries = self.components().chain(o.components()).map(|(i, f)| (i, f.clone())).collect();
        VerticalForm::from_components(&self.chart, self.degree.max(o.degree), entries)
    }

    pub fn neg(&self) -> VerticalForm {
        VerticalForm { chart: self.chart.clone(), degree: self.degree, comps: self.comps.iter().map(|(k, f)| (*k, f.neg())).collect() }
    }

    pub fn sub(&self, o: &VerticalForm) -> Result<VerticalForm> {
        self.add(&o.neg())
    }

    pub fn normalized(&self) -> VerticalForm {
        VerticalForm {
            chart: self.chart.clone(),
            degree: self.degree,
            comps: self.comps.iter().map(|(k, f)| (*k, f.normalized())).filter(|(_, f)| !f.is_zero()).collect(),
        }
    }

    /// Ambient exterior derivative. It preserves the ideal generated by the
    /// Casimir differentials, so it is a valid leafwise derivative.
    pub fn d(&self) -> Result<VerticalForm> {
        let mut entries = Vec::new();
        for (k, f) in &self.comps {
            for i in 0..self.chart.dim() {
                if k & (1 << i) != 0 {
                    continue;
                }
                let df = f.partial(i)?;
                if df.is_zero() {
                    continue;
                }
                let s = wedge_sign(1 << i, *k);
                let mut idx = indices_of(k | (1 << i));
                idx.sort();
                entries.push((idx, if s < 0 { df.neg() } else { df }));
            }
        }
        Ok(VerticalForm::from_components(&self.chart, self.degree + 1, entries)?.normalized())
    }

    /// Inserts a vector field into the first slot.
    pub fn interior(&self, w: &Multivector) -> Result<VerticalForm> {
        if self.degree == 0 {
            return Ok(VerticalForm::zero(&self.chart, 0));
        }
        let mut entries = Vec::new();
        for (k, f) in &self.comps {
            let mut rest = *k;
            while rest != 0 {
                let a = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let wa = w.get(&[a]);
                if wa.is_zero() {
                    continue;
                }
                let t = wa.mul(f)?;
                let t = if left_sign(*k, a) < 0 { t.neg() } else { t };
                entries.push((indices_of(k & !(1 << a)), t));
            }
        }
        Ok(VerticalForm::from_components(&self.chart, self.degree - 1, entries)?.normalized())
    }
}

fn component_matrix(psi: &Multivector) -> FieldMatrix {
    let n = psi.dim();
    (0..n).map(|a| (0..n).map(|b| psi.get(&[a, b])).collect()).collect()
}

/// (Ψ♯α)^{A} = Σ_C det(Ψ[A,C]) α_C, i.e. Ψ^{a1c1}⋯Ψ^{arcr} α_{c1…cr}.
pub fn sharp(fol: &FoliationData, alpha: &VerticalForm) -> Result<Multivector> {
    let psi = fol.poisson().body();
    psi.chart().check(alpha.chart())?;
    let chart = psi.chart().clone();
    let r = alpha.degree();
    if r == 0 {
        return Ok(Multivector::scalar(alpha.as_function()));
    }
    let m = component_matrix(psi);
    let mut entries = Vec::new();
    for ka in all_keys(chart.dim(), r) {
        let rows = indices_of(ka);
        let mut acc = ScalarField::zero(&chart);
        for (cols, a) in alpha.components() {
            let d = linalg::det(&linalg::submatrix(&m, &rows, &cols), &chart)?;
            if d.is_zero() {
                continue;
            }
            acc = acc.add(&d.mul(a)?)?;
        }
        entries.push((rows, acc));
    }
    Multivector::from_components(&chart, r, entries)
}

/// Contraction of `a` with every Casimir differential vanishes.
pub fn is_vertical(fol: &FoliationData, a: &Multivector, points: &[Vec<f64>]) -> Result<bool> {
    if a.degree() == 0 {
        return Ok(true);
    }
    for k in fol.casimirs() {
        let c = a.contract(k)?;
        if c.is_exact() {
            if !c.is_zero() {
                return Ok(false);
            }
        } else {
            for x in points {
                if c.norm_at(x)? > 1e-10 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The vertical form supported on leaf coordinates whose sharp is `a`,
/// from the inverse of the leaf block of Ψ.
pub fn sharp_invert(fol: &FoliationData, a: &Multivector, require_vertical: bool) -> Result<VerticalForm> {
    let chart = a.chart().clone();
    chart.check(fol.poisson().body().chart())?;
    if require_vertical && !is_vertical(fol, a, &fol.sample_points())? {
        return Err(Error::NotVertical);
    }
    let r = a.degree();
    if r == 0 {
        return Ok(VerticalForm::function(a.as_scalar()));
    }
    let minv = fol.leaf_block_inverse()?;
    let leaf = fol.leaf();
    let mut entries = Vec::new();
    for cset in all_keys(leaf.len(), r) {
        let crow = indices_of(cset);
        let mut acc = ScalarField::zero(&chart);
        for aset in all_keys(leaf.len(), r) {
            let acol = indices_of(aset);
            let comp = a.get(&acol.iter().map(|&i| leaf[i]).collect::<Vec<_>>());
            if comp.is_zero() {
                continue;
            }
            let d = linalg::det(&linalg::submatrix(&minv, &crow, &acol), &chart)?;
            if d.is_zero() {
                continue;
            }
            acc = acc.add(&d.mul(&comp)?)?;
        }
        entries.push((crow.iter().map(|&i| leaf[i]).collect(), acc.normalized()));
    }
    VerticalForm::from_components(&chart, r, entries)
}

/// Vertical equality through sharp.
pub fn vertical_eq(fol: &FoliationData, a: &VerticalForm, b: &VerticalForm) -> Result<Option<bool>> {
    let d = sharp(fol, &a.sub(b)?)?;
    if d.is_exact() {
        Ok(Some(d.normalized().is_zero()))
    } else {
        Ok(None)
    }
}

pub fn vertical_d(_fol: &FoliationData, alpha: &VerticalForm) -> Result<VerticalForm> {
    alpha.d()
}
