//! ε-dependent multivectors, stored as multivectors on the chart extended by
//! one parameter coordinate with no components along it. On such fields the
//! bracket of the extended chart is the parametrized bracket, and ∂_ε is an
//! ordinary partial derivative.

use crate::error::{Error, Result};
use crate::homological::DeformationSeries;
use crate::multivector::{all_keys, Multivector};
use crate::scalar::{q, Body, Chart, ScalarField, Q};

pub const EPS_NAME: &str = "eps";

#[derive(Clone, Debug)]
pub struct EpsFamily {
    base: Chart,
    field: Multivector,
}

fn factorial(n: usize) -> Q {
    (1..=n as i64).fold(q(1), |a, i| a * q(i))
}

/// Specializes a field on (x, ε) at a fixed rational ε.
fn specialize(f: &ScalarField, base: &Chart, eps: &Q) -> Result<ScalarField> {
    let n = base.dim();
    match f.body() {
        Body::Exact(_) => {
            let r = f.as_exact().unwrap().substitute(n, eps).ok_or(Error::DenominatorZero)?;
            let r = r.restrict_vars(n).ok_or(Error::DenominatorZero)?;
            Ok(ScalarField::exact(base, r))
        }
        Body::Numeric(_) => {
            let f = f.clone();
            let e = num_traits::ToPrimitive::to_f64(eps).unwrap_or(f64::NAN);
            Ok(ScalarField::from_fn(base, move |x| {
                let mut y = x.to_vec();
                y.push(e);
                f.value(&y)
            }))
        }
    }
}

impl EpsFamily {
    /// `field` lives on `base.extended("eps")` and has no ∂_eps components.
    pub fn new(base: &Chart, field: Multivector) -> Result<EpsFamily> {
        let ext = base.extended(EPS_NAME);
        ext.check(field.chart())?;
        let n = base.dim();
        if field.components().any(|(idx, _)| idx.contains(&n)) {
            return Err(Error::Invalid("an ε-family may not have components along ε".into()));
        }
        Ok(EpsFamily { base: base.clone(), field })
    }

    pub fn constant(a: &Multivector) -> EpsFamily {
        let ext = a.chart().extended(EPS_NAME);
        EpsFamily { base: a.chart().clone(), field: a.lift(&ext) }
    }

    /// Σ ε^i/i!·A_i.
    pub fn from_series(series: &DeformationSeries) -> Result<EpsFamily> {
        let base = series.chart().clone();
        let ext = base.extended(EPS_NAME);
        let eps = ScalarField::coord(&ext, base.dim());
        let mut acc = Multivector::zero(&ext, series.degree());
        for (i, a) in series.coeffs().iter().enumerate() {
            let w = eps.pow(i as u32).scale(&(q(1) / factorial(i)));
            acc = acc.add(&a.lift(&ext).scale_field(&w)?)?;
        }
        Ok(EpsFamily { base, field: acc.normalized() })
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn ext_chart(&self) -> &Chart {
        self.field.chart()
    }

    /// The extended multivector.
    pub fn field(&self) -> &Multivector {
        &self.field
    }

    pub fn eps(&self) -> ScalarField {
        ScalarField::coord(self.ext_chart(), self.base.dim())
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub fn is_exact(&self) -> bool {
        self.field.is_exact()
    }

    pub fn d_eps(&self) -> Result<EpsFamily> {
        Ok(EpsFamily { base: self.base.clone(), field: self.field.partial(self.base.dim())? })
    }

    pub fn add(&self, o: &EpsFamily) -> Result<EpsFamily> {
        Ok(EpsFamily { base: self.base.clone(), field: self.field.add(&o.field)? })
    }

    pub fn sub(&self, o: &EpsFamily) -> Result<EpsFamily> {
        Ok(EpsFamily { base: self.base.clone(), field: self.field.sub(&o.field)? })
    }

    pub fn schouten(&self, o: &EpsFamily) -> Result<EpsFamily> {
        Ok(EpsFamily { base: self.base.clone(), field: self.field.schouten(&o.field)? })
    }

    pub fn normalized(&self) -> EpsFamily {
        EpsFamily { base: self.base.clone(), field: self.field.normalized() }
    }

    /// The member at a rational ε, on the base chart.
    pub fn at(&self, eps: &Q) -> Result<Multivector> {
        let comps = self.field.components().map(|(idx, f)| Ok((idx, specialize(f, &self.base, eps)?))).collect::<Result<Vec<_>>>()?;
        Ok(Multivector::from_components(&self.base, self.degree(), comps)?.normalized())
    }

    /// Components (dense, lexicographic) at (ε, x).
    pub fn values_at(&self, eps: f64, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = x.to_vec();
        y.push(eps);
        all_keys(self.base.dim(), self.degree())
            .into_iter()
            .map(|k| self.field.raw().get(&k).map_or(Ok(0.0), |f| f.eval(&y)))
            .collect()
    }

    /// A_0..A_k with A_i = ∂_ε^i A at ε = 0.
    pub fn taylor(&self, k: usize) -> Result<DeformationSeries> {
        let mut cur = self.clone();
        let mut out = Vec::with_capacity(k + 1);
        for i in 0..=k {
            if i > 0 {
                cur = cur.d_eps()?;
            }
            out.push(cur.at(&q(0))?);
        }
        DeformationSeries::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_expr;

    #[test]
    fn series_round_trip() {
        let base = Chart::new(&["x", "y"]).unwrap();
        let ext = base.extended(EPS_NAME);
        let f = |s: &str| parse_expr(&ext, s).unwrap();
        let a = Multivector::from_components(&ext, 2, vec![(vec![0, 1], f("x + eps*y + eps^2*x*y"))]).unwrap();
        let fam = EpsFamily::new(&base, a).unwrap();
        let s = fam.taylor(3).unwrap();
        let g = |s: &str| parse_expr(&base, s).unwrap();
        assert_eq!(s.coeffs()[1].get(&[0, 1]).exact_eq(&g("y")), Some(true));
        assert_eq!(s.coeffs()[2].get(&[0, 1]).exact_eq(&g("2*x*y")), Some(true));
        assert!(s.coeffs()[3].is_zero());
        let back = EpsFamily::from_series(&s).unwrap();
        assert_eq!(back.field().exact_eq(fam.field()), Some(true));
        assert_eq!(fam.values_at(0.5, &[1.0, 2.0]).unwrap(), vec![1.0 + 1.0 + 0.5]);
        let bad = Multivector::basis(&ext, &[2]).unwrap();
        assert!(EpsFamily::new(&base, bad).is_err());
    }
}
