//! ε-dependent vector fields for the generator ODE dγ/dε = X_ε(γ).

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::family::EpsFamily;
use crate::homological::GeneratorSeries;
use crate::multivector::Multivector;
use crate::scalar::{fd_step, Chart, DomainFn, ScalarField};

#[derive(Clone)]
pub struct EpsVectorField {
    family: EpsFamily,
    domain: Option<DomainFn>,
    series: Option<GeneratorSeries>,
    /// ∂_j X^i on (x, ε), exact families only.
    grads: Arc<OnceLock<Option<Vec<Vec<ScalarField>>>>>,
}

impl std::fmt::Debug for EpsVectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "EpsVectorField({})", self.family.field().display())
    }
}

impl EpsVectorField {
    pub fn new(family: EpsFamily) -> Result<EpsVectorField> {
        if family.degree() != 1 {
            return Err(Error::WrongDegree { expected: 1, got: family.degree() });
        }
        let domain = family.base().domain().cloned();
        Ok(EpsVectorField { family, domain, series: None, grads: Arc::new(OnceLock::new()) })
    }

    /// An ε-independent field.
    pub fn frozen(x: &Multivector) -> Result<EpsVectorField> {
        EpsVectorField::new(EpsFamily::constant(x))
    }

    /// Σ ε^i/i!·X_i.
    pub fn from_series(series: GeneratorSeries) -> Result<EpsVectorField> {
        let chart = series.chart().clone();
        let fam = if series.is_empty() {
            EpsFamily::constant(&Multivector::zero(&chart, 1))
        } else {
            let ds = crate::homological::DeformationSeries::new(series.coeffs().to_vec())?;
            EpsFamily::from_series(&ds)?
        };
        let mut f = EpsVectorField::new(fam)?;
        f.series = Some(series);
        Ok(f)
    }

    /// Points failing the predicate count as outside the domain of the field.
    pub fn with_domain(mut self, domain: DomainFn) -> EpsVectorField {
        self.domain = Some(domain);
        self
    }

    pub fn family(&self) -> &EpsFamily {
        &self.family
    }

    pub fn series(&self) -> Option<&GeneratorSeries> {
        self.series.as_ref()
    }

    pub fn chart(&self) -> &Chart {
        self.family.base()
    }

    pub fn dim(&self) -> usize {
        self.chart().dim()
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        self.domain.as_ref().map_or(true, |d| d(x))
    }

    pub fn velocity(&self, eps: f64, x: &[f64]) -> Result<Vec<f64>> {
        if !self.in_domain(x) {
            return Err(Error::DomainExit(eps));
        }
        let v = self.family.values_at(eps, x).map_err(|e| match e {
            Error::PoleAtPoint(_) => Error::DomainExit(eps),
            e => e,
        })?;
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::DomainExit(eps));
        }
        Ok(v)
    }

    fn exact_grads(&self) -> Option<&Vec<Vec<ScalarField>>> {
        self.grads
            .get_or_init(|| {
                if !self.family.is_exact() {
                    return None;
                }
                let n = self.dim();
                let f = self.family.field();
                (0..n).map(|i| (0..n).map(|j| f.get(&[i]).partial(j).ok()).collect::<Option<Vec<_>>>()).collect()
            })
            .as_ref()
    }

    /// ∂X^i/∂x^j at (ε, x): exact for exact families, central differences otherwise.
    pub fn jacobian(&self, eps: f64, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dim();
        if let Some(g) = self.exact_grads() {
            let mut y = x.to_vec();
            y.push(eps);
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = g[i][j].eval(&y).map_err(|_| Error::DomainExit(eps))?;
                }
            }
            return Ok(m);
        }
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let h = fd_step(x[j]);
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[j] += h;
            b[j] -= h;
            let (va, vb) = (self.velocity(eps, &a)?, self.velocity(eps, &b)?);
            for i in 0..n {
                m[(i, j)] = (va[i] - vb[i]) / (2.0 * h);
            }
        }
        Ok(m)
    }
}
