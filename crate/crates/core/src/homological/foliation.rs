//! Regular symplectic foliations: Casimirs, dual Poisson vector fields, a
//! choice of leaf coordinates and a retraction used by the homotopy operator.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, FieldMatrix};
use crate::multivector::Multivector;
use crate::poisson::{self, PoissonTensor, CASIMIR_TOL};
use crate::scalar::{q, Chart, ScalarField, Q};

#[derive(Clone, Debug)]
pub struct FoliationData {
    poisson: PoissonTensor,
    casimirs: Vec<ScalarField>,
    duals: Vec<Multivector>,
    leaf: Vec<usize>,
    center: Vec<Q>,
    retraction: Option<Vec<ScalarField>>,
    samples: Vec<Vec<f64>>,
    minv: Arc<OnceLock<Result<FieldMatrix>>>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FoliationReport {
    pub duality_max: f64,
    pub casimir_max: f64,
    pub duals_poisson_max: f64,
    pub rank_ok: bool,
    pub retraction_max: f64,
    pub pass: bool,
}

impl FoliationData {
    /// `leaf` lists the coordinates that serve as leaf coordinates; together
    /// with the Casimirs they must account for every dimension.
    pub fn new(poisson: PoissonTensor, casimirs: Vec<ScalarField>, duals: Vec<Multivector>, leaf: Vec<usize>) -> Result<FoliationData> {
        let chart = poisson.body().chart().clone();
        let m = chart.dim();
        if casimirs.len() != duals.len() {
            return Err(Error::Invalid(format!("{} Casimirs but {} dual fields", casimirs.len(), duals.len())));
        }
        if leaf.len() % 2 != 0 || leaf.len() + casimirs.len() != m {
            return Err(Error::Invalid(format!("{} leaf coordinates and {} Casimirs do not fill dimension {}", leaf.len(), casimirs.len(), m)));
        }
        let mut seen = vec![false; m];
        for &i in &leaf {
            if i >= m {
                return Err(Error::IndexOutOfRange(i, m));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Invalid(format!("leaf coordinate {} repeated", i)));
            }
        }
        for k in &casimirs {
            chart.check(k.chart())?;
        }
        for v in &duals {
            chart.check(v.chart())?;
            if v.degree() != 1 {
                return Err(Error::WrongDegree { expected: 1, got: v.degree() });
            }
        }
        let center = vec![q(0); leaf.len()];
        Ok(FoliationData { poisson, casimirs, duals, leaf, center, retraction: None, samples: Vec::new(), minv: Arc::new(OnceLock::new()) })
    }

    /// Star center of the default radial retraction, in leaf coordinates.
    pub fn with_center(mut self, center: Vec<Q>) -> Result<FoliationData> {
        if center.len() != self.leaf.len() {
            return Err(Error::Invalid("star center needs one value per leaf coordinate".into()));
        }
        self.center = center;
        Ok(self)
    }

    /// A custom retraction P. It must preserve the Casimirs and satisfy
    /// P(P(x) + t(x − P(x))) = P(x).
    pub fn with_retraction(mut self, p: Vec<ScalarField>) -> Result<FoliationData> {
        let chart = self.chart().clone();
        if p.len() != chart.dim() {
            return Err(Error::Invalid("retraction needs one component per coordinate".into()));
        }
        for f in &p {
            chart.check(f.chart())?;
        }
        self.retraction = Some(p);
        Ok(self)
    }

    /// Points used wherever a numeric field must be tested for vanishing.
    pub fn with_samples(mut self, samples: Vec<Vec<f64>>) -> FoliationData {
        self.samples = samples;
        self
    }

    pub fn chart(&self) -> &Chart {
        self.poisson.body().chart()
    }

    pub fn poisson(&self) -> &PoissonTensor {
        &self.poisson
    }

    pub fn casimirs(&self) -> &[ScalarField] {
        &self.casimirs
    }

    pub fn duals(&self) -> &[Multivector] {
        &self.duals
    }

    pub fn leaf(&self) -> &[usize] {
        &self.leaf
    }

    pub fn rank(&self) -> usize {
        self.leaf.len()
    }

    pub fn sample_points(&self) -> Vec<Vec<f64>> {
        self.samples.clone()
    }

    /// Components of P: the given retraction, or the radial one that moves the
    /// leaf coordinates to the star center and keeps the rest.
    pub fn retraction(&self) -> Vec<ScalarField> {
        if let Some(p) = &self.retraction {
            return p.clone();
        }
        let chart = self.chart();
        (0..chart.dim())
            .map(|i| match self.leaf.iter().position(|&l| l == i) {
                Some(j) => ScalarField::constant(chart, self.center[j].clone()),
                None => ScalarField::coord(chart, i),
            })
            .collect()
    }

    /// Exact inverse of the leaf block Ψ_LL, computed once.
    pub fn leaf_block_inverse(&self) -> Result<FieldMatrix> {
        self.minv
            .get_or_init(|| {
                let psi = self.poisson.body();
                let m: FieldMatrix = self.leaf.iter().map(|&a| self.leaf.iter().map(|&b| psi.get(&[a, b])).collect()).collect();
                linalg::inverse(&m, self.chart())
            })
            .clone()
    }

    /// Checks Casimirs, duality V_i(k_j) = δ_ij, that the V_i are Poisson, the
    /// rank and the retraction properties, at `points`.
    pub fn validate(&self, points: &[Vec<f64>]) -> Result<FoliationReport> {
        let mut casimir_max: f64 = 0.0;
        for k in &self.casimirs {
            casimir_max = casimir_max.max(poisson::is_casimir(&self.poisson, k, points)?.max_defect);
        }
        let mut duals_poisson_max: f64 = 0.0;
        for v in &self.duals {
            duals_poisson_max = duals_poisson_max.max(poisson::is_poisson_vf(&self.poisson, v, points)?.max_defect);
        }
        let mut duality_max: f64 = 0.0;
        for (i, v) in self.duals.iter().enumerate() {
            for (j, k) in self.casimirs.iter().enumerate() {
                let vk = v.contract(k)?.as_scalar();
                let target = if i == j { 1.0 } else { 0.0 };
                for x in points {
                    duality_max = duality_max.max((vk.eval(x)? - target).abs());
                }
            }
        }
        let mut rank_ok = true;
        for x in points {
            rank_ok &= poisson::rank_at(&self.poisson, x)? == self.rank();
        }
        let p = self.retraction();
        let mut retraction_max: f64 = 0.0;
        for x in points {
            let px: Vec<f64> = p.iter().map(|f| f.eval(x)).collect::<Result<_>>()?;
            for t in [0.25, 0.5, 0.75] {
                let y: Vec<f64> = px.iter().zip(x).map(|(a, b)| a + t * (b - a)).collect();
                let py: Vec<f64> = p.iter().map(|f| f.eval(&y)).collect::<Result<_>>()?;
                for (a, b) in py.iter().zip(&px) {
                    retraction_max = retraction_max.max((a - b).abs());
                }
                for k in &self.casimirs {
                    retraction_max = retraction_max.max((k.eval(&y)? - k.eval(x)?).abs());
                }
            }
        }
        let tol = 1e-9;
        let pass = casimir_max <= CASIMIR_TOL && duals_poisson_max <= CASIMIR_TOL && duality_max <= tol && rank_ok && retraction_max <= tol;
        Ok(FoliationReport { duality_max, casimir_max, duals_poisson_max, rank_ok, retraction_max, pass })
    }
}
