//! Poisson tensors: Jacobi defect, Casimirs, Hamiltonian and Poisson vector
//! fields, the Lichnerowicz coboundary and pointwise rank.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multivector::Multivector;
use crate::scalar::ScalarField;

pub const RANK_TOL: f64 = 1e-10;
pub const CASIMIR_TOL: f64 = 1e-10;
pub const JACOBI_SAMPLED_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum JacobiStatus {
    Verified,
    Unverified,
    Failed(f64),
}

#[derive(Clone, Debug)]
pub struct PoissonTensor {
    body: Multivector,
    status: JacobiStatus,
}

/// Outcome of a vanishing test: exact when every field involved is exact.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DefectReport {
    pub holds: bool,
    pub exact: bool,
    pub max_defect: f64,
}

impl DefectReport {
    /// Exact inputs are decided symbolically; the sampled size is informative.
    /// Numeric inputs are decided by the sampled size against `tol`.
    pub fn of(defect: &Multivector, points: &[Vec<f64>], tol: f64) -> Result<DefectReport> {
        let mut max: f64 = 0.0;
        for x in points {
            max = max.max(defect.norm_at(x)?);
        }
        if defect.is_exact() {
            let holds = defect.is_zero();
            if !holds && max == 0.0 {
                // Vanishes at every sample: report the symbolic size instead.
                max = defect.len() as f64;
            }
            Ok(DefectReport { holds, exact: true, max_defect: if holds { 0.0 } else { max } })
        } else {
            Ok(DefectReport { holds: !points.is_empty() && max <= tol, exact: false, max_defect: max })
        }
    }
}

fn expect_degree(a: &Multivector, d: usize) -> Result<()> {
    if a.degree() != d {
        return Err(Error::WrongDegree { expected: d, got: a.degree() });
    }
    Ok(())
}

pub fn jacobi_defect(psi: &Multivector) -> Result<Multivector> {
    expect_degree(psi, 2)?;
    psi.schouten(psi)
}

impl PoissonTensor {
    /// Wraps without checking; operations that need the Jacobi identity still run.
    pub fn unverified(body: Multivector) -> Result<PoissonTensor> {
        expect_degree(&body, 2)?;
        Ok(PoissonTensor { body, status: JacobiStatus::Unverified })
    }

    /// Exact bodies are verified symbolically, numeric ones at `points`.
    pub fn verify(body: Multivector, points: &[Vec<f64>]) -> Result<PoissonTensor> {
        let d = jacobi_defect(&body)?;
        let r = DefectReport::of(&d, points, JACOBI_SAMPLED_TOL)?;
        let status = if r.holds { JacobiStatus::Verified } else { JacobiStatus::Failed(r.max_defect) };
        Ok(PoissonTensor { body, status })
    }

    pub fn body(&self) -> &Multivector {
        &self.body
    }

    pub fn status(&self) -> &JacobiStatus {
        &self.status
    }

    pub fn is_verified(&self) -> bool {
        self.status == JacobiStatus::Verified
    }
}

pub fn hamiltonian_vf(psi: &PoissonTensor, f: &ScalarField) -> Result<Multivector> {
    psi.body.schouten(&Multivector::scalar(f.clone()))
}

pub fn poisson_bracket(psi: &PoissonTensor, f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
    Ok(hamiltonian_vf(psi, f)?.schouten(&Multivector::scalar(g.clone()))?.as_scalar())
}

pub fn is_casimir(psi: &PoissonTensor, k: &ScalarField, points: &[Vec<f64>]) -> Result<DefectReport> {
    DefectReport::of(&hamiltonian_vf(psi, k)?, points, CASIMIR_TOL)
}

pub fn is_poisson_vf(psi: &PoissonTensor, x: &Multivector, points: &[Vec<f64>]) -> Result<DefectReport> {
    expect_degree(x, 1)?;
    DefectReport::of(&psi.body.schouten(x)?, points, CASIMIR_TOL)
}

/// δ_Ψ(A) = [[Ψ, A]].
pub fn coboundary(psi: &PoissonTensor, a: &Multivector) -> Result<Multivector> {
    if let JacobiStatus::Failed(d) = psi.status {
        return Err(Error::NotPoisson(d));
    }
    psi.body.schouten(a)
}

/// Numerical rank of the component matrix, singular values below 1e−10 dropped.
pub fn rank_at(psi: &PoissonTensor, x: &[f64]) -> Result<usize> {
    let m = psi.body.matrix_at(x)?;
    Ok(m.singular_values().iter().filter(|s| **s > RANK_TOL).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_expr, q, Chart};

    fn canonical() -> (Chart, PoissonTensor) {
        let c = Chart::new(&["q", "p"]).unwrap();
        let psi = PoissonTensor::verify(Multivector::basis(&c, &[0, 1]).unwrap(), &[]).unwrap();
        (c, psi)
    }

    #[test]
    fn canonical_pair() {
        let (c, psi) = canonical();
        assert!(psi.is_verified());
        let f = |s: &str| parse_expr(&c, s).unwrap();
        let xq = hamiltonian_vf(&psi, &f("q")).unwrap();
        assert_eq!(xq.exact_eq(&Multivector::basis(&c, &[1]).unwrap()), Some(true));
        assert_eq!(poisson_bracket(&psi, &f("q"), &f("p")).unwrap().constant_value(), Some(q(1)));
        assert!(poisson_bracket(&psi, &f("q^2*p"), &f("q^2*p")).unwrap().is_zero());
        assert!(hamiltonian_vf(&psi, &f("3")).unwrap().is_zero());
        assert!(!is_casimir(&psi, &f("q"), &[]).unwrap().holds);
        assert!(is_casimir(&psi, &f("7"), &[]).unwrap().holds);
        let cob = coboundary(&psi, &Multivector::scalar(f("q*p"))).unwrap();
        let expect = Multivector::vector(&c, vec![f("q"), f("-p")]).unwrap().neg();
        assert_eq!(cob.exact_eq(&expect), Some(true));
        assert_eq!(rank_at(&psi, &[0.3, 0.1]).unwrap(), 2);
    }

    #[test]
    fn poisson_vector_fields() {
        let (c, psi) = canonical();
        let f = |s: &str| parse_expr(&c, s).unwrap();
        let qdq = Multivector::vector(&c, vec![f("q"), f("0")]).unwrap();
        assert!(!is_poisson_vf(&psi, &qdq, &[]).unwrap().holds);
        assert!(is_poisson_vf(&psi, &Multivector::basis(&c, &[0]).unwrap(), &[]).unwrap().holds);
        let xh = hamiltonian_vf(&psi, &f("q^3*p - p^2")).unwrap();
        assert!(is_poisson_vf(&psi, &xh, &[]).unwrap().holds);
    }

    #[test]
    fn non_poisson_bivector_fails_verification() {
        let c = Chart::new(&["x1", "x2", "x3"]).unwrap();
        let f = |s: &str| parse_expr(&c, s).unwrap();
        let body = Multivector::from_components(&c, 2, vec![(vec![0, 1], f("x3")), (vec![1, 2], f("1")), (vec![2, 0], f("1"))]).unwrap();
        // In three dimensions this one satisfies the Jacobi identity.
        assert!(jacobi_defect(&body).unwrap().is_zero());
        let body = Multivector::from_components(&c, 2, vec![(vec![0, 1], f("x3")), (vec![1, 2], f("1")), (vec![2, 0], f("x1"))]).unwrap();
        let psi = PoissonTensor::verify(body, &[vec![0.1, 0.2, 0.3]]).unwrap();
        assert!(matches!(psi.status(), JacobiStatus::Failed(_)));
        assert!(matches!(coboundary(&psi, &Multivector::basis(&c, &[0]).unwrap()), Err(Error::NotPoisson(_))));
        let zero = PoissonTensor::unverified(Multivector::zero(&c, 2)).unwrap();
        assert_eq!(rank_at(&zero, &[1.0, 2.0, 3.0]).unwrap(), 0);
    }
}
