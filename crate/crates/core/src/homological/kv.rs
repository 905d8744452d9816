//! Hamiltonian potentials and the solver for [[X, Ψ]] = Φ on a regular
//! foliation.
//!
//! The solver splits X into a transverse part Σ h_j V_j, fixed by the values
//! X(k_j) = h_j, and a leafwise part Z = −Ψ♯β with dβ = Ψ♯⁻¹ Φ'' on leaves.
//! The relations used are ι_{dk}[[X, Ψ]] = −[[Ψ, X(k)]] for a Casimir k,
//! Ψ♯dg = −[[Ψ, g]] and [[Ψ♯β, Ψ]] = −Ψ♯dβ.

use crate::error::{Error, Result};
use crate::homological::foliation::FoliationData;
use crate::homological::forms::{sharp, sharp_invert, VerticalForm};
use crate::homological::homotopy::{check_closed, homotopy_operator};
use crate::multivector::Multivector;
use crate::poisson::JacobiStatus;
use crate::scalar::ScalarField;

const SAMPLED_TOL: f64 = 1e-8;

/// Exact fields are tested symbolically; numeric ones at the foliation samples.
fn vanishes(fol: &FoliationData, a: &Multivector) -> Result<bool> {
    let a = a.normalized();
    if a.is_exact() {
        return Ok(a.is_zero());
    }
    for x in fol.sample_points() {
        if a.norm_at(&x)? > SAMPLED_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

/// g with [[Ψ, g]] = Y for a vertical vector field Y whose leafwise dual
/// 1-form is closed.
pub fn hamiltonian_potential(fol: &FoliationData, y: &Multivector) -> Result<ScalarField> {
    if y.degree() != 1 {
        return Err(Error::WrongDegree { expected: 1, got: y.degree() });
    }
    let theta = sharp_invert(fol, y, true)?;
    match check_closed(fol, &theta) {
        Err(Error::NotClosed) => return Err(Error::NotHamiltonian),
        r => r?,
    }
    let g = homotopy_operator(fol, &theta)?.as_function().neg();
    let xg = fol.poisson().body().schouten(&Multivector::scalar(g.clone()))?;
    if !vanishes(fol, &xg.sub(y)?)? {
        return Err(Error::NotHamiltonian);
    }
    Ok(g)
}

/// Intermediate data of a solve, kept for reports and tests.
#[derive(Clone, Debug)]
pub struct KvSolution {
    pub generator: Multivector,
    /// h_j = X(k_j).
    pub transverse: Vec<ScalarField>,
    /// Φ'' = Φ − [[Σ h_j V_j, Ψ]].
    pub vertical_rest: Multivector,
    pub leafwise: Multivector,
}

/// X with [[X, Ψ]] = Φ, for a bivector cocycle Φ.
pub fn kv_solve(fol: &FoliationData, phi: &Multivector) -> Result<Multivector> {
    Ok(kv_solve_detailed(fol, phi)?.generator)
}

pub fn kv_solve_detailed(fol: &FoliationData, phi: &Multivector) -> Result<KvSolution> {
    let psi = fol.poisson().body();
    let chart = psi.chart().clone();
    chart.check(phi.chart())?;
    if phi.degree() != 2 {
        return Err(Error::WrongDegree { expected: 2, got: phi.degree() });
    }
    if let JacobiStatus::Failed(d) = fol.poisson().status() {
        return Err(Error::NotPoisson(*d));
    }
    if !vanishes(fol, &psi.schouten(phi)?)? {
        return Err(Error::NotCocycle);
    }

    let mut transverse = Vec::new();
    let mut x1 = Multivector::zero(&chart, 1);
    for (j, (k, v)) in fol.casimirs().iter().zip(fol.duals()).enumerate() {
        let yj = phi.contract(k)?.normalized();
        let h = if vanishes(fol, &yj)? {
            ScalarField::zero(&chart)
        } else {
            match hamiltonian_potential(fol, &yj) {
                Ok(g) => g.neg(),
                Err(Error::NotVertical | Error::NotHamiltonian | Error::NotClosed) => return Err(Error::NotHamiltonianObstruction(j)),
                Err(e) => return Err(e),
            }
        };
        x1 = x1.add(&v.scale_field(&h)?)?;
        transverse.push(h);
    }
    let x1 = x1.normalized();

    let rest = phi.sub(&x1.schouten(psi)?)?.normalized();
    let leafwise = if vanishes(fol, &rest)? {
        Multivector::zero(&chart, 1)
    } else {
        let alpha = match sharp_invert(fol, &rest, true) {
            Err(Error::NotVertical) => return Err(Error::NotClosedVertical),
            r => r?,
        };
        if check_closed(fol, &alpha).is_err() {
            return Err(Error::NotClosedVertical);
        }
        let beta: VerticalForm = homotopy_operator(fol, &alpha)?;
        sharp(fol, &beta)?.neg().normalized()
    };

    let generator = x1.add(&leafwise)?.normalized();
    if !vanishes(fol, &generator.schouten(psi)?.sub(phi)?)? {
        return Err(Error::Invalid("post-check [[X, Ψ]] = Φ failed".into()));
    }
    Ok(KvSolution { generator, transverse, vertical_rest: rest, leafwise })
}
