//! Dirac brackets of an ε-family of symplectic forms w_ε restricted by
//! constraints 𝒜¹_ε, …, 𝒜^r_ε, their transversal Poisson fields and the
//! explicit generator of the deformation.
//!
//! All data live on the chart extended by ε, so ∂_ε is a plain partial and
//! brackets are the parametrized ones.

use crate::error::{Error, Result};
use crate::family::{EpsFamily, EPS_NAME};
use crate::linalg::{self, FieldMatrix};
use crate::multivector::Multivector;
use crate::poisson::PoissonTensor;
use crate::scalar::{parse_expr, qf, Chart, ScalarField, Q};

#[derive(Clone, Debug)]
pub struct DiracInstance {
    chart: Chart,
    ext: Chart,
    /// Component matrix of w_ε on (x, ε): w = Σ_{i<j} w_ij dx^i∧dx^j.
    w: FieldMatrix,
    constraints: Vec<ScalarField>,
    theta: Option<Vec<ScalarField>>,
}

/// Everything derived from an instance at once.
#[derive(Clone, Debug)]
pub struct DiracData {
    pub psi: Multivector,
    pub hamiltonians: Vec<Multivector>,
    /// Δ^{ij} = [[[[Ψ, 𝒜^i]], 𝒜^j]].
    pub delta: FieldMatrix,
    /// Δ_{ij}, the inverse matrix.
    pub delta_inv: FieldMatrix,
    pub dirac: Multivector,
}

fn sharp_form(psi: &Multivector, theta: &[ScalarField]) -> Result<Multivector> {
    Ok(psi.contract_form(theta)?.neg())
}

impl DiracInstance {
    /// `w` is a full antisymmetric matrix and `constraints`, `theta` are
    /// fields, all on `chart.extended("eps")`. Checks dw_ε = 0 exactly.
    pub fn new(chart: &Chart, w: FieldMatrix, constraints: Vec<ScalarField>, theta: Option<Vec<ScalarField>>) -> Result<DiracInstance> {
        let ext = chart.extended(EPS_NAME);
        let n = chart.dim();
        if w.len() != n || w.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("w needs an n×n component matrix".into()));
        }
        for f in w.iter().flatten().chain(constraints.iter()).chain(theta.iter().flatten()) {
            ext.check(f.chart())?;
        }
        if theta.as_ref().is_some_and(|t| t.len() != n) {
            return Err(Error::Invalid("θ needs one component per coordinate".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if w[i][j].add(&w[j][i])?.normalized().exact_eq(&ScalarField::zero(&ext)) == Some(false) {
                    return Err(Error::Invalid("w is not antisymmetric".into()));
                }
            }
        }
        // (dw)_{ijk} = ∂_i w_jk + ∂_j w_ki + ∂_k w_ij
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let c = w[j][k].partial(i)?.add(&w[k][i].partial(j)?)?.add(&w[i][j].partial(k)?)?.normalized();
                    if c.exact_eq(&ScalarField::zero(&ext)) == Some(false) {
                        return Err(Error::Invalid("w is not closed".into()));
                    }
                }
            }
        }
        Ok(DiracInstance { chart: chart.clone(), ext, w, constraints, theta })
    }

    /// Builds from expression strings; `w` lists (i, j, w_ij) with i < j.
    pub fn from_exprs(chart: &Chart, w: &[(usize, usize, &str)], constraints: &[&str], theta: Option<&[&str]>) -> Result<DiracInstance> {
        let ext = chart.extended(EPS_NAME);
        let n = chart.dim();
        let mut m = vec![vec![ScalarField::zero(&ext); n]; n];
        for &(i, j, s) in w {
            let f = parse_expr(&ext, s)?;
            m[j][i] = f.neg();
            m[i][j] = f;
        }
        let cons = constraints.iter().map(|s| parse_expr(&ext, s)).collect::<Result<Vec<_>>>()?;
        let theta = theta.map(|t| t.iter().map(|s| parse_expr(&ext, s)).collect::<Result<Vec<_>>>()).transpose()?;
        DiracInstance::new(chart, m, cons, theta)
    }

    /// The ℝ⁴(q1, p1, q2, p2) demo: w_ε = dq1∧dp1 + dq2∧dp2 + ε dq1∧dq2,
    /// 𝒜¹ = q2, 𝒜² = p2 + ε q1, θ = q1 dq2.
    pub fn demo() -> DiracInstance {
        let c = Chart::new(&["q1", "p1", "q2", "p2"]).unwrap();
        DiracInstance::from_exprs(&c, &[(0, 1, "1"), (2, 3, "1"), (0, 2, "eps")], &["q2", "p2 + eps*q1"], Some(&["0", "0", "q1", "0"])).unwrap()
    }

    /// A six-dimensional instance whose leaves carry a nonzero ẇ:
    /// w_ε = Σ dq_i∧dp_i + ε dq1∧dq2, 𝒜¹ = q3, 𝒜² = p3 + ε q1, θ = q1 dq2.
    pub fn demo6() -> DiracInstance {
        let c = Chart::new(&["q1", "p1", "q2", "p2", "q3", "p3"]).unwrap();
        DiracInstance::from_exprs(
            &c,
            &[(0, 1, "1"), (2, 3, "1"), (4, 5, "1"), (0, 2, "eps")],
            &["q3", "p3 + eps*q1"],
            Some(&["0", "0", "q1", "0", "0", "0"]),
        )
        .unwrap()
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn ext_chart(&self) -> &Chart {
        &self.ext
    }

    pub fn constraints(&self) -> &[ScalarField] {
        &self.constraints
    }

    pub fn without_theta(mut self) -> DiracInstance {
        self.theta = None;
        self
    }

    /// Ψ_ε = −W⁻¹, the Poisson tensor of w_ε.
    pub fn psi(&self) -> Result<Multivector> {
        let inv = linalg::inverse(&self.w, &self.ext).map_err(|_| Error::Invalid("w is degenerate".into()))?;
        let neg: FieldMatrix = inv.iter().map(|r| r.iter().map(|f| f.neg().normalized()).collect()).collect();
        Ok(Multivector::bivector_from_matrix(&self.ext, &neg)?.normalized())
    }

    /// Δ and its inverse; odd r or a degenerate Δ gives SingularDelta.
    pub fn delta(&self) -> Result<(Multivector, Vec<Multivector>, FieldMatrix, FieldMatrix)> {
        let psi = self.psi()?;
        let xs = self.constraints.iter().map(|a| psi.schouten(&Multivector::scalar(a.clone()))).collect::<Result<Vec<_>>>()?;
        let r = xs.len();
        let mut d = vec![vec![ScalarField::zero(&self.ext); r]; r];
        for i in 0..r {
            for j in 0..r {
                d[i][j] = xs[i].schouten(&Multivector::scalar(self.constraints[j].clone()))?.as_scalar().normalized();
            }
        }
        if r == 0 {
            return Err(Error::SingularDelta);
        }
        let det = linalg::det(&d, &self.ext)?;
        if det.is_zero() {
            return Err(Error::SingularDelta);
        }
        let inv = linalg::inverse(&d, &self.ext).map_err(|_| Error::SingularDelta)?;
        let inv = inv.iter().map(|row| row.iter().map(|f| f.normalized()).collect()).collect();
        Ok((psi, xs, d, inv))
    }

    pub fn data(&self) -> Result<DiracData> {
        let (psi, xs, delta, delta_inv) = self.delta()?;
        let r = xs.len();
        let mut dirac = psi.clone();
        for i in 0..r {
            for j in 0..r {
                if delta_inv[i][j].is_zero() {
                    continue;
                }
                let t = xs[i].wedge(&xs[j])?.scale_field(&delta_inv[i][j])?.scale(&qf(1, 2));
                dirac = dirac.add(&t)?;
            }
        }
        Ok(DiracData { psi, hamiltonians: xs, delta, delta_inv, dirac: dirac.normalized() })
    }

    /// Ψ^DIR as an ε-family.
    pub fn dirac_family(&self) -> Result<EpsFamily> {
        EpsFamily::new(&self.chart, self.data()?.dirac)
    }

    /// Ψ^DIR at a fixed rational ε, verified exactly.
    pub fn dirac_tensor(&self, eps: &Q) -> Result<PoissonTensor> {
        PoissonTensor::verify(self.dirac_family()?.at(eps)?, &[])
    }

    /// Z_i = Σ_k Δ_{ik} [[Ψ, 𝒜^k]], normalized so that d𝒜^j(Z_i) = δ_i^j.
    pub fn transversal_fields(&self) -> Result<Vec<EpsFamily>> {
        let d = self.data()?;
        let r = d.hamiltonians.len();
        (0..r)
            .map(|i| {
                let mut z = Multivector::zero(&self.ext, 1);
                for k in 0..r {
                    z = z.add(&d.hamiltonians[k].scale_field(&d.delta_inv[i][k])?)?;
                }
                EpsFamily::new(&self.chart, z.normalized())
            })
            .collect()
    }

    /// X_ε = Σ Δ_{ij} 𝒜̇^j [[Ψ, 𝒜^i]] − Ψ^DIR♯θ, where Ψ♯θ has components
    /// Σ_c Ψ^{ac} θ_c (so Ψ♯dg = −[[Ψ, g]]).
    pub fn generator(&self) -> Result<EpsFamily> {
        let theta = self.theta.as_ref().ok_or(Error::MissingThetaFamily)?;
        let d = self.data()?;
        let n = self.chart.dim();
        let r = d.hamiltonians.len();
        let mut x = Multivector::zero(&self.ext, 1);
        for i in 0..r {
            for j in 0..r {
                let adot = self.constraints[j].partial(n)?;
                let c = d.delta_inv[i][j].mul(&adot)?;
                if c.is_zero() {
                    continue;
                }
                x = x.add(&d.hamiltonians[i].scale_field(&c)?)?;
            }
        }
        x = x.sub(&sharp_form(&d.dirac, theta)?)?;
        EpsFamily::new(&self.chart, x.normalized())
    }

    /// Ψ^DIR θ-term check: ẇ_ε − dθ_ε evaluated on pairs of leaf tangent
    /// vectors, i.e. contracted with the Dirac tensor on both sides.
    pub fn theta_defect(&self) -> Result<Multivector> {
        let theta = self.theta.as_ref().ok_or(Error::MissingThetaFamily)?;
        let n = self.chart.dim();
        let d = self.data()?;
        // The 2-form ẇ − dθ as a matrix m_ij.
        let mut m = vec![vec![ScalarField::zero(&self.ext); n]; n];
        for i in 0..n {
            for j in 0..n {
                m[i][j] = self.w[i][j].partial(n)?.sub(&theta[j].partial(i)?.sub(&theta[i].partial(j)?)?)?.normalized();
            }
        }
        // Ψ^DIR m Ψ^DIR vanishes iff m vanishes on the leaves.
        let pd: FieldMatrix = (0..n).map(|a| (0..n).map(|b| d.dirac.get(&[a, b])).collect()).collect();
        let prod = linalg::mat_mul(&linalg::mat_mul(&pd, &m, &self.ext)?, &pd, &self.ext)?;
        Ok(Multivector::bivector_from_matrix(&self.ext, &prod)?.normalized())
    }

    /// [[X_ε, Ψ^DIR_ε]] + ∂_ε Ψ^DIR_ε as an ε-family.
    pub fn generator_residual(&self) -> Result<EpsFamily> {
        let fam = self.dirac_family()?;
        let x = self.generator()?;
        Ok(x.schouten(&fam)?.add(&fam.d_eps()?)?.normalized())
    }

    /// Evaluates ε at a rational value in each constraint.
    pub fn constraints_at(&self, eps: &Q) -> Result<Vec<ScalarField>> {
        self.constraints
            .iter()
            .map(|a| Ok(EpsFamily::new(&self.chart, Multivector::scalar(a.clone()))?.at(eps)?.as_scalar()))
            .collect()
    }
}

/// Rank of Ψ^DIR: n − r on the demo domain.
pub fn expected_rank(inst: &DiracInstance) -> usize {
    inst.chart.dim() - inst.constraints.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::{is_casimir, is_poisson_vf};
    use crate::scalar::q;

    #[test]
    fn demo_delta_and_tensor() {
        let inst = DiracInstance::demo();
        let d = inst.data().unwrap();
        let ext = inst.ext_chart().clone();
        let f = |s: &str| parse_expr(&ext, s).unwrap();
        assert_eq!(d.delta[0][1].exact_eq(&f("1")), Some(true));
        assert_eq!(d.delta[1][0].exact_eq(&f("-1")), Some(true));
        assert!(d.delta[0][0].is_zero() && d.delta[1][1].is_zero());
        let expect = Multivector::from_components(&ext, 2, vec![(vec![0, 1], f("1")), (vec![1, 3], f("eps"))]).unwrap();
        assert_eq!(d.dirac.exact_eq(&expect), Some(true));
        let p0 = inst.dirac_tensor(&q(0)).unwrap();
        assert!(p0.is_verified());
        assert_eq!(p0.body().exact_eq(&Multivector::basis(inst.chart(), &[0, 1]).unwrap()), Some(true));
    }

    #[test]
    fn constraints_are_casimirs_and_z_are_poisson() {
        for inst in [DiracInstance::demo(), DiracInstance::demo6()] {
            for e in [q(0), qf(1, 10), q(-2)] {
                let psi = inst.dirac_tensor(&e).unwrap();
                assert!(psi.is_verified());
                for a in inst.constraints_at(&e).unwrap() {
                    assert!(is_casimir(&psi, &a, &[]).unwrap().holds);
                }
                for z in inst.transversal_fields().unwrap() {
                    assert!(is_poisson_vf(&psi, &z.at(&e).unwrap(), &[]).unwrap().holds);
                }
            }
        }
    }

    #[test]
    fn normalization_of_transversal_fields() {
        let inst = DiracInstance::demo6();
        let zs = inst.transversal_fields().unwrap();
        for (i, z) in zs.iter().enumerate() {
            for (j, a) in inst.constraints().iter().enumerate() {
                let v = z.field().schouten(&Multivector::scalar(a.clone())).unwrap().as_scalar().normalized();
                let want = if i == j { 1 } else { 0 };
                assert_eq!(v.exact_eq(&ScalarField::int(inst.ext_chart(), want)), Some(true), "Z_{i}(A^{j})");
            }
        }
    }

    #[test]
    fn generator_solves_homological_equation() {
        for inst in [DiracInstance::demo(), DiracInstance::demo6()] {
            assert!(inst.theta_defect().unwrap().is_zero());
            assert!(inst.generator_residual().unwrap().field().is_zero());
        }
    }

    #[test]
    fn errors() {
        let c = Chart::new(&["q", "p"]).unwrap();
        let one = DiracInstance::from_exprs(&c, &[(0, 1, "1")], &["q"], None).unwrap();
        assert!(matches!(one.delta(), Err(Error::SingularDelta)));
        assert!(matches!(DiracInstance::demo().without_theta().generator(), Err(Error::MissingThetaFamily)));
    }
}
