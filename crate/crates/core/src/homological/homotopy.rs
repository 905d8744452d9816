//! Leafwise homotopy operator along the affine retraction
//! φ_t(x) = P(x) + t (x − P(x)).
//!
//! With W = x − P(x) and β = ι_W α, the primitive is
//! Kα(x) = ∫₀¹ (1/t) φ_t*β dt, because W(φ_t x) = t W(x) whenever P∘φ_t = P.
//! Integration in t is exact when no denominator of φ_t*β involves t,
//! otherwise it falls back to Gauss–Legendre quadrature.

use std::sync::Arc;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::homological::foliation::FoliationData;
use crate::homological::forms::{sharp, vertical_eq, VerticalForm};
use crate::linalg::{self, FieldMatrix};
use crate::multivector::{all_keys, indices_of, Multivector};
use crate::scalar::{q, Chart, Poly, RatFn, ScalarField};

pub const QUADRATURE_NODES: usize = 24;
const CLOSED_TOL: f64 = 1e-8;

struct Retraction {
    ext: Chart,
    /// φ_t as fields on (x, t).
    phi: Vec<ScalarField>,
    /// ∂φ_t^i/∂x^j on (x, t).
    jac: FieldMatrix,
    w: Multivector,
}

fn retraction(fol: &FoliationData) -> Result<Retraction> {
    let chart = fol.chart().clone();
    let n = chart.dim();
    let ext = chart.extended("t");
    let t = ScalarField::coord(&ext, n);
    let p = fol.retraction();
    let mut w = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    for (i, pi) in p.iter().enumerate() {
        let wi = ScalarField::coord(&chart, i).sub(pi)?;
        phi.push(pi.lift(&ext).add(&t.mul(&wi.lift(&ext))?)?);
        w.push(wi);
    }
    let jac = phi.iter().map(|f| (0..n).map(|j| f.partial(j)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    Ok(Retraction { ext, phi, jac, w: Multivector::vector(&chart, w)? })
}

/// ∫₀¹ f(x, t)/t dt for an exact f whose denominators do not involve t and
/// whose numerator vanishes at t = 0.
fn integrate_exact(f: &RatFn, n: usize) -> Option<RatFn> {
    if f.den_depends_on(n) {
        return None;
    }
    let mut out = Poly::zero(n + 1);
    for (m, c) in f.numerator().terms() {
        let k = m.exp(n);
        if k == 0 {
            return None;
        }
        out.add_term(m.with_exp(n, 0), c / q(k as i64));
    }
    f.with_numerator(out).restrict_vars(n)
}

/// The integrand (1/t)(φ_t*β)_J before integration, on (x, t).
fn pulled_back(r: &Retraction, beta: &VerticalForm, cols: &[usize]) -> Result<ScalarField> {
    let mut acc = ScalarField::zero(&r.ext);
    for (rows, b) in beta.components() {
        let bt = b.compose(&r.phi)?;
        if bt.is_zero() {
            continue;
        }
        let d = linalg::det(&linalg::submatrix(&r.jac, &rows, cols), &r.ext)?;
        if d.is_zero() {
            continue;
        }
        acc = acc.add(&bt.mul(&d)?)?;
    }
    Ok(acc.normalized())
}

fn integrate(g: &ScalarField, chart: &Chart) -> Result<ScalarField> {
    let n = chart.dim();
    if let Some(f) = g.as_exact() {
        if let Some(r) = integrate_exact(f, n) {
            return Ok(ScalarField::exact(chart, r));
        }
    }
    let rule = Arc::new(GaussLegendre::new(QUADRATURE_NODES).map_err(|e| Error::Invalid(e.to_string()))?);
    let g = g.to_numeric();
    Ok(ScalarField::from_fn(chart, move |x| {
        let mut y = x.to_vec();
        y.push(0.0);
        rule.integrate(0.0, 1.0, |t| {
            y[n] = t;
            g.value(&y) / t
        })
    }))
}

/// The primitive K(α) without any checks.
pub fn homotopy_operator(fol: &FoliationData, alpha: &VerticalForm) -> Result<VerticalForm> {
    let p = alpha.degree();
    if p == 0 {
        return Err(Error::WrongDegree { expected: 1, got: 0 });
    }
    let chart = fol.chart().clone();
    chart.check(alpha.chart())?;
    let r = retraction(fol)?;
    let beta = alpha.interior(&r.w)?;
    let mut entries = Vec::new();
    for key in all_keys(chart.dim(), p - 1) {
        let cols = indices_of(key);
        let g = pulled_back(&r, &beta, &cols)?;
        if g.is_zero() {
            continue;
        }
        entries.push((cols, integrate(&g, &chart)?.normalized()));
    }
    VerticalForm::from_components(&chart, p - 1, entries)
}

/// Leafwise closedness of α: Ψ♯dα vanishes.
pub fn check_closed(fol: &FoliationData, alpha: &VerticalForm) -> Result<()> {
    if alpha.degree() >= fol.rank() {
        return Ok(());
    }
    let s = sharp(fol, &alpha.d()?)?.normalized();
    if s.is_exact() {
        if !s.is_zero() {
            return Err(Error::NotClosed);
        }
    } else {
        for x in fol.sample_points() {
            if s.norm_at(&x)? > CLOSED_TOL {
                return Err(Error::NotClosed);
            }
        }
    }
    Ok(())
}

/// β with dβ = α on every leaf, for a leafwise closed α of degree ≥ 1.
/// Exact results are verified symbolically; a retraction that does not
/// contract the relevant leaves is reported rather than returned.
pub fn homotopy_primitive(fol: &FoliationData, alpha: &VerticalForm) -> Result<VerticalForm> {
    check_closed(fol, alpha)?;
    let k = homotopy_operator(fol, alpha)?;
    if k.is_exact() && alpha.is_exact() && vertical_eq(fol, &k.d()?, alpha)? != Some(true) {
        return Err(Error::Invalid("homotopy check dK(α) = α failed; the retraction does not contract the leaves".into()));
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::PoissonTensor;
    use crate::scalar::parse_expr;

    fn plane() -> FoliationData {
        let c = Chart::new(&["x", "y"]).unwrap();
        let psi = PoissonTensor::verify(Multivector::basis(&c, &[0, 1]).unwrap(), &[]).unwrap();
        FoliationData::new(psi, vec![], vec![], vec![0, 1]).unwrap()
    }

    #[test]
    fn primitive_of_area_form() {
        let fol = plane();
        let c = fol.chart().clone();
        let f = |s: &str| parse_expr(&c, s).unwrap();
        let area = VerticalForm::from_components(&c, 2, vec![(vec![0, 1], f("1"))]).unwrap();
        let k = homotopy_primitive(&fol, &area).unwrap();
        assert_eq!(k.get(&[0]).exact_eq(&f("-y/2")), Some(true));
        assert_eq!(k.get(&[1]).exact_eq(&f("x/2")), Some(true));
    }

    #[test]
    fn potential_and_non_closed() {
        let fol = plane();
        let c = fol.chart().clone();
        let f = |s: &str| parse_expr(&c, s).unwrap();
        let g = f("x^2*y + 3*y - 1");
        let k = homotopy_primitive(&fol, &VerticalForm::differential(&g).unwrap()).unwrap();
        assert_eq!(k.as_function().exact_eq(&f("x^2*y + 3*y")), Some(true));
        let bad = VerticalForm::from_components(&c, 1, vec![(vec![1], f("x"))]).unwrap();
        assert!(matches!(homotopy_primitive(&fol, &bad), Err(Error::NotClosed)));
    }

    #[test]
    fn t_dependent_denominator_uses_quadrature() {
        let fol = plane();
        let c = fol.chart().clone();
        let g = parse_expr(&c, "1/(1 + x^2 + y^2)").unwrap();
        let k = homotopy_operator(&fol, &VerticalForm::differential(&g).unwrap()).unwrap();
        let v = k.as_function();
        assert!(!v.is_exact());
        let x = [0.4, -0.7];
        let expect = g.eval(&x).unwrap() - 1.0;
        assert!((v.eval(&x).unwrap() - expect).abs() < 1e-12);
    }
}
