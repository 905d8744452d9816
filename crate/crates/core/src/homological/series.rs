//! Taylor series in ε (A_ε = Σ ε^i/i!·A_i), the order-by-order homological
//! equations and the transformed-tensor series.

use crate::error::{Error, Result};
use crate::multivector::Multivector;
use crate::scalar::{q, Chart, Q};

#[derive(Clone, Debug)]
pub struct DeformationSeries {
    coeffs: Vec<Multivector>,
}

#[derive(Clone, Debug)]
pub struct GeneratorSeries {
    chart: Chart,
    coeffs: Vec<Multivector>,
}

fn binomial(n: usize, k: usize) -> Q {
    let mut c = q(1);
    for i in 0..k {
        c = c * q((n - i) as i64) / q((i + 1) as i64);
    }
    c
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

impl DeformationSeries {
    pub fn new(coeffs: Vec<Multivector>) -> Result<DeformationSeries> {
        let first = coeffs.first().ok_or_else(|| Error::Invalid("a deformation series needs A_0".into()))?;
        for a in &coeffs[1..] {
            first.chart().check(a.chart())?;
            if a.degree() != first.degree() {
                return Err(Error::WrongDegree { expected: first.degree(), got: a.degree() });
            }
        }
        Ok(DeformationSeries { coeffs })
    }

    /// The highest coefficient index N.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn degree(&self) -> usize {
        self.coeffs[0].degree()
    }

    pub fn chart(&self) -> &Chart {
        self.coeffs[0].chart()
    }

    pub fn coeff(&self, i: usize) -> Result<&Multivector> {
        self.coeffs.get(i).ok_or(Error::InsufficientSeriesOrder { need: i, have: self.order() })
    }

    pub fn coeffs(&self) -> &[Multivector] {
        &self.coeffs
    }

    /// Components of the truncated sum at (ε, x).
    pub fn values_at(&self, eps: f64, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = self.coeffs[0].values_at(x)?;
        for (i, a) in self.coeffs.iter().enumerate().skip(1) {
            let w = eps.powi(i as i32) / factorial(i);
            for (o, v) in out.iter_mut().zip(a.values_at(x)?) {
                *o += w * v;
            }
        }
        Ok(out)
    }
}

impl GeneratorSeries {
    pub fn new(chart: &Chart, coeffs: Vec<Multivector>) -> Result<GeneratorSeries> {
        for x in &coeffs {
            chart.check(x.chart())?;
            if x.degree() != 1 {
                return Err(Error::WrongDegree { expected: 1, got: x.degree() });
            }
        }
        Ok(GeneratorSeries { chart: chart.clone(), coeffs })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn coeff(&self, i: usize) -> Result<&Multivector> {
        self.coeffs.get(i).ok_or(Error::InsufficientSeriesOrder { need: i + 1, have: self.coeffs.len() })
    }

    pub fn coeffs(&self) -> &[Multivector] {
        &self.coeffs
    }

    pub fn push(&mut self, x: Multivector) -> Result<()> {
        self.chart.check(x.chart())?;
        if x.degree() != 1 {
            return Err(Error::WrongDegree { expected: 1, got: x.degree() });
        }
        self.coeffs.push(x);
        Ok(())
    }

    pub fn values_at(&self, eps: f64, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.chart.dim()];
        for (i, a) in self.coeffs.iter().enumerate() {
            let w = eps.powi(i as i32) / factorial(i);
            for (o, v) in out.iter_mut().zip(a.values_at(x)?) {
                *o += w * v;
            }
        }
        Ok(out)
    }
}

/// Right-hand side of the order-k equation [[X_k, A_0]] = RHS:
/// −Σ_{i=1..k} C(k,i)[[X_{k−i}, A_i]] − A_{k+1}.
pub fn recursive_rhs(k: usize, series: &DeformationSeries, gens: &GeneratorSeries) -> Result<Multivector> {
    if series.order() < k + 1 {
        return Err(Error::InsufficientSeriesOrder { need: k + 1, have: series.order() });
    }
    if gens.len() < k {
        return Err(Error::InsufficientSeriesOrder { need: k, have: gens.len() });
    }
    let mut rhs = series.coeff(k + 1)?.neg();
    for i in 1..=k {
        let t = gens.coeff(k - i)?.schouten(series.coeff(i)?)?;
        rhs = rhs.sub(&t.scale(&binomial(k, i)))?;
    }
    Ok(rhs.normalized())
}

fn check_gens(gens: &GeneratorSeries, c: &Multivector, k: usize) -> Result<()> {
    gens.chart().check(c.chart())?;
    if gens.len() < k {
        return Err(Error::InsufficientSeriesOrder { need: k, have: gens.len() });
    }
    Ok(())
}

/// The truncated series C + Σ_{i=1..k} ε^i/i!·[[X_{i−1}, C]], exactly as
/// written. Only its first-order term agrees with the pulled-back tensor in
/// general; see [`lie_transform`].
pub fn transform_tensor(gens: &GeneratorSeries, c: &Multivector, k: usize) -> Result<DeformationSeries> {
    check_gens(gens, c, k)?;
    let mut coeffs = vec![c.clone()];
    for i in 1..=k {
        coeffs.push(gens.coeff(i - 1)?.schouten(c)?.normalized());
    }
    DeformationSeries::new(coeffs)
}

/// Taylor coefficients C_0..C_k of γ_ε*C for an ε-independent C, where γ_ε
/// is generated by X_ε = Σ ε^i/i!·X_i. With 𝒟 = L_{X_ε} + ∂_ε acting on
/// series, C_n = (𝒟^n C) at ε = 0, and in divided-power form
/// (𝒟W)_j = W_{j+1} + Σ_i C(j,i)[[X_i, W_{j−i}]].
pub fn lie_transform(gens: &GeneratorSeries, c: &Multivector, k: usize) -> Result<DeformationSeries> {
    check_gens(gens, c, k)?;
    let zero = Multivector::zero(c.chart(), c.degree());
    // w holds the coefficients of 𝒟^n C up to the order still needed.
    let mut w: Vec<Multivector> = vec![zero.clone(); k + 1];
    w[0] = c.clone();
    let mut out = vec![c.clone()];
    for n in 1..=k {
        let len = k - n + 1;
        let mut next = Vec::with_capacity(len);
        for j in 0..len {
            let mut acc = w.get(j + 1).cloned().unwrap_or_else(|| zero.clone());
            for i in 0..=j {
                if w[j - i].is_zero() {
                    continue;
                }
                let t = gens.coeff(i)?.schouten(&w[j - i])?;
                acc = acc.add(&t.scale(&binomial(j, i)))?;
            }
            next.push(acc.normalized());
        }
        out.push(next[0].clone());
        w = next;
    }
    DeformationSeries::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_expr;

    #[test]
    fn recursion_shapes() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let f = |s: &str| parse_expr(&c, s).unwrap();
        let v = |a: &str, b: &str| Multivector::vector(&c, vec![f(a), f(b)]).unwrap();
        let series = DeformationSeries::new(vec![v("x", "y"), v("y", "0"), v("x^2", "1"), v("0", "x*y")]).unwrap();
        let gens = GeneratorSeries::new(&c, vec![v("1", "x"), v("y", "y")]).unwrap();
        let a = |i: usize| series.coeff(i).unwrap().clone();
        let x = |i: usize| gens.coeff(i).unwrap().clone();
        assert_eq!(recursive_rhs(0, &series, &gens).unwrap().exact_eq(&a(1).neg()), Some(true));
        let r1 = x(0).schouten(&a(1)).unwrap().neg().sub(&a(2)).unwrap();
        assert_eq!(recursive_rhs(1, &series, &gens).unwrap().exact_eq(&r1), Some(true));
        let r2 = x(1).schouten(&a(1)).unwrap().scale(&q(-2)).sub(&x(0).schouten(&a(2)).unwrap()).unwrap().sub(&a(3)).unwrap();
        assert_eq!(recursive_rhs(2, &series, &gens).unwrap().exact_eq(&r2), Some(true));
        assert!(matches!(recursive_rhs(3, &series, &gens), Err(Error::InsufficientSeriesOrder { .. })));
    }

    #[test]
    fn transformed_series() {
        let c = Chart::new(&["x"]).unwrap();
        let f = |s: &str| parse_expr(&c, s).unwrap();
        let gens = GeneratorSeries::new(&c, vec![Multivector::basis(&c, &[0]).unwrap()]).unwrap();
        let cx = Multivector::scalar(f("x^2"));
        for s in [transform_tensor(&gens, &cx, 1).unwrap(), lie_transform(&gens, &cx, 1).unwrap()] {
            assert_eq!(s.coeffs()[1].as_scalar().exact_eq(&f("2*x")), Some(true));
        }
        let k = Multivector::scalar(f("5"));
        let s = transform_tensor(&gens, &k, 1).unwrap();
        assert!(s.coeffs()[1].is_zero());
        assert!(matches!(transform_tensor(&gens, &cx, 2), Err(Error::InsufficientSeriesOrder { .. })));
    }

    #[test]
    fn lie_transform_matches_translation_flow() {
        // X_ε = ∂x + ε∂x generates x ↦ x + ε + ε²/2, so γ_ε*x² has
        // Taylor coefficients x², 2x, 2 + 2x, 6.
        let c = Chart::new(&["x"]).unwrap();
        let f = |s: &str| parse_expr(&c, s).unwrap();
        let dx = Multivector::basis(&c, &[0]).unwrap();
        let gens = GeneratorSeries::new(&c, vec![dx.clone(), dx.clone(), Multivector::zero(&c, 1)]).unwrap();
        let s = lie_transform(&gens, &Multivector::scalar(f("x^2")), 3).unwrap();
        for (i, e) in ["x^2", "2*x", "2 + 2*x", "6"].iter().enumerate() {
            assert_eq!(s.coeffs()[i].as_scalar().exact_eq(&f(e)), Some(true), "order {}", i);
        }
        let literal = transform_tensor(&gens, &Multivector::scalar(f("x^2")), 2).unwrap();
        assert_eq!(literal.coeffs()[2].as_scalar().exact_eq(&f("2*x")), Some(true));
    }
}
