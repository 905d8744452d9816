use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::scalar::chart::{Chart, Point};
use crate::scalar::poly::{Poly, Q};
use crate::scalar::ratfun::{CompiledRat, RatFn};

pub type NumFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Denominators smaller than this in magnitude count as poles.
pub const POLE_EPS: f64 = 1e-12;

pub struct ExactBody {
    f: RatFn,
    compiled: OnceLock<CompiledRat>,
}

#[derive(Clone)]
pub enum Body {
    Exact(Arc<ExactBody>),
    Numeric(NumFn),
}

#[derive(Clone)]
pub struct ScalarField {
    chart: Chart,
    body: Body,
}

/// Central-difference step for coordinate value `x`.
pub fn fd_step(x: f64) -> f64 {
    f64::max(1e-6, 1e-6 * x.abs())
}

impl ScalarField {
    pub fn exact(chart: &Chart, f: RatFn) -> ScalarField {
        assert_eq!(f.nvars(), chart.dim(), "rational function arity differs from chart");
        ScalarField { chart: chart.clone(), body: Body::Exact(Arc::new(ExactBody { f, compiled: OnceLock::new() })) }
    }

    pub fn poly(chart: &Chart, p: Poly) -> ScalarField {
        ScalarField::exact(chart, RatFn::from_poly(p))
    }

    pub fn numeric(chart: &Chart, f: NumFn) -> ScalarField {
        ScalarField { chart: chart.clone(), body: Body::Numeric(f) }
    }

    pub fn from_fn(chart: &Chart, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> ScalarField {
        ScalarField::numeric(chart, Arc::new(f))
    }

    pub fn zero(chart: &Chart) -> ScalarField {
        ScalarField::exact(chart, RatFn::zero(chart.dim()))
    }

    pub fn constant(chart: &Chart, c: Q) -> ScalarField {
        ScalarField::exact(chart, RatFn::constant(chart.dim(), c))
    }

    pub fn int(chart: &Chart, c: i64) -> ScalarField {
        ScalarField::constant(chart, crate::scalar::poly::q(c))
    }

    pub fn coord(chart: &Chart, i: usize) -> ScalarField {
        ScalarField::exact(chart, RatFn::var(chart.dim(), i))
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn as_exact(&self) -> Option<&RatFn> {
        match &self.body {
            Body::Exact(b) => Some(&b.f),
            Body::Numeric(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.body, Body::Exact(_))
    }

    /// Exact zero only; a numeric field is never structurally zero.
    pub fn is_zero(&self) -> bool {
        self.as_exact().is_some_and(|f| f.is_zero())
    }

    pub fn constant_value(&self) -> Option<Q> {
        self.as_exact().and_then(|f| f.constant_value())
    }

    /// The same values behind a black-box evaluator.
    pub fn to_numeric(&self) -> ScalarField {
        let me = self.clone();
        ScalarField::from_fn(&self.chart, move |x| me.value(x))
    }

    /// Evaluation without pole checks: NaN or infinities propagate.
    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.body {
            Body::Exact(b) => b.compiled.get_or_init(|| b.f.compile()).eval(x).0,
            Body::Numeric(f) => f(x),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() < self.chart.dim() {
            return Err(Error::Invalid(format!("point of length {} on a {}-dimensional chart", x.len(), self.chart.dim())));
        }
        match &self.body {
            Body::Exact(b) => {
                let (v, d) = b.compiled.get_or_init(|| b.f.compile()).eval(x);
                if d.abs() < POLE_EPS || !v.is_finite() {
                    Err(Error::PoleAtPoint(x.to_vec()))
                } else {
                    Ok(v)
                }
            }
            Body::Numeric(f) => {
                let v = f(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::PoleAtPoint(x.to_vec()))
                }
            }
        }
    }

    pub fn eval_point(&self, p: &Point) -> Result<f64> {
        self.chart.check(&p.chart)?;
        self.eval(&p.coords)
    }

    fn binary(&self, g: &ScalarField, exact: impl Fn(&RatFn, &RatFn) -> RatFn, num: fn(f64, f64) -> f64) -> Result<ScalarField> {
        self.chart.check(&g.chart)?;
        Ok(match (&self.body, &g.body) {
            (Body::Exact(a), Body::Exact(b)) => ScalarField::exact(&self.chart, exact(&a.f, &b.f)),
            _ => {
                let (a, b) = (self.clone(), g.clone());
                ScalarField::from_fn(&self.chart, move |x| num(a.value(x), b.value(x)))
            }
        })
    }

    pub fn add(&self, g: &ScalarField) -> Result<ScalarField> {
        if g.is_zero() && self.chart == g.chart {
            return Ok(self.clone());
        }
        if self.is_zero() && self.chart == g.chart {
            return Ok(g.clone());
        }
        self.binary(g, |a, b| a.add(b), |a, b| a + b)
    }

    pub fn sub(&self, g: &ScalarField) -> Result<ScalarField> {
        if g.is_zero() && self.chart == g.chart {
            return Ok(self.clone());
        }
        self.binary(g, |a, b| a.sub(b), |a, b| a - b)
    }

    pub fn mul(&self, g: &ScalarField) -> Result<ScalarField> {
        self.binary(g, |a, b| a.mul(b), |a, b| a * b)
    }

    pub fn div(&self, g: &ScalarField) -> Result<ScalarField> {
        self.chart.check(&g.chart)?;
        if g.is_zero() {
            return Err(Error::DivisionByZeroField);
        }
        match (&self.body, &g.body) {
            (Body::Exact(a), Body::Exact(b)) => {
                Ok(ScalarField::exact(&self.chart, a.f.div(&b.f).ok_or(Error::DivisionByZeroField)?))
            }
            _ => {
                let (a, b) = (self.clone(), g.clone());
                Ok(ScalarField::from_fn(&self.chart, move |x| a.value(x) / b.value(x)))
            }
        }
    }

    pub fn scale(&self, k: &Q) -> ScalarField {
        match &self.body {
            Body::Exact(a) => ScalarField::exact(&self.chart, a.f.scale(k)),
            Body::Numeric(_) => {
                let a = self.clone();
                let kf = num_traits::ToPrimitive::to_f64(k).unwrap_or(f64::NAN);
                ScalarField::from_fn(&self.chart, move |x| kf * a.value(x))
            }
        }
    }

    pub fn neg(&self) -> ScalarField {
        match &self.body {
            Body::Exact(a) => ScalarField::exact(&self.chart, a.f.neg()),
            Body::Numeric(_) => {
                let a = self.clone();
                ScalarField::from_fn(&self.chart, move |x| -a.value(x))
            }
        }
    }

    pub fn pow(&self, e: u32) -> ScalarField {
        match &self.body {
            Body::Exact(a) => ScalarField::exact(&self.chart, a.f.pow(e)),
            Body::Numeric(_) => {
                let a = self.clone();
                ScalarField::from_fn(&self.chart, move |x| a.value(x).powi(e as i32))
            }
        }
    }

    pub fn partial(&self, i: usize) -> Result<ScalarField> {
        if i >= self.chart.dim() {
            return Err(Error::IndexOutOfRange(i, self.chart.dim()));
        }
        Ok(match &self.body {
            Body::Exact(a) => ScalarField::exact(&self.chart, a.f.partial(i)),
            Body::Numeric(_) => {
                let a = self.clone();
                ScalarField::from_fn(&self.chart, move |x| {
                    let h = fd_step(x[i]);
                    let mut p = x.to_vec();
                    p[i] = x[i] + h;
                    let fp = a.value(&p);
                    p[i] = x[i] - h;
                    let fm = a.value(&p);
                    (fp - fm) / (2.0 * h)
                })
            }
        })
    }

    pub fn gradient(&self) -> Result<Vec<ScalarField>> {
        (0..self.chart.dim()).map(|i| self.partial(i)).collect()
    }

    /// Cancels removable denominator factors of an exact field.
    pub fn normalized(&self) -> ScalarField {
        match &self.body {
            Body::Exact(a) if !a.f.is_polynomial() => ScalarField::exact(&self.chart, a.f.normalized()),
            _ => self.clone(),
        }
    }

    /// Exact equality for exact fields; `None` when either side is numeric.
    pub fn exact_eq(&self, g: &ScalarField) -> Option<bool> {
        match (self.as_exact(), g.as_exact()) {
            (Some(a), Some(b)) if self.chart == g.chart => Some(a.sub(b).is_zero()),
            _ => None,
        }
    }

    /// Substitutes `subs[i]` for coordinate `i`; the result lives on the
    /// chart of the substitutes.
    pub fn compose(&self, subs: &[ScalarField]) -> Result<ScalarField> {
        if subs.len() != self.chart.dim() {
            return Err(Error::Invalid("composition needs one substitute per coordinate".into()));
        }
        let chart = subs[0].chart().clone();
        for s in subs {
            chart.check(s.chart())?;
        }
        let exact: Option<Vec<RatFn>> = subs.iter().map(|s| s.as_exact().cloned()).collect();
        if let (Some(f), Some(ex)) = (self.as_exact(), exact) {
            let r = f.compose(&ex).ok_or(Error::DivisionByZeroField)?;
            return Ok(ScalarField::exact(&chart, r));
        }
        let me = self.clone();
        let subs = subs.to_vec();
        Ok(ScalarField::from_fn(&chart, move |x| {
            let y: Vec<f64> = subs.iter().map(|s| s.value(x)).collect();
            me.value(&y)
        }))
    }

    /// Moves the field to another chart: coordinate `i` becomes `map[i]`.
    pub fn remap(&self, chart: &Chart, map: &[usize]) -> ScalarField {
        match &self.body {
            Body::Exact(a) => ScalarField::exact(chart, a.f.remap(chart.dim(), map)),
            Body::Numeric(_) => {
                let a = self.clone();
                let map = map.to_vec();
                let n = self.chart.dim();
                ScalarField::from_fn(chart, move |x| {
                    let y: Vec<f64> = (0..n).map(|i| x[map[i]]).collect();
                    a.value(&y)
                })
            }
        }
    }

    /// Lifts to a chart extending this one by trailing coordinates.
    pub fn lift(&self, chart: &Chart) -> ScalarField {
        let map: Vec<usize> = (0..self.chart.dim()).collect();
        self.remap(chart, &map)
    }

    pub fn display(&self) -> String {
        match &self.body {
            Body::Exact(a) => a.f.fmt_with(self.chart.names()),
            Body::Numeric(_) => "<numeric>".to_string(),
        }
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::poly::q;

    fn chart() -> Chart {
        Chart::new(&["x1", "x2"]).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let c = chart();
        let (x1, x2) = (ScalarField::coord(&c, 0), ScalarField::coord(&c, 1));
        assert_eq!(x1.add(&x2).unwrap().eval(&[1.0, 2.0]).unwrap(), 3.0);
        assert!(x1.mul(&ScalarField::zero(&c)).unwrap().is_zero());
        let one = ScalarField::int(&c, 1);
        let r = x1.mul(&x1).unwrap().sub(&one).unwrap().div(&x1.sub(&one).unwrap()).unwrap();
        let v = r.eval(&[3.0, 0.0]).unwrap();
        let oracle = (3.0f64 * 3.0 - 1.0) / (3.0 - 1.0);
        assert_eq!(v, oracle);
        assert_eq!(x1.div(&ScalarField::zero(&c)).unwrap_err(), Error::DivisionByZeroField);
    }

    #[test]
    fn partial_examples() {
        let c = chart();
        let (x1, x2) = (ScalarField::coord(&c, 0), ScalarField::coord(&c, 1));
        let f = x1.mul(&x1).unwrap().mul(&x2).unwrap();
        let expect = x1.mul(&x2).unwrap().scale(&q(2));
        assert_eq!(f.partial(0).unwrap().exact_eq(&expect), Some(true));
        assert!(ScalarField::int(&c, 5).partial(1).unwrap().is_zero());
        let cube = x1.pow(3).to_numeric();
        let d = cube.partial(0).unwrap().eval(&[2.0, 0.0]).unwrap();
        assert!((d - 3.0 * 2.0f64.powi(2)).abs() < 1e-6);
        assert_eq!(f.partial(2).unwrap_err(), Error::IndexOutOfRange(2, 2));
    }

    #[test]
    fn pole_detection() {
        let c = chart();
        let inv = ScalarField::int(&c, 1).div(&ScalarField::coord(&c, 0)).unwrap();
        assert!(matches!(inv.eval(&[0.0, 1.0]), Err(Error::PoleAtPoint(_))));
        assert_eq!(ScalarField::zero(&c).eval(&[3.0, 4.0]).unwrap(), 0.0);
    }

    #[test]
    fn mixed_operands_become_numeric() {
        let c = chart();
        let x1 = ScalarField::coord(&c, 0);
        let s = x1.add(&x1.to_numeric()).unwrap();
        assert!(!s.is_exact());
        assert_eq!(s.eval(&[1.5, 0.0]).unwrap(), 3.0);
    }
}
