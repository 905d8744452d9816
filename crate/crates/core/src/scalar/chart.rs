use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::poly::Monomial;

pub type DomainFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A single global coordinate chart. Two charts are equal when their
/// coordinate names agree; the domain predicate does not take part.
#[derive(Clone)]
pub struct Chart {
    inner: Arc<ChartInner>,
}

struct ChartInner {
    names: Vec<String>,
    domain: Option<DomainFn>,
}

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Chart> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        if names.is_empty() {
            return Err(Error::Invalid("chart needs at least one coordinate".into()));
        }
        if names.len() > Monomial::MAX_VARS {
            return Err(Error::Invalid(format!("at most {} coordinates supported", Monomial::MAX_VARS)));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::Invalid(format!("duplicate coordinate `{n}`")));
            }
        }
        Ok(Chart { inner: Arc::new(ChartInner { names, domain: None }) })
    }

    /// Chart with coordinates `x1..xn`.
    pub fn numbered(prefix: &str, n: usize) -> Chart {
        let names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        Chart::new(&names).expect("valid chart")
    }

    pub fn with_domain(&self, domain: DomainFn) -> Chart {
        Chart { inner: Arc::new(ChartInner { names: self.inner.names.clone(), domain: Some(domain) }) }
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn dim(&self) -> usize {
        self.inner.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.inner.names.iter().position(|n| n == name)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() >= self.dim() && self.inner.domain.as_ref().map_or(true, |d| d(x))
    }

    pub fn domain(&self) -> Option<&DomainFn> {
        self.inner.domain.as_ref()
    }

    /// Appends one coordinate (a parameter such as ε or t). The domain
    /// predicate, if any, is kept and ignores the new coordinate.
    pub fn extended(&self, name: &str) -> Chart {
        let mut base = name.to_string();
        while self.index_of(&base).is_some() {
            base.push('_');
        }
        let mut names = self.inner.names.clone();
        names.push(base);
        Chart { inner: Arc::new(ChartInner { names, domain: self.inner.domain.clone() }) }
    }

    pub fn check(&self, other: &Chart) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ChartMismatch(self.inner.names.join(","), other.inner.names.join(",")))
        }
    }
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.names == other.inner.names
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({})", self.inner.names.join(","))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub chart: Chart,
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(chart: &Chart, coords: Vec<f64>) -> Result<Point> {
        if coords.len() != chart.dim() {
            return Err(Error::Invalid(format!("point has {} coordinates, chart has {}", coords.len(), chart.dim())));
        }
        Ok(Point { chart: chart.clone(), coords })
    }
}
