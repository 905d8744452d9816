//! Problem files: a chart, named tensors given by expression strings, an
//! optional foliation, and run settings.
//!
//! ```json
//! {
//!   "chart": ["x", "y", "c"],
//!   "tensors": { "psi": { "components": { "0,1": "1" } } },
//!   "foliation": { "poisson": "psi", "casimirs": ["c"], "duals": ["v"], "leaf": ["x", "y"] }
//! }
//! ```
//!
//! Component keys are comma-separated coordinate indices or names; the
//! degree is the key length (the empty key "" for functions).

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use schouten_core::error::{Error, Result};
use schouten_core::homological::FoliationData;
use schouten_core::multivector::Multivector;
use schouten_core::poisson::PoissonTensor;
use schouten_core::scalar::{parse_expr, Chart, ScalarField};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSpec {
    #[serde(default)]
    pub degree: Option<usize>,
    pub components: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoliationSpec {
    pub poisson: String,
    #[serde(default)]
    pub casimirs: Vec<String>,
    #[serde(default)]
    pub duals: Vec<String>,
    pub leaf: Vec<String>,
    #[serde(default)]
    pub center: Option<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EulerSpec {
    #[serde(default)]
    pub eta: Option<Vec<String>>,
    #[serde(default)]
    pub eps: Option<String>,
    #[serde(default)]
    pub hamiltonian: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum CaseSpec {
    Euler(EulerSpec),
    Dirac {
        #[serde(default)]
        dim: Option<usize>,
    },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProblem {
    #[serde(default)]
    pub chart: Vec<String>,
    #[serde(default)]
    pub tensors: BTreeMap<String, TensorSpec>,
    #[serde(default)]
    pub foliation: Option<FoliationSpec>,
    /// Name of the right-hand side Φ for the homological solver.
    #[serde(default)]
    pub rhs: Option<String>,
    #[serde(default)]
    pub case: Option<CaseSpec>,
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub eps_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Half-width of the sampling box centred at the origin.
    #[serde(default)]
    pub half_width: Option<f64>,
}

/// A parsed problem with every expression resolved against the chart.
#[derive(Clone, Debug)]
pub struct Problem {
    pub raw: RawProblem,
    pub chart: Option<Chart>,
    pub tensors: BTreeMap<String, Multivector>,
}

fn json_error(e: serde_json::Error) -> Error {
    let msg = e.to_string();
    // serde reports unknown fields as "unknown field `name`, expected ..."
    if let Some(rest) = msg.strip_prefix("unknown field `") {
        if let Some(end) = rest.find('`') {
            return Error::UnknownKey(rest[..end].to_string());
        }
    }
    if let Some(rest) = msg.strip_prefix("unknown variant `") {
        if let Some(end) = rest.find('`') {
            return Error::UnknownKey(rest[..end].to_string());
        }
    }
    Error::Parse { line: e.line(), col: e.column(), msg }
}

fn index_of(chart: &Chart, tok: &str) -> Result<usize> {
    let tok = tok.trim();
    if let Ok(i) = tok.parse::<usize>() {
        if i >= chart.dim() {
            return Err(Error::IndexOutOfRange(i, chart.dim()));
        }
        return Ok(i);
    }
    chart.index_of(tok).ok_or_else(|| Error::UnknownCoordinate(tok.to_string()))
}

fn parse_key(chart: &Chart, key: &str) -> Result<Vec<usize>> {
    if key.trim().is_empty() {
        return Ok(vec![]);
    }
    key.split(',').map(|t| index_of(chart, t)).collect()
}

pub fn parse_tensor(chart: &Chart, spec: &TensorSpec) -> Result<Multivector> {
    let mut entries = Vec::new();
    let mut degree = spec.degree;
    for (k, v) in &spec.components {
        let idx = parse_key(chart, k)?;
        match degree {
            None => degree = Some(idx.len()),
            Some(d) if d != idx.len() => return Err(Error::WrongDegree { expected: d, got: idx.len() }),
            _ => {}
        }
        entries.push((idx, parse_expr(chart, v)?));
    }
    Multivector::from_components(chart, degree.unwrap_or(0), entries).map(|m| m.normalized())
}

pub fn parse_problem_str(src: &str) -> Result<Problem> {
    let raw: RawProblem = serde_json::from_str(src).map_err(json_error)?;
    let chart = if raw.chart.is_empty() { None } else { Some(Chart::new(&raw.chart)?) };
    let mut tensors = BTreeMap::new();
    if !raw.tensors.is_empty() {
        let c = chart.as_ref().ok_or_else(|| Error::Invalid("tensors need a chart".into()))?;
        for (name, spec) in &raw.tensors {
            tensors.insert(name.clone(), parse_tensor(c, spec)?);
        }
    }
    let p = Problem { raw, chart, tensors };
    if p.raw.foliation.is_some() {
        p.foliation()?;
    }
    if let Some(r) = &p.raw.rhs {
        p.tensor(r)?;
    }
    Ok(p)
}

pub fn parse_problem(path: &Path) -> Result<Problem> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    parse_problem_str(&src)
}

impl Problem {
    pub fn tensor(&self, name: &str) -> Result<&Multivector> {
        self.tensors.get(name).ok_or_else(|| Error::UnknownKey(name.to_string()))
    }

    fn chart(&self) -> Result<&Chart> {
        self.chart.as_ref().ok_or_else(|| Error::Invalid("problem declares no chart".into()))
    }

    /// A Casimir is either a tensor name or an expression.
    fn function(&self, s: &str) -> Result<ScalarField> {
        match self.tensors.get(s) {
            Some(t) if t.degree() == 0 => Ok(t.as_scalar()),
            Some(t) => Err(Error::WrongDegree { expected: 0, got: t.degree() }),
            None => parse_expr(self.chart()?, s),
        }
    }

    pub fn foliation(&self) -> Result<Option<FoliationData>> {
        let Some(f) = &self.raw.foliation else { return Ok(None) };
        let chart = self.chart()?;
        let psi = PoissonTensor::verify(self.tensor(&f.poisson)?.clone(), &[])?;
        let casimirs = f.casimirs.iter().map(|s| self.function(s)).collect::<Result<Vec<_>>>()?;
        let duals = f.duals.iter().map(|s| self.tensor(s).cloned()).collect::<Result<Vec<_>>>()?;
        let leaf = f.leaf.iter().map(|s| index_of(chart, s)).collect::<Result<Vec<_>>>()?;
        let mut fol = FoliationData::new(psi, casimirs, duals, leaf)?;
        if let Some(c) = &f.center {
            let vals = c
                .iter()
                .map(|s| parse_expr(chart, s)?.constant_value().ok_or_else(|| Error::Invalid(format!("center entry `{s}` is not a constant"))))
                .collect::<Result<Vec<_>>>()?;
            fol = fol.with_center(vals)?;
        }
        Ok(Some(fol))
    }

    /// Degree-2 tensors, by name.
    pub fn bivectors(&self) -> impl Iterator<Item = (&String, &Multivector)> {
        self.tensors.iter().filter(|(_, t)| t.degree() == 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let p = parse_problem_str(r#"{"chart": ["x", "y"], "tensors": {"psi": {"components": {"0,1": "1"}}}}"#).unwrap();
        let c = p.chart.clone().unwrap();
        assert_eq!(p.tensor("psi").unwrap().exact_eq(&Multivector::basis(&c, &[0, 1]).unwrap()), Some(true));
        let q = parse_problem_str(r#"{"chart": ["x", "y"], "tensors": {"psi": {"components": {"y,x": "-1"}}}}"#).unwrap();
        assert_eq!(q.tensor("psi").unwrap().exact_eq(p.tensor("psi").unwrap()), Some(true));
    }

    #[test]
    fn errors() {
        let e = parse_problem_str(r#"{"chart": ["x1"], "tensors": {"f": {"components": {"": "x1^"}}}}"#).unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
        let e = parse_problem_str(r#"{"chart": ["x", "y"], "tensors": {"f": {"components": {"0": "w"}}}}"#).unwrap_err();
        assert_eq!(e, Error::UnknownCoordinate("w".into()));
        let e = parse_problem_str(r#"{"chart": ["x"], "colour": 1}"#).unwrap_err();
        assert_eq!(e, Error::UnknownKey("colour".into()));
        let e = parse_problem_str("{\n  \"chart\": [\"x\",\n}").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
    }

    #[test]
    fn foliation_spec() {
        let p = parse_problem_str(
            r#"{"chart": ["x", "y", "c"],
                "tensors": {"psi": {"components": {"x,y": "1"}}, "v": {"components": {"c": "1"}}},
                "foliation": {"poisson": "psi", "casimirs": ["c"], "duals": ["v"], "leaf": ["x", "y"]}}"#,
        )
        .unwrap();
        assert_eq!(p.foliation().unwrap().unwrap().rank(), 2);
    }
}
