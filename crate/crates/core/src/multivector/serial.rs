//! JSON form: `{"degree": p, "chart": [names], "components": {"i1,i2": "expr"}}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Multivector;
use crate::error::{Error, Result};
use crate::scalar::{parse_expr, Chart};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultivectorJson {
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<Vec<String>>,
    pub components: BTreeMap<String, String>,
}

pub fn to_json(a: &Multivector) -> Result<MultivectorJson> {
    let mut components = BTreeMap::new();
    for (idx, f) in a.components() {
        if !f.is_exact() {
            return Err(Error::Invalid("numeric fields have no serialized form".into()));
        }
        let key = idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        components.insert(key, f.display());
    }
    Ok(MultivectorJson { degree: a.degree(), chart: Some(a.chart().names().to_vec()), components })
}

/// Parses against `chart`; a chart listed in the JSON must agree with it.
pub fn from_json(j: &MultivectorJson, chart: &Chart) -> Result<Multivector> {
    if let Some(names) = &j.chart {
        if names.as_slice() != chart.names() {
            return Err(Error::ChartMismatch(names.join(","), chart.names().join(",")));
        }
    }
    let mut entries = Vec::new();
    for (k, expr) in &j.components {
        let idx: Vec<usize> = if k.trim().is_empty() {
            vec![]
        } else {
            k.split(',')
                .map(|s| {
                    let s = s.trim();
                    s.parse::<usize>().or_else(|_| chart.index_of(s).ok_or_else(|| Error::UnknownCoordinate(s.to_string())))
                })
                .collect::<Result<_>>()?
        };
        entries.push((idx, parse_expr(chart, expr)?));
    }
    Multivector::from_components(chart, j.degree, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let j: MultivectorJson = serde_json::from_str(r#"{"degree": 2, "components": {"0,1": "x^2 - 1/2*y"}}"#).unwrap();
        let a = from_json(&j, &c).unwrap();
        let back = from_json(&to_json(&a).unwrap(), &c).unwrap();
        assert_eq!(a.exact_eq(&back), Some(true));
        let by_name: MultivectorJson = serde_json::from_str(r#"{"degree": 2, "components": {"y,x": "1"}}"#).unwrap();
        let b = from_json(&by_name, &c).unwrap();
        assert_eq!(b.get(&[0, 1]).constant_value(), Some(crate::scalar::q(-1)));
        let bad: std::result::Result<MultivectorJson, _> = serde_json::from_str(r#"{"degree": 1, "components": {}, "extra": 1}"#);
        assert!(bad.is_err());
    }
}
