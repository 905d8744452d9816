//! Uniform check reports shared by the library checks and the CLI.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub parameters: BTreeMap<String, Value>,
    pub grid: Vec<f64>,
    pub per_point_residuals: Vec<f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub wall_time: f64,
}

impl CheckReport {
    /// pass ⇔ every residual is finite and the maximum is within `tolerance`.
    pub fn new(check: &str, grid: Vec<f64>, per_point_residuals: Vec<f64>, tolerance: f64) -> CheckReport {
        let finite = per_point_residuals.iter().all(|r| r.is_finite());
        let max_residual = per_point_residuals.iter().cloned().fold(0.0, f64::max);
        let max_residual = if finite { max_residual } else { f64::INFINITY };
        CheckReport {
            check: check.to_string(),
            parameters: BTreeMap::new(),
            grid,
            per_point_residuals,
            max_residual,
            tolerance,
            pass: finite && max_residual <= tolerance,
            note: None,
            wall_time: 0.0,
        }
    }

    /// A symbolic check: residual 0 when it holds, otherwise the defect size.
    pub fn exact(check: &str, holds: bool, defect_size: f64) -> CheckReport {
        let r = if holds { 0.0 } else { defect_size.max(1.0) };
        let mut c = CheckReport::new(check, vec![], vec![r], 0.0);
        c.parameters.insert("exact".into(), Value::Bool(true));
        c
    }

    pub fn with_param(mut self, key: &str, v: impl Into<Value>) -> CheckReport {
        self.parameters.insert(key.to_string(), v.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> CheckReport {
        self.note = Some(note.into());
        self
    }

    /// Marks the report failed, for checks with a criterion beyond the residual.
    pub fn fail(mut self, why: impl Into<String>) -> CheckReport {
        self.pass = false;
        self.note = Some(why.into());
        self
    }
}
