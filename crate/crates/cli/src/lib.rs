//! Front end for the check suites: problem files, subcommands, JSON reports
//! and exit codes.

pub mod problem;
pub mod suites;

use rayon::prelude::*;
use serde::Serialize;

use schouten_core::convention::ledger_hash;
use schouten_core::error::Result;
use schouten_core::report::CheckReport;

use suites::Check;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INFRA: i32 = 2;

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub ledger_hash: String,
    pub pass: bool,
    pub reports: Vec<CheckReport>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// One line per report.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for r in &self.reports {
            let status = if r.pass { "PASS" } else { "FAIL" };
            s.push_str(&format!("{status}  {:<40} max {:.3e}  tol {:.1e}", r.check, r.max_residual, r.tolerance));
            if let Some(n) = &r.note {
                s.push_str(&format!("  ({n})"));
            }
            s.push('\n');
        }
        s
    }
}

/// Runs checks on up to `jobs` threads and sorts the reports by check name.
pub fn run_checks(command: &str, seed: u64, checks: Vec<Check>, jobs: Option<usize>) -> Result<RunReport> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j.max(1));
    }
    let pool = b.build().map_err(|e| schouten_core::error::Error::Invalid(e.to_string()))?;
    let mut reports: Vec<CheckReport> = pool.install(|| checks.par_iter().flat_map(|c| c.execute()).collect());
    reports.sort_by(|a, b| a.check.cmp(&b.check));
    let pass = !reports.is_empty() && reports.iter().all(|r| r.pass);
    Ok(RunReport { tool: "schouten-lab", version: env!("CARGO_PKG_VERSION"), command: command.to_string(), seed, ledger_hash: ledger_hash(), pass, reports })
}
