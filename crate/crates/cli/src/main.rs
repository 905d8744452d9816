use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use schouten_core::error::{Error, Result};
use schouten_lab::problem::{parse_problem, CaseSpec, Problem};
use schouten_lab::suites::{self, AxiomArgs, DiracArgs, EulerArgs, SlopeArgs, DIRAC_CHECKS, EULER_CHECKS};
use schouten_lab::{run_checks, RunReport, EXIT_INFRA};

#[derive(Parser)]
#[command(name = "schouten-lab", version, about = "Exact and numeric checks for Schouten brackets, Poisson deformations and their normal forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// Problem file (JSON).
    #[arg(long, global = true)]
    problem: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Comma-separated ε values.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    eps_grid: Option<Vec<f64>>,
    /// Worker threads for running checks.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Comma-separated check names.
    #[arg(long, global = true, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    /// Number of sample points.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Print a one-line-per-check summary to standard error.
    #[arg(long, global = true)]
    summary: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized exact checks of the bracket identities.
    CheckAxioms {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Jacobi identity, Casimirs and foliation data of a problem or built-in case.
    PoissonVerify {
        #[arg(long)]
        case: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve [[X, Ψ]] = Φ on a regular foliation.
    HomologicalSolve {
        #[arg(long)]
        case: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// The Euler family Ψ_{η,ε} on ℝ⁶.
    Euler {
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        hamiltonian: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Dirac brackets of the built-in constrained demo.
    Dirac {
        #[arg(long)]
        demo: bool,
        /// 4 or 6.
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Order test of truncated generators on the Euler family.
    Slope {
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        hamiltonian: Option<String>,
        /// Comma-separated truncation orders.
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        orders: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
}

struct Settings {
    problem: Option<Problem>,
    seed: u64,
    tol: Option<f64>,
    eps_grid: Option<Vec<f64>>,
    samples: Option<usize>,
    checks: Option<Vec<String>>,
}

/// Command-line values override the problem file.
fn settings(c: &Common) -> Result<Settings> {
    let problem = c.problem.as_deref().map(parse_problem).transpose()?;
    let raw = problem.as_ref().map(|p| p.raw.clone()).unwrap_or_default();
    Ok(Settings {
        seed: c.seed.or(raw.seed).unwrap_or(7),
        tol: c.tol.or(raw.tol),
        eps_grid: c.eps_grid.clone().or(raw.eps_grid),
        samples: c.samples.or(raw.samples),
        checks: c.checks.clone().or(raw.checks),
        problem,
    })
}

fn names(s: &Settings, all: &[&str]) -> Vec<String> {
    s.checks.clone().unwrap_or_else(|| all.iter().map(|x| x.to_string()).collect())
}

fn run(cli: Cli) -> Result<(RunReport, Common)> {
    match cli.command {
        Command::CheckAxioms { dim, trials, common } => {
            let s = settings(&common)?;
            let checks = suites::axiom_checks(&AxiomArgs { seed: s.seed, trials, dim });
            Ok((run_checks("check-axioms", s.seed, checks, common.jobs)?, common))
        }
        Command::PoissonVerify { case, common } => {
            let s = settings(&common)?;
            let dirac = DiracArgs { dim: 4, seed: s.seed, tol: s.tol, eps_grid: s.eps_grid.clone(), samples: s.samples };
            let checks = match (&case, &s.problem) {
                (Some(c), _) => suites::case_poisson_checks(c, &dirac)?,
                (None, Some(p)) => suites::problem_poisson_checks(p, s.seed),
                (None, None) => return Err(Error::Invalid("poisson-verify needs --problem or --case".into())),
            };
            Ok((run_checks("poisson-verify", s.seed, checks, common.jobs)?, common))
        }
        Command::HomologicalSolve { case, eta, common } => {
            let s = settings(&common)?;
            let eta = suites::eta_of(eta.as_deref().unwrap_or("1,1,1"))?;
            let checks = match (&case, &s.problem) {
                (Some(c), _) => suites::case_homological_checks(c, eta)?,
                (None, Some(p)) => suites::problem_homological_checks(p),
                (None, None) => return Err(Error::Invalid("homological-solve needs --problem or --case".into())),
            };
            Ok((run_checks("homological-solve", s.seed, checks, common.jobs)?, common))
        }
        Command::Euler { eta, eps, hamiltonian, common } => {
            let s = settings(&common)?;
            let spec = match s.problem.as_ref().and_then(|p| p.raw.case.clone()) {
                Some(CaseSpec::Euler(e)) => Some(e),
                _ => None,
            };
            let eta = eta.or_else(|| spec.as_ref().and_then(|e| e.eta.clone()).map(|v| v.join(",")));
            let eps = eps.or_else(|| spec.as_ref().and_then(|e| e.eps.clone()));
            let hamiltonian = hamiltonian.or_else(|| spec.as_ref().and_then(|e| e.hamiltonian.clone()));
            let a = EulerArgs {
                eta: suites::eta_of(eta.as_deref().unwrap_or("1,1,1"))?,
                eps: suites::rational(eps.as_deref().unwrap_or("0.1"))?,
                hamiltonian,
                seed: s.seed,
                tol: s.tol,
                eps_grid: s.eps_grid.clone(),
                samples: s.samples,
            };
            let checks = suites::euler_checks(&a, &names(&s, &EULER_CHECKS))?;
            Ok((run_checks("euler", s.seed, checks, common.jobs)?, common))
        }
        Command::Dirac { demo: _, dim, common } => {
            let s = settings(&common)?;
            let pdim = match s.problem.as_ref().and_then(|p| p.raw.case.clone()) {
                Some(CaseSpec::Dirac { dim }) => dim,
                _ => None,
            };
            let a = DiracArgs { dim: dim.or(pdim).unwrap_or(4), seed: s.seed, tol: s.tol, eps_grid: s.eps_grid.clone(), samples: s.samples };
            let checks = suites::dirac_checks(&a, &names(&s, &DIRAC_CHECKS))?;
            Ok((run_checks("dirac", s.seed, checks, common.jobs)?, common))
        }
        Command::Slope { eta, hamiltonian, orders, common } => {
            let s = settings(&common)?;
            let a = SlopeArgs {
                eta: suites::eta_of(eta.as_deref().unwrap_or("1,1,1"))?,
                hamiltonian,
                seed: s.seed,
                eps_grid: s.eps_grid.clone(),
                samples: s.samples,
                orders,
            };
            Ok((run_checks("slope", s.seed, suites::slope_checks(&a), common.jobs)?, common))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, common)) => {
            let json = report.to_json();
            match &common.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, json + "\n") {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(EXIT_INFRA as u8);
                    }
                }
                None => println!("{json}"),
            }
            if common.summary {
                eprint!("{}", report.summary());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INFRA as u8)
        }
    }
}
