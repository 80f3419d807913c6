//! Experiment orchestration, persisted artifacts and the command line.

pub mod artifacts;
pub mod config;
pub mod oracle;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::BigComplex;
use crate::checkers::{
    check_capacity_convergence, check_pole_attraction, check_pole_distribution, variation_budget, AttractionReport,
    Budget, BudgetReport, CapacityGrid, CapacityReport, DistributionReport, FamilyMember,
};
use crate::measure::DensityCheck;
use crate::pade::{direct_error_many, solve_with_escalation, Escalation, PadeApproximant, Solved};
use crate::potential::{balayage_distribution, equilibrium_measure, GreenSolver, IntervalSystem, DEFAULT_NODES};
use crate::problem::Problem;
use crate::scheme::AdmissibilityReport;

pub use artifacts::{ApproximantArtifact, CircleSummary};
pub use config::{parse_n_list, CheckerConfig, CircleSpec, ProblemConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("io: {0}")]
    Io(String),
    #[error("missing artifact: {0}")]
    MissingArtifact(String),
    #[error("{0}")]
    Setup(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Outcome of one order.
#[derive(Clone, Debug)]
pub enum Outcome {
    Solved(Box<Solved>),
    Failed { n: usize, error: String },
}

impl Outcome {
    pub fn n(&self) -> usize {
        match self {
            Outcome::Solved(s) => s.approximant.n,
            Outcome::Failed { n, .. } => *n,
        }
    }

    pub fn solved(&self) -> Option<&Solved> {
        match self {
            Outcome::Solved(s) => Some(s),
            Outcome::Failed { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckerReports {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variation_budget: Option<BudgetReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole_distribution: Option<DistributionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole_attraction: Option<AttractionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacity_convergence: Option<CapacityReport>,
    /// Checkers that could not be set up.
    pub errors: Vec<String>,
}

impl CheckerReports {
    pub fn all_pass(&self) -> bool {
        self.errors.is_empty()
            && self.variation_budget.as_ref().is_none_or(|r| r.pass)
            && self.pole_distribution.as_ref().is_none_or(|r| r.pass)
            && self.pole_attraction.as_ref().is_none_or(|r| r.pass)
            && self.capacity_convergence.as_ref().is_none_or(|r| r.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveEntry {
    pub n: usize,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nullspace_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_circle: Option<CircleSummary>,
}

/// Contents of `report.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config_hash: String,
    pub precision: u32,
    pub n_range: Vec<usize>,
    pub scheme: String,
    pub solves: Vec<SolveEntry>,
    pub escalations: Vec<Escalation>,
    pub density_check: DensityCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub admissibility: Option<AdmissibilityReport>,
    pub checkers: CheckerReports,
    pub assumptions: Vec<String>,
    pub all_solved: bool,
    pub all_checks_pass: bool,
}

/// Everything produced by one run. Timings stay in memory so that the
/// written files depend only on the config.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub config: ProblemConfig,
    pub config_hash: String,
    pub base: Problem,
    pub outcomes: Vec<Outcome>,
    pub circles: Vec<(usize, Vec<(f64, f64)>)>,
    pub report: RunReport,
    pub timings: Vec<(usize, Duration)>,
}

impl RunRecord {
    pub fn exit_ok(&self) -> bool {
        self.report.all_solved && self.report.all_checks_pass
    }

    pub fn approximant(&self, n: usize) -> Option<&PadeApproximant> {
        self.outcomes
            .iter()
            .find(|o| o.n() == n)
            .and_then(Outcome::solved)
            .map(|s| &s.approximant)
    }
}

fn assumptions() -> Vec<String> {
    vec![
        "log(t) in densities is the principal branch, real on (0, 1)".into(),
        "the error curve is |F - Pi_n| sampled on the configured circle (unit circle by default)".into(),
        "liminf and limsup over n are proxied by min and max over the top third of n_range".into(),
        "the exceptional set in convergence in capacity is measured by grid fraction".into(),
    ]
}

/// `(θ, |F - Π_n|)` at equispaced angles; points on the support or at a
/// pole give NaN.
pub fn error_circle(problem: &Problem, approx: &PadeApproximant, circle: &CircleSpec) -> Vec<(f64, f64)> {
    let prec = problem.prec();
    let center = BigComplex::from_f64(prec, circle.center.0, circle.center.1);
    let radius = rug::Float::with_val(prec, circle.radius);
    let two_pi = rug::Float::with_val(prec, BigComplex::pi(prec) * 2u32);
    let pts: Vec<(f64, BigComplex)> = (0..circle.points)
        .map(|k| {
            let th = rug::Float::with_val(prec, &two_pi * k as u32) / circle.points as u32;
            (th.to_f64(), &center + &BigComplex::cis(&th).scale(&radius))
        })
        .collect();
    let ok: Vec<bool> = pts
        .iter()
        .map(|(_, z)| problem.measure.check_off_support(z).is_ok() && problem.rational.eval(z).is_ok())
        .collect();
    let zs: Vec<BigComplex> = pts
        .iter()
        .zip(&ok)
        .filter(|(_, &o)| o)
        .map(|(p, _)| p.1.clone())
        .collect();
    let errs = direct_error_many(problem, approx, &zs).unwrap_or_else(|e| {
        log::warn!("n = {}: error circle failed: {e}", approx.n);
        Vec::new()
    });
    let mut it = errs.iter();
    pts.iter()
        .zip(&ok)
        .map(|((th, _), &o)| {
            let e = if o {
                it.next().map_or(f64::NAN, BigComplex::abs_f64)
            } else {
                f64::NAN
            };
            (*th, e)
        })
        .collect()
}

/// Solves every order, runs the enabled checkers and assembles the report.
pub fn run(config: &ProblemConfig) -> Result<RunRecord, CliError> {
    config.validate()?;
    let prec = config.precision;
    let base = Problem::build(&config.problem, prec).map_err(|e| CliError::InvalidConfig(e.to_string()))?;
    let ns = config.ns();
    let timed: Vec<(Outcome, Duration)> = ns
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let out = match solve_with_escalation(&config.problem, n, prec) {
                Ok(s) => Outcome::Solved(Box::new(s)),
                Err(e) => Outcome::Failed {
                    n,
                    error: e.to_string(),
                },
            };
            (out, start.elapsed())
        })
        .collect();
    let timings: Vec<(usize, Duration)> = timed.iter().map(|(o, d)| (o.n(), *d)).collect();
    let outcomes: Vec<Outcome> = timed.into_iter().map(|(o, _)| o).collect();
    for (n, d) in &timings {
        log::info!("n = {n}: {:.3} s", d.as_secs_f64());
    }
    let circles: Vec<(usize, Vec<(f64, f64)>)> = outcomes
        .par_iter()
        .filter_map(Outcome::solved)
        .map(|s| {
            (
                s.approximant.n,
                error_circle(&s.problem, &s.approximant, &config.error_circle),
            )
        })
        .collect();
    let solved: Vec<&Solved> = outcomes.iter().filter_map(Outcome::solved).collect();
    let (admissibility, checkers) = run_checkers(config, &base, &solved);
    let solves = outcomes
        .iter()
        .map(|o| match o {
            Outcome::Solved(s) => {
                let a = &s.approximant;
                let circle = circles
                    .iter()
                    .find(|(n, _)| *n == a.n)
                    .map(|(_, c)| CircleSummary::from_samples(c));
                SolveEntry {
                    n: a.n,
                    status: "solved".into(),
                    error: None,
                    precision: Some(a.prec),
                    defect: Some(a.defect),
                    residual: Some(a.residual),
                    nullspace_dim: Some(a.nullspace_dim),
                    cross_check: a.cross_check,
                    p_residual: Some(a.p_residual),
                    error_circle: circle,
                }
            }
            Outcome::Failed { n, error } => SolveEntry {
                n: *n,
                status: "failed".into(),
                error: Some(error.clone()),
                precision: None,
                defect: None,
                residual: None,
                nullspace_dim: None,
                cross_check: None,
                p_residual: None,
                error_circle: None,
            },
        })
        .collect::<Vec<_>>();
    let all_solved = outcomes.iter().all(|o| o.solved().is_some());
    let report = RunReport {
        config_hash: config.hash(),
        precision: prec,
        n_range: ns,
        scheme: base.scheme.kind().to_string(),
        solves,
        escalations: solved.iter().filter_map(|s| s.escalation.clone()).collect(),
        density_check: base.measure.density_check().clone(),
        admissibility,
        all_checks_pass: checkers.all_pass(),
        checkers,
        assumptions: assumptions(),
        all_solved,
    };
    Ok(RunRecord {
        config: config.clone(),
        config_hash: report.config_hash.clone(),
        base,
        outcomes,
        circles,
        report,
        timings,
    })
}

/// Admissibility diagnostics and the enabled checkers over a solved family.
pub fn run_checkers(
    config: &ProblemConfig,
    base: &Problem,
    solved: &[&Solved],
) -> (Option<AdmissibilityReport>, CheckerReports) {
    let mut out = CheckerReports::default();
    let cc = &config.checkers;
    let prec = base.prec();
    let family: Vec<FamilyMember> = solved.iter().map(|s| FamilyMember::from(&s.approximant)).collect();
    let poles_c64: Vec<Complex64> = base.rational.poles().iter().map(|p| p.eta.to_c64()).collect();
    let intervals = base.measure.intervals_f64();
    if intervals.is_empty() {
        out.errors
            .push("measure is empty; potential-theoretic checkers skipped".into());
        return (None, out);
    }
    let hull = (intervals[0].0, intervals[intervals.len() - 1].1);
    let ns: Vec<usize> = family.iter().map(|m| m.n).collect();
    let admissibility = base
        .scheme
        .admissibility_report(hull, &poles_c64, &ns, config.problem.clearance, prec)
        .map_err(|e| out.errors.push(format!("admissibility: {e}")))
        .ok();
    let v_a = admissibility.as_ref().map_or(0.0, |r| r.v_a);
    let budget = match Budget::for_problem(base, v_a) {
        Ok(b) => Some(b),
        Err(e) => {
            out.errors.push(format!("variation budget: {e}"));
            None
        }
    };
    if cc.variation_budget {
        if let Some(b) = &budget {
            out.variation_budget = Some(variation_budget(&family, b));
        }
    }
    let system = match IntervalSystem::new(intervals, DEFAULT_NODES) {
        Ok(s) => s,
        Err(e) => {
            out.errors.push(format!("interval system: {e}"));
            return (admissibility, out);
        }
    };
    let sigma = match base.scheme.asymptotic_distribution(prec) {
        Ok(s) => s,
        Err(e) => {
            out.errors.push(format!("asymptotic distribution: {e}"));
            return (admissibility, out);
        }
    };
    if cc.pole_distribution {
        match equilibrium_measure(&system).and_then(|eq| balayage_distribution(&sigma, &eq)) {
            Ok(hat) => {
                out.pole_distribution = Some(check_pole_distribution(
                    &family,
                    &hat,
                    &system,
                    cc.restriction,
                    cc.distribution_threshold,
                ))
            }
            Err(e) => out.errors.push(format!("balayage: {e}")),
        }
    }
    if cc.pole_attraction {
        if let Some(b) = &budget {
            let poles: Vec<(Complex64, usize)> = base
                .rational
                .poles()
                .iter()
                .map(|p| (p.eta.to_c64(), p.multiplicity()))
                .collect();
            out.pole_attraction = Some(check_pole_attraction(&family, &poles, &system, b));
        }
    }
    if cc.capacity_convergence {
        match GreenSolver::new(&sigma, &system) {
            Ok(green) => {
                let grid = cc.grid.clone().unwrap_or_else(|| CapacityGrid::around(hull));
                let pairs: Vec<(&Problem, &PadeApproximant)> =
                    solved.iter().map(|s| (&s.problem, &s.approximant)).collect();
                out.capacity_convergence = Some(check_capacity_convergence(
                    &pairs,
                    &green,
                    &grid,
                    cc.eps_cap,
                    cc.max_fraction,
                ));
            }
            Err(e) => out.errors.push(format!("green potential: {e}")),
        }
    }
    (admissibility, out)
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Writes all artifacts of a run into `dir`, one file at a time in a fixed
/// order.
pub fn emit_outputs(record: &RunRecord, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut write = |name: String, text: String| -> Result<(), CliError> {
        let path = dir.join(name);
        std::fs::write(&path, text)?;
        written.push(path);
        Ok(())
    };
    for o in &record.outcomes {
        let Some(s) = o.solved() else { continue };
        let a = &s.approximant;
        write(format!("poles_n{}.csv", a.n), artifacts::poles_csv(&record.base, a))?;
        if let Some((_, c)) = record.circles.iter().find(|(n, _)| *n == a.n) {
            write(format!("error_circle_n{}.csv", a.n), artifacts::circle_csv(c))?;
        }
        let art = ApproximantArtifact::from_solved(s);
        write(format!("approximant_n{}.json", a.n), pretty(&art))?;
    }
    write("report.json".into(), pretty(&record.report))?;
    write("config.json".into(), pretty(&record.config))?;
    Ok(written)
}

/// Contents of `check_report.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub config_hash: String,
    pub n_range: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub admissibility: Option<AdmissibilityReport>,
    pub checkers: CheckerReports,
    pub assumptions: Vec<String>,
    pub all_checks_pass: bool,
}

/// Runs the checkers on approximants saved by an earlier run.
pub fn check(config: &ProblemConfig, dir: &Path) -> Result<CheckReport, CliError> {
    config.validate()?;
    let base = Problem::build(&config.problem, config.precision).map_err(|e| CliError::InvalidConfig(e.to_string()))?;
    let mut solved = Vec::new();
    for n in config.ns() {
        let path = dir.join(format!("approximant_n{n}.json"));
        let text = std::fs::read_to_string(&path).map_err(|_| CliError::MissingArtifact(path.display().to_string()))?;
        let art: ApproximantArtifact =
            serde_json::from_str(&text).map_err(|e| CliError::MissingArtifact(format!("{}: {e}", path.display())))?;
        let problem = Problem::build(&config.problem, art.precision).map_err(|e| CliError::Setup(e.to_string()))?;
        let approximant = art
            .to_approximant(&problem)
            .map_err(|e| CliError::Setup(e.to_string()))?;
        solved.push(Solved {
            approximant,
            problem,
            escalation: art.escalation.clone(),
        });
    }
    let refs: Vec<&Solved> = solved.iter().collect();
    let (admissibility, checkers) = run_checkers(config, &base, &refs);
    Ok(CheckReport {
        config_hash: config.hash(),
        n_range: config.ns(),
        admissibility,
        all_checks_pass: checkers.all_pass(),
        checkers,
        assumptions: assumptions(),
    })
}

#[derive(Debug, Parser)]
#[command(
    name = "padelab",
    version,
    about = "Multipoint Padé approximants to Cauchy transforms with polar parts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// Working precision in bits.
    #[arg(long)]
    pub precision: Option<u32>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Orders to solve, e.g. `10,13,20` or `1-10`.
    #[arg(long)]
    pub n: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve every order of a config, run the checkers and write artifacts.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Rerun the checkers on artifacts written by `run`.
    Check {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a bundled closed-form oracle suite (`markov`, `potential` or `all`).
    Oracle {
        name: String,
        #[arg(long, default_value_t = crate::algebra::DEFAULT_PRECISION)]
        precision: u32,
    },
}

/// Loads a config and applies command-line overrides.
pub fn load_config(path: &Path, o: &Overrides) -> Result<ProblemConfig, CliError> {
    let mut c = ProblemConfig::load(path)?;
    if let Some(p) = o.precision {
        c.precision = p;
    }
    if let Some(out) = &o.out {
        c.output = out.clone();
    }
    if let Some(n) = &o.n {
        c.n_range = parse_n_list(n)?;
    }
    c.validate()?;
    Ok(c)
}

/// Process exit codes: 0 success, 1 failed solves or checkers, 2 bad input
/// or IO.
pub fn main_with(cli: Cli) -> ExitCode {
    let result = match cli.command {
        Command::Run { config, overrides } => load_config(&config, &overrides).and_then(|c| {
            let record = run(&c)?;
            let files = emit_outputs(&record, &c.output)?;
            for s in &record.report.solves {
                match &s.error {
                    None => println!("n = {}: solved", s.n),
                    Some(e) => println!("n = {}: FAILED {e}", s.n),
                }
            }
            println!(
                "wrote {} files to {}; checkers {}",
                files.len(),
                c.output.display(),
                if record.report.all_checks_pass { "PASS" } else { "FAIL" }
            );
            Ok(record.exit_ok())
        }),
        Command::Check { config, overrides } => load_config(&config, &overrides).and_then(|c| {
            let rep = check(&c, &c.output)?;
            std::fs::create_dir_all(&c.output)?;
            std::fs::write(c.output.join("check_report.json"), pretty(&rep))?;
            println!("checkers {}", if rep.all_checks_pass { "PASS" } else { "FAIL" });
            Ok(rep.all_checks_pass)
        }),
        Command::Oracle { name, precision } => oracle::run_suite(&name, precision).map(|lines| {
            for l in &lines {
                println!("{l}");
            }
            lines.iter().all(|l| l.passed)
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
