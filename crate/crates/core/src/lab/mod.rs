//! Experiment harness: scenario files, k-sweeps and stationary studies, CSV
//! output and pass/fail checks.
//!
//! Each `run_*` function returns a typed result holding a [`RunReport`];
//! writing CSV files is a separate step so the numbers can be inspected in
//! memory first. Runs use the ambient rayon pool; wrap them in [`with_jobs`]
//! to bound the worker count. Results do not depend on the worker count.

mod runs;
mod scenario;

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};

pub use runs::{
    run_evolve, run_genericity, run_shoot, run_spectrum, run_stationary, trajectory_file_name, EvolveRun,
    GenericityRun, KEvolution, KStationary, ShootRun, SolutionRow, SpectrumRun, StationaryRun, SummaryRow,
    TailSups,
};
pub use scenario::{
    BoundaryData, ChecksSection, EvolveSection, GenericitySection, KineticsSpec, ModelSection, Scenario,
    SchemeName, StationarySection, SCHEMA_VERSION,
};

/// Environment variable consulted for the output directory when no explicit
/// directory is given.
pub const OUT_DIR_ENV: &str = "SEGLAB_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "seglab-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    Below,
    AtLeast,
    Above,
    Equals,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::AtMost => "<=",
            Relation::Below => "<",
            Relation::AtLeast => ">=",
            Relation::Above => ">",
            Relation::Equals => "==",
        })
    }
}

/// One pass/fail assertion of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, limit: f64) -> Self {
        let pass = match relation {
            Relation::AtMost => value <= limit,
            Relation::Below => value < limit,
            Relation::AtLeast => value >= limit,
            Relation::Above => value > limit,
            Relation::Equals => value == limit,
        };
        Check {
            name: name.into(),
            value,
            relation,
            limit,
            pass,
        }
    }

    /// A boolean condition, recorded as `1 == 1` or `0 == 1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check::new(name, if ok { 1.0 } else { 0.0 }, Relation::Equals, 1.0)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {:e} {} {:e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.relation,
            self.limit
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario: String,
    pub command: &'static str,
    pub version: &'static str,
    pub wall_clock: Duration,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub(crate) fn new(scenario: &str, command: &'static str) -> Self {
        RunReport {
            scenario: scenario.to_string(),
            command,
            version: env!("CARGO_PKG_VERSION"),
            wall_clock: Duration::ZERO,
            checks: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Common surface of the run results.
pub trait LabRun {
    fn report(&self) -> &RunReport;
    /// Writes the run's CSV files into `dir` (created if missing).
    fn write(&self, dir: &Path) -> Result<Vec<PathBuf>>;
}

/// `explicit`, else `$SEGLAB_OUT_DIR`, else `seglab-out`.
pub fn resolve_out_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Runs `f` on a dedicated pool of `jobs` workers; `None` uses the global pool.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::Config("jobs must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

pub(crate) fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub(crate) fn write_checks(dir: &Path, report: &RunReport) -> Result<PathBuf> {
    let path = dir.join("checks.csv");
    write_csv(&path, &report.checks)?;
    Ok(path)
}
