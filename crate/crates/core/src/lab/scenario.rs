//! TOML scenario files (schema version 1).
//!
//! ```toml
//! schema_version = 1
//! name = "default"
//! seed = 24301
//!
//! [model]
//! kinetics = { type = "logistic" }
//! alpha = 1.0
//! n_interior = 400
//! m1 = "2*(1-x)"      # expression in x, a constant, or n_interior + 2 node values
//! m2 = "2*x"
//! k = [1e2, 1e3, 1e4]
//! ```
//!
//! Every other section is optional and falls back to the defaults below.

use std::path::Path;

use evalexpr::{
    build_operator_tree, ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Value,
};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{CouplingScheme, EvolveConfig, ProblemSpec};
use crate::geometry::{Field, Grid};
use crate::kinetics::Kinetics;
use crate::spectra::GenericityConfig;
use crate::stationary::{NewtonConfig, ProbeConfig, ShootConfig};

pub const SCHEMA_VERSION: u32 = 1;

const DEFAULT_SCENARIO: &str = include_str!("../../scenarios/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelSection,
    #[serde(default)]
    pub evolve: EvolveSection,
    #[serde(default)]
    pub stationary: StationarySection,
    #[serde(default)]
    pub genericity: GenericitySection,
    #[serde(default)]
    pub checks: ChecksSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum KineticsSpec {
    Logistic,
    /// Ascending coefficients of `f` and `g`.
    Polynomial { f: Vec<f64>, g: Vec<f64> },
    /// `f = g = 0`.
    Inert,
}

/// Boundary data: a constant, an expression in `x` (with `pi` defined), or
/// one value per node including both boundary nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundaryData {
    Constant(f64),
    Expression(String),
    Table(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "logistic")]
    pub kinetics: KineticsSpec,
    #[serde(default = "one")]
    pub alpha: f64,
    pub n_interior: usize,
    pub m1: BoundaryData,
    pub m2: BoundaryData,
    pub k: Vec<f64>,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "quarter")]
    pub xi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    Implicit,
    LinearlyImplicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSection {
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: usize,
    pub steady_tol: f64,
    pub min_time: f64,
    pub scheme: SchemeName,
}

impl Default for EvolveSection {
    fn default() -> Self {
        let d = EvolveConfig::default();
        EvolveSection {
            dt: d.dt,
            t_end: d.t_end,
            snapshot_every: d.snapshot_every,
            steady_tol: d.steady_tol,
            min_time: d.min_time,
            scheme: SchemeName::Implicit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationarySection {
    pub slope_lo: f64,
    pub slope_hi: f64,
    pub n_scan: usize,
    pub steps_per_cell: usize,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    pub oneeq_tol: f64,
    pub probe_seeds: usize,
    pub probe_radius: f64,
    pub probe_tol: f64,
    pub probe_max_iters: usize,
    /// Non-degeneracy threshold; absent means scale-aware default.
    pub tol_lambda: Option<f64>,
}

impl Default for StationarySection {
    fn default() -> Self {
        let s = ShootConfig::default();
        let p = ProbeConfig::default();
        StationarySection {
            slope_lo: s.slope_lo,
            slope_hi: s.slope_hi,
            n_scan: s.n_scan,
            steps_per_cell: s.steps_per_cell,
            newton_tol: s.newton.tol,
            newton_max_iters: s.newton.max_iters,
            oneeq_tol: 1e-9,
            probe_seeds: p.n_seeds,
            probe_radius: p.radius,
            probe_tol: p.tol,
            probe_max_iters: p.max_iters,
            tol_lambda: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenericitySection {
    pub n_perturb: usize,
    pub magnitude: f64,
    /// Centre of the perturbations; defaults to the boundary values of `w`.
    pub base: Option<[f64; 2]>,
}

impl Default for GenericitySection {
    fn default() -> Self {
        GenericitySection {
            n_perturb: 50,
            magnitude: 0.1,
            base: None,
        }
    }
}

/// Thresholds of the checks that decide the exit code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksSection {
    pub bound_tol: f64,
    pub cancel_tol: f64,
    pub t0: f64,
    pub epsilon: f64,
    pub convergence_ratio: f64,
    pub seg_integral_spread: f64,
    /// Allowed decay-inequality constant, in units of `dt`.
    pub decay_constant_dt: f64,
    pub dist_to_limit: f64,
    pub expect_unique: bool,
    pub lambda_min: f64,
    pub eigen_residual: f64,
    pub monotone_tol: f64,
    pub oneeq_ratio: f64,
    pub probe_residual: f64,
    pub genericity_fraction: f64,
    pub genericity_min_lambda: f64,
    /// Allowed drift of the shooting first integral over the unit interval.
    pub energy_drift: f64,
}

impl Default for ChecksSection {
    fn default() -> Self {
        ChecksSection {
            bound_tol: 1e-12,
            cancel_tol: 1e-12,
            t0: 0.5,
            epsilon: 0.05,
            convergence_ratio: 0.1,
            seg_integral_spread: 5.0,
            decay_constant_dt: 10.0,
            dist_to_limit: 0.05,
            expect_unique: true,
            lambda_min: 1e-3,
            eigen_residual: 1e-8,
            monotone_tol: 1e-10,
            oneeq_ratio: 0.2,
            probe_residual: 1e-8,
            genericity_fraction: 1.0,
            genericity_min_lambda: 1e-4,
            energy_drift: 1e-8,
        }
    }
}

fn logistic() -> KineticsSpec {
    KineticsSpec::Logistic
}

fn one() -> f64 {
    1.0
}

fn quarter() -> f64 {
    0.25
}

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl BoundaryData {
    /// Values at all `n_interior + 2` nodes, boundary nodes included.
    pub fn sample(&self, grid: Grid) -> Result<Vec<f64>> {
        let n = grid.n_interior();
        let h = grid.spacing();
        let xs: Vec<f64> = (0..n + 2).map(|i| if i == n + 1 { 1.0 } else { i as f64 * h }).collect();
        let vals = match self {
            BoundaryData::Constant(c) => vec![*c; n + 2],
            BoundaryData::Table(t) => {
                if t.len() != n + 2 {
                    return Err(config(format!("node table has {} values, expected {}", t.len(), n + 2)));
                }
                t.clone()
            }
            BoundaryData::Expression(src) => {
                let tree = build_operator_tree::<DefaultNumericTypes>(src)
                    .map_err(|e| config(format!("expression {src:?}: {e}")))?;
                let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
                ctx.set_value("pi".into(), Value::Float(std::f64::consts::PI))
                    .map_err(|e| config(e.to_string()))?;
                xs.iter()
                    .map(|&x| {
                        ctx.set_value("x".into(), Value::Float(x)).map_err(|e| config(e.to_string()))?;
                        let v = tree.eval_with_context(&ctx).map_err(|e| config(format!("expression {src:?}: {e}")))?;
                        v.as_number().map_err(|e| config(format!("expression {src:?}: {e}")))
                    })
                    .collect::<Result<Vec<f64>>>()?
            }
        };
        if let Some(bad) = vals.iter().find(|v| !v.is_finite()) {
            return Err(config(format!("boundary data evaluates to {bad}")));
        }
        Ok(vals)
    }

    pub fn field(&self, grid: Grid) -> Result<Field> {
        let mut vals = self.sample(grid)?;
        let right = vals.pop().expect("at least two nodes");
        let left = vals.remove(0);
        Field::new(grid, vals, left, right)
    }
}

impl Scenario {
    pub fn from_toml_str(src: &str) -> Result<Self> {
        let sc: Scenario = toml::from_str(src).map_err(|e| config(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&src)
    }

    /// The shipped default scenario.
    pub fn builtin_default() -> Self {
        Self::from_toml_str(DEFAULT_SCENARIO).expect("bundled scenario is valid")
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config(e.to_string()))
    }

    /// Checks the schema and that every `k` yields a valid problem.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let ks = &self.model.k;
        if ks.is_empty() {
            return Err(config("k list is empty"));
        }
        if ks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(config("k list must be strictly increasing"));
        }
        for &k in ks {
            self.spec(k)?;
        }
        let e = &self.evolve;
        if !(e.dt > 0.0) || !(e.t_end >= 0.0) || e.snapshot_every == 0 || !(e.steady_tol > 0.0) {
            return Err(config(format!("invalid [evolve] section {e:?}")));
        }
        let g = &self.genericity;
        if g.n_perturb == 0 || !(g.magnitude >= 0.0) {
            return Err(config(format!("invalid [genericity] section {g:?}")));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.model.n_interior).map_err(|e| config(e.to_string()))
    }

    pub fn kinetics(&self) -> Result<Kinetics> {
        let a = self.model.alpha;
        match &self.model.kinetics {
            KineticsSpec::Logistic => Kinetics::logistic(a),
            KineticsSpec::Polynomial { f, g } => Kinetics::polynomial(a, f.clone(), g.clone()),
            KineticsSpec::Inert => Kinetics::inert(a),
        }
        .map_err(|e| config(e.to_string()))
    }

    pub fn m1(&self) -> Result<Field> {
        self.model.m1.field(self.grid()?)
    }

    pub fn m2(&self) -> Result<Field> {
        self.model.m2.field(self.grid()?)
    }

    pub fn spec(&self, k: f64) -> Result<ProblemSpec> {
        ProblemSpec::new(self.kinetics()?, k, self.m1()?, self.m2()?, self.model.beta, self.model.xi)
            .map_err(|e| config(e.to_string()))
    }

    /// Boundary values of `w = α m1 − m2`.
    pub fn w_bc(&self) -> Result<(f64, f64)> {
        let (m1, m2, a) = (self.m1()?, self.m2()?, self.model.alpha);
        Ok((a * m1.left_bc() - m2.left_bc(), a * m1.right_bc() - m2.right_bc()))
    }

    pub fn evolve_config(&self) -> EvolveConfig {
        let e = &self.evolve;
        EvolveConfig {
            dt: e.dt,
            t_end: e.t_end,
            snapshot_every: e.snapshot_every,
            steady_tol: e.steady_tol,
            min_time: e.min_time,
            scheme: match e.scheme {
                SchemeName::Implicit => CouplingScheme::Implicit,
                SchemeName::LinearlyImplicit => CouplingScheme::LinearlyImplicit,
            },
        }
    }

    pub fn shoot_config(&self) -> ShootConfig {
        let s = &self.stationary;
        ShootConfig {
            slope_lo: s.slope_lo,
            slope_hi: s.slope_hi,
            n_scan: s.n_scan,
            steps_per_cell: s.steps_per_cell,
            newton: NewtonConfig {
                tol: s.newton_tol,
                max_iters: s.newton_max_iters,
                ..NewtonConfig::default()
            },
            ..ShootConfig::default()
        }
    }

    pub fn probe_config(&self) -> ProbeConfig {
        let s = &self.stationary;
        ProbeConfig {
            n_seeds: s.probe_seeds,
            radius: s.probe_radius,
            tol: s.probe_tol,
            max_iters: s.probe_max_iters,
            seed: self.seed,
        }
    }

    pub fn genericity_config(&self) -> GenericityConfig {
        GenericityConfig {
            n_perturb: self.genericity.n_perturb,
            magnitude: self.genericity.magnitude,
            seed: self.seed,
            tol_lambda: self.stationary.tol_lambda,
            shoot: self.shoot_config(),
        }
    }
}
