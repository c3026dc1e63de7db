//! Linearization `Δ + h'(w̃)` at a solution of the limit problem (zero
//! Dirichlet data), its eigenvalue nearest zero, and a random-data probe of
//! how often every solution is non-degenerate.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Field, Grid};
use crate::kinetics::Kinetics;
use crate::linalg::{solve_tridiagonal_const_off, sturm_count};
use crate::stationary::{shoot_enumerate, ShootConfig, StationarySolution};

/// Symmetric tridiagonal `Δ_h + diag(potential)` with zero boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedOperator {
    grid: Grid,
    potential: Vec<f64>,
    /// Nodes where `w̃` is exactly zero and `h'` fell back to its convention.
    pub zero_nodes: usize,
}

impl LinearizedOperator {
    pub fn from_potential(grid: Grid, potential: Vec<f64>) -> Result<Self> {
        if potential.len() != grid.n_interior() || potential.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("potential must be finite with one value per node".into()));
        }
        Ok(LinearizedOperator { grid, potential, zero_nodes: 0 })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn off_diagonal(&self) -> f64 {
        1.0 / (self.grid.spacing() * self.grid.spacing())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let d = -2.0 * self.off_diagonal();
        self.potential.iter().map(|p| d + p).collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let off = self.off_diagonal();
        let diag = self.diagonal();
        let n = x.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 { x[i - 1] } else { 0.0 };
                let r = if i + 1 < n { x[i + 1] } else { 0.0 };
                diag[i] * x[i] + off * (l + r)
            })
            .collect()
    }

    /// Dense row-major copy, for checks on small grids.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.potential.len();
        let diag = self.diagonal();
        let off = self.off_diagonal();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            diag[i]
                        } else if i.abs_diff(j) == 1 {
                            off
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        let off = self.off_diagonal();
        self.diagonal().iter().fold(0.0f64, |m, d| m.max(d.abs() + 2.0 * off))
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let off = vec![self.off_diagonal(); self.potential.len().saturating_sub(1)];
        sturm_count(&self.diagonal(), &off, x)
    }
}

/// Potential `h'(w̃)` at the interior nodes of the solution.
pub fn assemble_linearization(sol: &StationarySolution, kin: &Kinetics) -> LinearizedOperator {
    let potential = sol.w.values().iter().map(|&w| kin.h_prime(w)).collect();
    let zero_nodes = sol.w.values().iter().filter(|&&w| w == 0.0).count();
    LinearizedOperator {
        grid: sol.w.grid(),
        potential,
        zero_nodes,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    /// Eigenvector with `l2_norm = 1` and zero boundary slots.
    pub field: Field,
    /// `‖A φ − λ φ‖_{L²}`.
    pub residual: f64,
    pub iterations: usize,
}

fn h_dot(h: f64, a: &[f64], b: &[f64]) -> f64 {
    h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

fn normalize(h: f64, x: &mut [f64]) {
    let nrm = h_dot(h, x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= nrm);
}

fn rayleigh_and_residual(op: &LinearizedOperator, x: &[f64]) -> (f64, f64) {
    let h = op.grid.spacing();
    let ax = op.apply(x);
    let mu = h_dot(h, x, &ax) / h_dot(h, x, x);
    let r: Vec<f64> = ax.iter().zip(x).map(|(a, v)| a - mu * v).collect();
    (mu, h_dot(h, &r, &r).sqrt())
}

/// One shifted inverse-iteration step; `Err` means the shift is an exact
/// eigenvalue to working precision.
fn inverse_step(op: &LinearizedOperator, shift: f64, x: &[f64]) -> Result<Vec<f64>> {
    let diag: Vec<f64> = op.diagonal().iter().map(|d| d - shift).collect();
    let mut y = x.to_vec();
    solve_tridiagonal_const_off(op.off_diagonal(), &diag, &mut y)?;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularJacobian { row: 0, pivot: 0.0 });
    }
    Ok(y)
}

/// Eigenvalue nearest zero by inverse iteration at zero shift, polished by
/// Rayleigh-shifted steps and certified with a Sturm count.
pub fn smallest_magnitude_eigenvalue(op: &LinearizedOperator) -> Result<EigenPair> {
    let grid = op.grid;
    let h = grid.spacing();
    let n = grid.n_interior();
    let scale = op.norm_bound();
    // Asymmetric start so no eigenvector is missed by symmetry.
    let mut x: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&t| 1.0 + t + 0.5 * (3.0 * PI * t).sin())
        .collect();
    normalize(h, &mut x);

    let mut iterations = 0;
    let mut singular = false;
    for _ in 0..500 {
        iterations += 1;
        match inverse_step(op, 0.0, &x) {
            Ok(mut y) => {
                normalize(h, &mut y);
                x = y;
            }
            Err(_) => {
                singular = true;
                break;
            }
        }
        let (_, res) = rayleigh_and_residual(op, &x);
        if res <= 1e-6 * scale.max(1.0) {
            break;
        }
    }
    if singular {
        // The zero shift is itself an eigenvalue; nudge to recover the vector.
        let nudge = 1e-10 * scale.max(1.0);
        for _ in 0..3 {
            if let Ok(mut y) = inverse_step(op, nudge, &x) {
                normalize(h, &mut y);
                x = y;
            }
        }
    }
    // Rayleigh polish: shift-invert at the current quotient.
    let (mut mu, mut res) = rayleigh_and_residual(op, &x);
    for _ in 0..4 {
        if res <= 1e-12 * scale.max(1.0) {
            break;
        }
        match inverse_step(op, mu, &x) {
            Ok(mut y) => {
                normalize(h, &mut y);
                x = y;
            }
            Err(_) => break,
        }
        iterations += 1;
        (mu, res) = rayleigh_and_residual(op, &x);
    }

    // Certification: no eigenvalue strictly inside (−|μ|, |μ|).
    let margin = 1e-9 * scale.max(1.0) + res;
    let inner = (mu.abs() - margin).max(0.0);
    if inner > 0.0 && op.count_below(inner) != op.count_below(-inner) {
        let target = nearest_to_zero_by_bisection(op);
        let mut y = x.clone();
        for _ in 0..3 {
            if let Ok(mut z) = inverse_step(op, target, &y) {
                normalize(h, &mut z);
                y = z;
            }
            iterations += 1;
        }
        x = y;
        (mu, res) = rayleigh_and_residual(op, &x);
    }

    let field = Field::from_parts(grid, x, 0.0, 0.0);
    debug_assert_eq!(field.values().len(), n);
    Ok(EigenPair { lambda: mu, field, residual: res, iterations })
}

/// Eigenvalue closest to zero from Sturm counts alone.
pub fn nearest_to_zero_by_bisection(op: &LinearizedOperator) -> f64 {
    let r = op.norm_bound() + 1.0;
    let below_zero = op.count_below(0.0);
    let n = op.potential.len();
    // k-th smallest eigenvalue (0-based) by bisection
    let kth = |k: usize| {
        let (mut lo, mut hi) = (-r, r);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if op.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut candidates = Vec::new();
    if below_zero > 0 {
        candidates.push(kth(below_zero - 1));
    }
    if below_zero < n {
        candidates.push(kth(below_zero));
    }
    candidates
        .into_iter()
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0)
}

/// Default threshold `1e-6 · (‖potential‖_∞ + π²)`.
pub fn default_lambda_tol(op: &LinearizedOperator) -> f64 {
    let pmax = op.potential.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    1e-6 * (pmax + PI * PI)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub lambda: f64,
    pub tol_lambda: f64,
    pub nondegenerate: bool,
    pub eigen_residual: f64,
    pub zero_nodes: usize,
    /// `‖J‖ / |λ_min|` for the Newton Jacobian at the solution.
    pub condition_estimate: f64,
}

/// Non-degeneracy certificate; `tol_lambda = None` uses [`default_lambda_tol`].
pub fn certify(sol: &StationarySolution, kin: &Kinetics, tol_lambda: Option<f64>) -> Result<Certificate> {
    let op = assemble_linearization(sol, kin);
    let pair = smallest_magnitude_eigenvalue(&op)?;
    let tol = tol_lambda.unwrap_or_else(|| default_lambda_tol(&op));
    Ok(Certificate {
        lambda: pair.lambda,
        tol_lambda: tol,
        nondegenerate: pair.lambda.abs() > tol,
        eigen_residual: pair.residual,
        zero_nodes: op.zero_nodes,
        condition_estimate: op.norm_bound() / pair.lambda.abs(),
    })
}

/// `|λ_min| > tol_lambda` for the linearization at `sol`.
pub fn is_nondegenerate(sol: &StationarySolution, kin: &Kinetics, tol_lambda: Option<f64>) -> Result<bool> {
    certify(sol, kin, tol_lambda).map(|c| c.nondegenerate)
}

/// `‖J‖/|λ_min|` of the Newton Jacobian `Δ + diag h'(w)` at `sol`.
pub fn jacobian_condition_estimate(sol: &StationarySolution, kin: &Kinetics) -> Result<f64> {
    certify(sol, kin, None).map(|c| c.condition_estimate)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationRow {
    pub index: usize,
    pub bc: (f64, f64),
    pub n_solutions: usize,
    pub all_nondegenerate: bool,
    pub min_abs_lambda: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    pub rows: Vec<PerturbationRow>,
}

impl GenericityReport {
    /// Fraction of perturbations (failed ones count against) whose solutions
    /// are all non-degenerate.
    pub fn fraction_nondegenerate(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        let ok = self
            .rows
            .iter()
            .filter(|r| r.error.is_none() && r.n_solutions > 0 && r.all_nondegenerate)
            .count();
        ok as f64 / self.rows.len() as f64
    }

    pub fn min_abs_lambda(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.error.is_none())
            .fold(f64::INFINITY, |m, r| m.min(r.min_abs_lambda))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityConfig {
    pub n_perturb: usize,
    pub magnitude: f64,
    pub seed: u64,
    pub tol_lambda: Option<f64>,
    pub shoot: ShootConfig,
}

/// Enumerates and certifies the solutions for boundary pairs
/// `(a + δa, b + δb)`, `δ` uniform in `[−magnitude, magnitude]`.
pub fn genericity_sweep(
    base_bc: (f64, f64),
    kin: &Kinetics,
    grid: Grid,
    cfg: &GenericityConfig,
) -> Result<GenericityReport> {
    if cfg.n_perturb == 0 {
        return Err(Error::InvalidInput("n_perturb must be at least 1".into()));
    }
    let rows = (0..cfg.n_perturb)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(index as u64));
            let (da, db) = if cfg.magnitude > 0.0 {
                (
                    rng.gen_range(-cfg.magnitude..=cfg.magnitude),
                    rng.gen_range(-cfg.magnitude..=cfg.magnitude),
                )
            } else {
                (0.0, 0.0)
            };
            let bc = (base_bc.0 + da, base_bc.1 + db);
            let mut row = PerturbationRow {
                index,
                bc,
                n_solutions: 0,
                all_nondegenerate: false,
                min_abs_lambda: f64::INFINITY,
                error: None,
            };
            let outcome = shoot_enumerate(kin, bc.0, bc.1, grid, &cfg.shoot).and_then(|rep| {
                let certs = rep
                    .solutions
                    .iter()
                    .map(|s| certify(&s.solution, kin, cfg.tol_lambda))
                    .collect::<Result<Vec<_>>>()?;
                Ok((rep, certs))
            });
            match outcome {
                Ok((rep, certs)) => {
                    row.n_solutions = rep.solutions.len();
                    row.all_nondegenerate = certs.iter().all(|c| c.nondegenerate);
                    row.min_abs_lambda = certs.iter().fold(f64::INFINITY, |m, c| m.min(c.lambda.abs()));
                    if !rep.failures.is_empty() {
                        row.error = Some(format!("{} bracket(s) failed to refine", rep.failures.len()));
                    }
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect();
    Ok(GenericityReport { rows })
}
