//! The coupled stationary system at finite `k`,
//!
//! ```text
//! −Δu = f(u) − k u v,   −Δv = g(v) − α k u v,   u = m1, v = m2 on ∂Ω,
//! ```
//!
//! solved by damped Newton on the interleaved `(u_i, v_i)` unknowns, and a
//! probe counting how many distinct solutions are reached from random seeds
//! near `(w₀⁺/α, −w₀⁻)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolve::ProblemSpec;
use crate::geometry::{l2_norm, laplacian_dirichlet, Field};
use crate::linalg::{solve_block_tridiagonal, Block};

use super::StationarySolution;

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPair {
    pub u: Field,
    pub v: Field,
    pub k: f64,
    /// `(‖G_u‖, ‖G_v‖)` in L².
    pub residuals: (f64, f64),
    pub newton_iters: usize,
}

impl StationaryPair {
    pub fn distance(&self, other: &StationaryPair) -> f64 {
        let du = crate::geometry::l2_distance(&self.u, &other.u);
        let dv = crate::geometry::l2_distance(&self.v, &other.v);
        (du * du + dv * dv).sqrt()
    }
}

/// `(Δu + f(u) − kuv, Δv + g(v) − αkuv)` at the interior nodes.
pub fn coupled_residual(u: &Field, v: &Field, spec: &ProblemSpec) -> (Field, Field) {
    let kin = spec.kinetics();
    let (k, a) = (spec.k(), kin.alpha());
    let lu = laplacian_dirichlet(u);
    let lv = laplacian_dirichlet(v);
    let n = u.values().len();
    let (uu, vv) = (u.values(), v.values());
    let gu = (0..n).map(|i| lu.values()[i] + kin.f(uu[i]) - k * uu[i] * vv[i]).collect();
    let gv = (0..n).map(|i| lv.values()[i] + kin.g(vv[i]) - a * k * uu[i] * vv[i]).collect();
    (
        Field::from_parts(u.grid(), gu, 0.0, 0.0),
        Field::from_parts(u.grid(), gv, 0.0, 0.0),
    )
}

fn jacobian_blocks(u: &[f64], v: &[f64], spec: &ProblemSpec) -> (Vec<Block>, f64) {
    let kin = spec.kinetics();
    let (k, a) = (spec.k(), kin.alpha());
    let hx = spec.grid().spacing();
    let inv_h2 = 1.0 / (hx * hx);
    let diag = u
        .iter()
        .zip(v)
        .map(|(&x, &y)| {
            [
                [-2.0 * inv_h2 + kin.f_prime(x) - k * y, -k * x],
                [-a * k * y, -2.0 * inv_h2 + kin.g_prime(y) - a * k * x],
            ]
        })
        .collect();
    (diag, inv_h2)
}

/// Jacobian of [`coupled_residual`] applied to `(du, dv)` (zero boundary data).
pub fn coupled_jacobian_apply(u: &Field, v: &Field, spec: &ProblemSpec, du: &[f64], dv: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (diag, inv_h2) = jacobian_blocks(u.values(), v.values(), spec);
    let n = du.len();
    let mut ou = Vec::with_capacity(n);
    let mut ov = Vec::with_capacity(n);
    for i in 0..n {
        let nb = |x: &[f64]| {
            (if i > 0 { x[i - 1] } else { 0.0 }) + (if i + 1 < n { x[i + 1] } else { 0.0 })
        };
        let d = &diag[i];
        ou.push(d[0][0] * du[i] + d[0][1] * dv[i] + inv_h2 * nb(du));
        ov.push(d[1][0] * du[i] + d[1][1] * dv[i] + inv_h2 * nb(dv));
    }
    (ou, ov)
}

fn merit(spec: &ProblemSpec, u: &Field, v: &Field) -> (Field, Field, f64, f64) {
    let (gu, gv) = coupled_residual(u, v, spec);
    let (ru, rv) = (l2_norm(&gu), l2_norm(&gv));
    (gu, gv, ru, rv)
}

/// Damped Newton for the stationary system from the seed `(seed_u, seed_v)`;
/// boundary data are taken from `spec`.
pub fn solve_pk_stationary(
    spec: &ProblemSpec,
    seed_u: &Field,
    seed_v: &Field,
    tol: f64,
    max_iters: usize,
) -> Result<StationaryPair> {
    let grid = spec.grid();
    let n = grid.n_interior();
    let mut u = seed_u.with_bc(spec.m1().bc());
    let mut v = seed_v.with_bc(spec.m2().bc());
    let (mut gu, mut gv, mut ru, mut rv) = merit(spec, &u, &v);
    let mut iters = 0;
    loop {
        if ru <= tol && rv <= tol {
            break;
        }
        if iters == max_iters {
            return Err(Error::NonConvergence {
                iterations: iters,
                residual: ru.hypot(rv),
                last: Some(Box::new(u)),
            });
        }
        iters += 1;
        let (diag, inv_h2) = jacobian_blocks(u.values(), v.values(), spec);
        let off: Vec<Block> = vec![[[inv_h2, 0.0], [0.0, inv_h2]]; n - 1];
        let mut delta: Vec<[f64; 2]> = gu
            .values()
            .iter()
            .zip(gv.values())
            .map(|(a, b)| [-a, -b])
            .collect();
        solve_block_tridiagonal(&off, &diag, &off, &mut delta)?;
        let current = ru.hypot(rv);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=30 {
            let cu: Vec<f64> = u.values().iter().zip(&delta).map(|(x, d)| x + t * d[0]).collect();
            let cv: Vec<f64> = v.values().iter().zip(&delta).map(|(x, d)| x + t * d[1]).collect();
            if cu.iter().chain(&cv).all(|x| x.is_finite()) {
                let cu = Field::from_parts(grid, cu, u.left_bc(), u.right_bc());
                let cv = Field::from_parts(grid, cv, v.left_bc(), v.right_bc());
                let (a, b, ra, rb) = merit(spec, &cu, &cv);
                if ra.hypot(rb) < current {
                    (u, v, gu, gv, ru, rv) = (cu, cv, a, b, ra, rb);
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence {
                iterations: iters,
                residual: current,
                last: Some(Box::new(u)),
            });
        }
    }
    let floor = -tol.max(1e-12);
    for (field, _) in [(&u, "u"), (&v, "v")] {
        if let Some((node, &value)) = field
            .values()
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
        {
            if value < floor {
                return Err(Error::NegativeComponent { node, value });
            }
        }
    }
    Ok(StationaryPair {
        u,
        v,
        k: spec.k(),
        residuals: (ru, rv),
        newton_iters: iters,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub n_seeds: usize,
    pub radius: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            n_seeds: 8,
            radius: 0.05,
            tol: 1e-9,
            max_iters: 200,
            seed: 0x5EED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedOutcome {
    pub index: usize,
    /// L² size of the applied perturbation (before clipping at zero).
    pub perturbation: f64,
    pub residuals: Option<(f64, f64)>,
    /// Which distinct limit this seed reached.
    pub limit: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub limits: Vec<StationaryPair>,
    pub outcomes: Vec<SeedOutcome>,
    pub distinct_threshold: f64,
}

impl UniquenessReport {
    pub fn distinct_count(&self) -> usize {
        self.limits.len()
    }

    pub fn max_residual(&self) -> f64 {
        self.outcomes
            .iter()
            .filter_map(|o| o.residuals)
            .fold(0.0f64, |m, (a, b)| m.max(a).max(b))
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| o.error.is_some()).count()
    }
}

/// Seeds Newton at random perturbations of `(w₀⁺/α, −w₀⁻)` of L² size at
/// most `radius` (clipped at zero) and groups the limits; two limits are the
/// same when their L² distance is at most `10·tol`.
pub fn local_uniqueness_probe(spec: &ProblemSpec, w0: &StationarySolution, cfg: &ProbeConfig) -> UniquenessReport {
    let a = spec.kinetics().alpha();
    let grid = spec.grid();
    let base_u = w0.w.map(|w| w.max(0.0) / a);
    let base_v = w0.w.map(|w| -(w.min(0.0)));
    let hx = grid.spacing();

    let results: Vec<(f64, Result<StationaryPair>)> = (0..cfg.n_seeds)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
            let n = grid.n_interior();
            let pu: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let pv: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let norm = (hx * pu.iter().chain(&pv).map(|x| x * x).sum::<f64>()).sqrt();
            let size = cfg.radius * rng.gen_range(0.0..=1.0);
            let scale = if norm > 0.0 { size / norm } else { 0.0 };
            let su: Vec<f64> = base_u.values().iter().zip(&pu).map(|(b, p)| (b + scale * p).max(0.0)).collect();
            let sv: Vec<f64> = base_v.values().iter().zip(&pv).map(|(b, p)| (b + scale * p).max(0.0)).collect();
            let seed_u = Field::from_parts(grid, su, base_u.left_bc(), base_u.right_bc());
            let seed_v = Field::from_parts(grid, sv, base_v.left_bc(), base_v.right_bc());
            (size, solve_pk_stationary(spec, &seed_u, &seed_v, cfg.tol, cfg.max_iters))
        })
        .collect();

    let threshold = 10.0 * cfg.tol;
    let mut limits: Vec<StationaryPair> = Vec::new();
    let mut outcomes = Vec::with_capacity(results.len());
    for (index, (perturbation, res)) in results.into_iter().enumerate() {
        match res {
            Ok(pair) => {
                let residuals = Some(pair.residuals);
                let limit = match limits.iter().position(|l| l.distance(&pair) <= threshold) {
                    Some(j) => j,
                    None => {
                        limits.push(pair);
                        limits.len() - 1
                    }
                };
                outcomes.push(SeedOutcome { index, perturbation, residuals, limit: Some(limit), error: None });
            }
            Err(e) => outcomes.push(SeedOutcome {
                index,
                perturbation,
                residuals: None,
                limit: None,
                error: Some(e.to_string()),
            }),
        }
    }
    UniquenessReport {
        limits,
        outcomes,
        distinct_threshold: threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{linf_distance, Grid};
    use crate::kinetics::Kinetics;
    use crate::stationary::{solve_s_newton, NewtonConfig};

    #[test]
    fn decoupled_at_k_zero() {
        let g = Grid::new(80).unwrap();
        let kin = Kinetics::logistic(1.0).unwrap();
        // u has data 2 on the left; v has zero data and so stays at the
        // trivial solution.
        let m1 = Field::from_fn(g, |x| 2.0 * (1.0 - x));
        let m2 = Field::zeros(g);
        let spec = ProblemSpec::new(kin.clone(), 0.0, m1.clone(), m2.clone(), 1.0, 0.25).unwrap();
        let pair = solve_pk_stationary(&spec, &m1, &m2, 1e-9, 50).unwrap();
        // scalar solve of Δu + f(u) = 0 with the same data; h = f for w ≥ 0
        let scalar = solve_s_newton(&m1, &kin, (2.0, 0.0), &NewtonConfig::default()).unwrap();
        assert!(linf_distance(&pair.u, &scalar.w) < 1e-8);
        assert!(pair.v.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn probe_without_perturbation() {
        let g = Grid::new(100).unwrap();
        let kin = Kinetics::logistic(1.0).unwrap();
        let spec = ProblemSpec::new(
            kin.clone(),
            1e3,
            Field::from_fn(g, |x| 2.0 * (1.0 - x)),
            Field::from_fn(g, |x| 2.0 * x),
            1.0,
            0.25,
        )
        .unwrap();
        let w0 = solve_s_newton(&Field::from_fn(g, |x| 2.0 - 4.0 * x), &kin, (2.0, -2.0), &NewtonConfig::default())
            .unwrap();
        let cfg = ProbeConfig { n_seeds: 1, radius: 0.0, ..Default::default() };
        let rep = local_uniqueness_probe(&spec, &w0, &cfg);
        assert_eq!(rep.distinct_count(), 1);
        assert_eq!(rep.failures(), 0);
    }
}
