//! Shooting for `w'' = −h(w)`, `w(0) = a`, `w(1) = b`.
//!
//! A scan over initial slopes brackets sign changes of the miss `w(1) − b`;
//! each bracket is bisected and the resulting orbit, sampled on the grid,
//! seeds [`solve_s_newton`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{linf_distance, Field, Grid};
use crate::kinetics::Kinetics;

use super::newton::{solve_s_newton, NewtonConfig};
use super::StationarySolution;

/// `|w|` beyond which an orbit counts as escaped.
const ESCAPE: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct ShootConfig {
    pub slope_lo: f64,
    pub slope_hi: f64,
    pub n_scan: usize,
    /// RK4 steps per grid cell.
    pub steps_per_cell: usize,
    pub newton: NewtonConfig,
    /// Refined solutions closer than this in L∞ are merged.
    pub dedup_tol: f64,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig {
            slope_lo: -50.0,
            slope_hi: 50.0,
            n_scan: 2000,
            steps_per_cell: 4,
            newton: NewtonConfig::default(),
            dedup_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub w: Vec<f64>,
    pub slope: Vec<f64>,
    pub escaped: bool,
}

impl Orbit {
    pub fn end(&self) -> Option<f64> {
        if self.escaped {
            None
        } else {
            self.w.last().copied()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotSolution {
    pub slope: f64,
    /// `max_x |E(x) − E(0)|` of `½w'² + H(w)` along the shot orbit.
    pub energy_drift: f64,
    pub solution: StationarySolution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingReport {
    pub solutions: Vec<ShotSolution>,
    /// Slope samples whose orbit escaped before `x = 1`.
    pub escaped: usize,
    pub brackets: usize,
    /// Brackets whose orbit could not be refined, with the reason.
    pub failures: Vec<(f64, String)>,
}

impl ShootingReport {
    pub fn stationary(&self) -> Vec<StationarySolution> {
        self.solutions.iter().map(|s| s.solution.clone()).collect()
    }
}

/// `½ s² + H(w)`, constant along orbits of `w'' = −h(w)`.
pub fn conserved_quantity(w: f64, slope: f64, kin: &Kinetics) -> f64 {
    0.5 * slope * slope + kin.primitive(w)
}

/// Classical RK4 over `[0,1]` in `n_steps` equal steps.
pub fn integrate_orbit(kin: &Kinetics, a: f64, slope: f64, n_steps: usize) -> Orbit {
    let dx = 1.0 / n_steps as f64;
    let mut w = Vec::with_capacity(n_steps + 1);
    let mut s = Vec::with_capacity(n_steps + 1);
    let (mut y, mut p) = (a, slope);
    w.push(y);
    s.push(p);
    for _ in 0..n_steps {
        let k1 = (p, -kin.h(y));
        let k2 = (p + 0.5 * dx * k1.1, -kin.h(y + 0.5 * dx * k1.0));
        let k3 = (p + 0.5 * dx * k2.1, -kin.h(y + 0.5 * dx * k2.0));
        let k4 = (p + dx * k3.1, -kin.h(y + dx * k3.0));
        y += dx / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += dx / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if !y.is_finite() || !p.is_finite() || y.abs() > ESCAPE {
            return Orbit { w, slope: s, escaped: true };
        }
        w.push(y);
        s.push(p);
    }
    Orbit { w, slope: s, escaped: false }
}

fn energy_drift(orbit: &Orbit, kin: &Kinetics) -> f64 {
    let e0 = conserved_quantity(orbit.w[0], orbit.slope[0], kin);
    orbit
        .w
        .iter()
        .zip(&orbit.slope)
        .fold(0.0f64, |m, (&w, &s)| m.max((conserved_quantity(w, s, kin) - e0).abs()))
}

fn scan_slopes(cfg: &ShootConfig) -> Vec<f64> {
    let n = cfg.n_scan;
    (0..n)
        .map(|j| cfg.slope_lo + (cfg.slope_hi - cfg.slope_lo) * j as f64 / (n - 1) as f64)
        .collect()
}

/// Slope intervals (or exact roots, as degenerate intervals) on which the miss
/// changes sign, together with the number of escaped samples.
pub(crate) fn bracket_scan(kin: &Kinetics, a: f64, b: f64, n_steps: usize, cfg: &ShootConfig) -> (Vec<(f64, f64)>, usize) {
    let slopes = scan_slopes(cfg);
    let misses: Vec<Option<f64>> = slopes
        .par_iter()
        .map(|&s| integrate_orbit(kin, a, s, n_steps).end().map(|e| e - b))
        .collect();
    let escaped = misses.iter().filter(|m| m.is_none()).count();
    let mut brackets = Vec::new();
    for j in 0..slopes.len() {
        let Some(m0) = misses[j] else { continue };
        if m0 == 0.0 {
            brackets.push((slopes[j], slopes[j]));
            continue;
        }
        if let Some(Some(m1)) = misses.get(j + 1) {
            if m0 * m1 < 0.0 {
                brackets.push((slopes[j], slopes[j + 1]));
            }
        }
    }
    (brackets, escaped)
}

fn bisect(kin: &Kinetics, a: f64, b: f64, n_steps: usize, (mut lo, mut hi): (f64, f64)) -> Option<f64> {
    let miss = |s: f64| integrate_orbit(kin, a, s, n_steps).end().map(|e| e - b);
    if lo == hi {
        return Some(lo);
    }
    let mut m_lo = miss(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let m_mid = miss(mid)?;
        if m_mid == 0.0 {
            return Some(mid);
        }
        if (m_mid < 0.0) == (m_lo < 0.0) {
            lo = mid;
            m_lo = m_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Enumerates solutions of `Δw + h(w) = 0`, `w(0) = a`, `w(1) = b` reachable
/// from the configured slope range, each refined on `grid` by Newton.
pub fn shoot_enumerate(kin: &Kinetics, a: f64, b: f64, grid: Grid, cfg: &ShootConfig) -> Result<ShootingReport> {
    if !(cfg.slope_lo < cfg.slope_hi) || cfg.n_scan < 16 || cfg.steps_per_cell == 0 {
        return Err(Error::InvalidInput(format!(
            "need slope_lo < slope_hi, n_scan >= 16, steps_per_cell >= 1; got {cfg:?}"
        )));
    }
    let per_cell = cfg.steps_per_cell;
    let n_steps = per_cell * (grid.n_interior() + 1);
    let (brackets, escaped) = bracket_scan(kin, a, b, n_steps, cfg);

    let refined: Vec<std::result::Result<ShotSolution, (f64, String)>> = brackets
        .par_iter()
        .map(|&br| {
            let slope = bisect(kin, a, b, n_steps, br).ok_or((br.0, "orbit escaped inside bracket".to_string()))?;
            let orbit = integrate_orbit(kin, a, slope, n_steps);
            if orbit.escaped {
                return Err((slope, "orbit escaped".into()));
            }
            let values: Vec<f64> = (0..grid.n_interior()).map(|i| orbit.w[per_cell * (i + 1)]).collect();
            let init = Field::new(grid, values, a, b).map_err(|e| (slope, e.to_string()))?;
            let solution = solve_s_newton(&init, kin, (a, b), &cfg.newton).map_err(|e| (slope, e.to_string()))?;
            Ok(ShotSolution {
                slope,
                energy_drift: energy_drift(&orbit, kin),
                solution,
            })
        })
        .collect();

    let mut solutions: Vec<ShotSolution> = Vec::new();
    let mut failures = Vec::new();
    for r in refined {
        match r {
            Ok(s) => {
                let dup = solutions
                    .iter()
                    .any(|o| linf_distance(&o.solution.w, &s.solution.w) < cfg.dedup_tol);
                if !dup {
                    solutions.push(s);
                }
            }
            Err(f) => failures.push(f),
        }
    }
    Ok(ShootingReport {
        solutions,
        escaped,
        brackets: brackets.len(),
        failures,
    })
}
