#![allow(dead_code)]

use seglab::evolve::ProblemSpec;
use seglab::geometry::{Field, Grid};
use seglab::Kinetics;

pub fn logistic() -> Kinetics {
    Kinetics::logistic(1.0).unwrap()
}

/// Logistic, α = 1, m1 = 2(1 − x), m2 = 2x.
pub fn default_spec(k: f64, n: usize) -> ProblemSpec {
    let g = Grid::new(n).unwrap();
    ProblemSpec::new(
        logistic(),
        k,
        Field::from_fn(g, |x| 2.0 * (1.0 - x)),
        Field::from_fn(g, |x| 2.0 * x),
        1.0,
        0.25,
    )
    .unwrap()
}

/// Miss `w(1) − b` of `w'' = −h(w)`, `w(0) = a`, `w'(0) = s`, by classical RK4
/// written independently of the library integrator. `None` if the orbit blows up.
pub fn oracle_miss(kin: &Kinetics, a: f64, b: f64, s: f64, steps: usize) -> Option<f64> {
    let dx = 1.0 / steps as f64;
    let rhs = |w: f64, p: f64| (p, -kin.h(w));
    let (mut w, mut p) = (a, s);
    for _ in 0..steps {
        let (a1, b1) = rhs(w, p);
        let (a2, b2) = rhs(w + 0.5 * dx * a1, p + 0.5 * dx * b1);
        let (a3, b3) = rhs(w + 0.5 * dx * a2, p + 0.5 * dx * b2);
        let (a4, b4) = rhs(w + dx * a3, p + dx * b3);
        w += dx * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0;
        p += dx * (b1 + 2.0 * b2 + 2.0 * b3 + b4) / 6.0;
        if !w.is_finite() || w.abs() > 1e6 {
            return None;
        }
    }
    Some(w - b)
}

/// Sign changes (and exact zeros) of the miss over an evenly spaced slope scan.
pub fn oracle_brackets(kin: &Kinetics, a: f64, b: f64, lo: f64, hi: f64, n_scan: usize, steps: usize) -> Vec<(f64, f64)> {
    let slopes: Vec<f64> = (0..n_scan).map(|j| lo + (hi - lo) * j as f64 / (n_scan - 1) as f64).collect();
    let misses: Vec<Option<f64>> = slopes.iter().map(|&s| oracle_miss(kin, a, b, s, steps)).collect();
    let mut out = Vec::new();
    for j in 0..n_scan {
        match (misses[j], misses.get(j + 1).copied().flatten()) {
            (Some(0.0), _) => out.push((slopes[j], slopes[j])),
            (Some(m0), Some(m1)) if m0 * m1 < 0.0 => out.push((slopes[j], slopes[j + 1])),
            _ => {}
        }
    }
    out
}

/// `‖x‖₂ / ‖y‖₂`-style relative mismatch of two vectors.
pub fn rel_err(x: &[f64], y: &[f64]) -> f64 {
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let den: f64 = y.iter().map(|b| b * b).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}
