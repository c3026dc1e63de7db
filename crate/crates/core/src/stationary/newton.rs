use crate::diagnostics::{residual_field, residual_s};
use crate::error::{Error, Result};
use crate::geometry::{l2_norm, Field};
use crate::kinetics::Kinetics;
use crate::linalg::solve_tridiagonal_const_off;

use super::StationarySolution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    pub tol: f64,
    pub max_iters: usize,
    pub max_halvings: usize,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tol: 1e-9,
            max_iters: 100,
            max_halvings: 30,
        }
    }
}

/// `Δw + h(w)` as a field (zero boundary slots).
pub fn s_residual(w: &Field, kin: &Kinetics) -> Field {
    residual_field(w, kin)
}

/// `(Δ + diag h'(w)) δ` with zero Dirichlet data on `δ`.
pub fn s_jacobian_apply(w: &Field, kin: &Kinetics, delta: &[f64]) -> Vec<f64> {
    let hx = w.grid().spacing();
    let inv_h2 = 1.0 / (hx * hx);
    let n = delta.len();
    (0..n)
        .map(|i| {
            let l = if i > 0 { delta[i - 1] } else { 0.0 };
            let r = if i + 1 < n { delta[i + 1] } else { 0.0 };
            (l - 2.0 * delta[i] + r) * inv_h2 + kin.h_prime(w.values()[i]) * delta[i]
        })
        .collect()
}

/// Semismooth Newton for `Δw + h(w) = 0`, `w = bc` on the boundary.
///
/// The Jacobian `Δ + diag h'(w)` takes the a.e. derivative of `h` node by node.
/// Steps are halved until the residual decreases.
pub fn solve_s_newton(
    init: &Field,
    kin: &Kinetics,
    bc: (f64, f64),
    cfg: &NewtonConfig,
) -> Result<StationarySolution> {
    let grid = init.grid();
    let hx = grid.spacing();
    let inv_h2 = 1.0 / (hx * hx);
    let mut w = init.with_bc(bc);
    let mut res = s_residual(&w, kin);
    let mut norm = l2_norm(&res);
    for iter in 0..=cfg.max_iters {
        if norm <= cfg.tol {
            return Ok(StationarySolution {
                residual_l2: residual_s(&w, kin),
                w,
                bc,
                newton_iters: iter,
            });
        }
        if iter == cfg.max_iters {
            break;
        }
        let diag: Vec<f64> = w.values().iter().map(|&x| -2.0 * inv_h2 + kin.h_prime(x)).collect();
        let mut delta: Vec<f64> = res.values().iter().map(|r| -r).collect();
        solve_tridiagonal_const_off(inv_h2, &diag, &mut delta)?;

        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=cfg.max_halvings {
            let trial: Vec<f64> = w.values().iter().zip(&delta).map(|(x, d)| x + t * d).collect();
            if trial.iter().all(|x| x.is_finite()) {
                let cand = Field::from_parts(grid, trial, bc.0, bc.1);
                let cres = s_residual(&cand, kin);
                let cnorm = l2_norm(&cres);
                if cnorm < norm {
                    w = cand;
                    res = cres;
                    norm = cnorm;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_iters,
        residual: norm,
        last: Some(Box::new(w)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{linf_distance, Grid};

    #[test]
    fn linear_problem_in_one_step() {
        let g = Grid::new(50).unwrap();
        let inert = Kinetics::inert(1.0).unwrap();
        let sol = solve_s_newton(&Field::zeros(g), &inert, (2.0, -2.0), &NewtonConfig::default()).unwrap();
        assert_eq!(sol.newton_iters, 1);
        let exact = Field::from_fn(g, |x| 2.0 - 4.0 * x);
        assert!(linf_distance(&sol.w, &exact) < 1e-12);
    }

    #[test]
    fn logistic_straddling_data_gives_decreasing_solution() {
        let g = Grid::new(200).unwrap();
        let kin = Kinetics::logistic(1.0).unwrap();
        let init = Field::from_fn(g, |x| 2.0 - 4.0 * x);
        let cfg = NewtonConfig::default();
        let sol = solve_s_newton(&init, &kin, (2.0, -2.0), &cfg).unwrap();
        assert!(sol.residual_l2 <= cfg.tol);
        assert!(sol.w.values().windows(2).all(|p| p[1] < p[0]));

        let again = solve_s_newton(&sol.w, &kin, (2.0, -2.0), &cfg).unwrap();
        assert!(again.newton_iters <= 1);
        assert!(linf_distance(&again.w, &sol.w) < 1e-8);
    }

    #[test]
    fn non_convergence_carries_last_iterate() {
        let g = Grid::new(50).unwrap();
        let kin = Kinetics::logistic(1.0).unwrap();
        let init = Field::from_fn(g, |x| 2.0 - 4.0 * x);
        let cfg = NewtonConfig { max_iters: 1, tol: 1e-14, ..Default::default() };
        match solve_s_newton(&init, &kin, (2.0, -2.0), &cfg) {
            Err(Error::NonConvergence { last: Some(w), .. }) => assert_eq!(w.bc(), (2.0, -2.0)),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
