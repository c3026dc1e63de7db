//! `−Δu = f(w₀⁺/α) − k u (αu − w₀)`, `u = m1` on the boundary, for a fixed
//! solution `w₀` of the limit problem.
//!
//! `w₀⁺/α` is a lower solution and any large constant an upper one. Iterating
//! `(−Δ + λ) u_{n+1} = F(u_n) + λ u_n` downward from the constant converges
//! monotonically once `λ` dominates `−∂F/∂u` on the bracket; Newton then
//! polishes the limit.

use crate::error::{Error, Result};
use crate::geometry::{l2_norm, laplacian_dirichlet, Field};
use crate::kinetics::Kinetics;
use crate::linalg::solve_tridiagonal_const_off;

#[derive(Debug, Clone, PartialEq)]
pub struct OneEqSolution {
    pub u: Field,
    pub lower: Field,
    pub upper: f64,
    pub lambda: f64,
    pub monotone_iters: usize,
    pub newton_iters: usize,
    pub residual_l2: f64,
    /// Largest amount by which any iterate left `[lower, upper]`.
    pub bracket_violation: f64,
}

const MAX_MONOTONE_ITERS: usize = 2_000_000;
const MAX_LAMBDA_DOUBLINGS: usize = 10;
/// Monotone sweeps stop once the sup-norm update falls below this and Newton
/// takes over.
const HANDOFF: f64 = 1e-7;

fn forcing(lower: &Field, kin: &Kinetics) -> Vec<f64> {
    lower.values().iter().map(|&l| kin.f(l)).collect()
}

/// `Δu + f(w₀⁺/α) − k u (αu − w₀)` at the interior nodes.
pub fn oneeq_residual(u: &Field, w0: &Field, k: f64, kin: &Kinetics) -> Field {
    let a = kin.alpha();
    let lap = laplacian_dirichlet(u);
    let vals = lap
        .values()
        .iter()
        .zip(u.values())
        .zip(w0.values())
        .map(|((l, &x), &w)| l + kin.f(w.max(0.0) / a) - k * x * (a * x - w))
        .collect();
    Field::from_parts(u.grid(), vals, 0.0, 0.0)
}

pub fn solve_oneeq_monotone(
    k: f64,
    w0: &Field,
    kin: &Kinetics,
    m1_bc: (f64, f64),
    tol: f64,
) -> Result<OneEqSolution> {
    if !(k >= 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("need k >= 0 and tol > 0, got k = {k}, tol = {tol}")));
    }
    let a = kin.alpha();
    let grid = w0.grid();
    let n = grid.n_interior();
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let lower = w0.map(|w| w.max(0.0) / a);
    if m1_bc.0 < lower.left_bc() - 1e-12 || m1_bc.1 < lower.right_bc() - 1e-12 {
        return Err(Error::InvalidInput("boundary data m1 lies below w0+/alpha".into()));
    }
    let upper = 1.0f64.max(m1_bc.0).max(m1_bc.1).max(lower.sup()) + 1.0;
    let src = forcing(&lower, kin);
    let w = w0.values();
    let w_min = w0.min().min(0.0);
    let slack = 1e-9 * (1.0 + upper);

    let mut lambda = k * (2.0 * a * upper - w_min);
    let mut doublings = 0;
    let (u, iters, violation) = loop {
        let diag = vec![2.0 * inv_h2 + lambda; n];
        let mut u = vec![upper; n];
        let mut violation: f64 = 0.0;
        let mut escaped = false;
        let mut iters = 0;
        while iters < MAX_MONOTONE_ITERS {
            iters += 1;
            let mut rhs: Vec<f64> = (0..n)
                .map(|i| src[i] - k * u[i] * (a * u[i] - w[i]) + lambda * u[i])
                .collect();
            rhs[0] += inv_h2 * m1_bc.0;
            rhs[n - 1] += inv_h2 * m1_bc.1;
            solve_tridiagonal_const_off(-inv_h2, &diag, &mut rhs)?;
            let mut change: f64 = 0.0;
            for i in 0..n {
                let lo = lower.values()[i];
                let below = lo - rhs[i];
                let above = rhs[i] - u[i];
                violation = violation.max(below).max(above);
                if below > slack || above > slack || !rhs[i].is_finite() {
                    escaped = true;
                }
                change = change.max((rhs[i] - u[i]).abs());
            }
            u = rhs;
            if escaped || change <= HANDOFF {
                break;
            }
        }
        if !escaped {
            break (u, iters, violation.max(0.0));
        }
        doublings += 1;
        if doublings > MAX_LAMBDA_DOUBLINGS {
            return Err(Error::NonConvergence { iterations: iters, residual: violation, last: None });
        }
        lambda = 2.0 * lambda.max(1.0);
    };

    // Newton polish: J = Δ − k(2αu − w₀)
    let mut field = Field::from_parts(grid, u, m1_bc.0, m1_bc.1);
    let mut res = oneeq_residual(&field, w0, k, kin);
    let mut norm = l2_norm(&res);
    let mut newton_iters = 0;
    while norm > tol && newton_iters < 50 {
        let diag: Vec<f64> = field
            .values()
            .iter()
            .zip(w)
            .map(|(&x, &wi)| -2.0 * inv_h2 - k * (2.0 * a * x - wi))
            .collect();
        let mut delta: Vec<f64> = res.values().iter().map(|r| -r).collect();
        solve_tridiagonal_const_off(inv_h2, &diag, &mut delta)?;
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand: Vec<f64> = field.values().iter().zip(&delta).map(|(x, d)| x + t * d).collect();
            let cand = Field::from_parts(grid, cand, m1_bc.0, m1_bc.1);
            let cres = oneeq_residual(&cand, w0, k, kin);
            let cnorm = l2_norm(&cres);
            if cnorm < norm {
                field = cand;
                res = cres;
                norm = cnorm;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        newton_iters += 1;
        if !improved {
            break;
        }
    }
    if norm > tol {
        return Err(Error::NonConvergence {
            iterations: iters + newton_iters,
            residual: norm,
            last: Some(Box::new(field)),
        });
    }
    let below = field
        .values()
        .iter()
        .zip(lower.values())
        .fold(0.0f64, |m, (x, l)| m.max(l - x));
    Ok(OneEqSolution {
        u: field,
        lower,
        upper,
        lambda,
        monotone_iters: iters,
        newton_iters,
        residual_l2: norm,
        bracket_violation: violation.max(below),
    })
}
