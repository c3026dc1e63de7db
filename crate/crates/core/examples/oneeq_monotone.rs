//! Solves `−Δu = f(w₀⁺/α) − k u (αu − w₀)` by monotone iteration for several
//! `k`: the solutions decrease in `k` towards `w₀⁺/α`.

use seglab::geometry::{l2_distance, Grid};
use seglab::stationary::{shoot_enumerate, solve_oneeq_monotone, ShootConfig};
use seglab::Kinetics;

fn main() -> seglab::Result<()> {
    let kin = Kinetics::logistic(1.0)?;
    let rep = shoot_enumerate(&kin, 2.0, -2.0, Grid::new(400)?, &ShootConfig::default())?;
    let w0 = &rep.solutions[0].solution.w;
    let lower = w0.map(|w| w.max(0.0)).with_bc((2.0, 0.0));
    let mut prev: Option<Vec<f64>> = None;
    for k in [1e1, 1e2, 1e3, 1e4] {
        let sol = solve_oneeq_monotone(k, w0, &kin, (2.0, 0.0), 1e-9)?;
        let drop = prev
            .as_ref()
            .map(|p| p.iter().zip(sol.u.values()).fold(f64::INFINITY, |m, (a, b)| m.min(a - b)));
        println!(
            "k = {k:>6.0e}: {:>4} sweeps + {} Newton, |u - w0+| = {:.4e}, min drop from previous k = {}",
            sol.monotone_iters,
            sol.newton_iters,
            l2_distance(&sol.u, &lower),
            drop.map_or("-".to_string(), |d| format!("{d:.2e}"))
        );
        prev = Some(sol.u.values().to_vec());
    }
    Ok(())
}
