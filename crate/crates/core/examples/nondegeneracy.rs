//! Certifies that the linearization `Δ + h'(w̃)` at the limit solution has no
//! eigenvalue near zero, and compares the eigen-solver with the closed form
//! for the bare Laplacian.

use std::f64::consts::PI;

use seglab::geometry::Grid;
use seglab::spectra::{certify, smallest_magnitude_eigenvalue, LinearizedOperator};
use seglab::stationary::{shoot_enumerate, ShootConfig};
use seglab::Kinetics;

fn main() -> seglab::Result<()> {
    let grid = Grid::new(400)?;
    let kin = Kinetics::logistic(1.0)?;
    let rep = shoot_enumerate(&kin, 2.0, -2.0, grid, &ShootConfig::default())?;
    for (i, s) in rep.solutions.iter().enumerate() {
        let c = certify(&s.solution, &kin, None)?;
        println!(
            "solution {i}: lambda = {:.6}, tol = {:.2e}, residual = {:.2e}, nondegenerate = {}, cond ~ {:.2e}",
            c.lambda, c.tol_lambda, c.eigen_residual, c.nondegenerate, c.condition_estimate
        );
    }

    let lap = LinearizedOperator::from_potential(grid, vec![0.0; grid.n_interior()])?;
    let pair = smallest_magnitude_eigenvalue(&lap)?;
    let h = grid.spacing();
    let exact = -4.0 * (PI * h / 2.0).sin().powi(2) / (h * h);
    println!("bare Laplacian: {:.10} vs closed form {:.10}", pair.lambda, exact);
    Ok(())
}
