//! Perturbs the boundary values at random and checks that every solution of
//! the limit problem stays non-degenerate.

use seglab::geometry::Grid;
use seglab::spectra::{genericity_sweep, GenericityConfig};
use seglab::stationary::ShootConfig;
use seglab::Kinetics;

fn main() -> seglab::Result<()> {
    let cfg = GenericityConfig {
        n_perturb: 12,
        magnitude: 0.1,
        seed: 7,
        tol_lambda: None,
        shoot: ShootConfig::default(),
    };
    let rep = genericity_sweep((2.0, -2.0), &Kinetics::logistic(1.0)?, Grid::new(200)?, &cfg)?;
    for r in &rep.rows {
        println!("({:+.4}, {:+.4}): {} solution(s), min |lambda| = {:.4}", r.bc.0, r.bc.1, r.n_solutions, r.min_abs_lambda);
    }
    println!("fraction non-degenerate {}, min |lambda| {:.4}", rep.fraction_nondegenerate(), rep.min_abs_lambda());
    Ok(())
}
