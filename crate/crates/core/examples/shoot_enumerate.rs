//! Enumerates solutions of `w'' + h(w) = 0`, `w(0) = a`, `w(1) = b`.
//!
//! ```text
//! cargo run --example shoot_enumerate -- 2 -2
//! ```

use seglab::geometry::Grid;
use seglab::stationary::{shoot_enumerate, ShootConfig};
use seglab::Kinetics;

fn main() -> seglab::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let (a, b) = match args[..] {
        [a, b] => (a, b),
        _ => (2.0, -2.0),
    };
    let kin = Kinetics::logistic(1.0)?;
    let rep = shoot_enumerate(&kin, a, b, Grid::new(400)?, &ShootConfig::default())?;
    println!(
        "w(0) = {a}, w(1) = {b}: {} solution(s), {} bracket(s), {} escaped slopes",
        rep.solutions.len(),
        rep.brackets,
        rep.escaped
    );
    for s in &rep.solutions {
        println!(
            "  w'(0) = {:+.10}  residual {:.2e}  first-integral drift {:.2e}  range [{:.4}, {:.4}]",
            s.slope,
            s.solution.residual_l2,
            s.energy_drift,
            s.solution.w.inf(),
            s.solution.w.sup()
        );
    }
    Ok(())
}
