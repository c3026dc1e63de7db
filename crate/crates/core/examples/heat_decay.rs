//! With inert kinetics and zero data the system is two heat equations; the
//! first Fourier mode should decay like `exp(−π² t)`.

use std::f64::consts::PI;

use seglab::evolve::{evolve_to, EvolveConfig, ProblemSpec, SystemState};
use seglab::geometry::{l2_norm, Field, Grid};
use seglab::Kinetics;

fn main() -> seglab::Result<()> {
    let grid = Grid::new(200)?;
    // boundary data must not make αm1 − m2 vanish at both ends
    let m1 = Field::constant(grid, 0.0).with_bc((1.0, 0.0));
    let m2 = Field::zeros(grid);
    let spec = ProblemSpec::new(Kinetics::inert(1.0)?, 0.0, m1.clone(), m2, 1.0, 0.25)?;

    // perturb the stationary linear profile by sin(πx)
    let base = Field::from_fn(grid, |x| 1.0 - x);
    let u0 = Field::from_fn(grid, |x| 1.0 - x + (PI * x).sin());
    let state = SystemState { u: u0, v: Field::zeros(grid), t: 0.0 };
    let cfg = EvolveConfig { dt: 1e-4, t_end: 0.1, ..Default::default() };
    let ev = evolve_to(&state, &spec, &cfg)?;

    let amp = l2_norm(&ev.state.u.zip_map(&base, |a, b| a - b)) / l2_norm(&Field::from_fn(grid, |x| (PI * x).sin()));
    println!("t = {:.3}: amplitude {amp:.6}, exp(-pi^2 t) = {:.6}", ev.state.t, (-PI * PI * ev.state.t).exp());
    Ok(())
}
