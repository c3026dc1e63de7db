//! Stationary problems: the limit problem `Δw + h(w) = 0` (semismooth Newton
//! and a shooting enumerator), the auxiliary scalar equation solved by
//! monotone iteration, and the coupled stationary system at finite `k`.

mod coupled;
mod newton;
mod oneeq;
mod shooting;

pub use coupled::{
    coupled_jacobian_apply, coupled_residual, local_uniqueness_probe, solve_pk_stationary,
    ProbeConfig, SeedOutcome, StationaryPair, UniquenessReport,
};
pub use newton::{s_jacobian_apply, s_residual, solve_s_newton, NewtonConfig};
pub use oneeq::{oneeq_residual, solve_oneeq_monotone, OneEqSolution};
pub use shooting::{
    conserved_quantity, integrate_orbit, shoot_enumerate, Orbit, ShootConfig, ShootingReport, ShotSolution,
};

use crate::geometry::Field;

/// A solution of `Δw + h(w) = 0` with `w = bc` on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarySolution {
    pub w: Field,
    pub residual_l2: f64,
    pub bc: (f64, f64),
    pub newton_iters: usize,
}
