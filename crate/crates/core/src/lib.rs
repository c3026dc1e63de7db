//! Competition-diffusion systems on `(0,1)` with Dirichlet data, the
//! segregation limit `w = αu − v` as the coupling rate `k` grows, and the
//! stationary limit problem `Δw + h(w) = 0`.

// Validation uses `!(x > 0.0)` on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod evolve;
pub mod geometry;
pub mod kinetics;
pub mod lab;
pub mod linalg;
pub mod spectra;
pub mod stationary;

pub use error::{Error, Result};
pub use evolve::{CouplingScheme, EvolveConfig, Evolution, ProblemSpec, SystemState};
pub use geometry::{Field, Grid};
pub use kinetics::Kinetics;
pub use stationary::StationarySolution;
