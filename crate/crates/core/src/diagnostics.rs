//! Energy, residuals, the remainder `R`, segregation measures and projection
//! errors, plus the per-snapshot record written to trajectory CSVs.

use std::f64::consts::PI;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::{ProblemSpec, SystemState};
use crate::geometry::{interior_mask, l2_distance, l2_norm, laplacian_dirichlet, Field, Grid};
use crate::kinetics::Kinetics;
use crate::stationary::StationarySolution;

/// Column order of the trajectory CSV.
pub const SNAPSHOT_COLUMNS: [&str; 8] = [
    "t",
    "energy",
    "residual_S",
    "remainder_R_l2",
    "seg_integral",
    "seg_pointwise",
    "proj_error",
    "dist_to_limit",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSnapshot {
    pub t: f64,
    pub energy: f64,
    #[serde(rename = "residual_S")]
    pub residual_s: f64,
    #[serde(rename = "remainder_R_l2")]
    pub remainder_r_l2: f64,
    pub seg_integral: f64,
    pub seg_pointwise: f64,
    pub proj_error: f64,
    pub dist_to_limit: Option<f64>,
}

impl DiagnosticSnapshot {
    pub fn is_valid(&self) -> bool {
        let finite = [
            self.t,
            self.energy,
            self.residual_s,
            self.remainder_r_l2,
            self.seg_integral,
            self.seg_pointwise,
            self.proj_error,
        ]
        .iter()
        .all(|v| v.is_finite())
            && self.dist_to_limit.is_none_or(f64::is_finite);
        finite
            && self.residual_s >= 0.0
            && self.remainder_r_l2 >= 0.0
            && self.seg_integral >= 0.0
            && self.seg_pointwise >= 0.0
    }
}

/// `E(w) = ∫ ½|w'|² − H(w)`: cell differences (boundary cells use the
/// Dirichlet values) for the gradient, trapezoidal weights for `H`.
///
/// With these weights `∂E/∂w_i = −h (Δ_h w + h(w))_i`, so the discrete
/// energy is exactly the potential of the discrete residual.
pub fn energy(w: &Field, kin: &Kinetics) -> f64 {
    let dx = w.grid().spacing();
    let v = w.values();
    let n = v.len();
    let mut grad = 0.0;
    let mut prev = w.left_bc();
    for &x in v.iter().chain(std::iter::once(&w.right_bc())) {
        let d = x - prev;
        grad += d * d;
        prev = x;
    }
    grad *= 0.5 / dx;
    let mut pot: f64 = v.iter().map(|&x| kin.primitive(x)).sum();
    pot += 0.5 * (kin.primitive(w.left_bc()) + kin.primitive(w.right_bc()));
    debug_assert_eq!(n, w.grid().n_interior());
    grad - dx * pot
}

/// `Δ_h w + h(w)` at the interior nodes.
pub fn residual_field(w: &Field, kin: &Kinetics) -> Field {
    let lap = laplacian_dirichlet(w);
    let vals = lap
        .values()
        .iter()
        .zip(w.values())
        .map(|(l, &x)| l + kin.h(x))
        .collect();
    Field::from_parts(w.grid(), vals, 0.0, 0.0)
}

/// `‖Δw + h(w)‖_{L²}`.
pub fn residual_s(w: &Field, kin: &Kinetics) -> f64 {
    l2_norm(&residual_field(w, kin))
}

/// `R(u, v) = αf(u) − g(v) − αf(w⁺/α) + g(−w⁻)` with `w = αu − v`.
pub fn remainder_r(u: &Field, v: &Field, kin: &Kinetics) -> Field {
    let a = kin.alpha();
    u.zip_map(v, |x, y| a * kin.f(x) - kin.g(y) - kin.h(a * x - y))
}

/// `‖w⁺ − αu‖ + ‖w⁻ + v‖` with `w = αu − v`, `w⁺ = max(w,0)`, `w⁻ = min(w,0)`.
pub fn projection_error(u: &Field, v: &Field, alpha: f64) -> f64 {
    let w = u.zip_map(v, |x, y| alpha * x - y);
    let plus = w.zip_map(u, |wi, ui| wi.max(0.0) - alpha * ui);
    let minus = w.zip_map(v, |wi, vi| wi.min(0.0) + vi);
    l2_norm(&plus) + l2_norm(&minus)
}

/// `sin(πx)`, the positive first Dirichlet eigenfunction of (0,1).
pub fn first_mode(grid: Grid) -> Field {
    let mut phi = Field::from_fn(grid, |x| (PI * x).sin());
    phi = phi.with_bc((0.0, 0.0));
    phi
}

/// `k ∫ u v φ` by the trapezoidal rule.
pub fn segregation_integral(u: &Field, v: &Field, k: f64, phi: &Field) -> f64 {
    let h = u.grid().spacing();
    let interior: f64 = u
        .values()
        .iter()
        .zip(v.values())
        .zip(phi.values())
        .map(|((a, b), p)| a * b * p)
        .sum();
    let ends = 0.5
        * (u.left_bc() * v.left_bc() * phi.left_bc() + u.right_bc() * v.right_bc() * phi.right_bc());
    k * h * (interior + ends)
}

/// `max_{mask} min(u, v)`, zero on an empty mask.
pub fn segregation_pointwise(u: &Field, v: &Field, mask: &[bool]) -> f64 {
    u.values()
        .iter()
        .zip(v.values())
        .zip(mask)
        .filter(|(_, &m)| m)
        .fold(0.0, |acc, ((a, b), _)| acc.max(a.min(*b)))
}

/// Nearest listed solution to `w` in L², as `(index, distance)`.
pub fn dist_to_solution_set(w: &Field, solutions: &[StationarySolution]) -> Result<(usize, f64)> {
    solutions
        .iter()
        .enumerate()
        .map(|(i, s)| (i, l2_distance(w, &s.w)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::InvalidInput("empty solution list".into()))
}

/// All diagnostics of one state.
pub fn snapshot(
    state: &SystemState,
    spec: &ProblemSpec,
    reference: &[StationarySolution],
) -> DiagnosticSnapshot {
    let kin = spec.kinetics();
    let w = state.w(kin.alpha());
    // k = 0 sends the distance threshold to infinity: the region is empty
    let mask = if spec.k() > 0.0 {
        interior_mask(&spec.grid(), spec.beta(), spec.xi(), spec.k()).expect("problem spec validated beta/xi/k")
    } else {
        vec![false; spec.grid().n_interior()]
    };
    let phi = first_mode(spec.grid());
    DiagnosticSnapshot {
        t: state.t,
        energy: energy(&w, kin),
        residual_s: residual_s(&w, kin),
        remainder_r_l2: l2_norm(&remainder_r(&state.u, &state.v, kin)),
        seg_integral: segregation_integral(&state.u, &state.v, spec.k(), &phi),
        seg_pointwise: segregation_pointwise(&state.u, &state.v, &mask),
        proj_error: projection_error(&state.u, &state.v, kin.alpha()),
        dist_to_limit: dist_to_solution_set(&w, reference).ok().map(|(_, d)| d),
    }
}

/// Outcome of checking `ΔE/Δt ≤ −r(r − ρ) + C·Δt` over consecutive snapshots,
/// with `r` the residual at the later snapshot and `ρ = ‖R‖` at the earlier.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayAudit {
    pub pairs: usize,
    /// Pairs with `r > 2ρ` (where strict decrease is expected).
    pub dissipative_pairs: usize,
    /// Dissipative pairs on which `E` failed to strictly decrease.
    pub increase_violations: usize,
    /// Smallest `C` that makes every pair satisfy the inequality.
    pub scheme_constant: f64,
    pub min_energy: f64,
}

pub fn energy_decay_audit(trajectory: &[DiagnosticSnapshot]) -> DecayAudit {
    let mut audit = DecayAudit {
        pairs: 0,
        dissipative_pairs: 0,
        increase_violations: 0,
        scheme_constant: f64::NEG_INFINITY,
        min_energy: trajectory.iter().map(|s| s.energy).fold(f64::INFINITY, f64::min),
    };
    for pair in trajectory.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let dt = b.t - a.t;
        if !(dt > 0.0) {
            continue;
        }
        audit.pairs += 1;
        let r = b.residual_s;
        let rho = a.remainder_r_l2;
        let slope = (b.energy - a.energy) / dt;
        audit.scheme_constant = audit.scheme_constant.max((slope + r * (r - rho)) / dt);
        if r > 2.0 * rho {
            audit.dissipative_pairs += 1;
            if b.energy >= a.energy {
                audit.increase_violations += 1;
            }
        }
    }
    audit
}

pub fn write_snapshots_csv<W: Write>(out: W, rows: &[DiagnosticSnapshot]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    if rows.is_empty() {
        wtr.write_record(SNAPSHOT_COLUMNS)?;
    }
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a trajectory CSV, rejecting files whose header deviates from
/// [`SNAPSHOT_COLUMNS`] or whose rows are not valid snapshots.
pub fn read_snapshots_csv<R: Read>(input: R) -> Result<Vec<DiagnosticSnapshot>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != SNAPSHOT_COLUMNS {
        return Err(Error::InvalidInput(format!("unexpected snapshot header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.deserialize() {
        let row: DiagnosticSnapshot = rec?;
        if !row.is_valid() {
            return Err(Error::InvalidInput(format!("invalid snapshot row at t = {}", row.t)));
        }
        rows.push(row);
    }
    Ok(rows)
}
