//! Time integration of the competition-diffusion system
//!
//! ```text
//! u_t = Δu + f(u) − k u v,    v_t = Δv + g(v) − α k u v,
//! ```
//!
//! with time-independent Dirichlet data `u = m1`, `v = m2` and the initial
//! state `(m1, m2)`. Diffusion is backward Euler, the reactions `f`, `g` are
//! explicit. The coupling is treated implicitly in the product `u·v` (see
//! [`CouplingScheme`]), which keeps the `k`-dependent terms out of the update
//! of `w = αu − v` exactly as in the continuous problem.

use crate::diagnostics::{snapshot, DiagnosticSnapshot};
use crate::error::{Error, Result};
use crate::geometry::{l2_distance, Field, Grid};
use crate::kinetics::Kinetics;
use crate::linalg::{solve_block_tridiagonal, solve_tridiagonal_const_off, Block};
use crate::stationary::StationarySolution;

/// Parameters of one instance of the system at a fixed `k`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    grid: Grid,
    kin: Kinetics,
    k: f64,
    m1: Field,
    m2: Field,
    beta: f64,
    xi: f64,
}

impl ProblemSpec {
    pub fn new(kin: Kinetics, k: f64, m1: Field, m2: Field, beta: f64, xi: f64) -> Result<Self> {
        let grid = m1.grid();
        if m2.grid() != grid {
            return Err(Error::InvalidInput("m1 and m2 live on different grids".into()));
        }
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::InvalidInput(format!("k must be non-negative, got {k}")));
        }
        if m1.inf() < 0.0 || m2.inf() < 0.0 {
            return Err(Error::InvalidInput("boundary/initial data must be non-negative".into()));
        }
        let a = kin.alpha();
        let jump = (a * m1.left_bc() - m2.left_bc()).abs() + (a * m1.right_bc() - m2.right_bc()).abs();
        if jump == 0.0 {
            return Err(Error::InvalidInput(
                "alpha*m1 - m2 vanishes identically on the boundary".into(),
            ));
        }
        if !(xi > 0.0 && xi < 0.5) || !(beta > 0.0) {
            return Err(Error::InvalidInput(format!(
                "need beta > 0 and xi in (0, 1/2), got beta = {beta}, xi = {xi}"
            )));
        }
        Ok(ProblemSpec { grid, kin, k, m1, m2, beta, xi })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }
    pub fn kinetics(&self) -> &Kinetics {
        &self.kin
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn m1(&self) -> &Field {
        &self.m1
    }
    pub fn m2(&self) -> &Field {
        &self.m2
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Same data at a different `k`.
    pub fn with_k(&self, k: f64) -> Result<Self> {
        Self::new(self.kin.clone(), k, self.m1.clone(), self.m2.clone(), self.beta, self.xi)
    }

    /// `M = max{1, sup m1, sup m2}`.
    pub fn bound(&self) -> f64 {
        1.0f64.max(self.m1.sup()).max(self.m2.sup())
    }

    /// Dirichlet data of `w = αu − v`.
    pub fn w_bc(&self) -> (f64, f64) {
        let a = self.kin.alpha();
        (
            a * self.m1.left_bc() - self.m2.left_bc(),
            a * self.m1.right_bc() - self.m2.right_bc(),
        )
    }

    /// Largest step keeping the explicit logistic update inside `[0, M]`.
    pub fn dt_max(&self) -> f64 {
        0.5 / 1.0f64.max(self.bound() - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub u: Field,
    pub v: Field,
    pub t: f64,
}

impl SystemState {
    pub fn w(&self, alpha: f64) -> Field {
        self.u.zip_map(&self.v, |a, b| alpha * a - b)
    }
}

/// How the `k u v` coupling enters a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingScheme {
    /// Backward Euler in the product `u·v`, solved by block-tridiagonal Newton
    /// from the linearly-implicit predictor. The same product appears in both
    /// equations, so the update of `w = αu − v` is `k`-free.
    #[default]
    Implicit,
    /// `k v_old` on the `u` diagonal and `α k u_old` on the `v` diagonal; two
    /// scalar tridiagonal solves. Positive and cheap, but the coupling no
    /// longer cancels in `w`.
    LinearlyImplicit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: usize,
    pub steady_tol: f64,
    /// Steady detection does not stop the run before this time.
    pub min_time: f64,
    pub scheme: CouplingScheme,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            dt: 1e-3,
            t_end: 50.0,
            snapshot_every: 1,
            steady_tol: 1e-6,
            min_time: 0.0,
            scheme: CouplingScheme::Implicit,
        }
    }
}

/// Per-step bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepAudit {
    /// `‖α·(k u v)_u − (α k u v)_v‖_∞` over the coupling terms actually
    /// assembled into the two equations.
    pub coupling_cancellation: f64,
    /// `‖w_new − S_dt(w_old)‖_∞` where `S_dt` is the `k`-free scalar step
    /// `(I − dtΔ) w = w_old + dt(αf(u_old) − g(v_old))`.
    pub w_consistency: f64,
    pub newton_iters: usize,
}

/// `(u, v) = (m1, m2)` at `t = 0`.
pub fn initial_state(spec: &ProblemSpec) -> SystemState {
    SystemState {
        u: spec.m1.clone(),
        v: spec.m2.clone(),
        t: 0.0,
    }
}

/// One step with the default [`CouplingScheme::Implicit`].
pub fn step_system(state: &SystemState, spec: &ProblemSpec, dt: f64) -> Result<SystemState> {
    step_system_with(state, spec, dt, CouplingScheme::Implicit).map(|(s, _)| s)
}

fn explicit_rhs(old: &Field, react: impl Fn(f64) -> f64, dt: f64, c: f64) -> Vec<f64> {
    let n = old.values().len();
    let mut rhs: Vec<f64> = old.values().iter().map(|&x| x + dt * react(x)).collect();
    rhs[0] += c * old.left_bc();
    rhs[n - 1] += c * old.right_bc();
    rhs
}

pub fn step_system_with(
    state: &SystemState,
    spec: &ProblemSpec,
    dt: f64,
    scheme: CouplingScheme,
) -> Result<(SystemState, StepAudit)> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let grid = spec.grid;
    let n = grid.n_interior();
    let hx = grid.spacing();
    let c = dt / (hx * hx);
    let k = spec.k;
    let kin = &spec.kin;
    let a = kin.alpha();
    let fail = |reason: String| Error::StepFailed { t: state.t, reason };

    let (u0, v0) = (state.u.values(), state.v.values());
    let ru = explicit_rhs(&state.u, |x| kin.f(x), dt, c);
    let rv = explicit_rhs(&state.v, |x| kin.g(x), dt, c);

    // Linearly-implicit predictor.
    let mut u: Vec<f64> = ru.clone();
    let mut v: Vec<f64> = rv.clone();
    let du: Vec<f64> = v0.iter().map(|&y| 1.0 + 2.0 * c + dt * k * y).collect();
    let dv: Vec<f64> = u0.iter().map(|&x| 1.0 + 2.0 * c + dt * a * k * x).collect();
    solve_tridiagonal_const_off(-c, &du, &mut u).map_err(|e| fail(e.to_string()))?;
    solve_tridiagonal_const_off(-c, &dv, &mut v).map_err(|e| fail(e.to_string()))?;

    let mut iters = 0;
    let (cu, cv): (Vec<f64>, Vec<f64>) = match scheme {
        CouplingScheme::LinearlyImplicit => (
            (0..n).map(|i| dt * k * v0[i] * u[i]).collect(),
            (0..n).map(|i| dt * a * k * u0[i] * v[i]).collect(),
        ),
        CouplingScheme::Implicit => {
            iters = implicit_coupling_newton(&mut u, &mut v, &ru, &rv, c, dt * k, a)
                .map_err(|e| fail(e.to_string()))?;
            (
                (0..n).map(|i| dt * k * u[i] * v[i]).collect(),
                (0..n).map(|i| dt * a * k * u[i] * v[i]).collect(),
            )
        }
    };
    if u.iter().chain(&v).any(|x| !x.is_finite()) {
        return Err(fail("non-finite values; dt too large".into()));
    }
    let coupling_cancellation = cu
        .iter()
        .zip(&cv)
        .fold(0.0f64, |m, (p, q)| m.max((a * p - q).abs()));

    let new_u = Field::from_parts(grid, u, state.u.left_bc(), state.u.right_bc());
    let new_v = Field::from_parts(grid, v, state.v.left_bc(), state.v.right_bc());

    let w_ref = scalar_w_step(&state.u, &state.v, kin, dt)?;
    let w_new = new_u.zip_map(&new_v, |x, y| a * x - y);
    let w_consistency = w_new
        .values()
        .iter()
        .zip(w_ref.values())
        .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));

    Ok((
        SystemState { u: new_u, v: new_v, t: state.t + dt },
        StepAudit { coupling_cancellation, w_consistency, newton_iters: iters },
    ))
}

/// Solves, in place from the predictor,
/// `(1+2c)u_i − c(u_{i−1}+u_{i+1}) + κ u_i v_i = ru_i` and the `v` analogue
/// with `ακ`, where `κ = dt·k`.
fn implicit_coupling_newton(
    u: &mut [f64],
    v: &mut [f64],
    ru: &[f64],
    rv: &[f64],
    c: f64,
    kappa: f64,
    alpha: f64,
) -> Result<usize> {
    let n = u.len();
    let residual = |u: &[f64], v: &[f64]| -> (Vec<[f64; 2]>, f64) {
        let mut res = Vec::with_capacity(n);
        let mut max: f64 = 0.0;
        for i in 0..n {
            let ul = if i > 0 { u[i - 1] } else { 0.0 };
            let ur = if i + 1 < n { u[i + 1] } else { 0.0 };
            let vl = if i > 0 { v[i - 1] } else { 0.0 };
            let vr = if i + 1 < n { v[i + 1] } else { 0.0 };
            let p = kappa * u[i] * v[i];
            let fu = (1.0 + 2.0 * c) * u[i] - c * (ul + ur) + p - ru[i];
            let fv = (1.0 + 2.0 * c) * v[i] - c * (vl + vr) + alpha * p - rv[i];
            max = max.max(fu.abs()).max(fv.abs());
            res.push([fu, fv]);
        }
        (res, max)
    };
    let scale = 1.0 + ru.iter().chain(rv).fold(0.0f64, |m, x| m.max(x.abs()));
    let off: Vec<Block> = vec![[[-c, 0.0], [0.0, -c]]; n - 1];
    let (mut res, mut norm) = residual(u, v);
    for iter in 0..60 {
        if norm <= 1e-14 * scale * (1.0 + 2.0 * c) {
            return Ok(iter);
        }
        let diag: Vec<Block> = (0..n)
            .map(|i| {
                [
                    [1.0 + 2.0 * c + kappa * v[i], kappa * u[i]],
                    [alpha * kappa * v[i], 1.0 + 2.0 * c + alpha * kappa * u[i]],
                ]
            })
            .collect();
        let mut delta: Vec<[f64; 2]> = res.iter().map(|r| [-r[0], -r[1]]).collect();
        solve_block_tridiagonal(&off, &diag, &off, &mut delta)?;
        let step_size = delta.iter().fold(0.0f64, |m, d| m.max(d[0].abs()).max(d[1].abs()));
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cu: Vec<f64> = (0..n).map(|i| u[i] + t * delta[i][0]).collect();
            let cvv: Vec<f64> = (0..n).map(|i| v[i] + t * delta[i][1]).collect();
            let (r2, n2) = residual(&cu, &cvv);
            if n2 < norm || n2 <= 1e-14 * scale * (1.0 + 2.0 * c) {
                u.copy_from_slice(&cu);
                v.copy_from_slice(&cvv);
                res = r2;
                norm = n2;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        let top = u.iter().chain(v.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
        if !accepted || step_size <= 4.0 * f64::EPSILON * (1.0 + top) {
            // Stagnation at round-off level counts as converged.
            if norm <= 1e-10 * scale * (1.0 + 2.0 * c) {
                return Ok(iter + 1);
            }
            return Err(Error::NonConvergence { iterations: iter + 1, residual: norm, last: None });
        }
    }
    Err(Error::NonConvergence { iterations: 60, residual: norm, last: None })
}

/// `(I − dtΔ) w = w_old + dt(αf(u) − g(v))` with data `α m1 − m2`: the
/// `k`-free update the system step must reproduce for `w`.
pub(crate) fn scalar_w_step(u: &Field, v: &Field, kin: &Kinetics, dt: f64) -> Result<Field> {
    let a = kin.alpha();
    let w_old = u.zip_map(v, |x, y| a * x - y);
    let react: Vec<f64> = u
        .values()
        .iter()
        .zip(v.values())
        .map(|(&x, &y)| a * kin.f(x) - kin.g(y))
        .collect();
    implicit_heat_step(&w_old, &react, w_old.bc(), dt)
}

fn implicit_heat_step(old: &Field, react: &[f64], bc: (f64, f64), dt: f64) -> Result<Field> {
    let grid = old.grid();
    let n = grid.n_interior();
    let hx = grid.spacing();
    let c = dt / (hx * hx);
    let mut rhs: Vec<f64> = old
        .values()
        .iter()
        .zip(react)
        .map(|(&x, &r)| x + dt * r)
        .collect();
    rhs[0] += c * bc.0;
    rhs[n - 1] += c * bc.1;
    let diag = vec![1.0 + 2.0 * c; n];
    solve_tridiagonal_const_off(-c, &diag, &mut rhs)?;
    if rhs.iter().any(|x| !x.is_finite()) {
        return Err(Error::StepFailed { t: f64::NAN, reason: "non-finite values in scalar step".into() });
    }
    Ok(Field::from_parts(grid, rhs, bc.0, bc.1))
}

/// One step of `w_t = Δw + h(w)`, `w = bc` on the boundary.
pub fn step_scalar_w(w: &Field, kin: &Kinetics, bc: (f64, f64), dt: f64) -> Result<Field> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let react: Vec<f64> = w.values().iter().map(|&x| kin.h(x)).collect();
    implicit_heat_step(w, &react, bc, dt)
}

/// `(‖u_next − u_prev‖ + ‖v_next − v_prev‖)/dt < tol`.
pub fn detect_steady(prev: &SystemState, next: &SystemState, dt: f64, tol: f64) -> bool {
    steady_rate(prev, next, dt) < tol
}

pub fn steady_rate(prev: &SystemState, next: &SystemState, dt: f64) -> f64 {
    (l2_distance(&next.u, &prev.u) + l2_distance(&next.v, &prev.v)) / dt
}

/// Extremes and step audits accumulated over a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunAudit {
    pub steps: usize,
    pub min_u: f64,
    pub min_v: f64,
    pub max_u: f64,
    pub max_v: f64,
    pub max_coupling_cancellation: f64,
    pub max_w_consistency: f64,
    pub boundary_pinned: bool,
    pub max_newton_iters: usize,
}

impl RunAudit {
    fn new(state: &SystemState) -> Self {
        RunAudit {
            steps: 0,
            min_u: state.u.min(),
            min_v: state.v.min(),
            max_u: state.u.max(),
            max_v: state.v.max(),
            max_coupling_cancellation: 0.0,
            max_w_consistency: 0.0,
            boundary_pinned: true,
            max_newton_iters: 0,
        }
    }

    fn record(&mut self, state: &SystemState, spec: &ProblemSpec, step: &StepAudit) {
        self.steps += 1;
        self.min_u = self.min_u.min(state.u.min());
        self.min_v = self.min_v.min(state.v.min());
        self.max_u = self.max_u.max(state.u.max());
        self.max_v = self.max_v.max(state.v.max());
        self.max_coupling_cancellation = self.max_coupling_cancellation.max(step.coupling_cancellation);
        self.max_w_consistency = self.max_w_consistency.max(step.w_consistency);
        self.max_newton_iters = self.max_newton_iters.max(step.newton_iters);
        self.boundary_pinned &= state.u.bc() == spec.m1.bc() && state.v.bc() == spec.m2.bc();
    }
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: SystemState,
    pub trajectory: Vec<DiagnosticSnapshot>,
    /// First time the steady criterion fired, if it did.
    pub steady_at: Option<f64>,
    pub audit: RunAudit,
}

/// Steps to `t_end`, or until steady once `t ≥ min_time`, recording a
/// diagnostic snapshot every `snapshot_every` steps.
pub fn evolve_to(state: &SystemState, spec: &ProblemSpec, cfg: &EvolveConfig) -> Result<Evolution> {
    evolve_with_reference(state, spec, cfg, &[])
}

/// [`evolve_to`] with `dist_to_limit` measured against `reference`.
pub fn evolve_with_reference(
    state: &SystemState,
    spec: &ProblemSpec,
    cfg: &EvolveConfig,
    reference: &[StationarySolution],
) -> Result<Evolution> {
    if !(cfg.dt > 0.0) || cfg.snapshot_every == 0 || !(cfg.steady_tol > 0.0) || !(cfg.t_end >= 0.0) {
        return Err(Error::InvalidInput(format!("invalid evolve config {cfg:?}")));
    }
    if cfg.dt > spec.dt_max() {
        return Err(Error::InvalidInput(format!(
            "dt = {} exceeds dt_max = {}",
            cfg.dt,
            spec.dt_max()
        )));
    }
    let mut audit = RunAudit::new(state);
    let mut trajectory = Vec::new();
    let mut steady_at = None;
    let mut current = state.clone();
    let t_start = state.t;
    let n_steps = ((cfg.t_end - t_start) / cfg.dt - 1e-9).ceil().max(0.0) as usize;
    for step in 1..=n_steps {
        let (mut next, step_audit) = step_system_with(&current, spec, cfg.dt, cfg.scheme)?;
        next.t = t_start + step as f64 * cfg.dt;
        audit.record(&next, spec, &step_audit);
        let steady = detect_steady(&current, &next, cfg.dt, cfg.steady_tol);
        if steady && steady_at.is_none() {
            steady_at = Some(next.t);
        }
        if step % cfg.snapshot_every == 0 {
            trajectory.push(snapshot(&next, spec, reference));
        }
        current = next;
        if steady && current.t >= cfg.min_time {
            break;
        }
    }
    Ok(Evolution {
        state: current,
        trajectory,
        steady_at,
        audit,
    })
}
