use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{
    energy_decay_audit, snapshot, write_snapshots_csv, DecayAudit, DiagnosticSnapshot,
};
use crate::error::{Error, Result};
use crate::evolve::{evolve_with_reference, initial_state, RunAudit, SystemState};
use crate::geometry::{interior_mask, l2_distance, Field, Grid};
use crate::kinetics::Kinetics;
use crate::spectra::{assemble_linearization, certify, genericity_sweep, Certificate, GenericityReport};
use crate::stationary::{
    local_uniqueness_probe, shoot_enumerate, solve_oneeq_monotone, OneEqSolution, ShootConfig, ShootingReport,
    ShotSolution, StationarySolution, UniquenessReport,
};

use super::{write_checks, write_csv, Check, LabRun, Relation, RunReport, Scenario};

/// `trajectory_k1e4.csv` for `k = 10⁴`.
pub fn trajectory_file_name(k: f64) -> String {
    format!("trajectory_k{k:e}.csv")
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Suprema over the snapshots with `t ≥ t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSups {
    pub seg_pointwise: f64,
    pub proj_error: f64,
    pub remainder_r_l2: f64,
}

impl TailSups {
    fn over(trajectory: &[DiagnosticSnapshot], t0: f64) -> Option<Self> {
        let tail: Vec<&DiagnosticSnapshot> = trajectory.iter().filter(|s| s.t >= t0 - 1e-12).collect();
        if tail.is_empty() {
            return None;
        }
        Some(TailSups {
            seg_pointwise: max_of(tail.iter().map(|s| s.seg_pointwise)),
            proj_error: max_of(tail.iter().map(|s| s.proj_error)),
            remainder_r_l2: max_of(tail.iter().map(|s| s.remainder_r_l2)),
        })
    }
}

/// One evolution of the k-sweep.
#[derive(Debug, Clone)]
pub struct KEvolution {
    pub k: f64,
    /// Snapshots, starting with the initial state.
    pub trajectory: Vec<DiagnosticSnapshot>,
    pub state: SystemState,
    pub steady_at: Option<f64>,
    pub audit: RunAudit,
    pub decay: DecayAudit,
    pub tail: Option<TailSups>,
    /// `M = max{1, sup m1, sup m2}`.
    pub bound: f64,
    pub alpha: f64,
}

impl KEvolution {
    pub fn terminal(&self) -> &DiagnosticSnapshot {
        self.trajectory.last().expect("trajectory holds the initial snapshot")
    }
}

/// Row of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub k: f64,
    pub steady: bool,
    pub steady_at: Option<f64>,
    pub t_final: f64,
    pub energy: f64,
    #[serde(rename = "residual_S")]
    pub residual_s: f64,
    #[serde(rename = "remainder_R_l2")]
    pub remainder_r_l2: f64,
    pub seg_integral: f64,
    pub seg_pointwise: f64,
    pub proj_error: f64,
    pub nearest_solution: Option<usize>,
    pub dist_to_limit: Option<f64>,
    pub sup_seg_pointwise: Option<f64>,
    pub sup_proj_error: Option<f64>,
    #[serde(rename = "sup_remainder_R_l2")]
    pub sup_remainder_r_l2: Option<f64>,
    pub min_u: f64,
    pub min_v: f64,
    pub max_u: f64,
    pub max_v: f64,
    pub max_coupling_cancellation: f64,
    pub decay_constant: Option<f64>,
    pub decay_violations: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct EvolveRun {
    pub runs: Vec<std::result::Result<KEvolution, (f64, String)>>,
    /// Stationary solutions used for `dist_to_limit`.
    pub references: Vec<StationarySolution>,
    pub report: RunReport,
}

impl EvolveRun {
    pub fn completed(&self) -> impl Iterator<Item = &KEvolution> {
        self.runs.iter().filter_map(|r| r.as_ref().ok())
    }

    pub fn get(&self, k: f64) -> Option<&KEvolution> {
        self.completed().find(|r| r.k == k)
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        self.runs
            .iter()
            .map(|r| match r {
                Ok(e) => {
                    let last = e.terminal();
                    let nearest = crate::diagnostics::dist_to_solution_set(&e.state.w(e.alpha), &self.references).ok();
                    SummaryRow {
                        k: e.k,
                        steady: e.steady_at.is_some(),
                        steady_at: e.steady_at,
                        t_final: e.state.t,
                        energy: last.energy,
                        residual_s: last.residual_s,
                        remainder_r_l2: last.remainder_r_l2,
                        seg_integral: last.seg_integral,
                        seg_pointwise: last.seg_pointwise,
                        proj_error: last.proj_error,
                        nearest_solution: nearest.map(|n| n.0),
                        dist_to_limit: nearest.map(|n| n.1),
                        sup_seg_pointwise: e.tail.map(|t| t.seg_pointwise),
                        sup_proj_error: e.tail.map(|t| t.proj_error),
                        sup_remainder_r_l2: e.tail.map(|t| t.remainder_r_l2),
                        min_u: e.audit.min_u,
                        min_v: e.audit.min_v,
                        max_u: e.audit.max_u,
                        max_v: e.audit.max_v,
                        max_coupling_cancellation: e.audit.max_coupling_cancellation,
                        decay_constant: (e.decay.pairs > 0).then_some(e.decay.scheme_constant),
                        decay_violations: e.decay.increase_violations,
                        error: None,
                    }
                }
                Err((k, msg)) => SummaryRow {
                    k: *k,
                    steady: false,
                    steady_at: None,
                    t_final: 0.0,
                    energy: 0.0,
                    residual_s: 0.0,
                    remainder_r_l2: 0.0,
                    seg_integral: 0.0,
                    seg_pointwise: 0.0,
                    proj_error: 0.0,
                    nearest_solution: None,
                    dist_to_limit: None,
                    sup_seg_pointwise: None,
                    sup_proj_error: None,
                    sup_remainder_r_l2: None,
                    min_u: 0.0,
                    min_v: 0.0,
                    max_u: 0.0,
                    max_v: 0.0,
                    max_coupling_cancellation: 0.0,
                    decay_constant: None,
                    decay_violations: 0,
                    error: Some(msg.clone()),
                },
            })
            .collect()
    }
}

impl LabRun for EvolveRun {
    fn report(&self) -> &RunReport {
        &self.report
    }

    fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        ensure_dir(dir)?;
        let mut files = Vec::new();
        for run in self.completed() {
            let path = dir.join(trajectory_file_name(run.k));
            write_snapshots_csv(std::fs::File::create(&path)?, &run.trajectory)?;
            files.push(path);
        }
        let path = dir.join("summary.csv");
        write_csv(&path, &self.summary())?;
        files.push(path);
        files.push(write_checks(dir, &self.report)?);
        Ok(files)
    }
}

fn enumerate(sc: &Scenario, kin: &Kinetics, grid: Grid) -> Result<ShootingReport> {
    let (a, b) = sc.w_bc()?;
    shoot_enumerate(kin, a, b, grid, &sc.shoot_config()).map_err(|e| Error::Config(e.to_string()))
}

/// Evolves `(m1, m2)` for every `k` of the scenario and checks bounds,
/// cancellation, k-monotone diagnostics, energy decay and convergence.
pub fn run_evolve(sc: &Scenario) -> Result<EvolveRun> {
    let start = Instant::now();
    sc.validate()?;
    let grid = sc.grid()?;
    let kin = sc.kinetics()?;
    let references = enumerate(sc, &kin, grid).map(|r| r.stationary()).unwrap_or_default();
    let cfg = sc.evolve_config();
    let t0 = sc.checks.t0;

    let runs: Vec<std::result::Result<KEvolution, (f64, String)>> = sc
        .model
        .k
        .par_iter()
        .map(|&k| {
            let spec = sc.spec(k).map_err(|e| (k, e.to_string()))?;
            let init = initial_state(&spec);
            let ev = evolve_with_reference(&init, &spec, &cfg, &references).map_err(|e| (k, e.to_string()))?;
            let mut trajectory = Vec::with_capacity(ev.trajectory.len() + 1);
            trajectory.push(snapshot(&init, &spec, &references));
            trajectory.extend(ev.trajectory);
            let decay = energy_decay_audit(&trajectory);
            let tail = TailSups::over(&trajectory, t0);
            Ok(KEvolution {
                k,
                tail,
                decay,
                steady_at: ev.steady_at,
                audit: ev.audit,
                state: ev.state,
                bound: spec.bound(),
                alpha: kin.alpha(),
                trajectory,
            })
        })
        .collect();

    let mut report = RunReport::new(&sc.name, "evolve");
    report.checks = evolve_checks(sc, &runs);
    report.wall_clock = start.elapsed();
    Ok(EvolveRun {
        runs,
        references,
        report,
    })
}

fn strictly_decreasing(xs: &[f64]) -> f64 {
    max_of(xs.windows(2).map(|w| w[1] - w[0]))
}

fn evolve_checks(sc: &Scenario, runs: &[std::result::Result<KEvolution, (f64, String)>]) -> Vec<Check> {
    let c = &sc.checks;
    let mut out = vec![Check::holds("all-k-completed", runs.iter().all(|r| r.is_ok()))];
    let done: Vec<&KEvolution> = runs.iter().filter_map(|r| r.as_ref().ok()).collect();
    if done.is_empty() {
        return out;
    }
    let excess = max_of(done.iter().map(|e| {
        let a = e.audit;
        (-a.min_u).max(-a.min_v).max(a.max_u - e.bound).max(a.max_v - e.bound)
    }));
    out.push(Check::new("a-priori-bounds", excess, Relation::AtMost, c.bound_tol));
    out.push(Check::new(
        "k-cancellation",
        max_of(done.iter().map(|e| e.audit.max_coupling_cancellation)),
        Relation::AtMost,
        c.cancel_tol,
    ));

    let stepped = done.iter().all(|e| e.audit.steps > 0);
    if let Some(tails) = done.iter().map(|e| e.tail).collect::<Option<Vec<TailSups>>>() {
        let last = tails[tails.len() - 1];
        let first = tails[0];
        out.push(Check::new("seg-pointwise-at-max-k", last.seg_pointwise, Relation::AtMost, c.epsilon));
        if tails.len() > 1 {
            let seg: Vec<f64> = tails.iter().map(|t| t.seg_pointwise).collect();
            let proj: Vec<f64> = tails.iter().map(|t| t.proj_error).collect();
            let rem: Vec<f64> = tails.iter().map(|t| t.remainder_r_l2).collect();
            out.push(Check::new("seg-pointwise-nonincreasing", strictly_decreasing(&seg), Relation::AtMost, 0.0));
            out.push(Check::new("proj-error-decreasing", strictly_decreasing(&proj), Relation::Below, 0.0));
            out.push(Check::new("remainder-decreasing", strictly_decreasing(&rem), Relation::Below, 0.0));
            out.push(Check::new(
                "proj-error-ratio",
                last.proj_error / first.proj_error,
                Relation::AtMost,
                c.convergence_ratio,
            ));
            out.push(Check::new(
                "remainder-ratio",
                last.remainder_r_l2 / first.remainder_r_l2,
                Relation::AtMost,
                c.convergence_ratio,
            ));
        }
    }
    if stepped {
        if done.len() > 1 {
            let seg: Vec<f64> = done.iter().map(|e| e.terminal().seg_integral).collect();
            let lo = seg.iter().copied().fold(f64::INFINITY, f64::min);
            out.push(Check::new(
                "seg-integral-spread",
                max_of(seg.iter().copied()) / lo,
                Relation::Below,
                c.seg_integral_spread,
            ));
        }
        out.push(Check::new(
            "energy-decrease-violations",
            done.iter().map(|e| e.decay.increase_violations).sum::<usize>() as f64,
            Relation::AtMost,
            0.0,
        ));
        out.push(Check::new(
            "energy-decay-constant",
            max_of(done.iter().map(|e| e.decay.scheme_constant)),
            Relation::AtMost,
            c.decay_constant_dt * sc.evolve.dt,
        ));
        out.push(Check::holds("steady-every-k", done.iter().all(|e| e.steady_at.is_some())));
        let dists: Option<Vec<f64>> = done.iter().map(|e| e.terminal().dist_to_limit).collect();
        match dists {
            Some(d) => {
                out.push(Check::new("dist-to-limit-at-max-k", d[d.len() - 1], Relation::AtMost, c.dist_to_limit));
                if d.len() > 1 {
                    out.push(Check::new("dist-to-limit-nonincreasing", strictly_decreasing(&d), Relation::AtMost, 0.0));
                }
            }
            None => out.push(Check::holds("limit-solutions-available", false)),
        }
    }
    out
}

/// Row of `solutions.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionRow {
    pub index: usize,
    pub slope: f64,
    pub residual_l2: f64,
    pub newton_iters: usize,
    pub energy_drift: f64,
    pub lambda: Option<f64>,
    pub eigen_residual: Option<f64>,
    pub tol_lambda: Option<f64>,
    pub nondegenerate: Option<bool>,
    /// Number of positive eigenvalues of `Δ + h'(w)`.
    pub unstable_modes: Option<usize>,
    pub w_min: f64,
    pub w_max: f64,
    pub monotone: bool,
}

/// Strictly monotone from `w(0)` to `w(1)`, boundary values included.
fn is_strictly_monotone(w: &Field) -> bool {
    let mut all = vec![w.left_bc()];
    all.extend_from_slice(w.values());
    all.push(w.right_bc());
    let up = all.windows(2).all(|p| p[1] > p[0]);
    let down = all.windows(2).all(|p| p[1] < p[0]);
    up || down
}

fn solution_rows(sols: &[ShotSolution], certs: &[Result<(Certificate, usize)>]) -> Vec<SolutionRow> {
    sols.iter()
        .zip(certs)
        .enumerate()
        .map(|(index, (s, c))| {
            let c = c.as_ref().ok();
            SolutionRow {
                index,
                slope: s.slope,
                residual_l2: s.solution.residual_l2,
                newton_iters: s.solution.newton_iters,
                energy_drift: s.energy_drift,
                lambda: c.map(|c| c.0.lambda),
                eigen_residual: c.map(|c| c.0.eigen_residual),
                tol_lambda: c.map(|c| c.0.tol_lambda),
                nondegenerate: c.map(|c| c.0.nondegenerate),
                unstable_modes: c.map(|c| c.1),
                w_min: s.solution.w.inf(),
                w_max: s.solution.w.sup(),
                monotone: is_strictly_monotone(&s.solution.w),
            }
        })
        .collect()
}

fn certify_all(sols: &[ShotSolution], kin: &Kinetics, tol: Option<f64>) -> Vec<Result<(Certificate, usize)>> {
    sols.par_iter()
        .map(|s| {
            let cert = certify(&s.solution, kin, tol)?;
            let op = assemble_linearization(&s.solution, kin);
            let n = op.potential().len();
            Ok((cert, n - op.count_below(f64::MIN_POSITIVE)))
        })
        .collect()
}

fn solution_checks(c: &super::ChecksSection, rep: &ShootingReport, certs: &[Result<(Certificate, usize)>]) -> Vec<Check> {
    let mut out = vec![
        Check::new("solutions-found", rep.solutions.len() as f64, Relation::AtLeast, 1.0),
        Check::new("shoot-failures", rep.failures.len() as f64, Relation::AtMost, 0.0),
    ];
    if c.expect_unique {
        out.push(Check::new("unique-solution", rep.solutions.len() as f64, Relation::Equals, 1.0));
        out.push(Check::holds(
            "solution-monotone",
            rep.solutions.iter().all(|s| is_strictly_monotone(&s.solution.w)),
        ));
    }
    if !rep.solutions.is_empty() {
        out.push(Check::new(
            "shoot-energy-drift",
            max_of(rep.solutions.iter().map(|s| s.energy_drift)),
            Relation::AtMost,
            c.energy_drift,
        ));
        let ok: Vec<&Certificate> = certs.iter().filter_map(|r| r.as_ref().ok().map(|c| &c.0)).collect();
        out.push(Check::holds("certified", ok.len() == certs.len() && ok.iter().all(|c| c.nondegenerate)));
        out.push(Check::new(
            "min-abs-lambda",
            ok.iter().map(|c| c.lambda.abs()).fold(f64::INFINITY, f64::min),
            Relation::Above,
            c.lambda_min,
        ));
        out.push(Check::new(
            "eigen-residual",
            max_of(ok.iter().map(|c| c.eigen_residual)),
            Relation::AtMost,
            c.eigen_residual,
        ));
    }
    out
}

/// Per-k stationary results.
#[derive(Debug, Clone)]
pub struct KStationary {
    pub k: f64,
    pub oneeq: std::result::Result<OneEqSolution, String>,
    /// `‖u^k − w₀⁺/α‖_{L²}`.
    pub oneeq_gap: Option<f64>,
    pub probe: std::result::Result<UniquenessReport, String>,
    /// `max_{Λ^k} min(u, v)` of the first probe limit.
    pub overlap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct KStationaryRow {
    k: f64,
    oneeq_residual: Option<f64>,
    oneeq_gap: Option<f64>,
    oneeq_monotone_iters: Option<usize>,
    oneeq_bracket_violation: Option<f64>,
    distinct_limits: Option<usize>,
    probe_failures: Option<usize>,
    probe_max_residual: Option<f64>,
    overlap: Option<f64>,
    error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct StationaryRun {
    pub shooting: ShootingReport,
    pub certificates: Vec<std::result::Result<Certificate, String>>,
    pub solutions: Vec<SolutionRow>,
    pub per_k: Vec<KStationary>,
    pub report: RunReport,
}

impl LabRun for StationaryRun {
    fn report(&self) -> &RunReport {
        &self.report
    }

    fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        ensure_dir(dir)?;
        let sol = dir.join("solutions.csv");
        write_csv(&sol, &self.solutions)?;
        let rows: Vec<KStationaryRow> = self
            .per_k
            .iter()
            .map(|r| {
                let one = r.oneeq.as_ref().ok();
                let probe = r.probe.as_ref().ok();
                let error = match (&r.oneeq, &r.probe) {
                    (Err(a), Err(b)) => Some(format!("{a}; {b}")),
                    (Err(a), _) | (_, Err(a)) => Some(a.clone()),
                    _ => None,
                };
                KStationaryRow {
                    k: r.k,
                    oneeq_residual: one.map(|o| o.residual_l2),
                    oneeq_gap: r.oneeq_gap,
                    oneeq_monotone_iters: one.map(|o| o.monotone_iters),
                    oneeq_bracket_violation: one.map(|o| o.bracket_violation),
                    distinct_limits: probe.map(|p| p.distinct_count()),
                    probe_failures: probe.map(|p| p.failures()),
                    probe_max_residual: probe.map(|p| p.max_residual()),
                    overlap: r.overlap,
                    error,
                }
            })
            .collect();
        let st = dir.join("stationary.csv");
        write_csv(&st, &rows)?;
        Ok(vec![sol, st, write_checks(dir, &self.report)?])
    }
}

/// Enumerates and certifies the limit solutions, then for every `k` solves
/// the scalar monotone problem and probes local uniqueness of the stationary
/// system near the first solution.
pub fn run_stationary(sc: &Scenario) -> Result<StationaryRun> {
    let start = Instant::now();
    sc.validate()?;
    let grid = sc.grid()?;
    let kin = sc.kinetics()?;
    let shooting = enumerate(sc, &kin, grid)?;
    let certs = certify_all(&shooting.solutions, &kin, sc.stationary.tol_lambda);
    let solutions = solution_rows(&shooting.solutions, &certs);
    let mut checks = solution_checks(&sc.checks, &shooting, &certs);

    let m1_bc = sc.m1()?.bc();
    let probe_cfg = sc.probe_config();
    let per_k: Vec<KStationary> = match shooting.solutions.first() {
        None => Vec::new(),
        Some(first) => {
            let w0 = &first.solution;
            let lower = w0.w.map(|w| w.max(0.0) / kin.alpha());
            sc.model
                .k
                .par_iter()
                .map(|&k| {
                    let oneeq = solve_oneeq_monotone(k, &w0.w, &kin, m1_bc, sc.stationary.oneeq_tol)
                        .map_err(|e| e.to_string());
                    let oneeq_gap = oneeq.as_ref().ok().map(|o| l2_distance(&o.u, &lower.with_bc(m1_bc)));
                    let probe = sc
                        .spec(k)
                        .map(|spec| local_uniqueness_probe(&spec, w0, &probe_cfg))
                        .map_err(|e| e.to_string());
                    let overlap = probe.as_ref().ok().and_then(|p| p.limits.first()).and_then(|pair| {
                        let mask = interior_mask(&grid, sc.model.beta, sc.model.xi, k).ok()?;
                        Some(max_of(
                            pair.u
                                .values()
                                .iter()
                                .zip(pair.v.values())
                                .zip(&mask)
                                .filter(|(_, &m)| m)
                                .map(|((u, v), _)| u.min(*v)),
                        ))
                    });
                    KStationary {
                        k,
                        oneeq,
                        oneeq_gap,
                        probe,
                        overlap,
                    }
                })
                .collect()
        }
    };
    checks.extend(stationary_k_checks(sc, &per_k));

    let mut report = RunReport::new(&sc.name, "stationary");
    report.checks = checks;
    report.wall_clock = start.elapsed();
    Ok(StationaryRun {
        certificates: certs
            .into_iter()
            .map(|c| c.map(|c| c.0).map_err(|e| e.to_string()))
            .collect(),
        shooting,
        solutions,
        per_k,
        report,
    })
}

fn stationary_k_checks(sc: &Scenario, per_k: &[KStationary]) -> Vec<Check> {
    let c = &sc.checks;
    if per_k.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Check::holds("oneeq-converged", per_k.iter().all(|r| r.oneeq.is_ok()))];
    let sols: Vec<&OneEqSolution> = per_k.iter().filter_map(|r| r.oneeq.as_ref().ok()).collect();
    if sols.len() == per_k.len() && sols.len() > 1 {
        let rise = max_of(sols.windows(2).map(|p| {
            max_of(p[1].u.values().iter().zip(p[0].u.values()).map(|(hi_k, lo_k)| hi_k - lo_k))
        }));
        out.push(Check::new("oneeq-monotone-in-k", rise, Relation::AtMost, c.monotone_tol));
        let gaps: Vec<f64> = per_k.iter().filter_map(|r| r.oneeq_gap).collect();
        out.push(Check::new(
            "oneeq-gap-ratio",
            gaps[gaps.len() - 1] / gaps[0],
            Relation::AtMost,
            c.oneeq_ratio,
        ));
    }
    let probes: Vec<&UniquenessReport> = per_k.iter().filter_map(|r| r.probe.as_ref().ok()).collect();
    out.push(Check::holds(
        "probe-single-limit",
        probes.len() == per_k.len() && probes.iter().all(|p| p.distinct_count() == 1 && p.failures() == 0),
    ));
    if !probes.is_empty() {
        out.push(Check::new(
            "probe-residual",
            max_of(probes.iter().map(|p| p.max_residual())),
            Relation::AtMost,
            c.probe_residual,
        ));
    }
    out
}

#[derive(Debug, Clone)]
pub struct GenericityRun {
    pub base: (f64, f64),
    pub sweep: GenericityReport,
    pub report: RunReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct GenericityRow {
    index: usize,
    a: f64,
    b: f64,
    n_solutions: usize,
    all_nondegenerate: bool,
    min_abs_lambda: Option<f64>,
    error: Option<String>,
}

impl LabRun for GenericityRun {
    fn report(&self) -> &RunReport {
        &self.report
    }

    fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        ensure_dir(dir)?;
        let rows: Vec<GenericityRow> = self
            .sweep
            .rows
            .iter()
            .map(|r| GenericityRow {
                index: r.index,
                a: r.bc.0,
                b: r.bc.1,
                n_solutions: r.n_solutions,
                all_nondegenerate: r.all_nondegenerate,
                min_abs_lambda: r.min_abs_lambda.is_finite().then_some(r.min_abs_lambda),
                error: r.error.clone(),
            })
            .collect();
        let path = dir.join("genericity.csv");
        write_csv(&path, &rows)?;
        Ok(vec![path, write_checks(dir, &self.report)?])
    }
}

/// Certifies every solution for random boundary perturbations around the
/// scenario's boundary values of `w`.
pub fn run_genericity(sc: &Scenario) -> Result<GenericityRun> {
    let start = Instant::now();
    sc.validate()?;
    let base = match sc.genericity.base {
        Some([a, b]) => (a, b),
        None => sc.w_bc()?,
    };
    let sweep = genericity_sweep(base, &sc.kinetics()?, sc.grid()?, &sc.genericity_config())?;
    let mut report = RunReport::new(&sc.name, "genericity");
    report.checks = vec![
        Check::new(
            "fraction-nondegenerate",
            sweep.fraction_nondegenerate(),
            Relation::AtLeast,
            sc.checks.genericity_fraction,
        ),
        Check::new(
            "min-abs-lambda",
            sweep.min_abs_lambda(),
            Relation::Above,
            sc.checks.genericity_min_lambda,
        ),
    ];
    report.wall_clock = start.elapsed();
    Ok(GenericityRun { base, sweep, report })
}

#[derive(Debug, Clone)]
pub struct SpectrumRun {
    pub solutions: Vec<SolutionRow>,
    pub report: RunReport,
}

impl LabRun for SpectrumRun {
    fn report(&self) -> &RunReport {
        &self.report
    }

    fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        ensure_dir(dir)?;
        let path = dir.join("spectrum.csv");
        write_csv(&path, &self.solutions)?;
        Ok(vec![path, write_checks(dir, &self.report)?])
    }
}

/// Eigenvalue nearest zero of the linearization at every limit solution.
pub fn run_spectrum(sc: &Scenario) -> Result<SpectrumRun> {
    let start = Instant::now();
    sc.validate()?;
    let kin = sc.kinetics()?;
    let shooting = enumerate(sc, &kin, sc.grid()?)?;
    let certs = certify_all(&shooting.solutions, &kin, sc.stationary.tol_lambda);
    let mut report = RunReport::new(&sc.name, "spectrum");
    report.checks = solution_checks(&sc.checks, &shooting, &certs);
    report.wall_clock = start.elapsed();
    Ok(SpectrumRun {
        solutions: solution_rows(&shooting.solutions, &certs),
        report,
    })
}

#[derive(Debug, Clone)]
pub struct ShootRun {
    pub bc: (f64, f64),
    pub shooting: ShootingReport,
    pub solutions: Vec<SolutionRow>,
    pub report: RunReport,
}

impl LabRun for ShootRun {
    fn report(&self) -> &RunReport {
        &self.report
    }

    fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        ensure_dir(dir)?;
        let path = dir.join("solutions.csv");
        write_csv(&path, &self.solutions)?;
        Ok(vec![path, write_checks(dir, &self.report)?])
    }
}

/// Shooting enumeration for boundary values `(a, b)` with the scenario's
/// kinetics, grid and scan settings. Uniqueness is not asserted here since
/// arbitrary `(a, b)` may admit several solutions.
pub fn run_shoot(sc: &Scenario, a: f64, b: f64) -> Result<ShootRun> {
    let start = Instant::now();
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Config(format!("boundary values must be finite, got ({a}, {b})")));
    }
    let kin = sc.kinetics()?;
    let cfg: ShootConfig = sc.shoot_config();
    let shooting = shoot_enumerate(&kin, a, b, sc.grid()?, &cfg).map_err(|e| Error::Config(e.to_string()))?;
    let certs = certify_all(&shooting.solutions, &kin, sc.stationary.tol_lambda);
    let checks_cfg = super::ChecksSection {
        expect_unique: false,
        lambda_min: 0.0,
        ..sc.checks.clone()
    };
    let mut report = RunReport::new(&sc.name, "shoot");
    report.checks = solution_checks(&checks_cfg, &shooting, &certs);
    report.checks.retain(|c| c.name != "certified" && c.name != "min-abs-lambda");
    report.wall_clock = start.elapsed();
    Ok(ShootRun {
        bc: (a, b),
        solutions: solution_rows(&shooting.solutions, &certs),
        shooting,
        report,
    })
}
