//! Tracks `E(w) = ∫ ½|w'|² − H(w)` along one evolution and audits the
//! discrete decay inequality between consecutive snapshots.

use seglab::diagnostics::{energy_decay_audit, snapshot};
use seglab::evolve::{evolve_to, initial_state, EvolveConfig};
use seglab::lab::Scenario;

fn main() -> seglab::Result<()> {
    let sc = Scenario::builtin_default();
    let spec = sc.spec(1e3)?;
    let init = initial_state(&spec);
    let cfg = EvolveConfig { t_end: 1.0, snapshot_every: 1, ..Default::default() };
    let ev = evolve_to(&init, &spec, &cfg)?;

    let mut traj = vec![snapshot(&init, &spec, &[])];
    traj.extend(ev.trajectory);
    for s in traj.iter().step_by(100) {
        println!("t = {:5.3}  E = {:.8}  residual = {:.3e}  |R| = {:.3e}", s.t, s.energy, s.residual_s, s.remainder_r_l2);
    }
    let audit = energy_decay_audit(&traj);
    println!(
        "{} pairs, {} dissipative, {} increases, scheme constant {:.3e} (dt = {})",
        audit.pairs, audit.dissipative_pairs, audit.increase_violations, audit.scheme_constant, cfg.dt
    );
    Ok(())
}
