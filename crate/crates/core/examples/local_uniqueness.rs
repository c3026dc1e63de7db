//! Seeds Newton for the stationary system at random points near the
//! segregated profile and counts the distinct limits reached.

use seglab::lab::Scenario;
use seglab::stationary::{local_uniqueness_probe, shoot_enumerate, ProbeConfig};

fn main() -> seglab::Result<()> {
    let sc = Scenario::builtin_default();
    let (a, b) = sc.w_bc()?;
    let rep = shoot_enumerate(&sc.kinetics()?, a, b, sc.grid()?, &sc.shoot_config())?;
    let w0 = &rep.solutions[0].solution;
    for &k in &sc.model.k {
        let probe = local_uniqueness_probe(&sc.spec(k)?, w0, &ProbeConfig::default());
        println!(
            "k = {k:>6.0e}: {} seeds, {} distinct limit(s), {} failure(s), max residual {:.2e}",
            probe.outcomes.len(),
            probe.distinct_count(),
            probe.failures(),
            probe.max_residual()
        );
    }
    Ok(())
}
