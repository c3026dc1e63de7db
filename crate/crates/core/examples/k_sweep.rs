//! Evolves the default problem for growing `k` and prints how the overlap of
//! the two species and the distance to the segregated limit shrink.

use seglab::lab::{run_evolve, Scenario};

fn main() -> seglab::Result<()> {
    let sc = Scenario::builtin_default();
    let run = run_evolve(&sc)?;
    println!("{:>8} {:>9} {:>12} {:>12} {:>12} {:>12}", "k", "steady_at", "sup min(u,v)", "proj_error", "|R|", "dist");
    for row in run.summary() {
        println!(
            "{:>8.0e} {:>9.3} {:>12.5} {:>12.5} {:>12.5} {:>12.3e}",
            row.k,
            row.steady_at.unwrap_or(f64::NAN),
            row.sup_seg_pointwise.unwrap_or(f64::NAN),
            row.sup_proj_error.unwrap_or(f64::NAN),
            row.sup_remainder_r_l2.unwrap_or(f64::NAN),
            row.dist_to_limit.unwrap_or(f64::NAN),
        );
    }
    for check in &run.report.checks {
        println!("{check}");
    }
    Ok(())
}
