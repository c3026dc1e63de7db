//! Builds the combined nonlinearity `h` for a few reaction pairs and checks
//! the sign and growth conditions the analysis relies on.

use seglab::Kinetics;

fn main() -> seglab::Result<()> {
    let logistic = Kinetics::logistic(1.0)?;
    // f(s) = 2s(1 − s), g(s) = s(1 − s)(1 + s)
    let poly = Kinetics::polynomial(0.5, vec![0.0, 2.0, -2.0], vec![0.0, 1.0, 0.0, -1.0])?;
    // f(s) = (1 − s)(1 − e^{−s}), g logistic
    let custom = Kinetics::custom(
        1.0,
        |s| (1.0 - s) * -(-s).exp_m1(),
        |s| (-s).exp_m1() + (1.0 - s) * (-s).exp(),
        |s| s * (1.0 - s),
        |s| 1.0 - 2.0 * s,
    )?;
    // f(s) = s(2 − s) stays positive on (1, 2), against the sign conditions
    let bad = Kinetics::polynomial(1.0, vec![0.0, 2.0, -1.0], vec![0.0, 1.0, -1.0])?;
    for (name, kin) in [("logistic", &logistic), ("polynomial", &poly), ("custom", &custom), ("bad", &bad)] {
        let report = kin.validate_hypothesis_a(400);
        let (lf, lg) = kin.lipschitz_constants(2.0);
        println!(
            "{name:>10}: h(1) = {:+.4}, h(-1) = {:+.4}, H(2) = {:+.4}, kink at 0: {}, Lipschitz on [0,2]: ({lf:.3}, {lg:.3}), violations: {}",
            kin.h(1.0),
            kin.h(-1.0),
            kin.primitive(2.0),
            kin.h_prime_kink_at_zero(),
            report.violations.len()
        );
    }
    Ok(())
}
