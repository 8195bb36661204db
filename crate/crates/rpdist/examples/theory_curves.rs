//! Evaluate the predicted eigenfunction-component densities and
//! moments: the finite-size center law, its large-n Cauchy limit, the
//! scaled tail law, and the moment table with its three routes (exact,
//! asymptotic, finite-size-corrected).
//!
//! Run with: `cargo run --example theory_curves`

use rpdist::specfun::{integrate, Interval, QuadratureSpec};
use rpdist::theory::{NormalizationMode, TheoryContext};
use rpdist::EnsembleParams;
use std::f64::consts::FRAC_1_SQRT_2;

fn main() -> anyhow::Result<()> {
    let params = EnsembleParams::new(1024, 1.5, FRAC_1_SQRT_2)?;
    let ctx = TheoryContext::new(params)?;
    println!(
        "n = {}, gamma_exp = {}, epsilon = {:.6}",
        params.n, params.gamma_exp, params.epsilon
    );
    println!("mean level spacing scale delta = Gamma(0) = {:.6e}", ctx.delta());

    println!("\nbulk-normalized density of y = n^(gamma/2) psi at the band center");
    println!("{:>8} {:>20} {:>20}", "y", "finite-size density", "limit (Cauchy)");
    for y in [0.0, 0.5, 1.0, 2.0, 5.0] {
        println!(
            "{y:>8} {:>20.12} {:>20.12}",
            ctx.distribution_center(NormalizationMode::Bulk, y)?,
            ctx.distribution_bulk_limit(y)
        );
    }

    // The density integrates to one; check it with the quadrature the
    // crate itself uses.
    let spec = QuadratureSpec::default();
    let total = integrate(
        |y| ctx.distribution_center(NormalizationMode::Bulk, y).unwrap_or(0.0),
        Interval::FullLine,
        &spec,
    )?;
    println!("normalization check: integral = {:.12}", total.value);

    println!("\nscaled tail density n^(gamma-1) P(z), z = n^(1-gamma/2) psi");
    println!("{:>8} {:>20}", "z", "limit law");
    for z in [0.5, 1.0, 2.0, 4.0] {
        println!("{z:>8} {:>20.12}", ctx.distribution_tail_limit(z)?);
    }

    println!("\nmoments I_q = n * <|psi|^(2q)> and their predictions");
    println!(
        "{:>6} {:>8} {:>14} {:>14} {:>14}",
        "q", "tau(q)", "exact", "asymptote", "corrected"
    );
    for pred in ctx.moment_predictions(&[0.0, 0.125, 0.5, 1.0, 2.0])? {
        println!(
            "{:>6} {:>8.4} {:>14.6e} {:>14.6e} {:>14.6e}",
            pred.q, pred.tau, pred.exact, pred.asymptotic, pred.corrected
        );
    }
    println!("(all three prediction columns are the moment itself; multiply by");
    println!(" n^tau to read off the size-free coefficient, e.g. 6/pi at q = 2)");
    Ok(())
}
