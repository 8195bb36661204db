//! Monte Carlo check of the bulk component distribution: histogram the
//! rescaled components y = n^(gamma/2)·psi of central eigenfunctions
//! and fit them against the predicted finite-size density.
//!
//! Run with: `cargo run --example bulk_distribution`

use rpdist::compare::chi2_against_density;
use rpdist::eigensolve::eigh_window;
use rpdist::empirics::{scaled_components, Binning, EnergyWindow, Histogram};
use rpdist::ensemble::{sample_realization, EnsembleParams};
use rpdist::theory::{NormalizationMode, TheoryContext};
use std::f64::consts::FRAC_1_SQRT_2;

fn main() -> anyhow::Result<()> {
    let params = EnsembleParams::new(256, 1.5, FRAC_1_SQRT_2)?;
    let realizations = 40;
    let master_seed = 2024;
    let ctx = TheoryContext::new(params)?;
    let window = EnergyWindow::CentralFraction { fraction: 0.125 };
    let ranks = window.rank_range(params.n)?;
    let scale = NormalizationMode::Bulk.scale(params.n, params.gamma_exp);

    let mut hist = Histogram::new(Binning::Uniform {
        lo: -8.0 * params.epsilon,
        hi: 8.0 * params.epsilon,
        bins: 120,
    })?;
    for r in 0..realizations {
        let matrix = sample_realization(&params, master_seed, r)?;
        let decomp = eigh_window(&matrix, ranks.clone())?;
        hist.record_all(scaled_components(&decomp, ranks.clone(), scale));
    }
    println!(
        "n = {}, {} realizations, {} central eigenfunctions each",
        params.n,
        realizations,
        ranks.len()
    );
    println!(
        "components recorded: {} in range, {} under, {} over",
        hist.counts().iter().sum::<u64>(),
        hist.underflow(),
        hist.overflow()
    );

    let report = chi2_against_density(
        &hist,
        |y| ctx.distribution_center(NormalizationMode::Bulk, y).unwrap_or(0.0),
        5.0,
        None,
    )?;
    println!("\nfit against the predicted finite-size density:");
    println!("  chi2     = {:.2}", report.chi2);
    println!("  dof      = {}", report.dof);
    println!("  chi2/dof = {:.3}  (order 1 indicates agreement)", report.chi2_per_dof);

    println!("\nlargest standardized residuals:");
    let mut residuals = report.residuals.clone();
    residuals.sort_by(|a, b| b.pearson.abs().total_cmp(&a.pearson.abs()));
    println!("{:>10} {:>10} {:>10} {:>8}", "bin center", "observed", "expected", "pearson");
    for r in residuals.iter().take(5) {
        println!(
            "{:>10.3} {:>10} {:>10.1} {:>8.2}",
            0.5 * (r.bin_lo + r.bin_hi),
            r.observed,
            r.expected,
            r.pearson
        );
    }
    Ok(())
}
