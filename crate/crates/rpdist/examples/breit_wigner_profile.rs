//! The Breit-Wigner envelope: averaged over realizations, the squared
//! component on site j of an eigenfunction at energy E falls off as a
//! Lorentzian in the energy distance (E_j - E), with width equal to
//! the spreading width. This example measures the profile and fits the
//! width back out.
//!
//! Run with: `cargo run --example breit_wigner_profile`

use rpdist::compare::fit_lorentzian_width;
use rpdist::eigensolve::eigh_window;
use rpdist::empirics::{EnergyWindow, ProfileAccumulator};
use rpdist::ensemble::{sample_realization, EnsembleParams};
use rpdist::theory::TheoryContext;
use std::f64::consts::FRAC_1_SQRT_2;

fn main() -> anyhow::Result<()> {
    let params = EnsembleParams::new(512, 1.5, FRAC_1_SQRT_2)?;
    let realizations = 30u64;
    let ctx = TheoryContext::new(params)?;
    let predicted = ctx.spreading_width(0.0);
    println!(
        "n = {}, predicted spreading width Gamma(0) = {:.6e}",
        params.n, predicted
    );

    // Profile the squared components over |E_j - E| up to a few widths.
    let window = EnergyWindow::CentralFraction { fraction: 0.125 };
    let ranks = window.rank_range(params.n)?;
    let mut profile = ProfileAccumulator::new(4.0 * predicted, 32)?;
    for r in 0..realizations {
        let matrix = sample_realization(&params, 99, r)?;
        let decomp = eigh_window(&matrix, ranks.clone())?;
        let site_energies: Vec<f64> = (0..params.n).map(|i| matrix.get(i, i)).collect();
        profile.accumulate(&site_energies, &decomp, ranks.clone())?;
    }
    println!(
        "pairs recorded: {} inside the profiled range, {} outside",
        profile.counts().iter().sum::<u64>(),
        profile.outside()
    );

    println!("\nmean squared component vs energy distance:");
    println!("{:>12} {:>14} {:>8}", "delta", "mean |psi_j|^2", "pairs");
    let centers = profile.centers();
    let means = profile.mean_square();
    let counts = profile.counts();
    for k in (0..centers.len()).step_by(4) {
        println!("{:>12.4} {:>14.6e} {:>8}", centers[k], means[k], counts[k]);
    }

    let fit = fit_lorentzian_width(&profile, 50)?;
    println!("\nLorentzian fit over {} well-populated bins:", fit.bins_used);
    println!("  fitted width    = {:.6e}", fit.width);
    println!("  predicted width = {:.6e}", predicted);
    println!("  ratio           = {:.4}", fit.width / predicted);
    println!("  linearized r^2  = {:.6}", fit.r_squared);
    Ok(())
}
