//! Moment scaling across matrix sizes: the moments I_q = n·<|psi|^(2q)>
//! follow I_q ~ n^(-tau(q)) with a piecewise-linear exponent, and the
//! scaled combination I_q·n^(tau) converges to a known coefficient.
//!
//! Run with: `cargo run --example moment_scaling`

use rpdist::compare::moment_comparison;
use rpdist::eigensolve::eigh_window;
use rpdist::empirics::{EnergyWindow, MomentAccumulator};
use rpdist::ensemble::{sample_realization, EnsembleParams};
use rpdist::theory::TheoryContext;
use std::f64::consts::FRAC_1_SQRT_2;

fn main() -> anyhow::Result<()> {
    let orders = vec![0.125, 0.5, 1.0, 2.0];
    println!("I_q * n^tau across sizes (gamma_exp = 1.5, central 1/8 window)");
    println!(
        "{:>6} {:>6} {:>8} {:>14} {:>14} {:>14}",
        "n", "q", "tau", "observed*n^tau", "asymptote", "corrected"
    );
    for n in [128usize, 256, 512] {
        let params = EnsembleParams::new(n, 1.5, FRAC_1_SQRT_2)?;
        let realizations = (8192 / n) as u64; // similar total cost per size
        let window = EnergyWindow::CentralFraction { fraction: 0.125 };
        let ranks = window.rank_range(n)?;
        let mut acc = MomentAccumulator::new(orders.clone())?;
        for r in 0..realizations {
            let matrix = sample_realization(&params, 4242, r)?;
            let decomp = eigh_window(&matrix, ranks.clone())?;
            for alpha in ranks.clone() {
                acc.record_eigenfunction(decomp.eigenvector(alpha).iter().copied());
            }
        }
        let ctx = TheoryContext::new(params)?;
        for row in moment_comparison(&acc, &ctx)? {
            println!(
                "{n:>6} {:>6} {:>8.4} {:>14.6} {:>14.6} {:>14.6}",
                row.q, row.tau, row.scaled_observed, row.asymptote, row.corrected_asymptote
            );
        }
    }
    println!("\nthe observed column drifts toward the corrected asymptote as n");
    println!("grows; q = 1/2 uses the logarithmic form instead of a pure power");
    Ok(())
}
