//! Size collapse of the tail: in the variable z = n^(1-gamma/2)·psi
//! the scaled density n^(gamma-1)·P(z) approaches one size-free limit
//! law. Two matrix sizes are histogrammed on the same grid, compared
//! to each other, and compared to the limit.
//!
//! The collapse holds in the genuine tail only: the lowest bins are
//! dominated by the bulk core (whose share of the total shrinks with
//! n), and the limit law diverges like 1/z^2 there, so both
//! comparisons restrict to a tail bin range.
//!
//! Run with: `cargo run --example tail_collapse`

use rpdist::compare::{chi2_against_density, chi2_two_sample};
use rpdist::eigensolve::eigh_window;
use rpdist::empirics::{scaled_components, Binning, EnergyWindow, Histogram};
use rpdist::ensemble::{sample_realization, EnsembleParams};
use rpdist::theory::{NormalizationMode, TheoryContext};
use std::f64::consts::FRAC_1_SQRT_2;

fn tail_histogram(
    params: EnsembleParams,
    realizations: u64,
    binning: Binning,
) -> anyhow::Result<Histogram> {
    let window = EnergyWindow::CentralFraction { fraction: 0.125 };
    let ranks = window.rank_range(params.n)?;
    let scale = NormalizationMode::Tail.scale(params.n, params.gamma_exp);
    let mut hist = Histogram::new(binning)?;
    for r in 0..realizations {
        let matrix = sample_realization(&params, 77, r)?;
        let decomp = eigh_window(&matrix, ranks.clone())?;
        hist.record_all(scaled_components(&decomp, ranks.clone(), scale));
    }
    Ok(hist)
}

fn main() -> anyhow::Result<()> {
    // |z| bins with square-root-spaced edges concentrate resolution
    // where the tail density is largest.
    let bins = 48usize;
    let max_abs = 6.0;
    let binning = Binning::UniformInSquare { max_abs, bins };
    let small = EnsembleParams::new(256, 1.5, FRAC_1_SQRT_2)?;
    let large = EnsembleParams::new(512, 1.5, FRAC_1_SQRT_2)?;
    let hist_small = tail_histogram(small, 16, binning.clone())?;
    let hist_large = tail_histogram(large, 8, binning.clone())?;
    println!(
        "tail samples: n = {} -> {} components, n = {} -> {} components",
        small.n,
        hist_small.total(),
        large.n,
        hist_large.total()
    );

    // Tail bin range: skip bins touching the bulk core (|z| below
    // ~25 core widths, core width = epsilon * n^(1-gamma)) and the
    // sparse top tenth of the range.
    let z_lo = 25.0 * small.epsilon * (small.n as f64).powf(1.0 - small.gamma_exp);
    let start = (bins as f64 * (z_lo / max_abs).powi(2)).ceil() as usize;
    let end = (bins as f64 * 0.81).floor() as usize; // 0.9^2 of the range
    println!(
        "tail region: bins {start}..{end} (z in [{:.2}, {:.2}])",
        max_abs * (start as f64 / bins as f64).sqrt(),
        max_abs * (end as f64 / bins as f64).sqrt()
    );

    // Same shape across sizes? The two-sample test needs no theory.
    let two = chi2_two_sample(&hist_small, &hist_large, Some(start..end), 20)?;
    println!("\ntwo-sample collapse across sizes:");
    println!("  chi2/dof = {:.3} over {} dof", two.chi2_per_dof, two.dof);

    // Against the size-free limit law, carried back to this size by
    // distribution_tail (the n^(1-gamma) multiple of the scaled limit).
    // The histogram records |z|, so the symmetric density is doubled.
    let ctx = TheoryContext::new(large)?;
    let fit = chi2_against_density(
        &hist_large,
        |z| 2.0 * ctx.distribution_tail(z).unwrap_or(0.0),
        10.0,
        Some(start..end),
    )?;
    println!("\nlarger size against the limit law on the tail region:");
    println!("  chi2/dof = {:.3} over {} dof", fit.chi2_per_dof, fit.dof);

    // The finite-size prediction extends through the core, so this fit
    // needs no bin restriction.
    let full = chi2_against_density(
        &hist_large,
        |z| {
            2.0 * ctx
                .distribution_center(NormalizationMode::Tail, z)
                .unwrap_or(0.0)
        },
        10.0,
        None,
    )?;
    println!("\nsame data against the finite-size density on all bins:");
    println!("  chi2/dof = {:.3} over {} dof", full.chi2_per_dof, full.dof);

    // Both absolute fits sit a little above chi2/dof = 1 at this sample
    // size: enough counts accumulate here to resolve a few-percent tail
    // surplus that the leading-order densities omit and that fades like
    // n^(gamma-2). The two-sample collapse is immune to it, since every
    // size carries (nearly) the same surplus.
    println!(
        "\nthe absolute fits resolve a small finite-size surplus beyond \
         both densities;\nthe shape collapse across sizes is unaffected."
    );
    Ok(())
}
