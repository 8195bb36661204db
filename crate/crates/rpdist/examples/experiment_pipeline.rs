//! The batch pipeline end to end: configure an experiment, sample it,
//! tabulate the matching predictions, fit measurement against theory,
//! and render the report — exactly what the `rpdist` binary does, but
//! driven through the library API.
//!
//! Run with: `cargo run --example experiment_pipeline`

use rpdist::config::ExperimentConfig;
use rpdist::ensemble::EnsembleParams;
use rpdist::runner::{run_compare, run_report, run_sample, run_theory};
use std::f64::consts::FRAC_1_SQRT_2;

fn main() -> anyhow::Result<()> {
    let params = EnsembleParams::new(128, 1.5, FRAC_1_SQRT_2)?;
    let mut config = ExperimentConfig::with_defaults(params, 24);
    config.master_seed = 7;
    config.workers = 0; // one rayon worker per core
    // This run is tiny, so loosen the acceptance thresholds to match
    // its statistical power; production configs keep the defaults.
    config.thresholds.max_chi2_per_dof = 3.0;
    config.thresholds.max_moment_rel_error = 0.5;
    config.thresholds.max_width_rel_error = 0.5;

    // Every stage writes its own meta.json, so each owns a directory;
    // compare reads the sample artifacts and adds fits beside them.
    let base = std::env::temp_dir().join("rpdist-pipeline-example");
    let sample_dir = base.join("sample");
    let theory_dir = base.join("theory");
    println!("writing artifacts under {}", base.display());
    println!("config:\n{}", config.to_toml_string()?);

    let summary = run_sample(&config, &sample_dir)?;
    println!(
        "sampled: {} eigenfunctions, {} failed realizations, {} files",
        summary.eigenfunctions,
        summary.failed_realizations,
        summary.files.len()
    );

    let files = run_theory(&config, &theory_dir)?;
    println!("theory: {} files", files.len());

    let compare = run_compare(&config, &sample_dir, &sample_dir)?;
    println!(
        "compare: pass = {}, {} violations",
        compare.pass,
        compare.violations.len()
    );
    for v in &compare.violations {
        println!("  violation: {v}");
    }

    println!("\n{}", run_report(&sample_dir)?);
    Ok(())
}
