//! End-to-end experiment orchestration.
//!
//! Each entry point mirrors one CLI subcommand: [`run_sample`] farms
//! matrix realizations to a worker pool and persists merged histograms
//! and moment accumulators, [`run_theory`] tabulates prediction curves,
//! [`run_moments`] scans moments across matrix dimensions,
//! [`run_compare`] fits persisted measurements against the predictions
//! and applies the configured thresholds, and [`run_report`] renders a
//! human-readable summary of whatever artifacts a directory holds.
//!
//! Determinism contract: realization `r` draws from a random stream
//! derived from `(master_seed, r)` alone, workers only compute partial
//! accumulators, and a single reducer merges partials in realization
//! order — so every output byte except the recorded wall time is a pure
//! function of the configuration, whatever the worker count.

use crate::compare::{
    chi2_against_density, fit_lorentzian_width, moment_comparison, CompareError, FitReport,
};
use crate::config::{ConfigError, ExperimentConfig, SolverChoice};
use crate::eigensolve::{eigh, eigh_window};
use crate::empirics::{
    scaled_components, Binning, EmpiricsError, EnergyWindow, Histogram, MomentAccumulator,
    ProfileAccumulator,
};
use crate::ensemble::{sample_realization, EnsembleError};
use crate::theory::{NormalizationMode, TheoryContext, TheoryError};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

/// Process exit code for success.
pub const EXIT_OK: i32 = 0;
/// Process exit code when a comparison threshold is violated.
pub const EXIT_THRESHOLD: i32 = 2;
/// Process exit code for input, configuration, or schema errors.
pub const EXIT_INPUT: i32 = 3;
/// Process exit code for numerical or runtime failures.
pub const EXIT_NUMERIC: i32 = 4;

/// Identifier written into sample metadata.
const SAMPLE_SCHEMA: &str = "rpdist-sample-v1";
/// Identifier written into theory metadata.
const THEORY_SCHEMA: &str = "rpdist-theory-v1";
/// Identifier written into moment-scan metadata.
const MOMENTS_SCHEMA: &str = "rpdist-moments-v1";

/// Half-angle tangent limit of the prediction-curve grids. The grid is
/// `y = ε·(tan u + tan³u/3)` with `u` uniform in `±atan(T)`, so the
/// local spacing grows like `y^{4/3}` — the equidistribution optimum
/// for trapezoid integration of a `1/y²` tail, so every panel carries a
/// comparable error and the total falls as `points⁻²` (measured
/// `≈3e−4` at 501 points, `≈2e−5` at the 2001-point default). The span
/// is `y_max = ε·(T + T³/3) ≈ 13135·ε`, which truncates at most
/// `2/(π·13135) ≈ 4.9e−5` of mass even for the heaviest (limit Cauchy)
/// curve, so a trapezoid over the default rows resolves normalization
/// to `1e−4` with margin.
const CURVE_TAN_LIMIT: f64 = 34.0;

/// Profile bins must hold at least this many pairs to enter the
/// Lorentzian width fit.
const PROFILE_FIT_MIN_COUNT: u64 = 10;

/// Errors from experiment orchestration.
#[derive(Debug, Error)]
pub enum RunnerError {
    /// Configuration failed to load or validate.
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// A persisted artifact does not match the expected schema.
    #[error("artifact schema problem: {detail}")]
    Schema {
        /// Human-readable description naming the offending field.
        detail: String,
    },
    /// File input/output failed.
    #[error("i/o failure at {path}: {source}")]
    Io {
        /// Offending path.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// Matrix sampling failed.
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    /// More than 1% of realizations failed the eigensolver.
    #[error("{failed} of {total} realizations failed the eigensolver (more than 1%)")]
    TooManyFailures {
        /// Failed realization count.
        failed: u64,
        /// Total realization count.
        total: u64,
    },
    /// A measurement accumulator was misconfigured.
    #[error(transparent)]
    Empirics(#[from] EmpiricsError),
    /// A prediction could not be evaluated.
    #[error(transparent)]
    Theory(#[from] TheoryError),
    /// A comparison failed.
    #[error(transparent)]
    Compare(#[from] CompareError),
    /// An internal invariant broke (worker pool construction and kin).
    #[error("internal failure: {detail}")]
    Internal {
        /// Human-readable description.
        detail: String,
    },
}

impl RunnerError {
    /// The process exit code this error maps to: `3` for input,
    /// configuration, domain, and schema problems; `4` for runtime and
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunnerError::Config(_) | RunnerError::Schema { .. } => EXIT_INPUT,
            RunnerError::Theory(TheoryError::Domain { .. }) => EXIT_INPUT,
            RunnerError::Compare(CompareError::InvalidInput { .. }) => EXIT_INPUT,
            _ => EXIT_NUMERIC,
        }
    }
}

fn invalid_config(detail: impl Into<String>) -> RunnerError {
    RunnerError::Config(ConfigError::Invalid {
        detail: detail.into(),
    })
}

fn schema(detail: impl Into<String>) -> RunnerError {
    RunnerError::Schema {
        detail: detail.into(),
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), RunnerError> {
    std::fs::write(path, content).map_err(|source| RunnerError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_file(path: &Path) -> Result<String, RunnerError> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(text),
        Err(source) if source.kind() == std::io::ErrorKind::NotFound => Err(schema(format!(
            "missing artifact {}; run the producing subcommand first",
            path.display()
        ))),
        Err(source) => Err(RunnerError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

/// Read a CSV artifact: `#`-prefixed comment lines are skipped, the
/// header must match exactly, and rows are returned as raw fields.
fn read_csv(path: &Path, expected_header: &str) -> Result<Vec<Vec<String>>, RunnerError> {
    let text = read_file(path)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| schema(format!("{} is empty", path.display())))?;
    if header != expected_header {
        return Err(schema(format!(
            "in {}: expected header '{}', found '{}'",
            path.display(),
            expected_header,
            header
        )));
    }
    Ok(lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect())
}

fn parse_field<T: std::str::FromStr>(
    field: &str,
    what: &str,
    path: &Path,
    row: usize,
) -> Result<T, RunnerError> {
    field.parse().map_err(|_| {
        schema(format!(
            "in {} row {}: field '{}' is not a valid {}",
            path.display(),
            row + 1,
            field,
            what
        ))
    })
}

/// Per-realization measurement bundle; also the mergeable partial.
#[derive(Clone)]
struct RealizationStats {
    failed: bool,
    hists: Vec<Histogram>,
    moments: MomentAccumulator,
    profile: Option<ProfileAccumulator>,
    eigenfunctions: u64,
    dump_error: Option<String>,
}

/// Merged statistics of a full run.
struct MergedStats {
    hists: Vec<Histogram>,
    moments: MomentAccumulator,
    profile: Option<ProfileAccumulator>,
    eigenfunctions: u64,
    failed: u64,
    window_ranks: Option<(usize, usize)>,
    solver: &'static str,
}

/// Resolve the rank window (when rank-based) and the solver path.
fn resolve_solver(
    config: &ExperimentConfig,
) -> Result<(Option<Range<usize>>, bool, &'static str), RunnerError> {
    let ranks = match &config.window {
        EnergyWindow::EnergyInterval { .. } => None,
        w => Some(w.rank_range(config.params.n)?),
    };
    let windowed = match config.solver {
        SolverChoice::Full => false,
        SolverChoice::Windowed => {
            if ranks.is_none() {
                return Err(invalid_config(
                    "the windowed solver needs a rank-based window; energy intervals \
                     are resolved per realization and require solver = \"full\" or \"auto\"",
                ));
            }
            true
        }
        SolverChoice::Auto => ranks
            .as_ref()
            .is_some_and(|r| config.params.n >= 64 && 2 * r.len() < config.params.n),
    };
    Ok((ranks, windowed, if windowed { "windowed" } else { "full" }))
}

fn empty_stats(config: &ExperimentConfig) -> Result<RealizationStats, RunnerError> {
    let mut hists = Vec::with_capacity(config.modes.len());
    for mode in &config.modes {
        hists.push(Histogram::new(config.binning_for(*mode))?);
    }
    let moments = MomentAccumulator::new(config.moment_orders.clone())?;
    let profile = if config.measure_profile {
        Some(ProfileAccumulator::new(
            config.profile_half_width_resolved(),
            config.profile_bins,
        )?)
    } else {
        None
    };
    Ok(RealizationStats {
        failed: false,
        hists,
        moments,
        profile,
        eigenfunctions: 0,
        dump_error: None,
    })
}

fn one_realization(
    config: &ExperimentConfig,
    template: &RealizationStats,
    ranks: Option<&Range<usize>>,
    windowed: bool,
    realization: u64,
    dump_dir: Option<&Path>,
) -> RealizationStats {
    let mut stats = template.clone();
    let matrix = match sample_realization(&config.params, config.master_seed, realization) {
        Ok(m) => m,
        Err(_) => {
            stats.failed = true;
            return stats;
        }
    };
    let decomp = if windowed {
        eigh_window(&matrix, ranks.expect("windowed solver has ranks").clone())
    } else {
        eigh(&matrix)
    };
    let decomp = match decomp {
        Ok(d) => d,
        Err(_) => {
            stats.failed = true;
            return stats;
        }
    };
    let ranks = match ranks {
        Some(r) => r.clone(),
        None => match config.window.select(decomp.eigenvalues()) {
            Ok(r) => r,
            Err(_) => {
                stats.failed = true;
                return stats;
            }
        },
    };

    for (mode, hist) in config.modes.iter().zip(&mut stats.hists) {
        let scale = mode.scale(config.params.n, config.params.gamma_exp);
        hist.record_all(scaled_components(&decomp, ranks.clone(), scale));
    }
    for alpha in ranks.clone() {
        stats
            .moments
            .record_eigenfunction(decomp.eigenvector(alpha).iter().copied());
    }
    if let Some(profile) = &mut stats.profile {
        let site_energies: Vec<f64> = (0..config.params.n).map(|i| matrix.get(i, i)).collect();
        if profile
            .accumulate(&site_energies, &decomp, ranks.clone())
            .is_err()
        {
            stats.failed = true;
            return stats;
        }
    }
    stats.eigenfunctions = ranks.len() as u64;

    if let Some(dir) = dump_dir {
        let mut text = format!(
            "# master_seed={}\nrank,site,value\n",
            config.master_seed
        );
        for alpha in ranks.clone() {
            for (site, value) in decomp.eigenvector(alpha).iter().enumerate() {
                let _ = writeln!(text, "{alpha},{site},{value:e}");
            }
        }
        let path = dir.join(format!("eigvecs_r{realization}.csv"));
        if let Err(e) = std::fs::write(&path, text) {
            stats.dump_error = Some(format!("{}: {}", path.display(), e));
        }
    }
    stats
}

/// Farm all realizations and merge their partials in realization order.
fn collect_statistics(
    config: &ExperimentConfig,
    dump_dir: Option<&Path>,
) -> Result<MergedStats, RunnerError> {
    let (ranks, windowed, solver) = resolve_solver(config)?;
    let template = empty_stats(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| RunnerError::Internal {
            detail: format!("cannot build worker pool: {e}"),
        })?;
    let partials: Vec<RealizationStats> = pool.install(|| {
        (0..config.realizations)
            .into_par_iter()
            .map(|r| one_realization(config, &template, ranks.as_ref(), windowed, r, dump_dir))
            .collect()
    });

    let failed = partials.iter().filter(|p| p.failed).count() as u64;
    if failed * 100 > config.realizations {
        return Err(RunnerError::TooManyFailures {
            failed,
            total: config.realizations,
        });
    }
    if let Some(msg) = partials.iter().find_map(|p| p.dump_error.clone()) {
        return Err(RunnerError::Io {
            path: PathBuf::from(&msg),
            source: std::io::Error::other(format!("eigenvector dump failed: {msg}")),
        });
    }

    // Failed partials hold untouched empty accumulators, so merging
    // every partial in index order is both safe and deterministic.
    let mut merged = template;
    let mut eigenfunctions = 0u64;
    for p in &partials {
        for (h, other) in merged.hists.iter_mut().zip(&p.hists) {
            h.merge(other)?;
        }
        merged.moments.merge(&p.moments)?;
        if let (Some(mine), Some(theirs)) = (&mut merged.profile, &p.profile) {
            mine.merge(theirs)?;
        }
        eigenfunctions += p.eigenfunctions;
    }
    Ok(MergedStats {
        hists: merged.hists,
        moments: merged.moments,
        profile: merged.profile,
        eigenfunctions,
        failed,
        window_ranks: ranks.map(|r| (r.start, r.end)),
        solver,
    })
}

#[derive(Serialize)]
struct HistStats {
    underflow: u64,
    overflow: u64,
    total: u64,
}

#[derive(Serialize)]
struct SampleMeta<'a> {
    schema: &'static str,
    config: &'a ExperimentConfig,
    resolved_solver: &'static str,
    window_ranks: Option<(usize, usize)>,
    binnings: BTreeMap<String, Binning>,
    profile_half_width: Option<f64>,
    failed_realizations: u64,
    eigenfunctions: u64,
    histograms: BTreeMap<String, HistStats>,
    profile_outside: Option<u64>,
    moment_count: u64,
    wall_time_seconds: f64,
}

/// Outcome of a sampling run.
#[derive(Debug, Clone)]
pub struct SampleSummary {
    /// Files written.
    pub files: Vec<PathBuf>,
    /// Realizations the eigensolver failed on (at most 1%).
    pub failed_realizations: u64,
    /// Eigenfunctions that entered the statistics.
    pub eigenfunctions: u64,
}

fn seed_comment(seed: u64) -> String {
    format!("# master_seed={seed}\n")
}

/// Sample the ensemble per the configuration and persist merged
/// histograms, moments, the mean-squared-component profile, and full
/// metadata into `out_dir`.
pub fn run_sample(config: &ExperimentConfig, out_dir: &Path) -> Result<SampleSummary, RunnerError> {
    let start = Instant::now();
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|source| RunnerError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let dump_dir = config.dump_eigenvectors.then_some(out_dir);
    let stats = collect_statistics(config, dump_dir)?;
    let mut files = Vec::new();

    let mut binnings = BTreeMap::new();
    let mut hist_stats = BTreeMap::new();
    for (mode, hist) in config.modes.iter().zip(&stats.hists) {
        let label = mode.label();
        let mut text = seed_comment(config.master_seed);
        text.push_str("bin_lo,bin_hi,count\n");
        let edges = hist.binning().edges();
        for (w, c) in edges.windows(2).zip(hist.counts()) {
            let _ = writeln!(text, "{:e},{:e},{}", w[0], w[1], c);
        }
        let path = out_dir.join(format!("hist_{label}.csv"));
        write_file(&path, &text)?;
        files.push(path);
        binnings.insert(label.to_string(), hist.binning().clone());
        hist_stats.insert(
            label.to_string(),
            HistStats {
                underflow: hist.underflow(),
                overflow: hist.overflow(),
                total: hist.total(),
            },
        );
    }

    let mut text = seed_comment(config.master_seed);
    text.push_str("q,sum,count\n");
    for (q, sum) in stats.moments.orders().iter().zip(stats.moments.sums()) {
        let _ = writeln!(text, "{:e},{:e},{}", q, sum, stats.moments.count());
    }
    let path = out_dir.join("moments.csv");
    write_file(&path, &text)?;
    files.push(path);

    if let Some(profile) = &stats.profile {
        let mut text = seed_comment(config.master_seed);
        text.push_str("delta_lo,delta_hi,sum_sq,count\n");
        let half = config.profile_half_width_resolved();
        let width = 2.0 * half / config.profile_bins as f64;
        for (k, (s, c)) in profile.sums().iter().zip(profile.counts()).enumerate() {
            let lo = -half + k as f64 * width;
            let _ = writeln!(text, "{:e},{:e},{:e},{}", lo, lo + width, s, c);
        }
        let path = out_dir.join("profile.csv");
        write_file(&path, &text)?;
        files.push(path);
    }

    let meta = SampleMeta {
        schema: SAMPLE_SCHEMA,
        config,
        resolved_solver: stats.solver,
        window_ranks: stats.window_ranks,
        binnings,
        profile_half_width: config
            .measure_profile
            .then(|| config.profile_half_width_resolved()),
        failed_realizations: stats.failed,
        eigenfunctions: stats.eigenfunctions,
        histograms: hist_stats,
        profile_outside: stats.profile.as_ref().map(|p| p.outside()),
        moment_count: stats.moments.count(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let path = out_dir.join("meta.json");
    write_file(
        &path,
        &(serde_json::to_string_pretty(&meta).map_err(|e| RunnerError::Internal {
            detail: format!("metadata serialization: {e}"),
        })? + "\n"),
    )?;
    files.push(path);

    Ok(SampleSummary {
        files,
        failed_realizations: stats.failed,
        eigenfunctions: stats.eigenfunctions,
    })
}

/// Symmetric grid `y = ε·(tan u + tan³u/3)` that concentrates points
/// where heavy-tailed densities vary (see [`CURVE_TAN_LIMIT`]).
fn tangent_grid(epsilon: f64, points: usize) -> Vec<f64> {
    let u_max = CURVE_TAN_LIMIT.atan();
    (0..points)
        .map(|k| {
            let u = -u_max + 2.0 * u_max * k as f64 / (points - 1) as f64;
            let t = u.tan();
            epsilon * (t + t.powi(3) / 3.0)
        })
        .collect()
}

/// Tabulate prediction curves into `curve_<name>.csv` files plus
/// metadata with every derived constant.
pub fn run_theory(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunnerError> {
    let start = Instant::now();
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|source| RunnerError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let ctx = TheoryContext::new(config.params)?;
    let points = config.theory.points;
    let y_grid = tangent_grid(config.params.epsilon, points);
    // The tail variable is size-free; so is its grid.
    let z_max = 4.0 / ctx.b_const();
    let z_grid: Vec<f64> = (1..=points).map(|k| z_max * k as f64 / points as f64).collect();

    let mut files = Vec::new();
    for name in &config.theory.curves {
        let rows: Result<Vec<(f64, f64)>, TheoryError> = match name.as_str() {
            "center" => y_grid
                .iter()
                .map(|&y| Ok((y, ctx.distribution_center(NormalizationMode::Bulk, y)?)))
                .collect(),
            "bulk" => Ok(y_grid
                .iter()
                .map(|&y| (y, ctx.distribution_bulk_limit(y)))
                .collect()),
            "tail" => z_grid
                .iter()
                .map(|&z| Ok((z, ctx.distribution_tail_limit(z)?)))
                .collect(),
            "general" => y_grid
                .iter()
                .map(|&y| {
                    Ok((
                        y,
                        ctx.distribution_at_energy(
                            NormalizationMode::Bulk,
                            y,
                            config.theory.energy,
                        )?,
                    ))
                })
                .collect(),
            other => {
                return Err(invalid_config(format!("unknown theory curve '{other}'")));
            }
        };
        let mut text = seed_comment(config.master_seed);
        text.push_str("abscissa,density\n");
        for (x, d) in rows? {
            let _ = writeln!(text, "{x:e},{d:e}");
        }
        let path = out_dir.join(format!("curve_{name}.csv"));
        write_file(&path, &text)?;
        files.push(path);
    }

    #[derive(Serialize)]
    struct ModeConstants {
        scale: f64,
        a: f64,
    }
    #[derive(Serialize)]
    struct TheoryMeta<'a> {
        schema: &'static str,
        config: &'a ExperimentConfig,
        n: usize,
        gamma_exp: f64,
        epsilon: f64,
        delta: f64,
        b_const: f64,
        modes: BTreeMap<&'static str, ModeConstants>,
        grid_points: usize,
        y_max: f64,
        z_max: f64,
        general_energy: f64,
        wall_time_seconds: f64,
    }
    let mut mode_constants = BTreeMap::new();
    for mode in [
        NormalizationMode::Raw,
        NormalizationMode::Bulk,
        NormalizationMode::Tail,
    ] {
        mode_constants.insert(
            mode.label(),
            ModeConstants {
                scale: ctx.mode_scale(mode),
                a: ctx.mode_a(mode),
            },
        );
    }
    let meta = TheoryMeta {
        schema: THEORY_SCHEMA,
        config,
        n: config.params.n,
        gamma_exp: config.params.gamma_exp,
        epsilon: config.params.epsilon,
        delta: ctx.delta(),
        b_const: ctx.b_const(),
        modes: mode_constants,
        grid_points: points,
        y_max: config.params.epsilon * (CURVE_TAN_LIMIT + CURVE_TAN_LIMIT.powi(3) / 3.0),
        z_max,
        general_energy: config.theory.energy,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let path = out_dir.join("meta.json");
    write_file(
        &path,
        &(serde_json::to_string_pretty(&meta).map_err(|e| RunnerError::Internal {
            detail: format!("metadata serialization: {e}"),
        })? + "\n"),
    )?;
    files.push(path);
    Ok(files)
}

/// Sample each dimension in `n_list` and tabulate measured moments
/// against every prediction route in `moments_scan.csv`.
pub fn run_moments(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunnerError> {
    let start = Instant::now();
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|source| RunnerError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let dims = config
        .n_list
        .clone()
        .unwrap_or_else(|| vec![config.params.n]);

    let mut text = seed_comment(config.master_seed);
    text.push_str(
        "n,q,tau,empirical,empirical_scaled,exact,exact_scaled,asymptote,corrected_asymptote\n",
    );
    let mut per_n = BTreeMap::new();
    for &n in &dims {
        let sub = config.for_dimension(n)?;
        let ctx = TheoryContext::new(sub.params)?;
        let stats = collect_statistics(&sub, None)?;
        let rows = moment_comparison(&stats.moments, &ctx)?;
        for row in &rows {
            let scale = (n as f64).powf(row.tau);
            let _ = writeln!(
                text,
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                n,
                row.q,
                row.tau,
                row.observed,
                row.scaled_observed,
                row.exact,
                row.exact * scale,
                row.asymptote,
                row.corrected_asymptote,
            );
        }
        per_n.insert(
            n.to_string(),
            serde_json::json!({
                "failed_realizations": stats.failed,
                "eigenfunctions": stats.eigenfunctions,
            }),
        );
    }
    let csv_path = out_dir.join("moments_scan.csv");
    write_file(&csv_path, &text)?;

    #[derive(Serialize)]
    struct MomentsMeta<'a> {
        schema: &'static str,
        config: &'a ExperimentConfig,
        dimensions: Vec<usize>,
        per_dimension: BTreeMap<String, Value>,
        wall_time_seconds: f64,
    }
    let meta = MomentsMeta {
        schema: MOMENTS_SCHEMA,
        config,
        dimensions: dims,
        per_dimension: per_n,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let meta_path = out_dir.join("meta.json");
    write_file(
        &meta_path,
        &(serde_json::to_string_pretty(&meta).map_err(|e| RunnerError::Internal {
            detail: format!("metadata serialization: {e}"),
        })? + "\n"),
    )?;
    Ok(vec![csv_path, meta_path])
}

/// Outcome of a comparison run.
#[derive(Debug, Clone)]
pub struct CompareSummary {
    /// Whether every configured threshold held.
    pub pass: bool,
    /// Human-readable descriptions of each violation.
    pub violations: Vec<String>,
    /// Files written.
    pub files: Vec<PathBuf>,
}

fn meta_field<'v>(meta: &'v Value, key: &str, path: &Path) -> Result<&'v Value, RunnerError> {
    meta.get(key)
        .ok_or_else(|| schema(format!("{} has no field '{}'", path.display(), key)))
}

/// Fit persisted sample artifacts against the predictions and apply the
/// configured thresholds. Writes one `fit_<name>.json` per comparison.
pub fn run_compare(
    config: &ExperimentConfig,
    sample_dir: &Path,
    out_dir: &Path,
) -> Result<CompareSummary, RunnerError> {
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|source| RunnerError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let meta_path = sample_dir.join("meta.json");
    let meta: Value = serde_json::from_str(&read_file(&meta_path)?)
        .map_err(|e| schema(format!("{} is not valid JSON: {e}", meta_path.display())))?;
    if meta_field(&meta, "schema", &meta_path)? != SAMPLE_SCHEMA {
        return Err(schema(format!(
            "field 'schema' in {} is {}, expected \"{}\"",
            meta_path.display(),
            meta["schema"],
            SAMPLE_SCHEMA
        )));
    }
    let sample_config: ExperimentConfig =
        serde_json::from_value(meta_field(&meta, "config", &meta_path)?.clone())
            .map_err(|e| schema(format!("field 'config' in {}: {e}", meta_path.display())))?;
    for (field, ours, theirs) in [
        ("params.n", config.params.n as f64, sample_config.params.n as f64),
        (
            "params.gamma_exp",
            config.params.gamma_exp,
            sample_config.params.gamma_exp,
        ),
        (
            "params.epsilon",
            config.params.epsilon,
            sample_config.params.epsilon,
        ),
    ] {
        if ours != theirs {
            return Err(schema(format!(
                "field '{field}' differs: config has {ours}, sample artifacts have {theirs}"
            )));
        }
    }

    let ctx = TheoryContext::new(config.params)?;
    let thresholds = config.thresholds;
    let mut violations = Vec::new();
    let mut files = Vec::new();
    let config_json = serde_json::to_value(config).unwrap_or(Value::Null);

    // Histogram fits, one per persisted mode.
    for mode in &sample_config.modes {
        let label = mode.label();
        let hist_path = sample_dir.join(format!("hist_{label}.csv"));
        let rows = read_csv(&hist_path, "bin_lo,bin_hi,count")?;
        let binning: Binning = serde_json::from_value(
            meta_field(&meta, "binnings", &meta_path)?
                .get(label)
                .cloned()
                .ok_or_else(|| {
                    schema(format!(
                        "field 'binnings.{label}' missing from {}",
                        meta_path.display()
                    ))
                })?,
        )
        .map_err(|e| schema(format!("field 'binnings.{label}': {e}")))?;
        if rows.len() != binning.bins() {
            return Err(schema(format!(
                "{} has {} rows but the recorded binning has {} bins",
                hist_path.display(),
                rows.len(),
                binning.bins()
            )));
        }
        let edges = binning.edges();
        let mut counts = Vec::with_capacity(rows.len());
        for (k, row) in rows.iter().enumerate() {
            if row.len() != 3 {
                return Err(schema(format!(
                    "in {} row {}: expected 3 fields, found {}",
                    hist_path.display(),
                    k + 1,
                    row.len()
                )));
            }
            let lo: f64 = parse_field(&row[0], "number (bin_lo)", &hist_path, k)?;
            let tol = 1e-9 * (1.0 + edges[k].abs());
            if (lo - edges[k]).abs() > tol {
                return Err(schema(format!(
                    "in {} row {}: field 'bin_lo' is {lo}, metadata binning expects {}",
                    hist_path.display(),
                    k + 1,
                    edges[k]
                )));
            }
            counts.push(parse_field::<u64>(&row[2], "count", &hist_path, k)?);
        }
        let hstats = meta_field(&meta, "histograms", &meta_path)?
            .get(label)
            .cloned()
            .ok_or_else(|| {
                schema(format!(
                    "field 'histograms.{label}' missing from {}",
                    meta_path.display()
                ))
            })?;
        let underflow = hstats.get("underflow").and_then(Value::as_u64).unwrap_or(0);
        let overflow = hstats.get("overflow").and_then(Value::as_u64).unwrap_or(0);
        let hist = Histogram::from_parts(binning, counts, underflow, overflow)?;

        // Model density of the recorded variable: the tail histogram
        // records |z| of a symmetric density, hence the fold by two.
        let m = *mode;
        let ctx_ref = &ctx;
        let model = move |x: f64| {
            let p = ctx_ref.distribution_center(m, x).unwrap_or(f64::NAN);
            if matches!(m, NormalizationMode::Tail) {
                2.0 * p
            } else {
                p
            }
        };
        let mut report = chi2_against_density(&hist, model, thresholds.min_expected, None)?;
        let pass = report.chi2_per_dof <= thresholds.max_chi2_per_dof;
        if !pass {
            violations.push(format!(
                "{label} histogram: chi2/dof = {:.3} exceeds {}",
                report.chi2_per_dof, thresholds.max_chi2_per_dof
            ));
        }
        report.metadata.insert("mode".into(), Value::from(label));
        report
            .metadata
            .insert("threshold_max_chi2_per_dof".into(), Value::from(thresholds.max_chi2_per_dof));
        report.metadata.insert("pass".into(), Value::from(pass));
        report
            .metadata
            .insert("sample_master_seed".into(), Value::from(sample_config.master_seed));
        report.metadata.insert("config".into(), config_json.clone());
        let path = out_dir.join(format!("fit_{label}.json"));
        write_json(&path, &report)?;
        files.push(path);
    }

    // Moment comparison.
    let moments_path = sample_dir.join("moments.csv");
    let rows = read_csv(&moments_path, "q,sum,count")?;
    let mut orders = Vec::new();
    let mut sums = Vec::new();
    let mut count: Option<u64> = None;
    for (k, row) in rows.iter().enumerate() {
        if row.len() != 3 {
            return Err(schema(format!(
                "in {} row {}: expected 3 fields, found {}",
                moments_path.display(),
                k + 1,
                row.len()
            )));
        }
        orders.push(parse_field::<f64>(&row[0], "number (q)", &moments_path, k)?);
        sums.push(parse_field::<f64>(&row[1], "number (sum)", &moments_path, k)?);
        let c = parse_field::<u64>(&row[2], "count", &moments_path, k)?;
        match count {
            None => count = Some(c),
            Some(prev) if prev != c => {
                return Err(schema(format!(
                    "in {} row {}: field 'count' is {c}, earlier rows say {prev}",
                    moments_path.display(),
                    k + 1
                )));
            }
            _ => {}
        }
    }
    for q in &config.moment_orders {
        if !orders.iter().any(|o| (o - q).abs() < 1e-12) {
            return Err(schema(format!(
                "moment order q = {q} requested by the config is missing from {}",
                moments_path.display()
            )));
        }
    }
    let acc = MomentAccumulator::from_parts(orders, sums, count.unwrap_or(0))?;
    let moment_rows = moment_comparison(&acc, &ctx)?;
    for row in &moment_rows {
        if row.rel_error_exact > thresholds.max_moment_rel_error {
            violations.push(format!(
                "moment q = {}: relative error {:.4} against the exact prediction exceeds {}",
                row.q, row.rel_error_exact, thresholds.max_moment_rel_error
            ));
        }
    }
    #[derive(Serialize)]
    struct MomentsFit<'a> {
        schema: &'static str,
        rows: &'a [crate::compare::MomentComparison],
        threshold_max_moment_rel_error: f64,
        pass: bool,
        violations: &'a [String],
        config: &'a Value,
    }
    let moment_violations: Vec<String> = violations
        .iter()
        .filter(|v| v.starts_with("moment"))
        .cloned()
        .collect();
    let path = out_dir.join("fit_moments.json");
    write_json(
        &path,
        &MomentsFit {
            schema: "rpdist-fit-moments-v1",
            rows: &moment_rows,
            threshold_max_moment_rel_error: thresholds.max_moment_rel_error,
            pass: moment_violations.is_empty(),
            violations: &moment_violations,
            config: &config_json,
        },
    )?;
    files.push(path);

    // Lorentzian width of the profile, when one was persisted.
    let profile_path = sample_dir.join("profile.csv");
    if profile_path.exists() {
        let rows = read_csv(&profile_path, "delta_lo,delta_hi,sum_sq,count")?;
        let half_width = meta_field(&meta, "profile_half_width", &meta_path)?
            .as_f64()
            .ok_or_else(|| {
                schema(format!(
                    "field 'profile_half_width' in {} is not a number",
                    meta_path.display()
                ))
            })?;
        let outside = meta_field(&meta, "profile_outside", &meta_path)?
            .as_u64()
            .unwrap_or(0);
        let mut sums = Vec::with_capacity(rows.len());
        let mut counts = Vec::with_capacity(rows.len());
        for (k, row) in rows.iter().enumerate() {
            if row.len() != 4 {
                return Err(schema(format!(
                    "in {} row {}: expected 4 fields, found {}",
                    profile_path.display(),
                    k + 1,
                    row.len()
                )));
            }
            sums.push(parse_field::<f64>(&row[2], "number (sum_sq)", &profile_path, k)?);
            counts.push(parse_field::<u64>(&row[3], "count", &profile_path, k)?);
        }
        let profile = ProfileAccumulator::from_parts(half_width, sums, counts, outside)?;
        let predicted = ctx.delta();
        #[derive(Serialize)]
        struct ProfileFit<'a> {
            schema: &'static str,
            fit: Option<crate::compare::LorentzianFit>,
            predicted_width: f64,
            rel_error: Option<f64>,
            threshold_max_width_rel_error: f64,
            pass: bool,
            detail: Option<String>,
            config: &'a Value,
        }
        let report = match fit_lorentzian_width(&profile, PROFILE_FIT_MIN_COUNT) {
            Ok(fit) => {
                let rel = (fit.width / predicted - 1.0).abs();
                let pass = rel <= thresholds.max_width_rel_error;
                if !pass {
                    violations.push(format!(
                        "profile width: fitted {} vs predicted {predicted} (relative error {:.4} exceeds {})",
                        fit.width, rel, thresholds.max_width_rel_error
                    ));
                }
                ProfileFit {
                    schema: "rpdist-fit-profile-v1",
                    fit: Some(fit),
                    predicted_width: predicted,
                    rel_error: Some(rel),
                    threshold_max_width_rel_error: thresholds.max_width_rel_error,
                    pass,
                    detail: None,
                    config: &config_json,
                }
            }
            Err(CompareError::Degenerate { detail }) => {
                violations.push(format!("profile width fit is degenerate: {detail}"));
                ProfileFit {
                    schema: "rpdist-fit-profile-v1",
                    fit: None,
                    predicted_width: predicted,
                    rel_error: None,
                    threshold_max_width_rel_error: thresholds.max_width_rel_error,
                    pass: false,
                    detail: Some(detail),
                    config: &config_json,
                }
            }
            Err(e) => return Err(e.into()),
        };
        let path = out_dir.join("fit_profile.json");
        write_json(&path, &report)?;
        files.push(path);
    }

    Ok(CompareSummary {
        pass: violations.is_empty(),
        violations,
        files,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunnerError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| RunnerError::Internal {
        detail: format!("serialization for {}: {e}", path.display()),
    })?;
    write_file(path, &(text + "\n"))
}

/// Render a text report of whatever artifacts `dir` holds, write it to
/// `report.txt`, and return the text.
pub fn run_report(dir: &Path) -> Result<String, RunnerError> {
    let mut out = String::new();
    let mut found = false;

    let meta_path = dir.join("meta.json");
    if meta_path.exists() {
        found = true;
        let meta: Value = serde_json::from_str(&read_file(&meta_path)?)
            .map_err(|e| schema(format!("{} is not valid JSON: {e}", meta_path.display())))?;
        let _ = writeln!(out, "== run metadata ==");
        if let Some(s) = meta.get("schema").and_then(Value::as_str) {
            let _ = writeln!(out, "schema: {s}");
        }
        if let Some(c) = meta.get("config") {
            let p = &c["params"];
            let _ = writeln!(
                out,
                "n = {}, gamma_exp = {}, epsilon = {}",
                p["n"], p["gamma_exp"], p["epsilon"]
            );
            let _ = writeln!(
                out,
                "master_seed = {}, realizations = {}",
                c["master_seed"], c["realizations"]
            );
        }
        for key in ["failed_realizations", "eigenfunctions", "resolved_solver"] {
            if let Some(v) = meta.get(key) {
                let _ = writeln!(out, "{key} = {v}");
            }
        }
        out.push('\n');
    }

    for label in ["raw", "bulk", "tail"] {
        let path = dir.join(format!("fit_{label}.json"));
        if !path.exists() {
            continue;
        }
        found = true;
        let fit: FitReport = serde_json::from_str(&read_file(&path)?)
            .map_err(|e| schema(format!("{}: {e}", path.display())))?;
        let _ = writeln!(out, "== {label} histogram vs prediction ==");
        let _ = writeln!(
            out,
            "chi2 = {:.3} over {} dof -> chi2/dof = {:.3}",
            fit.chi2, fit.dof, fit.chi2_per_dof
        );
        if let Some(d) = fit.ks_distance {
            let _ = writeln!(out, "ks_distance = {d:.5}");
        }
        if let Some(pass) = fit.metadata.get("pass").and_then(Value::as_bool) {
            let _ = writeln!(out, "pass = {pass}");
        }
        out.push('\n');
    }

    let path = dir.join("fit_moments.json");
    if path.exists() {
        found = true;
        let fit: Value = serde_json::from_str(&read_file(&path)?)
            .map_err(|e| schema(format!("{}: {e}", path.display())))?;
        let _ = writeln!(out, "== moments vs prediction ==");
        let _ = writeln!(
            out,
            "{:>8} {:>14} {:>14} {:>10}",
            "q", "observed", "exact", "rel_error"
        );
        if let Some(rows) = fit.get("rows").and_then(Value::as_array) {
            for row in rows {
                let _ = writeln!(
                    out,
                    "{:>8} {:>14.6e} {:>14.6e} {:>10.4}",
                    row["q"],
                    row["observed"].as_f64().unwrap_or(f64::NAN),
                    row["exact"].as_f64().unwrap_or(f64::NAN),
                    row["rel_error_exact"].as_f64().unwrap_or(f64::NAN),
                );
            }
        }
        if let Some(pass) = fit.get("pass").and_then(Value::as_bool) {
            let _ = writeln!(out, "pass = {pass}");
        }
        out.push('\n');
    }

    let path = dir.join("fit_profile.json");
    if path.exists() {
        found = true;
        let fit: Value = serde_json::from_str(&read_file(&path)?)
            .map_err(|e| schema(format!("{}: {e}", path.display())))?;
        let _ = writeln!(out, "== spreading-width profile ==");
        if let Some(f) = fit.get("fit").filter(|f| !f.is_null()) {
            let _ = writeln!(
                out,
                "fitted width = {:e}, predicted = {:e}, rel_error = {:.4}",
                f["width"].as_f64().unwrap_or(f64::NAN),
                fit["predicted_width"].as_f64().unwrap_or(f64::NAN),
                fit["rel_error"].as_f64().unwrap_or(f64::NAN),
            );
        } else if let Some(d) = fit.get("detail").and_then(Value::as_str) {
            let _ = writeln!(out, "fit degenerate: {d}");
        }
        if let Some(pass) = fit.get("pass").and_then(Value::as_bool) {
            let _ = writeln!(out, "pass = {pass}");
        }
        out.push('\n');
    }

    let scan = dir.join("moments_scan.csv");
    if scan.exists() {
        found = true;
        let rows = read_csv(
            &scan,
            "n,q,tau,empirical,empirical_scaled,exact,exact_scaled,asymptote,corrected_asymptote",
        )?;
        let _ = writeln!(out, "== moment size scan ==");
        let _ = writeln!(out, "{} rows in moments_scan.csv", rows.len());
        out.push('\n');
    }

    if !found {
        return Err(schema(format!(
            "no artifacts to report in {}",
            dir.display()
        )));
    }
    let path = dir.join("report.txt");
    write_file(&path, &out)?;
    Ok(out)
}
