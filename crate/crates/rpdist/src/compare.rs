//! Quantitative comparison of measured statistics against predictions.
//!
//! Provides the exact Kolmogorov–Smirnov distance of a sample against a
//! model CDF, Pearson χ² of a histogram against a model density (with
//! per-bin expected counts obtained by quadrature), a two-sample χ²
//! homogeneity test for scaling-collapse checks, a Lorentzian width fit
//! for the mean-squared-component profile, and side-by-side tables of
//! measured versus predicted participation moments.

use crate::empirics::{Histogram, MomentAccumulator, ProfileAccumulator};
use crate::specfun::{integrate, Interval, QuadratureSpec, SpecFunError};
use crate::theory::TheoryContext;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::ops::Range;
use thiserror::Error;

/// Errors from comparison routines.
#[derive(Debug, Error)]
pub enum CompareError {
    /// Inputs are empty, non-finite, or structurally incompatible.
    #[error("invalid comparison input: {detail}")]
    InvalidInput {
        /// Human-readable description.
        detail: String,
    },
    /// The data cannot support the requested fit or statistic.
    #[error("degenerate comparison: {detail}")]
    Degenerate {
        /// Human-readable description.
        detail: String,
    },
    /// Evaluating the model's bin masses failed.
    #[error(transparent)]
    Quadrature(#[from] SpecFunError),
    /// A prediction could not be evaluated.
    #[error(transparent)]
    Theory(#[from] crate::theory::TheoryError),
}

/// One bin of a goodness-of-fit comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinResidual {
    /// Left bin edge.
    pub bin_lo: f64,
    /// Right bin edge.
    pub bin_hi: f64,
    /// Observed count.
    pub observed: f64,
    /// Expected count under the model.
    pub expected: f64,
    /// Pearson residual `(observed − expected)/√expected`.
    pub pearson: f64,
}

/// Outcome of a distribution comparison, serializable as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Exact KS distance, when a sample-level comparison was run.
    pub ks_distance: Option<f64>,
    /// Pearson χ² over the included bins.
    pub chi2: f64,
    /// Number of degrees of freedom backing `chi2`.
    pub dof: usize,
    /// `chi2 / dof`.
    pub chi2_per_dof: f64,
    /// Per-bin detail for the included bins.
    pub residuals: Vec<BinResidual>,
    /// Free-form context: totals, excluded bins, parameters.
    pub metadata: Map<String, Value>,
}

/// Exact two-sided Kolmogorov–Smirnov distance between a sample and a
/// model CDF. Sorts the sample in place.
///
/// The CDF must be nondecreasing with values in `[0, 1]`; it is probed
/// only at the sample points.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> Result<f64, CompareError> {
    if samples.is_empty() {
        return Err(CompareError::InvalidInput {
            detail: "KS distance of an empty sample".to_string(),
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(CompareError::InvalidInput {
            detail: "KS sample contains non-finite values".to_string(),
        });
    }
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut dist = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        if !(-1e-9..=1.0 + 1e-9).contains(&f) {
            return Err(CompareError::InvalidInput {
                detail: format!("model CDF returned {f} at x = {x}"),
            });
        }
        let f = f.clamp(0.0, 1.0);
        let below = i as f64 / n;
        let above = (i + 1) as f64 / n;
        dist = dist.max((f - below).max(above - f));
    }
    Ok(dist)
}

/// Pearson χ² of a histogram against a model density.
///
/// `model` is the probability density of the *recorded* variable (for
/// absolute-value binnings of a symmetric signed quantity, the caller
/// folds: twice the signed density). Expected counts are
/// `total · ∫_bin model`, with the integral done adaptively per bin.
/// Only bins in `bin_range` (defaulting to all) enter — restrict it
/// when the model is valid on part of the recorded range only, e.g. a
/// tail law that diverges at the origin. Bins whose expected count
/// falls below `min_expected` are excluded from the statistic and
/// tallied in the metadata; `dof` is the number of included bins minus
/// one, the classical convention for a goodness-of-fit test of a fully
/// specified density, so at least two bins must survive exclusion.
pub fn chi2_against_density(
    hist: &Histogram,
    model: impl Fn(f64) -> f64,
    min_expected: f64,
    bin_range: Option<Range<usize>>,
) -> Result<FitReport, CompareError> {
    if !(min_expected >= 0.0) {
        return Err(CompareError::InvalidInput {
            detail: format!("min_expected must be ≥ 0, got {min_expected}"),
        });
    }
    let total = hist.total();
    if total == 0 {
        return Err(CompareError::InvalidInput {
            detail: "χ² of an empty histogram".to_string(),
        });
    }
    let range = bin_range.unwrap_or(0..hist.binning().bins());
    if range.start >= range.end || range.end > hist.binning().bins() {
        return Err(CompareError::InvalidInput {
            detail: format!(
                "bin range {range:?} is invalid for {} bins",
                hist.binning().bins()
            ),
        });
    }
    let edges = hist.binning().edges();
    let spec = QuadratureSpec {
        rel_tol: 1e-8,
        abs_tol: 1e-300,
        max_subdivisions: 100,
        ..QuadratureSpec::default()
    };
    let mut residuals = Vec::new();
    let mut chi2 = 0.0;
    let mut excluded_bins = 0usize;
    let mut excluded_observed = 0u64;
    for (k, w) in edges.windows(2).enumerate() {
        if !range.contains(&k) {
            continue;
        }
        let mass = integrate(&model, Interval::Finite(w[0], w[1]), &spec)?.value;
        let expected = total as f64 * mass;
        let observed = hist.counts()[k];
        if expected < min_expected || expected <= 0.0 {
            excluded_bins += 1;
            excluded_observed += observed;
            continue;
        }
        let pearson = (observed as f64 - expected) / expected.sqrt();
        chi2 += pearson * pearson;
        residuals.push(BinResidual {
            bin_lo: w[0],
            bin_hi: w[1],
            observed: observed as f64,
            expected,
            pearson,
        });
    }
    if residuals.len() < 2 {
        return Err(CompareError::Degenerate {
            detail: "fewer than two bins reach the minimum expected count".to_string(),
        });
    }
    let dof = residuals.len() - 1;
    let mut metadata = Map::new();
    metadata.insert("total_samples".into(), Value::from(total));
    metadata.insert("min_expected".into(), Value::from(min_expected));
    metadata.insert(
        "bin_range".into(),
        Value::from(vec![range.start, range.end]),
    );
    metadata.insert("excluded_bins".into(), Value::from(excluded_bins));
    metadata.insert("excluded_observed".into(), Value::from(excluded_observed));
    metadata.insert("underflow".into(), Value::from(hist.underflow()));
    metadata.insert("overflow".into(), Value::from(hist.overflow()));
    Ok(FitReport {
        ks_distance: None,
        chi2,
        dof,
        chi2_per_dof: chi2 / dof as f64,
        residuals,
        metadata,
    })
}

/// Two-sample χ² homogeneity test between histograms with identical
/// binnings — the workhorse of scaling-collapse checks.
///
/// Only bins in `bin_range` (defaulting to all) enter. Adjacent bins
/// are pooled left to right until each pooled cell holds at least
/// `min_total` counts from the two samples combined; a sparse remainder
/// joins the last cell. `dof = cells − 1`. Residual rows describe the
/// first sample against its expected share of each pooled cell.
pub fn chi2_two_sample(
    first: &Histogram,
    second: &Histogram,
    bin_range: Option<Range<usize>>,
    min_total: u64,
) -> Result<FitReport, CompareError> {
    if first.binning() != second.binning() {
        return Err(CompareError::InvalidInput {
            detail: "two-sample χ² requires identical binnings".to_string(),
        });
    }
    let bins = first.binning().bins();
    let range = bin_range.unwrap_or(0..bins);
    if range.start >= range.end || range.end > bins {
        return Err(CompareError::InvalidInput {
            detail: format!("bin range {range:?} invalid for {bins} bins"),
        });
    }
    let edges = first.binning().edges();

    // Pool adjacent bins until each cell is populated enough.
    struct Cell {
        lo: f64,
        hi: f64,
        r: u64,
        s: u64,
    }
    let mut cells: Vec<Cell> = Vec::new();
    let mut current: Option<Cell> = None;
    for k in range {
        let (r, s) = (first.counts()[k], second.counts()[k]);
        match current.as_mut() {
            None => {
                current = Some(Cell {
                    lo: edges[k],
                    hi: edges[k + 1],
                    r,
                    s,
                })
            }
            Some(c) => {
                c.hi = edges[k + 1];
                c.r += r;
                c.s += s;
            }
        }
        if current.as_ref().is_some_and(|c| c.r + c.s >= min_total) {
            cells.push(current.take().unwrap());
        }
    }
    match current.take() {
        Some(rest) => match cells.last_mut() {
            // A sparse remainder joins the previous cell.
            Some(last) => {
                last.hi = rest.hi;
                last.r += rest.r;
                last.s += rest.s;
            }
            None => {
                if rest.r + rest.s > 0 {
                    cells.push(rest);
                }
            }
        },
        None => {}
    }
    if cells.len() < 2 {
        return Err(CompareError::Degenerate {
            detail: "fewer than two populated cells after pooling".to_string(),
        });
    }

    let r_total: u64 = cells.iter().map(|c| c.r).sum();
    let s_total: u64 = cells.iter().map(|c| c.s).sum();
    if r_total == 0 || s_total == 0 {
        return Err(CompareError::Degenerate {
            detail: "one sample is empty over the compared range".to_string(),
        });
    }
    let grand = (r_total + s_total) as f64;
    let mut chi2 = 0.0;
    let mut residuals = Vec::with_capacity(cells.len());
    for c in &cells {
        let cell_total = (c.r + c.s) as f64;
        let e_r = cell_total * r_total as f64 / grand;
        let e_s = cell_total * s_total as f64 / grand;
        let d_r = c.r as f64 - e_r;
        let d_s = c.s as f64 - e_s;
        chi2 += d_r * d_r / e_r + d_s * d_s / e_s;
        residuals.push(BinResidual {
            bin_lo: c.lo,
            bin_hi: c.hi,
            observed: c.r as f64,
            expected: e_r,
            pearson: d_r / e_r.sqrt(),
        });
    }
    let dof = cells.len() - 1;
    let mut metadata = Map::new();
    metadata.insert("first_total".into(), Value::from(r_total));
    metadata.insert("second_total".into(), Value::from(s_total));
    metadata.insert("pooled_cells".into(), Value::from(cells.len()));
    metadata.insert("min_total".into(), Value::from(min_total));
    Ok(FitReport {
        ks_distance: None,
        chi2,
        dof,
        chi2_per_dof: chi2 / dof as f64,
        residuals,
        metadata,
    })
}

/// Result of fitting a Lorentzian `a/(Δ² + Γ²)` to a mean-squared
/// component profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianFit {
    /// Fitted width Γ.
    pub width: f64,
    /// Fitted numerator a.
    pub amplitude: f64,
    /// Coefficient of determination of the underlying linear fit.
    pub r_squared: f64,
    /// Number of profile bins used.
    pub bins_used: usize,
}

/// Fit a Lorentzian to a profile by straightening it: if
/// `m(Δ) = a/(Δ² + Γ²)` then `1/m` is linear in `Δ²` with slope `1/a`
/// and intercept `Γ²/a`, so an ordinary least-squares line through
/// `(Δ², 1/m)` recovers both parameters. Bins with fewer than
/// `min_count` entries are skipped.
pub fn fit_lorentzian_width(
    profile: &ProfileAccumulator,
    min_count: u64,
) -> Result<LorentzianFit, CompareError> {
    let centers = profile.centers();
    let means = profile.mean_square();
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for ((&c, m), &cnt) in centers.iter().zip(means).zip(profile.counts()) {
        if cnt >= min_count && m > 0.0 {
            pts.push((c * c, 1.0 / m));
        }
    }
    if pts.len() < 3 {
        return Err(CompareError::Degenerate {
            detail: format!("{} usable profile bins; need at least 3", pts.len()),
        });
    }
    let n = pts.len() as f64;
    let mean_u: f64 = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_v: f64 = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut suu = 0.0;
    let mut suv = 0.0;
    let mut svv = 0.0;
    for &(u, v) in &pts {
        suu += (u - mean_u) * (u - mean_u);
        suv += (u - mean_u) * (v - mean_v);
        svv += (v - mean_v) * (v - mean_v);
    }
    if suu <= 0.0 {
        return Err(CompareError::Degenerate {
            detail: "profile bins share a single |Δ|; the line is undetermined".to_string(),
        });
    }
    let slope = suv / suu;
    let intercept = mean_v - slope * mean_u;
    if slope <= 0.0 || intercept <= 0.0 {
        return Err(CompareError::Degenerate {
            detail: format!(
                "profile is not Lorentzian-like (slope {slope:e}, intercept {intercept:e})"
            ),
        });
    }
    let r_squared = if svv > 0.0 { (suv * suv) / (suu * svv) } else { 1.0 };
    Ok(LorentzianFit {
        width: (intercept / slope).sqrt(),
        amplitude: 1.0 / slope,
        r_squared,
        bins_used: pts.len(),
    })
}

/// One row of a measured-versus-predicted moment table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentComparison {
    /// Moment order.
    pub q: f64,
    /// Scaling exponent `τ(q)`.
    pub tau: f64,
    /// Measured `I_q` (mean over eigenfunctions).
    pub observed: f64,
    /// Exact finite-`n` prediction.
    pub exact: f64,
    /// `|observed/exact − 1|`.
    pub rel_error_exact: f64,
    /// `observed · n^{τ(q)}` — the quantity that converges to `C_q`.
    pub scaled_observed: f64,
    /// Size-free asymptote the scaled value approaches.
    pub asymptote: f64,
    /// Asymptote including the finite-size correction where defined.
    pub corrected_asymptote: f64,
    /// `|scaled_observed/corrected_asymptote − 1|`.
    pub rel_error_corrected: f64,
}

/// Build the measured-versus-predicted table for every order in the
/// accumulator.
pub fn moment_comparison(
    acc: &MomentAccumulator,
    ctx: &TheoryContext,
) -> Result<Vec<MomentComparison>, CompareError> {
    if acc.count() == 0 {
        return Err(CompareError::InvalidInput {
            detail: "moment comparison with no recorded eigenfunctions".to_string(),
        });
    }
    let n = ctx.params().n as f64;
    let predictions = ctx.moment_predictions(acc.orders())?;
    let mut rows = Vec::with_capacity(predictions.len());
    for (pred, &observed) in predictions.iter().zip(&acc.means()) {
        let scale = n.powf(pred.tau);
        let scaled_observed = observed * scale;
        let asymptote = pred.asymptotic * scale;
        let corrected_asymptote = pred.corrected * scale;
        rows.push(MomentComparison {
            q: pred.q,
            tau: pred.tau,
            observed,
            exact: pred.exact,
            rel_error_exact: (observed / pred.exact - 1.0).abs(),
            scaled_observed,
            asymptote,
            corrected_asymptote,
            rel_error_corrected: (scaled_observed / corrected_asymptote - 1.0).abs(),
        });
    }
    Ok(rows)
}
