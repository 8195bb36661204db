//! Measurement of eigenfunction-component statistics from samples.
//!
//! The flow is: pick which eigenfunctions of a realization enter the
//! statistics (an [`EnergyWindow`]), rescale their components
//! ([`scaled_components`]), and feed them into mergeable accumulators —
//! [`Histogram`] for distributions, [`MomentAccumulator`] for
//! participation moments, [`ProfileAccumulator`] for the mean squared
//! component as a function of the distance between an eigenvalue and a
//! site energy. Every accumulator merges exactly (plain sums), so
//! parallel runs reduce deterministically when merged in a fixed order.

use crate::eigensolve::EigenDecomposition;
use serde::{Deserialize, Serialize};
use std::ops::Range;
use thiserror::Error;

/// Errors from measurement configuration or accumulator misuse.
#[derive(Debug, Error)]
pub enum EmpiricsError {
    /// A window, binning, or order list failed validation.
    #[error("invalid measurement configuration: {detail}")]
    InvalidConfig {
        /// Human-readable description.
        detail: String,
    },
    /// Two accumulators with different configurations were merged.
    #[error("accumulator mismatch: {detail}")]
    Mismatch {
        /// Human-readable description.
        detail: String,
    },
}

/// Which eigenfunctions of a realization enter the statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnergyWindow {
    /// The central `⌊fraction·n⌋` eigenfunctions by rank (at least one),
    /// centered on rank `n/2` — the middle of the spectrum, where the
    /// level density is flattest.
    CentralFraction {
        /// Fraction of the spectrum to keep, in `(0, 1]`.
        fraction: f64,
    },
    /// An explicit half-open rank range `start..end`.
    RankRange {
        /// First rank (ascending eigenvalue order).
        start: usize,
        /// One past the last rank.
        end: usize,
    },
    /// All eigenfunctions whose eigenvalue lies in `[lo, hi)`.
    EnergyInterval {
        /// Lower edge (inclusive).
        lo: f64,
        /// Upper edge (exclusive).
        hi: f64,
    },
}

impl EnergyWindow {
    /// Resolve the window to a rank range using the dimension alone.
    ///
    /// Works for the rank-based variants; an energy interval needs the
    /// spectrum and must go through [`EnergyWindow::select`].
    pub fn rank_range(&self, n: usize) -> Result<Range<usize>, EmpiricsError> {
        match *self {
            EnergyWindow::CentralFraction { fraction } => {
                if !(fraction > 0.0 && fraction <= 1.0) {
                    return Err(EmpiricsError::InvalidConfig {
                        detail: format!("window fraction must lie in (0, 1], got {fraction}"),
                    });
                }
                let count = ((n as f64 * fraction).floor() as usize).clamp(1, n);
                let start = (n - count) / 2;
                Ok(start..start + count)
            }
            EnergyWindow::RankRange { start, end } => {
                if start >= end || end > n {
                    return Err(EmpiricsError::InvalidConfig {
                        detail: format!(
                            "rank range {start}..{end} is empty or exceeds dimension {n}"
                        ),
                    });
                }
                Ok(start..end)
            }
            EnergyWindow::EnergyInterval { .. } => Err(EmpiricsError::InvalidConfig {
                detail: "an energy interval is resolved against a spectrum; use select".to_string(),
            }),
        }
    }

    /// Resolve the window against an ascending spectrum.
    pub fn select(&self, eigenvalues: &[f64]) -> Result<Range<usize>, EmpiricsError> {
        match *self {
            EnergyWindow::EnergyInterval { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(EmpiricsError::InvalidConfig {
                        detail: format!("energy interval [{lo}, {hi}) is not a valid interval"),
                    });
                }
                let start = eigenvalues.partition_point(|&e| e < lo);
                let end = eigenvalues.partition_point(|&e| e < hi);
                Ok(start..end)
            }
            _ => self.rank_range(eigenvalues.len()),
        }
    }
}

/// Iterate the rescaled components `scale·ψ_j` of every eigenfunction
/// in `ranks`, in rank order, each over all sites `j`.
///
/// Panics if `ranks` reaches outside the decomposition's stored window;
/// callers pass the same range they solved for.
pub fn scaled_components<'a>(
    decomp: &'a EigenDecomposition,
    ranks: Range<usize>,
    scale: f64,
) -> impl Iterator<Item = f64> + 'a {
    let stored = decomp.stored_ranks();
    assert!(
        ranks.start >= stored.start && ranks.end <= stored.end,
        "requested ranks {ranks:?} outside stored window {stored:?}"
    );
    ranks.flat_map(move |alpha| decomp.eigenvector(alpha).iter().map(move |&c| scale * c))
}

/// Bin layout for a [`Histogram`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Binning {
    /// Equal-width bins of the signed value over `[lo, hi)`.
    Uniform {
        /// Left edge of the first bin.
        lo: f64,
        /// Right edge of the last bin (exclusive).
        hi: f64,
        /// Number of bins.
        bins: usize,
    },
    /// Bins of `|x|` over `[0, max_abs)` that are uniform in `x²`,
    /// concentrating resolution at large `|x|` — suited to far-tail
    /// densities whose natural argument is the squared value.
    UniformInSquare {
        /// Right edge of the last bin in `|x|` (exclusive).
        max_abs: f64,
        /// Number of bins.
        bins: usize,
    },
}

impl Binning {
    fn validate(&self) -> Result<(), EmpiricsError> {
        let ok = match *self {
            Binning::Uniform { lo, hi, bins } => lo.is_finite() && hi.is_finite() && lo < hi && bins >= 1,
            Binning::UniformInSquare { max_abs, bins } => {
                max_abs.is_finite() && max_abs > 0.0 && bins >= 1
            }
        };
        if ok {
            Ok(())
        } else {
            Err(EmpiricsError::InvalidConfig {
                detail: format!("invalid binning {self:?}"),
            })
        }
    }

    /// Number of bins.
    pub fn bins(&self) -> usize {
        match *self {
            Binning::Uniform { bins, .. } | Binning::UniformInSquare { bins, .. } => bins,
        }
    }

    /// The `bins + 1` bin edges in the recorded variable (the signed
    /// value for [`Binning::Uniform`], `|x|` for
    /// [`Binning::UniformInSquare`]).
    pub fn edges(&self) -> Vec<f64> {
        match *self {
            Binning::Uniform { lo, hi, bins } => (0..=bins)
                .map(|k| lo + (hi - lo) * k as f64 / bins as f64)
                .collect(),
            Binning::UniformInSquare { max_abs, bins } => (0..=bins)
                .map(|k| max_abs * (k as f64 / bins as f64).sqrt())
                .collect(),
        }
    }

    /// Bin index of a value, or `None` when it falls outside the range
    /// (`Err`-free: the histogram counts those separately). Bins are
    /// half-open `[edge_k, edge_{k+1})`.
    pub fn index(&self, x: f64) -> Option<usize> {
        match *self {
            Binning::Uniform { lo, hi, bins } => {
                if x < lo || x >= hi {
                    return None;
                }
                let k = ((x - lo) / (hi - lo) * bins as f64) as usize;
                Some(k.min(bins - 1))
            }
            Binning::UniformInSquare { max_abs, bins } => {
                let s = x * x;
                let smax = max_abs * max_abs;
                if s >= smax {
                    return None;
                }
                let k = (s / smax * bins as f64) as usize;
                Some(k.min(bins - 1))
            }
        }
    }
}

/// A counting histogram with out-of-range tallies and exact merging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    binning: Binning,
    counts: Vec<u64>,
    underflow: u64,
    overflow: u64,
}

impl Histogram {
    /// Create an empty histogram over the given binning.
    pub fn new(binning: Binning) -> Result<Self, EmpiricsError> {
        binning.validate()?;
        let bins = binning.bins();
        Ok(Histogram {
            binning,
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
        })
    }

    /// Reassemble a histogram from persisted parts (the inverse of
    /// writing its counts to disk).
    pub fn from_parts(
        binning: Binning,
        counts: Vec<u64>,
        underflow: u64,
        overflow: u64,
    ) -> Result<Self, EmpiricsError> {
        binning.validate()?;
        if counts.len() != binning.bins() {
            return Err(EmpiricsError::InvalidConfig {
                detail: format!(
                    "{} counts for a {}-bin layout",
                    counts.len(),
                    binning.bins()
                ),
            });
        }
        Ok(Histogram {
            binning,
            counts,
            underflow,
            overflow,
        })
    }

    /// Record one value. Non-finite input indicates a corrupted
    /// upstream computation and panics rather than skewing counts.
    pub fn record(&mut self, x: f64) {
        assert!(x.is_finite(), "histogram input must be finite, got {x}");
        match self.binning.index(x) {
            Some(k) => self.counts[k] += 1,
            None => {
                let below = matches!(self.binning, Binning::Uniform { lo, .. } if x < lo);
                if below {
                    self.underflow += 1;
                } else {
                    self.overflow += 1;
                }
            }
        }
    }

    /// Record every value of an iterator.
    pub fn record_all(&mut self, values: impl IntoIterator<Item = f64>) {
        for x in values {
            self.record(x);
        }
    }

    /// The bin layout.
    pub fn binning(&self) -> &Binning {
        &self.binning
    }

    /// Per-bin counts.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Values that fell below the range (always zero for the
    /// absolute-value binning).
    pub fn underflow(&self) -> u64 {
        self.underflow
    }

    /// Values that fell at or above the upper edge.
    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    /// Total number of recorded values, in or out of range.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }

    /// Empirical probability density of the recorded variable:
    /// `count / (total · bin width)`, normalized by *all* recorded
    /// values so the in-range mass matches what a model predicts for
    /// the same interval.
    pub fn density(&self) -> Vec<f64> {
        let total = self.total() as f64;
        let edges = self.binning.edges();
        self.counts
            .iter()
            .zip(edges.windows(2))
            .map(|(&c, w)| {
                if total == 0.0 {
                    0.0
                } else {
                    c as f64 / (total * (w[1] - w[0]))
                }
            })
            .collect()
    }

    /// Add another histogram's counts into this one. The binnings must
    /// be identical.
    pub fn merge(&mut self, other: &Histogram) -> Result<(), EmpiricsError> {
        if self.binning != other.binning {
            return Err(EmpiricsError::Mismatch {
                detail: format!(
                    "cannot merge histograms with binnings {:?} and {:?}",
                    self.binning, other.binning
                ),
            });
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.underflow += other.underflow;
        self.overflow += other.overflow;
        Ok(())
    }
}

/// Accumulates participation moments `Σ_j |ψ_j|^{2q}` per
/// eigenfunction, for several orders `q` at once.
///
/// The mean over eigenfunctions estimates `I_q = n·⟨|ψ_j|^{2q}⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentAccumulator {
    orders: Vec<f64>,
    sums: Vec<f64>,
    count: u64,
}

impl MomentAccumulator {
    /// Create an accumulator for the given orders. Orders must be
    /// finite and non-negative: a zero component raises `|ψ|^{2q}` to a
    /// negative power otherwise, which no finite sample supports.
    pub fn new(orders: Vec<f64>) -> Result<Self, EmpiricsError> {
        if orders.is_empty() {
            return Err(EmpiricsError::InvalidConfig {
                detail: "at least one moment order is required".to_string(),
            });
        }
        if let Some(&bad) = orders.iter().find(|q| !(q.is_finite() && **q >= 0.0)) {
            return Err(EmpiricsError::InvalidConfig {
                detail: format!("moment orders must be finite and ≥ 0, got {bad}"),
            });
        }
        let sums = vec![0.0; orders.len()];
        Ok(MomentAccumulator {
            orders,
            sums,
            count: 0,
        })
    }

    /// Reassemble an accumulator from persisted sums and a count.
    pub fn from_parts(orders: Vec<f64>, sums: Vec<f64>, count: u64) -> Result<Self, EmpiricsError> {
        let empty = Self::new(orders)?;
        if sums.len() != empty.orders.len() {
            return Err(EmpiricsError::InvalidConfig {
                detail: format!(
                    "{} sums for {} moment orders",
                    sums.len(),
                    empty.orders.len()
                ),
            });
        }
        if sums.iter().any(|s| !s.is_finite()) {
            return Err(EmpiricsError::InvalidConfig {
                detail: "moment sums must be finite".to_string(),
            });
        }
        Ok(MomentAccumulator {
            orders: empty.orders,
            sums,
            count,
        })
    }

    /// Record one eigenfunction from its component values.
    pub fn record_eigenfunction(&mut self, components: impl IntoIterator<Item = f64>) {
        let mut partial = vec![0.0f64; self.orders.len()];
        for c in components {
            let s = c * c;
            for (acc, &q) in partial.iter_mut().zip(&self.orders) {
                *acc += s.powf(q);
            }
        }
        for (total, p) in self.sums.iter_mut().zip(&partial) {
            *total += p;
        }
        self.count += 1;
    }

    /// The moment orders.
    pub fn orders(&self) -> &[f64] {
        &self.orders
    }

    /// Raw per-order sums over all recorded eigenfunctions.
    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    /// Number of eigenfunctions recorded.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Per-order means — the `I_q` estimates. Empty-count returns NaN.
    pub fn means(&self) -> Vec<f64> {
        self.sums.iter().map(|s| s / self.count as f64).collect()
    }

    /// Add another accumulator. Orders must match exactly.
    pub fn merge(&mut self, other: &MomentAccumulator) -> Result<(), EmpiricsError> {
        if self.orders != other.orders {
            return Err(EmpiricsError::Mismatch {
                detail: "cannot merge moment accumulators with different orders".to_string(),
            });
        }
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        self.count += other.count;
        Ok(())
    }
}

/// Accumulates the mean squared component as a function of
/// `Δ = e_j − E_α` (site energy minus eigenvalue), binned uniformly
/// over a symmetric interval — the empirical Breit–Wigner profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileAccumulator {
    max_abs: f64,
    bins: usize,
    sums: Vec<f64>,
    counts: Vec<u64>,
    outside: u64,
}

impl ProfileAccumulator {
    /// Create an empty profile over `Δ ∈ [−max_abs, max_abs)`.
    pub fn new(max_abs: f64, bins: usize) -> Result<Self, EmpiricsError> {
        if !(max_abs.is_finite() && max_abs > 0.0) || bins == 0 {
            return Err(EmpiricsError::InvalidConfig {
                detail: format!("invalid profile range ±{max_abs} with {bins} bins"),
            });
        }
        Ok(ProfileAccumulator {
            max_abs,
            bins,
            sums: vec![0.0; bins],
            counts: vec![0; bins],
            outside: 0,
        })
    }

    /// Reassemble a profile from persisted per-bin sums and counts.
    pub fn from_parts(
        max_abs: f64,
        sums: Vec<f64>,
        counts: Vec<u64>,
        outside: u64,
    ) -> Result<Self, EmpiricsError> {
        let empty = Self::new(max_abs, sums.len().max(1))?;
        if sums.len() != counts.len() || sums.is_empty() {
            return Err(EmpiricsError::InvalidConfig {
                detail: format!(
                    "profile needs matching nonempty sums/counts, got {}/{}",
                    sums.len(),
                    counts.len()
                ),
            });
        }
        if sums.iter().any(|s| !s.is_finite()) {
            return Err(EmpiricsError::InvalidConfig {
                detail: "profile sums must be finite".to_string(),
            });
        }
        Ok(ProfileAccumulator {
            max_abs: empty.max_abs,
            bins: sums.len(),
            sums,
            counts,
            outside,
        })
    }

    /// Record one (Δ, component) pair.
    pub fn record(&mut self, delta: f64, component: f64) {
        assert!(
            delta.is_finite() && component.is_finite(),
            "profile input must be finite, got ({delta}, {component})"
        );
        if delta < -self.max_abs || delta >= self.max_abs {
            self.outside += 1;
            return;
        }
        let t = (delta + self.max_abs) / (2.0 * self.max_abs);
        let k = ((t * self.bins as f64) as usize).min(self.bins - 1);
        self.sums[k] += component * component;
        self.counts[k] += 1;
    }

    /// Record every (site, component) pair of every eigenfunction in
    /// `ranks`, with `Δ = e_j − E_α` taken from `site_energies` (the
    /// diagonal of the sampled matrix) and the decomposition.
    pub fn accumulate(
        &mut self,
        site_energies: &[f64],
        decomp: &EigenDecomposition,
        ranks: Range<usize>,
    ) -> Result<(), EmpiricsError> {
        if site_energies.len() != decomp.dim() {
            return Err(EmpiricsError::InvalidConfig {
                detail: format!(
                    "{} site energies for dimension {}",
                    site_energies.len(),
                    decomp.dim()
                ),
            });
        }
        let stored = decomp.stored_ranks();
        if ranks.start < stored.start || ranks.end > stored.end {
            return Err(EmpiricsError::InvalidConfig {
                detail: format!("ranks {ranks:?} outside stored window {stored:?}"),
            });
        }
        for alpha in ranks {
            let energy = decomp.eigenvalue(alpha);
            let vector = decomp.eigenvector(alpha);
            for (&e_j, &c) in site_energies.iter().zip(vector) {
                self.record(e_j - energy, c);
            }
        }
        Ok(())
    }

    /// Bin centers in Δ.
    pub fn centers(&self) -> Vec<f64> {
        let width = 2.0 * self.max_abs / self.bins as f64;
        (0..self.bins)
            .map(|k| -self.max_abs + (k as f64 + 0.5) * width)
            .collect()
    }

    /// Mean squared component per bin (NaN where a bin is empty).
    pub fn mean_square(&self) -> Vec<f64> {
        self.sums
            .iter()
            .zip(&self.counts)
            .map(|(&s, &c)| s / c as f64)
            .collect()
    }

    /// Raw per-bin sums of squared components.
    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    /// Number of pairs recorded per bin.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Pairs that fell outside the profiled range.
    pub fn outside(&self) -> u64 {
        self.outside
    }

    /// Add another profile. Range and bin count must match exactly.
    pub fn merge(&mut self, other: &ProfileAccumulator) -> Result<(), EmpiricsError> {
        if self.max_abs != other.max_abs || self.bins != other.bins {
            return Err(EmpiricsError::Mismatch {
                detail: "cannot merge profiles with different layouts".to_string(),
            });
        }
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.outside += other.outside;
        Ok(())
    }
}
