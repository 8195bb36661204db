//! Eigenfunction-component statistics of the Rosenzweig–Porter random-matrix
//! ensemble.
//!
//! The Rosenzweig–Porter (RP) ensemble interpolates between integrable and
//! chaotic spectral statistics: a real symmetric N×N matrix with independent
//! Gaussian entries whose diagonal variance is 1 and whose off-diagonal
//! variance is ε²/N^γ. For 1 < γ < 2 the eigenvectors are fractal — spread
//! over ~N^{2−γ} sites — and the distribution of eigenvector components
//! interpolates between a Cauchy-shaped bulk and a heavy, Bessel-damped tail.
//!
//! This crate provides both sides of a quantitative comparison:
//!
//! * **Simulation** — seeded, reproducible sampling of RP matrices
//!   ([`ensemble`]), a self-contained dense symmetric eigensolver
//!   ([`eigensolve`]), and component-statistics collection over spectral
//!   windows ([`empirics`]).
//! * **Theory** — closed-form component densities and moments built from
//!   the Breit–Wigner spreading width and a locally Gaussian (Porter–Thomas)
//!   conditional law ([`theory`]), on top of a small special-function and
//!   quadrature toolbox ([`specfun`]).
//! * **Comparison** — KS/χ² goodness-of-fit and moment-scaling ratio tables
//!   ([`compare`]), plus a batch experiment runner with deterministic
//!   parallelism and CSV/JSON persistence ([`runner`], [`config`]).
//!
//! Start with the `examples/` directory: each example is a runnable,
//! self-contained demonstration of one capability (sampling a realization,
//! evaluating theory curves, reproducing the bulk/tail/moment comparisons).
//!
//! Numerical conventions used throughout:
//!
//! * Energies are measured in units of the diagonal spread (level density
//!   ρ(E) = exp(−E²/2)/√(2π)).
//! * Component magnitudes are reported in one of three normalization modes
//!   (see [`theory::NormalizationMode`]): raw components, bulk units
//!   y = N^{γ/2}ψ, or tail units z = N^{1−γ/2}ψ.
//! * All randomness flows from a single master seed through per-realization
//!   counter-derived streams; every run is bit-reproducible at any worker
//!   count.

pub mod compare;
pub mod config;
pub mod empirics;
pub mod ensemble;
pub mod eigensolve;
pub mod runner;
pub mod specfun;
pub mod theory;

pub use compare::{
    chi2_against_density, chi2_two_sample, fit_lorentzian_width, ks_distance, moment_comparison,
    CompareError, FitReport, LorentzianFit, MomentComparison,
};
pub use config::{ConfigError, ExperimentConfig, SolverChoice, TheorySection, Thresholds};
pub use eigensolve::{eigh, eigh_window, EigenDecomposition, EigensolveError};
pub use empirics::{
    scaled_components, Binning, EmpiricsError, EnergyWindow, Histogram, MomentAccumulator,
    ProfileAccumulator,
};
pub use ensemble::{
    realization_rng, sample_matrix, sample_realization, EnsembleError, EnsembleParams,
    SymmetricMatrix,
};
pub use runner::{
    run_compare, run_moments, run_report, run_sample, run_theory, CompareSummary, RunnerError,
    SampleSummary, EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, EXIT_THRESHOLD,
};
pub use theory::{MomentPrediction, NormalizationMode, TheoryContext, TheoryError};
