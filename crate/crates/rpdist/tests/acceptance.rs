//! Acceptance gate: nine numbered criteria, each printing exactly one
//! PASS/FAIL line with the measured values, then a single assertion
//! over the whole set. The Monte Carlo datasets are shared across
//! criteria and take tens of minutes at the pinned scales; run with
//! `cargo test --test acceptance -- --nocapture` to watch progress.
//!
//! Criteria:
//!   1. closed-form center density equals the defining quadrature
//!   2. the center density is normalized and reproduces exact moments
//!   3. bulk-regime distribution matches prediction (KS and χ²)
//!   4. tail histograms collapse onto the size-free limit law
//!   5. moment ratios follow the predicted size scaling
//!   6. the mean-square profile has the predicted spreading width
//!   7. eigensolver accuracy on sampled matrices
//!   8. special functions agree with integral-representation oracles
//!   9. byte-identical reruns, independent of worker count

use rpdist::compare::{
    chi2_against_density, chi2_two_sample, fit_lorentzian_width, ks_distance, moment_comparison,
};
use rpdist::config::ExperimentConfig;
use rpdist::eigensolve::{eigh, eigh_window, EigenDecomposition};
use rpdist::empirics::{
    scaled_components, Binning, EnergyWindow, Histogram, MomentAccumulator, ProfileAccumulator,
};
use rpdist::ensemble::{sample_realization, EnsembleParams, SymmetricMatrix};
use rpdist::runner::run_sample;
use rpdist::specfun::{
    bessel_k0, bessel_k1, gamma_fn, integrate, kummer_m, tricomi_u, Interval, QuadratureSpec,
};
use rpdist::theory::{NormalizationMode, TheoryContext};
use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;
use std::time::Instant;

const GAMMA: f64 = 1.5;
const EPS: f64 = FRAC_1_SQRT_2;
const WINDOW: EnergyWindow = EnergyWindow::CentralFraction { fraction: 0.125 };

/// Collects one verdict line per criterion and the overall outcome.
struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate {
            failures: Vec::new(),
        }
    }

    fn check(&mut self, number: usize, name: &str, pass: bool, detail: &str) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {number} ({name}): {verdict} — {detail}");
        if !pass {
            self.failures.push(format!("criterion {number} ({name})"));
        }
    }
}

fn quad_spec() -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: 1e-10,
        abs_tol: 1e-300,
        max_subdivisions: 200,
        ..QuadratureSpec::default()
    }
}

// ---------------------------------------------------------------------------
// Shared Monte Carlo datasets
// ---------------------------------------------------------------------------

/// Everything the statistical criteria need from one ensemble size.
struct Dataset {
    params: EnsembleParams,
    realizations: u64,
    tail_realizations: u64,
    /// Tail histogram on this size's default binning (first
    /// `tail_realizations` realizations).
    tail_own: Histogram,
    /// Tail histogram on the common cross-size binning, same span.
    tail_common: Histogram,
    /// Moments over every realization.
    moments: MomentAccumulator,
    /// Bulk histogram on the default bulk binning (present at n=1024).
    bulk: Option<Histogram>,
    /// Bulk-scaled samples restricted to |y| ≤ 5ε (present at n=1024).
    ks_samples: Vec<f64>,
    /// Mean-square profile over every realization (present at n=2048).
    profile: Option<ProfileAccumulator>,
    /// Eigenvalue histogram of the first 20 realizations (n=2048).
    levels: Option<Histogram>,
}

fn common_tail_binning() -> Binning {
    Binning::UniformInSquare {
        max_abs: 4.0,
        bins: 100,
    }
}

fn collect_dataset(
    n: usize,
    realizations: u64,
    tail_cap: u64,
    master_seed: u64,
    want_bulk: bool,
    want_profile: bool,
) -> Dataset {
    let params = EnsembleParams::new(n, GAMMA, EPS).unwrap();
    let config = ExperimentConfig::with_defaults(params, realizations);
    let ctx = TheoryContext::new(params).unwrap();
    let ranks = WINDOW.rank_range(n).unwrap();
    let tail_scale = NormalizationMode::Tail.scale(n, GAMMA);
    let bulk_scale = NormalizationMode::Bulk.scale(n, GAMMA);

    let mut tail_own = Histogram::new(config.binning_for(NormalizationMode::Tail)).unwrap();
    let mut tail_common = Histogram::new(common_tail_binning()).unwrap();
    let mut moments = MomentAccumulator::new(vec![0.125, 0.5, 1.0, 2.0]).unwrap();
    let mut bulk = want_bulk
        .then(|| Histogram::new(config.binning_for(NormalizationMode::Bulk)).unwrap());
    let mut ks_samples: Vec<f64> = Vec::new();
    if want_bulk {
        ks_samples.reserve((realizations as usize) * ranks.len() * n);
    }
    let mut profile =
        want_profile.then(|| ProfileAccumulator::new(4.0 * ctx.delta(), 40).unwrap());
    let mut levels = want_profile.then(|| {
        Histogram::new(Binning::Uniform {
            lo: -4.0,
            hi: 4.0,
            bins: 80,
        })
        .unwrap()
    });

    let started = Instant::now();
    for r in 0..realizations {
        let matrix = sample_realization(&params, master_seed, r).unwrap();
        let decomp = eigh_window(&matrix, ranks.clone()).unwrap();
        if r < tail_cap {
            tail_own.record_all(scaled_components(&decomp, ranks.clone(), tail_scale));
            tail_common.record_all(scaled_components(&decomp, ranks.clone(), tail_scale));
        }
        for alpha in ranks.clone() {
            moments.record_eigenfunction(decomp.eigenvector(alpha).iter().copied());
        }
        if let Some(hist) = bulk.as_mut() {
            for y in scaled_components(&decomp, ranks.clone(), bulk_scale) {
                hist.record(y);
                if y.abs() <= 5.0 * EPS {
                    ks_samples.push(y);
                }
            }
        }
        if let Some(prof) = profile.as_mut() {
            let sites: Vec<f64> = (0..n).map(|i| matrix.get(i, i)).collect();
            prof.accumulate(&sites, &decomp, ranks.clone()).unwrap();
        }
        if let Some(hist) = levels.as_mut() {
            if r < 20 {
                hist.record_all(decomp.eigenvalues().iter().copied());
            }
        }
        if (r + 1) % (realizations / 10).max(1) == 0 {
            eprintln!(
                "[dataset n={n}] {}/{realizations} realizations, {:.0}s elapsed",
                r + 1,
                started.elapsed().as_secs_f64()
            );
        }
    }
    Dataset {
        params,
        realizations,
        tail_realizations: tail_cap.min(realizations),
        tail_own,
        tail_common,
        moments,
        bulk,
        ks_samples,
        profile,
        levels,
    }
}

// ---------------------------------------------------------------------------
// Criterion 1: closed form vs defining quadrature
// ---------------------------------------------------------------------------

fn criterion_1(gate: &mut Gate) {
    let started = Instant::now();
    let mut max_rel = 0.0f64;
    for gamma_exp in [1.25, 1.5, 1.75] {
        for epsilon in [0.5, FRAC_1_SQRT_2, 1.0] {
            let params = EnsembleParams::new(1024, gamma_exp, epsilon).unwrap();
            let ctx = TheoryContext::new(params).unwrap();
            // A 200-point grid spread like the emitted curves: dense in
            // the core, reaching ~25ε into the tail.
            let u_max = 4.0f64.atan();
            for k in 0..200 {
                let u = -u_max + 2.0 * u_max * k as f64 / 199.0;
                let t = u.tan();
                let y = epsilon * (t + t * t * t / 3.0);
                let closed = ctx
                    .distribution_center(NormalizationMode::Bulk, y)
                    .unwrap();
                let quad = ctx
                    .distribution_at_energy(NormalizationMode::Bulk, y, 0.0)
                    .unwrap();
                max_rel = max_rel.max((closed / quad - 1.0).abs());
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    gate.check(
        1,
        "closed form vs quadrature",
        max_rel <= 1e-8 && elapsed < 10.0,
        &format!(
            "max rel deviation {max_rel:.3e} over 9 parameter sets x 200 points \
             (tolerance 1e-8) in {elapsed:.1}s (budget 10s)"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: normalization and exact moments of the center density
// ---------------------------------------------------------------------------

fn criterion_2(gate: &mut Gate) {
    let started = Instant::now();
    let params = EnsembleParams::new(1024, GAMMA, EPS).unwrap();
    let ctx = TheoryContext::new(params).unwrap();
    let n = 1024f64;
    let spec = quad_spec();
    let density = |y: f64| {
        ctx.distribution_center(NormalizationMode::Bulk, y)
            .unwrap_or(0.0)
    };

    // The density integrates to one (it is even; fold the half line).
    let norm = 2.0
        * integrate(density, Interval::UpperHalfLine(0.0), &spec)
            .unwrap()
            .value;
    let norm_err = (norm - 1.0).abs();
    let mut pass = norm_err <= 1e-8;

    // I_0 is the dimension itself and I_1 sits within 2δ of one.
    let i0_rel = (ctx.moment_exact(0.0).unwrap() / n - 1.0).abs();
    pass &= i0_rel <= 1e-12;
    let i1_dev = (ctx.moment_exact(1.0).unwrap() - 1.0).abs();
    pass &= i1_dev <= 2.0 * ctx.delta();

    // Exact moments against direct quadrature of the density,
    // converted from bulk units: I_q = n^{1-γq} ∫|y|^{2q} P(y) dy.
    let mut max_moment_rel = 0.0f64;
    for q in [0.125, 0.5, 1.0, 2.0, 3.0] {
        let integral = if q < 0.25 {
            // |y|^{2q} has a kink at zero for small q; substituting
            // y = u⁴ makes the integrand smooth: the q = 1/8 case
            // becomes 8 ∫ u⁴ P(u⁴) du.
            8.0 * integrate(
                |u: f64| u.powi(4) * density(u.powi(4)),
                Interval::UpperHalfLine(0.0),
                &spec,
            )
            .unwrap()
            .value
        } else {
            2.0 * integrate(
                |y: f64| y.powf(2.0 * q) * density(y),
                Interval::UpperHalfLine(0.0),
                &spec,
            )
            .unwrap()
            .value
        };
        let from_quadrature = n.powf(1.0 - GAMMA * q) * integral;
        let rel = (ctx.moment_exact(q).unwrap() / from_quadrature - 1.0).abs();
        max_moment_rel = max_moment_rel.max(rel);
    }
    pass &= max_moment_rel <= 1e-6;
    let elapsed = started.elapsed().as_secs_f64();
    pass &= elapsed < 10.0;
    gate.check(
        2,
        "normalization and exact moments",
        pass,
        &format!(
            "|∫P-1| = {norm_err:.2e} (tol 1e-8), I_0 rel {i0_rel:.2e} (tol 1e-12), \
             |I_1-1| = {i1_dev:.3e} (tol 2δ = {:.3e}), max moment-vs-quadrature rel \
             {max_moment_rel:.2e} (tol 1e-6) in {elapsed:.1}s (budget 10s)",
            2.0 * ctx.delta()
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: bulk distribution at n = 1024
// ---------------------------------------------------------------------------

fn criterion_3(gate: &mut Gate, data: &mut Dataset) {
    let ctx = TheoryContext::new(data.params).unwrap();

    // KS distance of the restricted samples against the limit Cauchy
    // law, truncated and renormalized to |y| ≤ 5ε.
    let a5 = 5.0f64.atan();
    let cdf = move |y: f64| ((y / EPS).atan() + a5) / (2.0 * a5);
    let sample_count = data.ks_samples.len();
    let ks = ks_distance(&mut data.ks_samples, cdf).unwrap();

    // χ² of the full bulk histogram against the finite-size density.
    let fit = chi2_against_density(
        data.bulk.as_ref().unwrap(),
        |y| {
            ctx.distribution_center(NormalizationMode::Bulk, y)
                .unwrap_or(0.0)
        },
        10.0,
        None,
    )
    .unwrap();

    gate.check(
        3,
        "bulk distribution",
        ks <= 0.02 && fit.chi2_per_dof <= 2.0,
        &format!(
            "KS = {ks:.5} over {sample_count} samples with |y| ≤ 5ε (tol 0.02); \
             χ²/dof = {:.3} over {} dof on the default bulk binning (tol 2.0)",
            fit.chi2_per_dof, fit.dof
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: tail collapse across sizes
// ---------------------------------------------------------------------------

/// Fit range for a tail histogram: start past the bulk core (the limit
/// law is a far-tail form and diverges at z = 0), stop at the first
/// bin under 50 counts or the top tenth of the |z| range, whichever
/// comes first.
fn tail_fit_range(hist: &Histogram, z_lo: f64, max_abs: f64) -> Range<usize> {
    let edges = hist.binning().edges();
    let bins = hist.binning().bins();
    let start = (0..bins)
        .find(|&k| edges[k] >= z_lo)
        .expect("core cut inside the binned range");
    let top = (0..bins)
        .filter(|&k| edges[k + 1] <= 0.9 * max_abs)
        .last()
        .map_or(bins, |k| k + 1);
    let mut end = start;
    while end < top && hist.counts()[end] >= 50 {
        end += 1;
    }
    start..end
}

fn core_cut(n: usize) -> f64 {
    25.0 * EPS * (n as f64).powf(1.0 - GAMMA)
}

fn criterion_4(gate: &mut Gate, sets: [&Dataset; 3]) {
    let mut pass = true;
    let mut parts: Vec<String> = Vec::new();

    // Each size against the limit law on its own default binning.
    for data in sets {
        let n = data.params.n;
        let ctx = TheoryContext::new(data.params).unwrap();
        let max_abs = match data.tail_own.binning() {
            Binning::UniformInSquare { max_abs, .. } => *max_abs,
            other => panic!("unexpected tail binning {other:?}"),
        };
        let range = tail_fit_range(&data.tail_own, core_cut(n), max_abs);
        let fit = chi2_against_density(
            &data.tail_own,
            |z| 2.0 * ctx.distribution_tail(z).unwrap_or(0.0),
            0.0,
            Some(range.clone()),
        )
        .unwrap();
        pass &= fit.chi2_per_dof <= 2.0;
        parts.push(format!(
            "n={n} (R={}): χ²/dof = {:.2} ({} dof)",
            data.tail_realizations, fit.chi2_per_dof, fit.dof
        ));
    }

    // Pairwise shape agreement on the common binning, over the z-range
    // valid for both sizes.
    let edges = common_tail_binning().edges();
    let bins = common_tail_binning().bins();
    let top = (bins as f64 * 0.81).floor() as usize;
    for (a, b) in [
        (sets[0], sets[1]),
        (sets[0], sets[2]),
        (sets[1], sets[2]),
    ] {
        let z_lo = core_cut(a.params.n.min(b.params.n));
        let start = (0..bins).find(|&k| edges[k] >= z_lo).unwrap();
        let two = chi2_two_sample(&a.tail_common, &b.tail_common, Some(start..top), 100).unwrap();
        pass &= two.chi2_per_dof <= 2.0;
        parts.push(format!(
            "{}vs{}: χ²/dof = {:.2} ({} dof)",
            a.params.n, b.params.n, two.chi2_per_dof, two.dof
        ));
    }

    gate.check(
        4,
        "tail collapse",
        pass,
        &format!("{} (tol 2.0 each)", parts.join("; ")),
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: moment scaling across sizes
// ---------------------------------------------------------------------------

fn criterion_5(gate: &mut Gate, sets: [&Dataset; 3]) {
    let mut pass = true;
    let mut parts: Vec<String> = Vec::new();
    for data in sets {
        let n = data.params.n;
        let ctx = TheoryContext::new(data.params).unwrap();
        let rows = moment_comparison(&data.moments, &ctx).unwrap();
        let row = |q: f64| rows.iter().find(|r| r.q == q).unwrap();

        // q = 1/8: the scaled moment tracks the corrected asymptote.
        let r18 = row(0.125).rel_error_corrected;
        pass &= r18 <= 0.05;
        // q = 1/2: the logarithmic form, plain asymptote.
        let half = row(0.5);
        let r12 = (half.scaled_observed / half.asymptote - 1.0).abs();
        pass &= r12 <= 0.10;
        parts.push(format!("n={n}: q=1/8 dev {r18:.3}, q=1/2 dev {r12:.3}"));

        // q = 2: the fractal-dimension moment at the largest size.
        if n == 2048 {
            let two = row(2.0);
            let r2 = (two.scaled_observed / two.asymptote - 1.0).abs();
            pass &= r2 <= 0.15;
            parts.push(format!("n={n}: q=2 dev {r2:.3} (tol 0.15)"));
        }
    }
    gate.check(
        5,
        "moment scaling",
        pass,
        &format!("{} (tol 0.05 / 0.10)", parts.join("; ")),
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: spreading-width profile at n = 2048
// ---------------------------------------------------------------------------

fn criterion_6(gate: &mut Gate, data: &Dataset) {
    let ctx = TheoryContext::new(data.params).unwrap();
    let fit = fit_lorentzian_width(data.profile.as_ref().unwrap(), 50).unwrap();
    let rel = (fit.width / ctx.delta() - 1.0).abs();
    gate.check(
        6,
        "spreading-width profile",
        rel <= 0.20,
        &format!(
            "fitted width {:.4e} vs predicted {:.4e}: rel dev {rel:.3} (tol 0.20), \
             r² = {:.4} over {} bins, {} realizations",
            fit.width,
            ctx.delta(),
            fit.r_squared,
            fit.bins_used,
            data.realizations
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: eigensolver accuracy on sampled matrices
// ---------------------------------------------------------------------------

fn frobenius(matrix: &SymmetricMatrix) -> f64 {
    let n = matrix.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            sum += matrix.get(i, j) * matrix.get(i, j);
        }
    }
    sum.sqrt()
}

fn solver_errors(matrix: &SymmetricMatrix, decomp: &EigenDecomposition) -> (f64, f64, f64, f64) {
    let n = matrix.dim();
    let fro = frobenius(matrix);
    // Residuals ‖Hv − λv‖ against the Frobenius norm.
    let mut max_residual = 0.0f64;
    for alpha in 0..n {
        let v = decomp.eigenvector(alpha);
        let lambda = decomp.eigenvalues()[alpha];
        let mut err2 = 0.0;
        for i in 0..n {
            let mut hv = 0.0;
            for (j, &vj) in v.iter().enumerate() {
                hv += matrix.get(i, j) * vj;
            }
            let d = hv - lambda * v[i];
            err2 += d * d;
        }
        max_residual = max_residual.max(err2.sqrt() / fro);
    }
    // Orthonormality defect max |VᵀV − 1|.
    let mut max_defect = 0.0f64;
    for alpha in 0..n {
        let va = decomp.eigenvector(alpha);
        for beta in alpha..n {
            let dot: f64 = va
                .iter()
                .zip(decomp.eigenvector(beta))
                .map(|(x, y)| x * y)
                .sum();
            let target = if alpha == beta { 1.0 } else { 0.0 };
            max_defect = max_defect.max((dot - target).abs());
        }
    }
    // Trace and Frobenius sum rules.
    let trace: f64 = (0..n).map(|i| matrix.get(i, i)).sum();
    let lambda_sum: f64 = decomp.eigenvalues().iter().sum();
    let trace_rel = (lambda_sum - trace).abs() / fro;
    let lambda_sq: f64 = decomp.eigenvalues().iter().map(|l| l * l).sum();
    let fro_rel = (lambda_sq - fro * fro).abs() / (fro * fro);
    (max_residual, max_defect, trace_rel, fro_rel)
}

fn criterion_7(gate: &mut Gate) {
    let mut worst = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut index = 0u64;
    for (n, count) in [(64usize, 8u64), (256, 8), (1024, 4)] {
        let params = EnsembleParams::new(n, GAMMA, EPS).unwrap();
        for _ in 0..count {
            let matrix = sample_realization(&params, 71, index).unwrap();
            index += 1;
            let decomp = eigh(&matrix).unwrap();
            let errs = solver_errors(&matrix, &decomp);
            worst.0 = worst.0.max(errs.0);
            worst.1 = worst.1.max(errs.1);
            worst.2 = worst.2.max(errs.2);
            worst.3 = worst.3.max(errs.3);
        }
    }
    let pass = worst.0 <= 1e-10 && worst.1 <= 1e-11 && worst.2 <= 1e-9 && worst.3 <= 1e-9;
    gate.check(
        7,
        "eigensolver accuracy",
        pass,
        &format!(
            "20 matrices, n ∈ {{64, 256, 1024}}: max residual {:.2e} (tol 1e-10), \
             max orthonormality defect {:.2e} (tol 1e-11), trace rel {:.2e} and \
             Frobenius rel {:.2e} (tol 1e-9)",
            worst.0, worst.1, worst.2, worst.3
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: special functions vs integral-representation oracles
// ---------------------------------------------------------------------------

fn criterion_8(gate: &mut Gate) {
    let spec = quad_spec();
    let quad = |f: &dyn Fn(f64) -> f64, interval: Interval| -> Option<f64> {
        integrate(f, interval, &spec).ok().map(|q| q.value)
    };
    let mut max_rel = 0.0f64;
    let mut oracle_failures = 0usize;
    let mut track = |value: f64, oracle: Option<f64>| match oracle {
        Some(o) => max_rel = max_rel.max((value / o - 1.0).abs()),
        None => oracle_failures += 1,
    };

    // Macdonald functions against ∫₀^∞ e^{−x cosh t} cosh(νt) dt.
    for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0] {
        let k0 = quad(
            &|t: f64| {
                let e = -x * t.cosh();
                if e < -745.0 {
                    0.0
                } else {
                    e.exp()
                }
            },
            Interval::UpperHalfLine(0.0),
        );
        track(bessel_k0(x).unwrap(), k0);
        let k1 = quad(
            &|t: f64| {
                let e = -x * t.cosh();
                if e < -745.0 {
                    0.0
                } else {
                    e.exp() * t.cosh()
                }
            },
            Interval::UpperHalfLine(0.0),
        );
        track(bessel_k1(x).unwrap(), k1);
    }

    // Gamma function against the Euler integral, written with t = u²
    // so the s < 1 endpoint is smooth:
    // Γ(s) = 2 ∫₀^∞ u^{2s−1} e^{−u²} du.
    for s in [0.5, 1.5, 5.25, 9.0] {
        let oracle = quad(
            &|u: f64| u.powf(2.0 * s - 1.0) * (-u * u).exp(),
            Interval::UpperHalfLine(0.0),
        )
        .map(|v| 2.0 * v);
        track(gamma_fn(s).unwrap(), oracle);
    }

    // Kummer M against the Euler integral (b > a > 0), substituting
    // t = sin²θ so both endpoints are smooth:
    // M(a,b,z) = Γ(b)/(Γ(a)Γ(b−a)) ·
    //            2 ∫₀^{π/2} e^{z sin²θ} sin^{2a−1}θ cos^{2b−2a−1}θ dθ.
    for (a, b, z) in [
        (0.5, 1.5, 0.7),
        (0.5, 1.5, 3.0),
        (1.0, 2.5, 1.2),
        (2.0, 3.5, -1.5),
    ] {
        let coeff = gamma_fn(b).unwrap() / (gamma_fn(a).unwrap() * gamma_fn(b - a).unwrap());
        let oracle = quad(
            &|theta: f64| {
                let (s, c) = theta.sin_cos();
                (z * s * s).exp() * s.powf(2.0 * a - 1.0) * c.powf(2.0 * b - 2.0 * a - 1.0)
            },
            Interval::Finite(0.0, std::f64::consts::FRAC_PI_2),
        )
        .map(|v| coeff * 2.0 * v);
        track(kummer_m(a, b, z).unwrap(), oracle);
    }

    // Tricomi U against its Laplace integral (a = 1/2 as used by the
    // moment formulas), with t = u²:
    // U(a,b,z) = 2/Γ(a) ∫₀^∞ e^{−z u²} u^{2a−1} (1+u²)^{b−a−1} du.
    for (b, z) in [(0.75, 0.3), (1.25, 0.1), (-0.5, 1.0), (1.0, 2.0)] {
        let a = 0.5;
        let oracle = quad(
            &|u: f64| {
                let e = -z * u * u;
                if e < -745.0 {
                    0.0
                } else {
                    e.exp() * (1.0 + u * u).powf(b - a - 1.0)
                }
            },
            Interval::UpperHalfLine(0.0),
        )
        .map(|v| 2.0 / gamma_fn(a).unwrap() * v);
        track(tricomi_u(a, b, z).unwrap(), oracle);
    }
    let pass_oracles = max_rel <= 1e-9 && oracle_failures == 0;

    // The closed Kummer case U(1/2, 3/2, z) = z^{−1/2}.
    let mut max_closed = 0.0f64;
    for z in [1e-6, 1e-3, 0.1, 1.0, 10.0, 500.0] {
        let rel = (tricomi_u(0.5, 1.5, z).unwrap() * z.sqrt() - 1.0).abs();
        max_closed = max_closed.max(rel);
    }
    let pass_closed = max_closed <= 1e-12;

    gate.check(
        8,
        "special functions",
        pass_oracles && pass_closed,
        &format!(
            "max rel vs integral oracles {max_rel:.2e} (tol 1e-9, \
             {oracle_failures} oracle quadratures failed); \
             U(1/2,3/2,z)·√z − 1 max {max_closed:.2e} (tol 1e-12)"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: determinism and worker independence
// ---------------------------------------------------------------------------

/// Artifact bytes with invocation-dependent lines (wall time, worker
/// count, echoed output directory) removed, keyed by file name.
fn normalized_artifacts(dir: &std::path::Path) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    let mut names: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    for name in names {
        let text = std::fs::read_to_string(dir.join(&name)).unwrap();
        let kept: Vec<&str> = text
            .lines()
            .filter(|l| {
                !l.contains("wall_time_seconds")
                    && !l.contains("\"workers\"")
                    && !l.contains("\"out_dir\"")
            })
            .collect();
        out.push((name, kept.join("\n")));
    }
    out
}

fn criterion_9(gate: &mut Gate) {
    let params = EnsembleParams::new(64, GAMMA, EPS).unwrap();
    let mut config = ExperimentConfig::with_defaults(params, 3);
    config.master_seed = 5;
    config.workers = 1;
    let base = tempfile::tempdir().unwrap();
    let dirs = [base.path().join("a"), base.path().join("b"), base.path().join("c")];

    run_sample(&config, &dirs[0]).unwrap();
    run_sample(&config, &dirs[1]).unwrap();
    let mut config8 = config.clone();
    config8.workers = 8;
    run_sample(&config8, &dirs[2]).unwrap();

    let first = normalized_artifacts(&dirs[0]);
    let rerun = normalized_artifacts(&dirs[1]);
    let pooled = normalized_artifacts(&dirs[2]);
    let identical = first == rerun;
    let worker_free = first == pooled;
    gate.check(
        9,
        "determinism",
        identical && worker_free,
        &format!(
            "rerun identical: {identical}; workers 1 vs 8 identical: {worker_free} \
             ({} artifacts, wall-time and worker-count lines excluded)",
            first.len()
        ),
    );
}

// ---------------------------------------------------------------------------

#[test]
fn acceptance_gate() {
    let mut gate = Gate::new();

    criterion_1(&mut gate);
    criterion_2(&mut gate);

    eprintln!("[acceptance] collecting Monte Carlo datasets (tens of minutes)...");
    let set_512 = collect_dataset(512, 400, 400, 161, false, false);
    let mut set_1024 = collect_dataset(1024, 200, 200, 178, true, false);
    let set_2048 = collect_dataset(2048, 500, 100, 195, false, true);

    criterion_3(&mut gate, &mut set_1024);
    criterion_4(&mut gate, [&set_512, &set_1024, &set_2048]);
    criterion_5(&mut gate, [&set_512, &set_1024, &set_2048]);
    criterion_6(&mut gate, &set_2048);
    criterion_7(&mut gate);
    criterion_8(&mut gate);
    criterion_9(&mut gate);

    // Supplementary (not a gated criterion): the eigenvalue density of
    // the first 20 realizations at n = 2048 against the Gaussian level
    // density.
    let ctx = TheoryContext::new(set_2048.params).unwrap();
    let levels = set_2048.levels.as_ref().unwrap();
    let fit = chi2_against_density(levels, |e| ctx.level_density(e), 10.0, None).unwrap();
    println!(
        "supplementary (level density): χ²/dof = {:.3} over {} dof at n = 2048, 20 realizations",
        fit.chi2_per_dof, fit.dof
    );

    assert!(
        gate.failures.is_empty(),
        "acceptance gate failed: {}",
        gate.failures.join(", ")
    );
}
