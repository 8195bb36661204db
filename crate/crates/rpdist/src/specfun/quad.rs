//! Adaptive and fixed-order quadrature over finite and infinite intervals.
//!
//! The workhorse is a globally adaptive bisection scheme built on the
//! classical 15-point Kronrod extension of 7-point Gauss–Legendre
//! (the QUADPACK QK15 node/weight pair): the interval with the largest
//! error estimate is split until the summed error meets the tolerance or
//! the subdivision budget is exhausted. Infinite intervals are mapped onto
//! (0,1] with the standard rational transformations, so integrands only
//! ever need to be evaluated at interior points.
//!
//! A non-adaptive fixed-order Gauss–Legendre scheme is provided as an
//! alternative for smooth integrands; its nodes and weights are generated
//! on the fly by Newton iteration on the Legendre recurrence.

use super::SpecFunError;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Tolerance and scheme specification for [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Relative tolerance on the integral value. Must be positive.
    pub rel_tol: f64,
    /// Absolute tolerance on the integral value. Must be positive.
    pub abs_tol: f64,
    /// Maximum number of interval bisections for the adaptive scheme
    /// (the panel count is `max_subdivisions + 1`).
    pub max_subdivisions: u32,
    /// Quadrature rule to apply.
    pub scheme: Scheme,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 60,
            scheme: Scheme::AdaptiveKronrod,
        }
    }
}

impl QuadratureSpec {
    /// Validate the specification, returning a domain error for
    /// non-positive tolerances or a zero subdivision budget.
    fn validate(&self) -> Result<(), SpecFunError> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(SpecFunError::Domain {
                context: "integrate",
                detail: format!(
                    "tolerances must be positive (rel_tol = {:e}, abs_tol = {:e})",
                    self.rel_tol, self.abs_tol
                ),
            });
        }
        if self.max_subdivisions == 0 {
            return Err(SpecFunError::Domain {
                context: "integrate",
                detail: "max_subdivisions must be at least 1".to_string(),
            });
        }
        Ok(())
    }

    /// Combined tolerance for a result of magnitude `|value|`.
    fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Quadrature rule selector for [`QuadratureSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    /// Globally adaptive bisection with the Gauss–Kronrod 7/15 pair.
    AdaptiveKronrod,
    /// Single fixed-order Gauss–Legendre rule on the (mapped) interval.
    /// The error is estimated by comparison with a higher-order rule;
    /// there is no refinement, so rough integrands should use the
    /// adaptive scheme instead.
    GaussLegendre {
        /// Number of nodes; clamped below at 2.
        order: usize,
    },
}

/// Integration domain for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interval {
    /// The finite interval [a, b] with a < b.
    Finite(f64, f64),
    /// The half line [a, +∞).
    UpperHalfLine(f64),
    /// The half line (−∞, b].
    LowerHalfLine(f64),
    /// The full real line.
    FullLine,
}

/// Result of a quadrature: the value and a rigorous-in-practice error
/// estimate (the summed Kronrod–Gauss deviations, QUADPACK-rescaled).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    /// Estimated integral value.
    pub value: f64,
    /// Estimated absolute error. On success this is at most
    /// `max(abs_tol, rel_tol · |value|)`.
    pub abs_error: f64,
    /// Number of panels evaluated by the adaptive scheme (1 for the
    /// fixed-order scheme).
    pub panels: u32,
}

/// Integrate `f` over `interval` according to `spec`.
///
/// Infinite intervals are transformed to (0, 1] via x = a + (1−t)/t and
/// its mirror; the doubly infinite case folds the two half lines together.
/// A non-finite integrand value at any evaluation node is reported as a
/// domain error naming the offending abscissa; an exhausted subdivision
/// budget is reported as an accuracy error carrying the best estimate.
pub fn integrate<F>(f: F, interval: Interval, spec: &QuadratureSpec) -> Result<Quadrature, SpecFunError>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    match interval {
        Interval::Finite(a, b) => {
            if !a.is_finite() || !b.is_finite() || !(a < b) {
                return Err(SpecFunError::Domain {
                    context: "integrate",
                    detail: format!("invalid finite interval [{a:e}, {b:e}]"),
                });
            }
            integrate_core(&f, a, b, spec)
        }
        Interval::UpperHalfLine(a) => {
            if !a.is_finite() {
                return Err(SpecFunError::Domain {
                    context: "integrate",
                    detail: format!("half-line anchor must be finite, got {a:e}"),
                });
            }
            // x = a + (1 - t)/t maps t ∈ (0, 1] onto [a, ∞); dx = dt/t².
            let g = |t: f64| {
                let x = a + (1.0 - t) / t;
                f(x) / (t * t)
            };
            integrate_core(&g, 0.0, 1.0, spec)
        }
        Interval::LowerHalfLine(b) => {
            if !b.is_finite() {
                return Err(SpecFunError::Domain {
                    context: "integrate",
                    detail: format!("half-line anchor must be finite, got {b:e}"),
                });
            }
            let g = |t: f64| {
                let x = b - (1.0 - t) / t;
                f(x) / (t * t)
            };
            integrate_core(&g, 0.0, 1.0, spec)
        }
        Interval::FullLine => {
            // Fold both half lines onto (0, 1]: x = ±(1 − t)/t.
            let g = |t: f64| {
                let x = (1.0 - t) / t;
                (f(x) + f(-x)) / (t * t)
            };
            integrate_core(&g, 0.0, 1.0, spec)
        }
    }
}

fn integrate_core<F>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quadrature, SpecFunError>
where
    F: Fn(f64) -> f64,
{
    match spec.scheme {
        Scheme::AdaptiveKronrod => adaptive_kronrod(f, a, b, spec),
        Scheme::GaussLegendre { order } => fixed_gauss_legendre(f, a, b, order, spec),
    }
}

// ── Gauss–Kronrod 7/15 pair ────────────────────────────────────────────────

/// Abscissae of the 15-point Kronrod rule on [−1, 1] (positive half; the
/// odd indices are the embedded 7-point Gauss nodes).
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Weights of the 15-point Kronrod rule, matching [`XGK15`].
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Weights of the embedded 7-point Gauss rule (positive half; the last
/// entry is the center weight).
const WG7: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One panel's Kronrod evaluation: value, rescaled error, and the raw
/// magnitude integrals used by the QUADPACK error heuristic.
struct PanelEval {
    value: f64,
    error: f64,
}

/// Apply the 7/15 pair on [lo, hi]. Returns a domain error if `f` produces
/// a non-finite value at any node.
fn qk15<F>(f: &F, lo: f64, hi: f64) -> Result<PanelEval, SpecFunError>
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let half_abs = half.abs();

    let eval = |x: f64| -> Result<f64, SpecFunError> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SpecFunError::Domain {
                context: "integrate",
                detail: format!("integrand returned {v} at x = {x:e}"),
            })
        }
    };

    let fc = eval(center)?;
    let mut resg = fc * WG7[3];
    let mut resk = fc * WGK15[7];
    let mut resabs = fc.abs() * WGK15[7];
    let mut fv = [0.0f64; 15]; // node values for the spread estimate
    fv[7] = fc;

    // Gauss nodes (odd Kronrod indices).
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = half * XGK15[jtw];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        let fsum = f1 + f2;
        resg += WG7[j] * fsum;
        resk += WGK15[jtw] * fsum;
        resabs += WGK15[jtw] * (f1.abs() + f2.abs());
        fv[jtw] = f1;
        fv[14 - jtw] = f2;
    }
    // Kronrod-only nodes (even indices).
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = half * XGK15[jtwm1];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        let fsum = f1 + f2;
        resk += WGK15[jtwm1] * fsum;
        resabs += WGK15[jtwm1] * (f1.abs() + f2.abs());
        fv[jtwm1] = f1;
        fv[14 - jtwm1] = f2;
    }

    // Spread of f around its mean value, for the error rescaling.
    let reskh = resk * 0.5;
    let mut resasc = WGK15[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK15[j] * ((fv[j] - reskh).abs() + (fv[14 - j] - reskh).abs());
    }

    let value = resk * half;
    let resabs = resabs * half_abs;
    let resasc = resasc * half_abs;
    let raw_err = ((resk - resg) * half).abs();
    Ok(PanelEval {
        value,
        error: rescale_error(raw_err, resabs, resasc),
    })
}

/// QUADPACK's empirical error rescaling: sharpen the raw Gauss–Kronrod
/// deviation using the integrand's spread, with a floor at the roundoff
/// level of the magnitude integral.
fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    let min_positive = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > min_positive {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

/// Work-queue entry: a panel and its error estimate, ordered by error so
/// the globally worst panel is refined first.
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive_kronrod<F>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quadrature, SpecFunError>
where
    F: Fn(f64) -> f64,
{
    let first = qk15(f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        lo: a,
        hi: b,
        value: first.value,
        error: first.error,
    });
    let mut total_value = first.value;
    let mut total_error = first.error;

    let mut splits = 0u32;
    while total_error > spec.tolerance_for(total_value) && splits < spec.max_subdivisions {
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Interval no longer splittable in f64; put it back and stop.
            heap.push(worst);
            break;
        }
        let left = qk15(f, worst.lo, mid)?;
        let right = qk15(f, mid, worst.hi)?;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(Panel {
            lo: worst.lo,
            hi: mid,
            value: left.value,
            error: left.error,
        });
        heap.push(Panel {
            lo: mid,
            hi: worst.hi,
            value: right.value,
            error: right.error,
        });
        splits += 1;
    }

    // Recompute the totals from scratch to shed the incremental-update
    // rounding accumulated above.
    let panels: Vec<Panel> = heap.into_vec();
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error: f64 = panels.iter().map(|p| p.error).sum();
    let result = Quadrature {
        value,
        abs_error: error,
        panels: panels.len() as u32,
    };

    if error <= spec.tolerance_for(value) {
        Ok(result)
    } else {
        Err(SpecFunError::Accuracy {
            context: "integrate",
            value,
            error,
        })
    }
}

// ── Fixed-order Gauss–Legendre ─────────────────────────────────────────────

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1],
/// computed by Newton iteration on the three-term Legendre recurrence
/// from the Chebyshev initial guess.
fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let n = n.max(2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence: (k+1)·P_{k+1} = (2k+1)·x·P_k − k·P_{k−1}.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() <= 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl_apply<F>(f: &F, a: f64, b: f64, nodes: &[f64], weights: &[f64]) -> Result<f64, SpecFunError>
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in nodes.iter().zip(weights) {
        let v = f(center + half * x);
        if !v.is_finite() {
            return Err(SpecFunError::Domain {
                context: "integrate",
                detail: format!("integrand returned {v} at x = {:e}", center + half * x),
            });
        }
        acc += w * v;
    }
    Ok(acc * half)
}

fn fixed_gauss_legendre<F>(
    f: &F,
    a: f64,
    b: f64,
    order: usize,
    spec: &QuadratureSpec,
) -> Result<Quadrature, SpecFunError>
where
    F: Fn(f64) -> f64,
{
    let order = order.max(2);
    let (nodes, weights) = gauss_legendre_rule(order);
    let value_n = gl_apply(f, a, b, &nodes, &weights)?;
    // Error estimate from a higher-order companion rule.
    let hi_order = order + order / 2 + 1;
    let (nodes_hi, weights_hi) = gauss_legendre_rule(hi_order);
    let value_hi = gl_apply(f, a, b, &nodes_hi, &weights_hi)?;
    let error = (value_hi - value_n).abs();
    let result = Quadrature {
        value: value_hi,
        abs_error: error,
        panels: 1,
    };
    if error <= spec.tolerance_for(value_hi) {
        Ok(result)
    } else {
        Err(SpecFunError::Accuracy {
            context: "integrate",
            value: value_hi,
            error,
        })
    }
}
