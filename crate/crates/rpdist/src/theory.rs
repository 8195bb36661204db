//! Closed-form predictions for eigenfunction-component statistics.
//!
//! In the regime `1 < γ < 2` an eigenfunction of the ensemble
//! concentrates on basis sites whose diagonal energies `e_j` lie within
//! a spreading width `Γ(E)` of its eigenvalue `E`, and the mean squared
//! component follows a Breit–Wigner profile
//! `⟨ψ_j²⟩ = a / ((E − e_j)² + Γ(E)²)`. Averaging a Gaussian of that
//! width over the site-energy density produces the full component
//! distribution, which this module evaluates three ways:
//!
//! * an adaptive-quadrature form valid at any eigenvalue energy,
//! * a closed form at the spectrum center in terms of modified Bessel
//!   functions, and
//! * the large-`n` limit laws — a Cauchy profile for typical (bulk)
//!   components and a one-parameter curve for the far tail that is
//!   independent of `n` once components are scaled by `n^{1−γ/2}`.
//!
//! Moments `I_q = n·⟨|ψ_j|^{2q}⟩` of the same distribution come in an
//! exact form built on the confluent hypergeometric function `U`, a
//! power-law asymptotic `C_q·n^{−τ(q)}` with `τ(q) = γq − 1` below
//! `q = 1/2` and `τ(q) = (q − 1)(2 − γ)` above, a finite-size
//! correction factor for `q < 1/2`, and a logarithmic form exactly at
//! `q = 1/2` where the two power laws meet.

use crate::ensemble::EnsembleParams;
use crate::specfun::{
    bessel_k0_scaled, bessel_k1_scaled, gamma_fn, integrate, tricomi_u, Interval, QuadratureSpec,
    SpecFunError, EULER_GAMMA,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};
use thiserror::Error;

/// Errors produced while evaluating predictions.
#[derive(Debug, Error)]
pub enum TheoryError {
    /// The request falls outside the validity domain of a formula.
    #[error("theory domain error: {detail}")]
    Domain {
        /// Human-readable description.
        detail: String,
    },
    /// A special-function evaluation failed.
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// How eigenfunction components are rescaled before analysis.
///
/// Components `ψ_j` of a normalized eigenvector shrink with matrix
/// size; each mode multiplies them by a power of `n` chosen so that a
/// particular feature of the distribution stays of order one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationMode {
    /// No rescaling: the components exactly as the eigensolver emits them.
    Raw,
    /// `y = n^{γ/2} ψ_j`: typical components are O(1) and follow a
    /// Cauchy profile of width ε in the large-`n` limit.
    Bulk,
    /// `z = n^{1−γ/2} ψ_j`: far-tail components are O(1) and collapse
    /// onto an `n`-independent curve once the density is multiplied by
    /// `n^{γ−1}`.
    Tail,
}

impl NormalizationMode {
    /// Short lowercase label used in file names and reports.
    pub fn label(&self) -> &'static str {
        match self {
            NormalizationMode::Raw => "raw",
            NormalizationMode::Bulk => "bulk",
            NormalizationMode::Tail => "tail",
        }
    }

    /// Component scale factor `C` for a matrix dimension and exponent:
    /// the analyzed variable is `C·ψ_j`. Defined for any `γ ≥ 0`, so
    /// measurements can be rescaled even outside the regime where the
    /// predictions of [`TheoryContext`] apply.
    pub fn scale(&self, n: usize, gamma_exp: f64) -> f64 {
        let n = n as f64;
        match self {
            NormalizationMode::Raw => 1.0,
            NormalizationMode::Bulk => n.powf(gamma_exp / 2.0),
            NormalizationMode::Tail => n.powf(1.0 - gamma_exp / 2.0),
        }
    }
}

/// Exact second moment `I_q` at `q = 0` is the dimension itself; the
/// largest exponent accepted before gamma-function overflow.
const MAX_MOMENT_ORDER: f64 = 85.0;

/// Precomputed prediction context for one parameter set.
///
/// Construction validates that the parameters sit in the fractal
/// regime `1 < γ < 2` where these predictions hold.
#[derive(Debug, Clone)]
pub struct TheoryContext {
    params: EnsembleParams,
    delta: f64,
    b_const: f64,
}

impl TheoryContext {
    /// Build a context, checking `1 < γ < 2` and the parameter ranges.
    pub fn new(params: EnsembleParams) -> Result<Self, TheoryError> {
        params.validate().map_err(|e| TheoryError::Domain {
            detail: e.to_string(),
        })?;
        if !(params.gamma_exp > 1.0 && params.gamma_exp < 2.0) {
            return Err(TheoryError::Domain {
                detail: format!(
                    "predictions require 1 < gamma_exp < 2 (fractal regime), got {}",
                    params.gamma_exp
                ),
            });
        }
        let n = params.n as f64;
        let eps2 = params.epsilon * params.epsilon;
        // Γ(0) = π ε² ρ(0) / n^{γ−1} with ρ(0) = 1/√(2π).
        let delta = eps2 * (PI / 2.0).sqrt() / n.powf(params.gamma_exp - 1.0);
        let b_const = params.epsilon * PI.sqrt() / (2.0 * SQRT_2);
        Ok(Self {
            params,
            delta,
            b_const,
        })
    }

    /// The parameters this context was built from.
    pub fn params(&self) -> &EnsembleParams {
        &self.params
    }

    /// Density of site energies (and, for large `n`, of eigenvalues):
    /// a standard normal.
    pub fn level_density(&self, energy: f64) -> f64 {
        (-0.5 * energy * energy).exp() / (2.0 * PI).sqrt()
    }

    /// Spreading width `Γ(E) = π ε² ρ(E) / n^{γ−1}`.
    pub fn spreading_width(&self, energy: f64) -> f64 {
        let n = self.params.n as f64;
        PI * self.params.epsilon * self.params.epsilon * self.level_density(energy)
            / n.powf(self.params.gamma_exp - 1.0)
    }

    /// Spreading width at the spectrum center, `δ = Γ(0)`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Tail-law constant `b = √π ε / (2√2)`; the limit curve depends on
    /// the parameters only through it.
    pub fn b_const(&self) -> f64 {
        self.b_const
    }

    /// Component scale factor `C` of a mode: the analyzed variable is
    /// `C·ψ_j`.
    pub fn mode_scale(&self, mode: NormalizationMode) -> f64 {
        mode.scale(self.params.n, self.params.gamma_exp)
    }

    /// Breit–Wigner numerator `a = C² ε² / n^γ` in the given mode.
    pub fn mode_a(&self, mode: NormalizationMode) -> f64 {
        let n = self.params.n as f64;
        let eps2 = self.params.epsilon * self.params.epsilon;
        match mode {
            NormalizationMode::Raw => eps2 / n.powf(self.params.gamma_exp),
            NormalizationMode::Bulk => eps2,
            NormalizationMode::Tail => eps2 * n.powf(2.0 - 2.0 * self.params.gamma_exp),
        }
    }

    /// Mean squared component (in the mode variable) of an eigenfunction
    /// at energy `eig_energy` on a site with diagonal energy
    /// `site_energy`: `a / ((E − e)² + Γ(E)²)`.
    pub fn mean_square_component(
        &self,
        mode: NormalizationMode,
        eig_energy: f64,
        site_energy: f64,
    ) -> f64 {
        let a = self.mode_a(mode);
        let width = self.spreading_width(eig_energy);
        let de = eig_energy - site_energy;
        a / (de * de + width * width)
    }

    /// Component density at the spectrum center, in closed form.
    ///
    /// With `ζ = δ²(x² + a)/(4a)` the density is
    /// `P(x) = δ²/(4π√a) · [K₀(ζ) + K₁(ζ)] · e^{−ζ + δ²/2}`,
    /// evaluated here through exponentially scaled Bessel functions so
    /// large `x` underflows gracefully instead of overflowing.
    pub fn distribution_center(
        &self,
        mode: NormalizationMode,
        x: f64,
    ) -> Result<f64, TheoryError> {
        if !x.is_finite() {
            return Err(TheoryError::Domain {
                detail: format!("component value must be finite, got {x}"),
            });
        }
        let a = self.mode_a(mode);
        let d2 = self.delta * self.delta;
        let zeta = d2 * (x * x + a) / (4.0 * a);
        let k0 = bessel_k0_scaled(zeta)?;
        let k1 = bessel_k1_scaled(zeta)?;
        let damp = exp_guarded(-2.0 * zeta + 0.5 * d2);
        Ok(d2 / (4.0 * PI * a.sqrt()) * (k0 + k1) * damp)
    }

    /// Component density at an arbitrary eigenvalue energy, by adaptive
    /// quadrature over the site-energy mixture
    /// `P(x) = 1/(2π√a) ∫ √((E−e)² + Γ²) ·
    ///          exp(−x²((E−e)² + Γ²)/(2a) − e²/2) de`.
    ///
    /// The integration splits at `e = E`, where the integrand peaks in
    /// the small-`a` modes, so the adaptive rule localizes immediately.
    pub fn distribution_at_energy(
        &self,
        mode: NormalizationMode,
        x: f64,
        eig_energy: f64,
    ) -> Result<f64, TheoryError> {
        if !x.is_finite() || !eig_energy.is_finite() {
            return Err(TheoryError::Domain {
                detail: format!("arguments must be finite, got x = {x}, energy = {eig_energy}"),
            });
        }
        let a = self.mode_a(mode);
        let width = self.spreading_width(eig_energy);
        let w2 = width * width;
        let half_x2_over_a = x * x / (2.0 * a);
        let integrand = move |e: f64| {
            let de = eig_energy - e;
            let t2 = de * de + w2;
            let expo = -half_x2_over_a * t2 - 0.5 * e * e;
            if expo < -745.0 {
                0.0
            } else {
                t2.sqrt() * expo.exp()
            }
        };
        let spec = QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-300,
            max_subdivisions: 200,
            ..QuadratureSpec::default()
        };
        let lower = integrate(integrand, Interval::LowerHalfLine(eig_energy), &spec)?;
        let upper = integrate(integrand, Interval::UpperHalfLine(eig_energy), &spec)?;
        Ok((lower.value + upper.value) / (2.0 * PI * a.sqrt()))
    }

    /// Large-`n` limit of the bulk-mode density: a Cauchy profile
    /// `P(y) = ε / (π(y² + ε²))`.
    pub fn distribution_bulk_limit(&self, y: f64) -> f64 {
        let eps = self.params.epsilon;
        eps / (PI * (y * y + eps * eps))
    }

    /// Large-`n` limit of the scaled tail density
    /// `n^{γ−1} P(z) → 2√2 b³/π^{3/2} · [K₀(b²z²) + K₁(b²z²)] e^{−b²z²}`.
    ///
    /// The curve diverges logarithmically at `z = 0`, which is outside
    /// the tail regime anyway, so zero is rejected.
    pub fn distribution_tail_limit(&self, z: f64) -> Result<f64, TheoryError> {
        if !z.is_finite() || z == 0.0 {
            return Err(TheoryError::Domain {
                detail: format!("tail limit law requires finite nonzero z, got {z}"),
            });
        }
        let b = self.b_const;
        let s = b * b * z * z;
        let k0 = bessel_k0_scaled(s)?;
        let k1 = bessel_k1_scaled(s)?;
        let prefactor = 2.0 * SQRT_2 * b.powi(3) / PI.powf(1.5);
        Ok(prefactor * (k0 + k1) * exp_guarded(-2.0 * s))
    }

    /// Large-`n` tail density itself, `P(z) = n^{1−γ} ·` the scaled
    /// limit of [`Self::distribution_tail_limit`]: the form the
    /// recorded `z`-histograms approach at this context's own size.
    pub fn distribution_tail(&self, z: f64) -> Result<f64, TheoryError> {
        let scale = (self.params.n as f64).powf(1.0 - self.params.gamma_exp);
        Ok(scale * self.distribution_tail_limit(z)?)
    }

    /// Scaling exponent `τ(q)` defined by `I_q ∝ n^{−τ(q)}`:
    /// `γq − 1` below `q = 1/2` and `(q − 1)(2 − γ)` above, continuous
    /// at the meeting point.
    pub fn tau_exponent(&self, q: f64) -> f64 {
        let g = self.params.gamma_exp;
        if q <= 0.5 {
            g * q - 1.0
        } else {
            (q - 1.0) * (2.0 - g)
        }
    }

    /// Exact moment `I_q = n·⟨|ψ_j|^{2q}⟩` of the center distribution,
    /// in terms of the confluent hypergeometric function:
    /// `I_q = 2^{q−1/2} a^q n Γ(q+1/2) / (√π δ^{2q−1}) · U(1/2, 3/2−q, δ²/2)`
    /// with the raw-mode `a`. Requires `q > −1/2`.
    pub fn moment_exact(&self, q: f64) -> Result<f64, TheoryError> {
        self.check_moment_order(q)?;
        let n = self.params.n as f64;
        let a = self.mode_a(NormalizationMode::Raw);
        let d = self.delta;
        let u = tricomi_u(0.5, 1.5 - q, 0.5 * d * d)?;
        let g = gamma_fn(q + 0.5)?;
        Ok(2f64.powf(q - 0.5) * a.powf(q) * n * g / (PI.sqrt() * d.powf(2.0 * q - 1.0)) * u)
    }

    /// Leading coefficient `C_q` of the power-law asymptotic
    /// `I_q ≈ C_q n^{−τ(q)}`.
    ///
    /// Below `q = 1/2` this is `ε^{2q} Γ(q+1/2) Γ(1/2−q) / π`; above it
    /// is `Γ(q−1/2) Γ(q+1/2) / (π b^{2q−2} 2^{q−2} Γ(q))`. Exactly at
    /// `q = 1/2` the asymptotic is logarithmic and has no pure
    /// coefficient, so that point is rejected.
    pub fn moment_coefficient(&self, q: f64) -> Result<f64, TheoryError> {
        self.check_moment_order(q)?;
        let eps = self.params.epsilon;
        if (q - 0.5).abs() < 1e-12 {
            return Err(TheoryError::Domain {
                detail: "q = 1/2 scales logarithmically; use moment_half".to_string(),
            });
        }
        if q < 0.5 {
            Ok(eps.powf(2.0 * q) * gamma_fn(q + 0.5)? * gamma_fn(0.5 - q)? / PI)
        } else {
            let b = self.b_const;
            Ok(gamma_fn(q - 0.5)? * gamma_fn(q + 0.5)?
                / (PI * b.powf(2.0 * q - 2.0) * 2f64.powf(q - 2.0) * gamma_fn(q)?))
        }
    }

    /// Finite-size correction factor for the small-`q` power law,
    /// valid on `−1/2 < q < 1/2`:
    /// `c(q) = 1 + π^{1−q} ε^{2−4q} Γ(q−1/2) /
    ///          (2^{1−2q} Γ(q) Γ(1/2−q)) · n^{−(γ−1)(1−2q)}`.
    pub fn moment_correction(&self, q: f64) -> Result<f64, TheoryError> {
        if !q.is_finite() || q <= -0.5 || q >= 0.5 {
            return Err(TheoryError::Domain {
                detail: format!("correction factor requires −1/2 < q < 1/2, got {q}"),
            });
        }
        if q == 0.0 {
            // 1/Γ(0) = 0: the correction vanishes identically.
            return Ok(1.0);
        }
        let n = self.params.n as f64;
        let g = self.params.gamma_exp;
        let eps = self.params.epsilon;
        let coef = PI.powf(1.0 - q) * eps.powf(2.0 - 4.0 * q) * gamma_fn(q - 0.5)?
            / (2f64.powf(1.0 - 2.0 * q) * gamma_fn(q)? * gamma_fn(0.5 - q)?);
        Ok(1.0 + coef * n.powf(-(g - 1.0) * (1.0 - 2.0 * q)))
    }

    /// Asymptotic moment at the meeting point of the two power laws:
    /// `I_{1/2} = n^{1−γ/2} (ε/π) [2(γ−1) ln n − ln(π ε⁴/16) − γ_E]`.
    pub fn moment_half(&self) -> f64 {
        let n = self.params.n as f64;
        let g = self.params.gamma_exp;
        let eps = self.params.epsilon;
        let bracket =
            2.0 * (g - 1.0) * n.ln() - (PI * eps.powi(4) / 16.0).ln() - EULER_GAMMA;
        n.powf(1.0 - g / 2.0) * (eps / PI) * bracket
    }

    /// Power-law asymptotic `C_q · n^{−τ(q)}`, switching to the
    /// logarithmic form exactly at `q = 1/2`.
    pub fn moment_asymptotic(&self, q: f64) -> Result<f64, TheoryError> {
        self.check_moment_order(q)?;
        if (q - 0.5).abs() < 1e-12 {
            return Ok(self.moment_half());
        }
        let n = self.params.n as f64;
        Ok(self.moment_coefficient(q)? * n.powf(-self.tau_exponent(q)))
    }

    /// All moment predictions for a list of orders.
    pub fn moment_predictions(&self, orders: &[f64]) -> Result<Vec<MomentPrediction>, TheoryError> {
        orders
            .iter()
            .map(|&q| {
                let exact = self.moment_exact(q)?;
                let asymptotic = self.moment_asymptotic(q)?;
                let coefficient = if (q - 0.5).abs() < 1e-12 {
                    None
                } else {
                    Some(self.moment_coefficient(q)?)
                };
                let corrected = if q > -0.5 && q < 0.5 {
                    asymptotic * self.moment_correction(q)?
                } else {
                    asymptotic
                };
                Ok(MomentPrediction {
                    q,
                    tau: self.tau_exponent(q),
                    exact,
                    asymptotic,
                    corrected,
                    coefficient,
                })
            })
            .collect()
    }

    fn check_moment_order(&self, q: f64) -> Result<(), TheoryError> {
        if !q.is_finite() || q <= -0.5 || q > MAX_MOMENT_ORDER {
            return Err(TheoryError::Domain {
                detail: format!("moment order must satisfy −1/2 < q ≤ {MAX_MOMENT_ORDER}, got {q}"),
            });
        }
        Ok(())
    }
}

/// One row of a moment-prediction table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPrediction {
    /// Moment order.
    pub q: f64,
    /// Scaling exponent `τ(q)`.
    pub tau: f64,
    /// Exact finite-`n` value.
    pub exact: f64,
    /// Power-law (or, at `q = 1/2`, logarithmic) asymptotic.
    pub asymptotic: f64,
    /// Asymptotic including the finite-size correction where available.
    pub corrected: f64,
    /// Pure coefficient `C_q`; absent at `q = 1/2`.
    pub coefficient: Option<f64>,
}

#[inline]
fn exp_guarded(w: f64) -> f64 {
    if w < -745.0 {
        0.0
    } else {
        w.exp()
    }
}
