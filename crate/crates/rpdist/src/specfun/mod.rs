//! Special functions and numerical quadrature.
//!
//! Everything the closed-form theory needs, self-contained and
//! cross-validated:
//!
//! * [`integrate`] — adaptive Gauss–Kronrod (7/15 pair) or fixed-order
//!   Gauss–Legendre quadrature over finite, half-infinite, or doubly
//!   infinite intervals.
//! * [`gamma_fn`] — Γ(x) via the Lanczos approximation with the reflection
//!   formula for the left half-plane.
//! * [`bessel_k0`], [`bessel_k1`] (and exponentially scaled variants) —
//!   modified Bessel functions of the second kind, by ascending series for
//!   small argument and a Steed continued-fraction evaluation for large
//!   argument.
//! * [`kummer_m`] — confluent hypergeometric M(α,β,z) by Taylor series with
//!   the Kummer transformation for negative argument.
//! * [`tricomi_u`] — confluent hypergeometric U(α,β,z) by adaptive
//!   quadrature of its Euler integral representation, with the M-connection
//!   formula available as an independent cross-check route.
//!
//! Each function is tested against an *independent* oracle: Γ against its
//! Euler integral, K₀/K₁ against the cosh integral
//! ∫₀^∞ cosh(νt)·exp(−z·cosh t) dt, M against its error-function reduction,
//! and U's two routes against each other.

mod bessel;
mod gamma;
mod hyper;
mod quad;

pub use bessel::{bessel_k0, bessel_k0_scaled, bessel_k1, bessel_k1_scaled};
pub use gamma::gamma_fn;
pub use hyper::{kummer_m, tricomi_u, tricomi_u_connection};
pub use quad::{integrate, Interval, Quadrature, QuadratureSpec, Scheme};

/// Error conditions for special-function evaluation and quadrature.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecFunError {
    /// The input lies outside the function's domain (pole, branch cut,
    /// or invalid interval/tolerance specification).
    #[error("domain error in {context}: {detail}")]
    Domain {
        /// Name of the operation that rejected the input.
        context: &'static str,
        /// Human-readable description of the violation.
        detail: String,
    },

    /// The accuracy target could not be met within the iteration or
    /// subdivision budget. The best available value is carried so callers
    /// can degrade gracefully or re-run with a looser specification.
    #[error("accuracy not reached in {context}: best {value:e}, error estimate {error:e}")]
    Accuracy {
        /// Name of the operation that failed to converge.
        context: &'static str,
        /// Best estimate produced before giving up.
        value: f64,
        /// Estimated absolute error of `value`.
        error: f64,
    },

    /// The mathematically correct result is too small to represent as a
    /// normal `f64` (e.g. unscaled K₀(z) for very large z).
    #[error("underflow in {context}: {detail}")]
    Underflow {
        /// Name of the operation.
        context: &'static str,
        /// Description, including the offending argument.
        detail: String,
    },
}

/// Euler–Mascheroni constant γ ≈ 0.5772, used by the small-argument Bessel
/// series and the logarithmic moment asymptotics.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
