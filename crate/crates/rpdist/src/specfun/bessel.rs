//! Modified Bessel functions of the second kind, K₀ and K₁.
//!
//! Two regimes stitched at z = 2:
//!
//! * z ≤ 2 — the ascending series (DLMF 10.31.2, all terms benign):
//!   K₀(z) = −(ln(z/2) + γ)·I₀(z) + Σ_{k≥1} (z²/4)^k H_k / (k!)²,
//!   K₁(z) = 1/z + ln(z/2)·I₁(z)
//!           − (z/4)·Σ_{k≥0} [ψ(k+1) + ψ(k+2)] (z²/4)^k / (k!(k+1)!).
//! * z > 2 — the Steed continued-fraction algorithm (CF2, the scheme used
//!   by the classical Temme/Thompson–Barnett route), which produces the
//!   exponentially scaled pair e^z·K₀(z), e^z·K₁(z) directly.
//!
//! Both regimes agree with the integral representation
//! K_ν(z) = ∫₀^∞ cosh(νt)·e^{−z cosh t} dt to better than 1e−12 relative,
//! which the tests enforce by quadrature.

use super::{SpecFunError, EULER_GAMMA};
use std::f64::consts::PI;

/// Largest argument for which the *unscaled* K₀/K₁ are returned; beyond
/// this the result would be within a few orders of the subnormal range.
const UNSCALED_LIMIT: f64 = 700.0;

/// K₀(z) for z > 0. Arguments above 700 are reported as underflow — use
/// [`bessel_k0_scaled`] there instead.
pub fn bessel_k0(z: f64) -> Result<f64, SpecFunError> {
    check_argument("bessel_k0", z)?;
    if z > UNSCALED_LIMIT {
        return Err(SpecFunError::Underflow {
            context: "bessel_k0",
            detail: format!("K0({z:e}) < 1e-306; use the scaled variant"),
        });
    }
    if z <= 2.0 {
        Ok(k0_series(z))
    } else {
        Ok(k01_scaled_cf2(z).0 * (-z).exp())
    }
}

/// K₁(z) for z > 0, with the same underflow policy as [`bessel_k0`].
pub fn bessel_k1(z: f64) -> Result<f64, SpecFunError> {
    check_argument("bessel_k1", z)?;
    if z > UNSCALED_LIMIT {
        return Err(SpecFunError::Underflow {
            context: "bessel_k1",
            detail: format!("K1({z:e}) < 1e-306; use the scaled variant"),
        });
    }
    if z <= 2.0 {
        Ok(k1_series(z))
    } else {
        Ok(k01_scaled_cf2(z).1 * (-z).exp())
    }
}

/// e^z·K₀(z) — no underflow for any positive argument.
pub fn bessel_k0_scaled(z: f64) -> Result<f64, SpecFunError> {
    check_argument("bessel_k0_scaled", z)?;
    if z <= 2.0 {
        Ok(k0_series(z) * z.exp())
    } else {
        Ok(k01_scaled_cf2(z).0)
    }
}

/// e^z·K₁(z) — no underflow for any positive argument.
pub fn bessel_k1_scaled(z: f64) -> Result<f64, SpecFunError> {
    check_argument("bessel_k1_scaled", z)?;
    if z <= 2.0 {
        Ok(k1_series(z) * z.exp())
    } else {
        Ok(k01_scaled_cf2(z).1)
    }
}

fn check_argument(context: &'static str, z: f64) -> Result<(), SpecFunError> {
    if !(z > 0.0) || !z.is_finite() {
        Err(SpecFunError::Domain {
            context,
            detail: format!("argument must be positive and finite, got {z}"),
        })
    } else {
        Ok(())
    }
}

/// Ascending series for K₀, valid (and fast) for 0 < z ≤ 2.
fn k0_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let log_half = (0.5 * z).ln();

    // I₀ and the harmonic-weighted companion sum, advanced together.
    let mut term = 1.0; // (z²/4)^k / (k!)²
    let mut i0 = term;
    let mut hsum = 0.0; // Σ term·H_k
    let mut h = 0.0;
    for k in 1..64 {
        term *= q / ((k * k) as f64);
        h += 1.0 / k as f64;
        i0 += term;
        hsum += term * h;
        if term < f64::EPSILON * i0 {
            break;
        }
    }
    -(log_half + EULER_GAMMA) * i0 + hsum
}

/// Ascending series for K₁, valid for 0 < z ≤ 2.
fn k1_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let log_half = (0.5 * z).ln();

    // I₁(z) = (z/2)·Σ q^k / (k!(k+1)!).
    let mut term = 1.0; // q^k / (k!(k+1)!)
    let mut i1_sum = term;
    // Σ [ψ(k+1) + ψ(k+2)]·q^k / (k!(k+1)!), with ψ(1) = −γ.
    let mut psi_a = -EULER_GAMMA; // ψ(k+1)
    let mut psi_b = 1.0 - EULER_GAMMA; // ψ(k+2)
    let mut psi_sum = (psi_a + psi_b) * term;
    for k in 1..64 {
        term *= q / ((k * (k + 1)) as f64);
        psi_a += 1.0 / k as f64;
        psi_b += 1.0 / (k + 1) as f64;
        i1_sum += term;
        psi_sum += (psi_a + psi_b) * term;
        if term * (psi_a + psi_b) < f64::EPSILON * psi_sum.abs() + f64::EPSILON {
            break;
        }
    }
    let i1 = 0.5 * z * i1_sum;
    1.0 / z + log_half * i1 - 0.25 * z * psi_sum
}

/// Steed CF2 evaluation of the scaled pair (e^z K₀, e^z K₁) for z ≥ 2.
///
/// This is the ν = 0 case of the standard continued fraction for
/// K_ν/K_{ν+1}; convergence at z ≥ 2 takes a few dozen iterations.
fn k01_scaled_cf2(z: f64) -> (f64, f64) {
    let max_iter = 10_000;

    let mut bi = 2.0 * (1.0 + z);
    let mut di = 1.0 / bi;
    let mut delta_h = di;
    let mut h = di;

    let mut q_prev = 0.0;
    let mut q_cur = 1.0;
    let a1 = -0.25; // −(1/4 − ν²) at ν = 0
    let mut a = a1;
    let mut c = -a;
    let mut q_acc = -a;
    let mut s = 1.0 + q_acc * delta_h;

    for i in 2..=max_iter {
        a -= 2.0 * (i - 1) as f64;
        c = -a * c / i as f64;
        let q_next = (q_prev - bi * q_cur) / a;
        q_prev = q_cur;
        q_cur = q_next;
        q_acc += c * q_cur;
        bi += 2.0;
        di = 1.0 / (bi + a * di);
        delta_h = (bi * di - 1.0) * delta_h;
        h += delta_h;
        let delta_s = q_acc * delta_h;
        s += delta_s;
        if (delta_s / s).abs() < f64::EPSILON {
            break;
        }
    }

    let h = -a1 * h;
    let k0 = (PI / (2.0 * z)).sqrt() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    (k0, k1)
}
