//! Gamma function by the Lanczos approximation.
//!
//! The Lanczos form Γ(x) = √(2π)·(x + g − ½)^{x−½}·e^{−(x+g−½)}·A_g(x)
//! with the classical g = 7, 9-term coefficient set is accurate to well
//! below 1e−13 relative error on the right half-plane; the left half-plane
//! is reached through the reflection formula
//! Γ(x)·Γ(1−x) = π / sin(πx).

use super::SpecFunError;
use std::f64::consts::PI;

/// Lanczos coefficients for g = 7 (9 terms).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for real x.
///
/// Non-positive integers are poles and produce a domain error; very large
/// arguments (x > 171.62) overflow `f64` and are reported as a domain
/// error as well rather than returning ∞.
pub fn gamma_fn(x: f64) -> Result<f64, SpecFunError> {
    if !x.is_finite() {
        return Err(SpecFunError::Domain {
            context: "gamma_fn",
            detail: format!("argument must be finite, got {x}"),
        });
    }
    if x <= 0.0 && x == x.floor() {
        return Err(SpecFunError::Domain {
            context: "gamma_fn",
            detail: format!("pole at non-positive integer x = {x}"),
        });
    }
    if x > 171.624 {
        return Err(SpecFunError::Domain {
            context: "gamma_fn",
            detail: format!("Γ({x}) overflows f64"),
        });
    }

    if x < 0.5 {
        // Reflection: Γ(x) = π / (sin(πx) · Γ(1 − x)).
        let s = (PI * x).sin();
        if s == 0.0 {
            return Err(SpecFunError::Domain {
                context: "gamma_fn",
                detail: format!("reflection hit sin(πx) = 0 at x = {x}"),
            });
        }
        let g1 = lanczos(1.0 - x);
        Ok(PI / (s * g1))
    } else {
        Ok(lanczos(x))
    }
}

/// Lanczos core, valid for x ≥ 0.5.
fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}
