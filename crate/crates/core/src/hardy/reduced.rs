use serde::Serialize;

use crate::error::QuadratureError;
use crate::families::{ln_sinh, PsiBounds};
use crate::quadrature::{integrate, integrate_log, Estimate, LogEstimate, QuadratureSpec};

/// Reference radial measure `t^{n−1} dt` or `sinh(kt)^{n−1} e^{−(n−1)ht} dt`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReferenceMeasure {
    pub n: usize,
    /// `Some(k)` selects the hyperbolic form.
    pub sinh_rate: Option<f64>,
    pub h: f64,
}

impl ReferenceMeasure {
    pub fn flat(n: usize) -> Self {
        Self { n, sinh_rate: None, h: 0.0 }
    }

    pub fn hyperbolic(n: usize, k: f64, h: f64) -> Self {
        Self { n, sinh_rate: Some(k), h }
    }

    pub fn from_bounds(n: usize, bounds: &PsiBounds, h: f64) -> Self {
        Self { n, sinh_rate: bounds.sinh_rate, h }
    }

    pub fn ln_density(&self, t: f64) -> f64 {
        let m = (self.n - 1) as f64;
        match self.sinh_rate {
            None => m * t.ln(),
            Some(k) => m * (ln_sinh(k * t) - self.h * t),
        }
    }

    /// `∫_a^b exp(ln_f) dμ` in the log domain.
    pub fn integral<F: Fn(f64) -> f64>(&self, ln_f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<LogEstimate, QuadratureError> {
        integrate_log(|t| ln_f(t) + self.ln_density(t), a, b, spec)
    }
}

/// `∫_a^b f(t) t^{n−1} dt`.
pub fn reduced_integral_flat<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize, spec: &QuadratureSpec) -> Result<Estimate, QuadratureError> {
    let m = (n - 1) as i32;
    if spec.log_substitution && a > 0.0 {
        integrate(|s| { let t = s.exp(); f(t) * t.powi(m) * t }, a.ln(), b.ln(), spec)
    } else {
        integrate(|t| f(t) * t.powi(m), a, b, spec)
    }
}

/// `∫_a^b f(t) sinh(kt)^{n−1} e^{−(n−1)ht} dt` as `mantissa · e^{log_scale}`;
/// `f` may change sign.
pub fn reduced_integral_hyperbolic<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    n: usize,
    k: f64,
    h: f64,
    spec: &QuadratureSpec,
) -> Result<LogEstimate, QuadratureError> {
    let mu = ReferenceMeasure::hyperbolic(n, k, h);
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(QuadratureError::BadInterval { a, b });
    }
    if a == b {
        return Ok(LogEstimate::ZERO);
    }
    const PROBES: usize = 65;
    let shift = (0..PROBES)
        .map(|i| mu.ln_density(a + (b - a) * i as f64 / (PROBES - 1) as f64))
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let shift = if shift.is_finite() { shift } else { 0.0 };
    let est = integrate(|t| f(t) * (mu.ln_density(t) - shift).exp(), a, b, &QuadratureSpec { log_substitution: false, ..*spec })?;
    Ok(LogEstimate { log_scale: shift, mantissa: est.value, error: est.error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_constant() {
        let d = 10.0;
        let e = reduced_integral_flat(|_| 1.0, d / 2.0, d, 3, &QuadratureSpec::default()).unwrap();
        assert!((e.value - 7.0 / 24.0 * d.powi(3)).abs() < 1e-10 * d.powi(3));
        assert_eq!(reduced_integral_flat(|_| 1.0, 2.0, 2.0, 3, &QuadratureSpec::default()).unwrap().value, 0.0);
    }

    #[test]
    fn hyperbolic_constant() {
        let e = reduced_integral_hyperbolic(|_| 1.0, 0.0, 1.0, 2, 1.0, 0.0, &QuadratureSpec::default()).unwrap();
        assert!((e.value() - (1f64.cosh() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn hyperbolic_extreme_range_stays_finite() {
        let e = reduced_integral_hyperbolic(|_| 1.0, 0.0, 2000.0, 3, 1.0, 0.0, &QuadratureSpec::default()).unwrap();
        // ∫ sinh² ≈ e^{2b}/8
        assert!((e.ln() - (4000.0 - 8f64.ln())).abs() < 1e-9);
        let damped = reduced_integral_hyperbolic(|_| 1.0, 0.0, 2000.0, 2, 1.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!(damped.value() < 1000.0 && damped.value() > 999.0);
    }
}
