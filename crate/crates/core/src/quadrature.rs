//! Adaptive one-dimensional quadrature: Gauss–Kronrod (10/21) with global
//! bisection, adaptive Simpson, and a log-domain front end for integrands
//! whose magnitude spans hundreds of decades.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::QuadratureError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    AdaptiveSimpson,
    GaussKronrod,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    pub method: Method,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Integrate in `s = ln t` (requires `a > 0`).
    pub log_substitution: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            method: Method::GaussKronrod,
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
            log_substitution: true,
        }
    }
}

impl QuadratureSpec {
    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) || (self.abs_tol == 0.0 && self.rel_tol == 0.0) {
            return Err("quadrature tolerances must be nonnegative and not both zero".into());
        }
        if self.max_subdivisions == 0 {
            return Err("max_subdivisions must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { value: 0.0, error: 0.0, evaluations: 0 };
}

/// A positive quantity stored as `mantissa · e^{log_scale}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogEstimate {
    pub log_scale: f64,
    pub mantissa: f64,
    /// Absolute error of the mantissa.
    pub error: f64,
}

impl LogEstimate {
    pub const ZERO: LogEstimate = LogEstimate { log_scale: 0.0, mantissa: 0.0, error: 0.0 };

    pub fn ln(&self) -> f64 {
        self.log_scale + self.mantissa.ln()
    }

    pub fn value(&self) -> f64 {
        self.mantissa * self.log_scale.exp()
    }

    pub fn rel_error(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.error / self.mantissa.abs()
        }
    }

    /// Multiplies by `e^{shift}`.
    pub fn scaled(self, shift: f64) -> Self {
        Self { log_scale: self.log_scale + shift, ..self }
    }
}

/// Natural log of a sum of log-domain estimates.
pub fn ln_sum(parts: &[LogEstimate]) -> f64 {
    let top = parts
        .iter()
        .filter(|p| p.mantissa > 0.0)
        .map(LogEstimate::ln)
        .fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    let s = neumaier_sum(parts.iter().filter(|p| p.mantissa > 0.0).map(|p| (p.ln() - top).exp()));
    top + s.ln()
}

/// Compensated summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_9,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel, QuadratureError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadratureError::NonFinite { t: c });
    }
    let mut k = WGK[10] * fc;
    let mut g = 0.0;
    for i in 0..10 {
        let (tl, tr) = (c - h * XGK[i], c + h * XGK[i]);
        let (fl, fr) = (f(tl), f(tr));
        if !fl.is_finite() {
            return Err(QuadratureError::NonFinite { t: tl });
        }
        if !fr.is_finite() {
            return Err(QuadratureError::NonFinite { t: tr });
        }
        k += WGK[i] * (fl + fr);
        if i % 2 == 1 {
            g += WG[i / 2] * (fl + fr);
        }
    }
    let value = k * h;
    let error = ((k - g) * h).abs();
    Ok(Panel { a, b, value, error })
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate, QuadratureError> {
    let mut heap = BinaryHeap::new();
    heap.push(kronrod21(f, a, b)?);
    let mut evaluations = 21;
    loop {
        let value = neumaier_sum(heap.iter().map(|p| p.value));
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= spec.target(value) {
            return Ok(Estimate { value, error, evaluations });
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(QuadratureError::ToleranceNotMet { a, b, estimate: value, error });
        }
        let worst = heap.pop().expect("nonempty panel heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            heap.push(worst);
            let value = neumaier_sum(heap.iter().map(|p| p.value));
            return Err(QuadratureError::ToleranceNotMet { a, b, estimate: value, error });
        }
        heap.push(kronrod21(f, worst.a, mid)?);
        heap.push(kronrod21(f, mid, worst.b)?);
        evaluations += 42;
    }
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate, QuadratureError> {
    let eval = |t: f64| {
        let v = f(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFinite { t })
        }
    };
    let simpson = |a: f64, fa: f64, fm: f64, b: f64, fb: f64| (b - a) / 6.0 * (fa + 4.0 * fm + fb);

    let (fa, fm, fb) = (eval(a)?, eval(0.5 * (a + b))?, eval(b)?);
    let whole = simpson(a, fa, fm, b, fb);
    // Coarse pass sets the absolute target for the recursion.
    let target = spec.target(whole).max(f64::MIN_POSITIVE);
    let mut evaluations = 3;
    let mut parts = Vec::new();
    let mut error = 0.0;
    let mut stack = vec![(a, fa, 0.5 * (a + b), fm, b, fb, whole, target, 0u32)];
    while let Some((a, fa, m, fm, b, fb, s, tol, depth)) = stack.pop() {
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (eval(lm)?, eval(rm)?);
        evaluations += 2;
        let left = simpson(a, fa, flm, m, fm);
        let right = simpson(m, fm, frm, b, fb);
        let delta = left + right - s;
        if delta.abs() <= 15.0 * tol || depth >= 48 {
            if depth >= 48 && delta.abs() > 15.0 * tol {
                return Err(QuadratureError::ToleranceNotMet { a, b, estimate: left + right, error: delta.abs() / 15.0 });
            }
            parts.push(left + right + delta / 15.0);
            error += delta.abs() / 15.0;
        } else {
            if parts.len() + stack.len() > 64 * spec.max_subdivisions {
                return Err(QuadratureError::ToleranceNotMet { a, b, estimate: s, error: delta.abs() });
            }
            stack.push((m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1));
            stack.push((a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1));
        }
    }
    Ok(Estimate { value: neumaier_sum(parts), error, evaluations })
}

/// Integrates `f` over `[a, b]` in the variable `t` (no substitution).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate, QuadratureError> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(QuadratureError::BadInterval { a, b });
    }
    if a == b {
        return Ok(Estimate::ZERO);
    }
    match spec.method {
        Method::GaussKronrod => gauss_kronrod(&f, a, b, spec),
        Method::AdaptiveSimpson => adaptive_simpson(&f, a, b, spec),
    }
}

/// Integrates `exp(log_f(t))` over `[a, b]`, keeping the result as a
/// log-scale plus mantissa. Honors `spec.log_substitution`.
pub fn integrate_log<F: Fn(f64) -> f64>(log_f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<LogEstimate, QuadratureError> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(QuadratureError::BadInterval { a, b });
    }
    if a == b {
        return Ok(LogEstimate::ZERO);
    }
    let subst = spec.log_substitution && a > 0.0;
    let (lo, hi) = if subst { (a.ln(), b.ln()) } else { (a, b) };
    let g = |s: f64| if subst { log_f(s.exp()) + s } else { log_f(s) };

    const PROBES: usize = 65;
    let mut shift = f64::NEG_INFINITY;
    for k in 0..PROBES {
        let s = lo + (hi - lo) * k as f64 / (PROBES - 1) as f64;
        let v = g(s);
        if v.is_nan() || v == f64::INFINITY {
            return Err(QuadratureError::NonFinite { t: if subst { s.exp() } else { s } });
        }
        shift = shift.max(v);
    }
    if shift == f64::NEG_INFINITY {
        return Ok(LogEstimate::ZERO);
    }
    let est = integrate(|s| (g(s) - shift).exp(), lo, hi, spec)?;
    Ok(LogEstimate { log_scale: shift, mantissa: est.value, error: est.error })
}
