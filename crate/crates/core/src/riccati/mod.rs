//! Riccati pairs `(L, W)` with weight `w` and certificate `G`, the limit
//! function `v` with `−(ln v)′ = G^{1/(p−1)}`, and tent truncations of `v`.

mod tabulated;

pub use tabulated::{NaturalSpline, TabulatedPair, TabulatedRow};

use serde::{Deserialize, Serialize};

use crate::dual::{Dual, Real};
use crate::error::HardyError;
use crate::quadrature::{integrate, QuadratureSpec};

/// `p′ = p/(p−1)`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// The four profiles of a Riccati pair on `(left, right)`.
///
/// * `weight` is `w`, the radial weight in both integrals.
/// * `comparison` is `L`, a lower bound for `Δρ`.
/// * `hardy_weight` is `W`, the weight on the right-hand side.
/// * `solution` is `G`, a positive solution of the Riccati inequality.
pub trait RiccatiPair: Send + Sync {
    fn order(&self) -> f64;
    /// Open interval on which the profiles are defined.
    fn interval(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
    fn weight<T: Real>(&self, t: T) -> T;
    fn comparison<T: Real>(&self, t: T) -> T;
    fn hardy_weight<T: Real>(&self, t: T) -> T;
    fn solution<T: Real>(&self, t: T) -> T;

    /// `(G w)′`, by dual numbers unless overridden.
    fn d_solution_weight(&self, t: f64) -> f64 {
        let s = Dual::variable(t);
        (self.solution(s) * self.weight(s)).du
    }

    /// Closed-form `ln v(t)` normalized by `v(t_ref) = 1`, when known.
    fn closed_ln_v(&self, _t: f64, _t_ref: f64) -> Option<f64> {
        None
    }

    fn check(&self, t: f64) -> Result<(), HardyError> {
        let (lo, hi) = self.interval();
        if t > lo && t < hi {
            Ok(())
        } else {
            Err(HardyError::OutsideInterval { t, right: hi })
        }
    }
}

impl<P: RiccatiPair> RiccatiPair for &P {
    fn order(&self) -> f64 {
        (**self).order()
    }
    fn interval(&self) -> (f64, f64) {
        (**self).interval()
    }
    fn weight<T: Real>(&self, t: T) -> T {
        (**self).weight(t)
    }
    fn comparison<T: Real>(&self, t: T) -> T {
        (**self).comparison(t)
    }
    fn hardy_weight<T: Real>(&self, t: T) -> T {
        (**self).hardy_weight(t)
    }
    fn solution<T: Real>(&self, t: T) -> T {
        (**self).solution(t)
    }
    fn d_solution_weight(&self, t: f64) -> f64 {
        (**self).d_solution_weight(t)
    }
    fn closed_ln_v(&self, t: f64, t_ref: f64) -> Option<f64> {
        (**self).closed_ln_v(t, t_ref)
    }
}

/// `(Gw)′ + GwL − (p−1)G^{p′}w − Ww`; the pair is valid where this is `≥ 0`.
pub fn riccati_residual<P: RiccatiPair>(pair: &P, t: f64) -> Result<f64, HardyError> {
    pair.check(t)?;
    let p = pair.order();
    let w = pair.weight(t);
    let g = pair.solution(t);
    Ok(pair.d_solution_weight(t) + g * w * pair.comparison(t)
        - (p - 1.0) * g.powf(conjugate(p)) * w
        - pair.hardy_weight(t) * w)
}

/// `G^{p′}/W` at `t`.
pub fn solution_ratio<P: RiccatiPair>(pair: &P, t: f64) -> f64 {
    pair.solution(t).powf(conjugate(pair.order())) / pair.hardy_weight(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidualScan {
    pub points: usize,
    pub min: f64,
    pub max_abs: f64,
    pub argmin: f64,
}

impl ResidualScan {
    pub fn valid(&self, tol: f64) -> bool {
        self.min >= -tol
    }
}

/// `(t, residual)` on `points` log-spaced nodes of `[lo, hi]`.
pub fn residual_grid<P: RiccatiPair>(pair: &P, lo: f64, hi: f64, points: usize) -> Result<Vec<(f64, f64)>, HardyError> {
    if !(lo > 0.0 && hi > lo && points >= 2) {
        return Err(HardyError::Pair(format!("bad residual grid [{lo}, {hi}] with {points} points")));
    }
    (0..points)
        .map(|i| {
            let t = lo * (hi / lo).powf(i as f64 / (points - 1) as f64);
            Ok((t, riccati_residual(pair, t)?))
        })
        .collect()
}

/// Summary of [`residual_grid`].
pub fn residual_scan<P: RiccatiPair>(pair: &P, lo: f64, hi: f64, points: usize) -> Result<ResidualScan, HardyError> {
    let mut scan = ResidualScan { points, min: f64::INFINITY, max_abs: 0.0, argmin: lo };
    for (t, r) in residual_grid(pair, lo, hi, points)? {
        if r < scan.min {
            scan.min = r;
            scan.argmin = t;
        }
        scan.max_abs = scan.max_abs.max(r.abs());
    }
    Ok(scan)
}

/// `(n−1)ct_κ(t) − (n−1)h` with `ct₀(t) = 1/t` and `ct_κ(t) = κ coth(κt)`.
pub fn comparison_l(n: usize, kappa: f64, h: f64, t: f64) -> Result<f64, HardyError> {
    if !(t > 0.0) {
        return Err(HardyError::OutsideInterval { t, right: f64::INFINITY });
    }
    let ct = if kappa == 0.0 { 1.0 / t } else { kappa / (kappa * t).tanh() };
    Ok((n - 1) as f64 * (ct - h))
}

/// `w = t^α`, `L = (n−1)/t`, `W = c/t^p`, `G = c^{(p−1)/p}/t^{p−1}` with
/// `c = ((n+α−p)/p)^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HardyPair {
    pub n: usize,
    pub p: f64,
    pub alpha: f64,
    pub constant: f64,
}

pub fn preset_hardy(n: usize, p: f64, alpha: f64) -> Result<HardyPair, HardyError> {
    let m = n as f64 + alpha;
    if n < 2 || !(p > 1.0 && p < m) {
        return Err(HardyError::Pair(format!("Hardy preset needs n >= 2 and 1 < p < n + alpha, got n = {n}, p = {p}, alpha = {alpha}")));
    }
    Ok(HardyPair { n, p, alpha, constant: ((m - p) / p).powf(p) })
}

impl RiccatiPair for HardyPair {
    fn order(&self) -> f64 {
        self.p
    }
    fn weight<T: Real>(&self, t: T) -> T {
        t.powf(self.alpha)
    }
    fn comparison<T: Real>(&self, t: T) -> T {
        t.recip() * (self.n - 1) as f64
    }
    fn hardy_weight<T: Real>(&self, t: T) -> T {
        t.powf(-self.p) * self.constant
    }
    fn solution<T: Real>(&self, t: T) -> T {
        t.powf(1.0 - self.p) * self.constant.powf(1.0 / conjugate(self.p))
    }
    fn d_solution_weight(&self, t: f64) -> f64 {
        let e = self.alpha - self.p + 1.0;
        self.constant.powf(1.0 / conjugate(self.p)) * e * t.powf(e - 1.0)
    }
    fn closed_ln_v(&self, t: f64, t_ref: f64) -> Option<f64> {
        let m = self.n as f64 + self.alpha;
        Some(-((m - self.p) / self.p) * (t / t_ref).ln())
    }
}

/// Constant pair `w ≡ 1`, `L ≡ (n−1)(κ−h)`, `W ≡ c`, `G ≡ c^{(p−1)/p}` with
/// `c = ((n−1)(κ−h)/p)^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McKeanPair {
    pub n: usize,
    pub p: f64,
    pub kappa: f64,
    pub h: f64,
    pub constant: f64,
}

pub fn preset_mckean(n: usize, p: f64, kappa: f64, h: f64) -> Result<McKeanPair, HardyError> {
    if n < 2 || !(p > 1.0) || !(h >= 0.0 && kappa > h && kappa.is_finite()) {
        return Err(HardyError::Pair(format!("McKean preset needs n >= 2, p > 1 and kappa > h >= 0, got n = {n}, p = {p}, kappa = {kappa}, h = {h}")));
    }
    Ok(McKeanPair { n, p, kappa, h, constant: ((n - 1) as f64 * (kappa - h) / p).powf(p) })
}

impl McKeanPair {
    fn rate(&self) -> f64 {
        (self.n - 1) as f64 * (self.kappa - self.h)
    }
}

impl RiccatiPair for McKeanPair {
    fn order(&self) -> f64 {
        self.p
    }
    fn weight<T: Real>(&self, _t: T) -> T {
        T::one()
    }
    fn comparison<T: Real>(&self, _t: T) -> T {
        T::cst(self.rate())
    }
    fn hardy_weight<T: Real>(&self, _t: T) -> T {
        T::cst(self.constant)
    }
    fn solution<T: Real>(&self, _t: T) -> T {
        T::cst(self.constant.powf(1.0 / conjugate(self.p)))
    }
    fn d_solution_weight(&self, _t: f64) -> f64 {
        0.0
    }
    fn closed_ln_v(&self, t: f64, t_ref: f64) -> Option<f64> {
        Some(-(self.rate() / self.p) * (t - t_ref))
    }
}

/// A pair selected at run time, with `W` optionally multiplied by a constant.
#[derive(Clone, Debug, PartialEq)]
pub struct Pair {
    pub kind: PairKind,
    pub weight_scale: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PairKind {
    Hardy(HardyPair),
    McKean(McKeanPair),
    Tabulated(TabulatedPair),
}

impl From<PairKind> for Pair {
    fn from(kind: PairKind) -> Self {
        Pair { kind, weight_scale: 1.0 }
    }
}

impl Pair {
    pub fn with_weight_scale(mut self, scale: f64) -> Self {
        self.weight_scale *= scale;
        self
    }
}

macro_rules! on_kind {
    ($self:ident, $m:ident($($a:expr),*)) => {
        match &$self.kind {
            PairKind::Hardy(q) => q.$m($($a),*),
            PairKind::McKean(q) => q.$m($($a),*),
            PairKind::Tabulated(q) => q.$m($($a),*),
        }
    };
}

impl RiccatiPair for Pair {
    fn order(&self) -> f64 {
        on_kind!(self, order())
    }
    fn interval(&self) -> (f64, f64) {
        on_kind!(self, interval())
    }
    fn weight<T: Real>(&self, t: T) -> T {
        on_kind!(self, weight(t))
    }
    fn comparison<T: Real>(&self, t: T) -> T {
        on_kind!(self, comparison(t))
    }
    fn hardy_weight<T: Real>(&self, t: T) -> T {
        on_kind!(self, hardy_weight(t)) * self.weight_scale
    }
    fn solution<T: Real>(&self, t: T) -> T {
        on_kind!(self, solution(t))
    }
    fn d_solution_weight(&self, t: f64) -> f64 {
        on_kind!(self, d_solution_weight(t))
    }
    fn closed_ln_v(&self, t: f64, t_ref: f64) -> Option<f64> {
        on_kind!(self, closed_ln_v(t, t_ref))
    }
}

/// Serializable description of a pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairConfig {
    Hardy {
        n: usize,
        p: f64,
        #[serde(default)]
        alpha: f64,
        #[serde(default = "unit")]
        weight_scale: f64,
    },
    Mckean {
        n: usize,
        p: f64,
        kappa: f64,
        #[serde(default)]
        h: f64,
        #[serde(default = "unit")]
        weight_scale: f64,
    },
    /// CSV file with header `t,w,L,W,G`.
    Tabulated {
        p: f64,
        path: std::path::PathBuf,
        #[serde(default = "unit")]
        weight_scale: f64,
    },
}

fn unit() -> f64 {
    1.0
}

impl PairConfig {
    pub fn build(&self) -> Result<Pair, HardyError> {
        let (kind, scale) = match self {
            PairConfig::Hardy { n, p, alpha, weight_scale } => (PairKind::Hardy(preset_hardy(*n, *p, *alpha)?), *weight_scale),
            PairConfig::Mckean { n, p, kappa, h, weight_scale } => {
                (PairKind::McKean(preset_mckean(*n, *p, *kappa, *h)?), *weight_scale)
            }
            PairConfig::Tabulated { p, path, weight_scale } => {
                let file = std::fs::File::open(path).map_err(|e| HardyError::Table(format!("{}: {e}", path.display())))?;
                (PairKind::Tabulated(TabulatedPair::from_csv(*p, file)?), *weight_scale)
            }
        };
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(HardyError::Pair(format!("weight_scale must be positive, got {scale}")));
        }
        Ok(Pair::from(kind).with_weight_scale(scale))
    }
}

/// `v(t) = exp(−∫_{t_ref}^t G^{1/(p−1)})`, so `v(t_ref) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitFunction<P> {
    pair: P,
    t_ref: f64,
    spec: QuadratureSpec,
}

impl<P: RiccatiPair> LimitFunction<P> {
    pub fn new(pair: P, t_ref: f64, spec: QuadratureSpec) -> Result<Self, HardyError> {
        pair.check(t_ref)?;
        Ok(Self { pair, t_ref, spec })
    }

    pub fn pair(&self) -> &P {
        &self.pair
    }

    pub fn anchor(&self) -> f64 {
        self.t_ref
    }

    /// `G(t)^{1/(p−1)} = −v′/v`.
    pub fn decay_rate(&self, t: f64) -> f64 {
        self.pair.solution(t).powf(1.0 / (self.pair.order() - 1.0))
    }

    /// `ln v(t)` by adaptive quadrature.
    pub fn ln_v(&self, t: f64) -> Result<f64, HardyError> {
        self.pair.check(t)?;
        let (a, b, sign) = if t >= self.t_ref { (self.t_ref, t, -1.0) } else { (t, self.t_ref, 1.0) };
        let est = if self.spec.log_substitution {
            integrate(|s| self.decay_rate(s.exp()) * s.exp(), a.ln(), b.ln(), &self.spec)?
        } else {
            integrate(|s| self.decay_rate(s), a, b, &self.spec)?
        };
        Ok(sign * est.value)
    }

    pub fn v(&self, t: f64) -> Result<f64, HardyError> {
        Ok(self.ln_v(t)?.exp())
    }

    /// `ln |v′(t)|`.
    pub fn ln_abs_dv(&self, t: f64) -> Result<f64, HardyError> {
        Ok(self.ln_v(t)? + self.decay_rate(t).ln())
    }
}

/// Tent truncation of the limit function with knots `t₁ < t₂ < t₃ < t₄`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tent<'a, P> {
    limit: &'a LimitFunction<P>,
    knots: [f64; 4],
    ln_v2: f64,
    ln_v3: f64,
}

/// Left and right derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OneSided {
    pub left: f64,
    pub right: f64,
}

pub fn check_knots(knots: [f64; 4], right: f64) -> Result<(), HardyError> {
    let [t1, t2, t3, t4] = knots;
    if !(t1 > 0.0 && t1 < t2 && t2 < t3 && t3 < t4 && t4 < right && knots.iter().all(|t| t.is_finite())) {
        return Err(HardyError::KnotOrder(knots));
    }
    Ok(())
}

pub fn make_truncation<P: RiccatiPair>(limit: &LimitFunction<P>, knots: [f64; 4]) -> Result<Tent<'_, P>, HardyError> {
    let (_, right) = limit.pair.interval();
    check_knots(knots, right)?;
    Ok(Tent { limit, knots, ln_v2: limit.ln_v(knots[1])?, ln_v3: limit.ln_v(knots[2])? })
}

impl<P: RiccatiPair> Tent<'_, P> {
    pub fn knots(&self) -> [f64; 4] {
        self.knots
    }

    pub fn limit(&self) -> &LimitFunction<P> {
        self.limit
    }

    /// `ln v(t₂)`.
    pub fn ln_v2(&self) -> f64 {
        self.ln_v2
    }

    /// `ln v(t₃)`.
    pub fn ln_v3(&self) -> f64 {
        self.ln_v3
    }

    pub fn value(&self, t: f64) -> Result<f64, HardyError> {
        let [t1, t2, t3, t4] = self.knots;
        Ok(if t <= t1 || t >= t4 {
            0.0
        } else if t < t2 {
            self.ln_v2.exp() * (t - t1) / (t2 - t1)
        } else if t <= t3 {
            self.limit.v(t)?
        } else {
            self.ln_v3.exp() * (t4 - t) / (t4 - t3)
        })
    }

    fn slope_inside(&self, t: f64, right_side: bool) -> Result<f64, HardyError> {
        let [t1, t2, t3, t4] = self.knots;
        let inside = |a: f64, b: f64| if right_side { t >= a && t < b } else { t > a && t <= b };
        Ok(if inside(t1, t2) {
            self.ln_v2.exp() / (t2 - t1)
        } else if inside(t2, t3) {
            -self.limit.ln_abs_dv(t)?.exp()
        } else if inside(t3, t4) {
            -self.ln_v3.exp() / (t4 - t3)
        } else {
            0.0
        })
    }

    /// One-sided derivatives; they differ only at the knots.
    pub fn derivative(&self, t: f64) -> Result<OneSided, HardyError> {
        Ok(OneSided { left: self.slope_inside(t, false)?, right: self.slope_inside(t, true)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_constants() {
        assert_eq!(preset_hardy(3, 2.0, 0.0).unwrap().constant, 0.25);
        assert_eq!(preset_mckean(2, 2.0, 1.0, 0.0).unwrap().constant, 0.25);
        assert!(preset_hardy(3, 3.0, 0.0).is_err());
        assert!(preset_mckean(2, 2.0, 1.0, 1.0).is_err());
        let c = preset_hardy(3, 3.0 - 1e-9, 0.0).unwrap().constant;
        assert!(c > 0.0 && c < 1e-20);
    }

    #[test]
    fn comparison_values() {
        assert_eq!(comparison_l(3, 0.0, 0.0, 2.0).unwrap(), 1.0);
        assert!((comparison_l(2, 1.0, 0.0, 1.0).unwrap() - 1.0 / 1f64.tanh()).abs() < 1e-15);
        assert!((comparison_l(2, 1.0, 0.0, 50.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(comparison_l(2, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn doubled_weight_breaks_the_pair() {
        let pair = Pair::from(PairKind::Hardy(preset_hardy(3, 2.0, 0.0).unwrap())).with_weight_scale(2.0);
        assert!(!residual_scan(&pair, 0.1, 10.0, 100).unwrap().valid(1e-12));
    }

    #[test]
    fn dual_derivative_matches_analytic() {
        let pair = preset_hardy(4, 2.5, 0.7).unwrap();
        for t in [0.3, 1.0, 7.0] {
            let s = Dual::variable(t);
            let d = (pair.solution(s) * pair.weight(s)).du;
            assert!((d - pair.d_solution_weight(t)).abs() < 1e-13 * d.abs().max(1.0));
        }
    }

    #[test]
    fn constant_solution_gives_exponential() {
        let pair = preset_mckean(2, 2.0, 1.0, 0.0).unwrap();
        let lf = LimitFunction::new(pair, 1.0, QuadratureSpec { log_substitution: false, ..Default::default() }).unwrap();
        assert!((lf.ln_v(3.0).unwrap() + 1.0).abs() < 1e-14);
        assert!((lf.ln_v(0.2).unwrap() - 0.4).abs() < 1e-14);
    }

    #[test]
    fn tent_shape() {
        let pair = preset_hardy(3, 2.0, 0.0).unwrap();
        let lf = LimitFunction::new(pair, 1.0, QuadratureSpec::default()).unwrap();
        let tent = make_truncation(&lf, [1.0, 2.0, 4.0, 8.0]).unwrap();
        assert_eq!(tent.value(0.5).unwrap(), 0.0);
        assert_eq!(tent.value(9.0).unwrap(), 0.0);
        assert!((tent.value(3.0).unwrap() - 3f64.powf(-0.5)).abs() < 1e-13);
        let d = tent.derivative(6.0).unwrap();
        assert!((d.left + 0.25f64.sqrt() / 4.0).abs() < 1e-13);
        let k = tent.derivative(2.0).unwrap();
        assert!(k.left > 0.0 && k.right < 0.0);
        assert!(make_truncation(&lf, [1.0, 1.0, 4.0, 8.0]).is_err());
    }
}
