use crate::dual::{atanh_over, dot, norm, Real};
use crate::error::FinslerError;
use crate::finsler::measure::busemann_hausdorff;
use crate::finsler::{Density, DensityKind, Domain, RandersData, RandersMetric};
use crate::linalg::Mat;

use super::calibration::{calibrate_k_eps, sinh_bound_constants, Calibration, SinhBoundConstants};
use super::{check_common, ln_sinh, ray_ratio, theta_of, FamilyKind, FamilyParams, PsiBounds, RadialProfile, RayCurvature};

/// Largest admissible Euclidean radius; `arctanh` blows up at the boundary.
pub const BALL_RADIUS: f64 = 1.0 - 1e-9;

/// Klein-type Randers metrics on the unit ball with flag curvature `≤ −κ²`
/// and reduced S-curvature `≤ (n−1)h` along rays from the origin.
///
/// Radial quantities take the hyperbolic radius `r̄ = arctanh |x|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperbolicFamily {
    n: usize,
    lambda: f64,
    theta: f64,
    eps: f64,
    kappa: f64,
    h: f64,
    calibration: Calibration,
    vartheta: f64,
}

/// `exp(−(n−1)hρ_ε)` times the Busemann–Hausdorff density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperbolicDensity(pub HyperbolicFamily);

pub fn make_hyperbolic_family(
    n: usize,
    lambda: f64,
    kappa: f64,
    h: f64,
    eps: f64,
) -> Result<(RandersMetric<HyperbolicFamily>, HyperbolicDensity, HyperbolicFamily), FinslerError> {
    let fam = HyperbolicFamily::new(n, lambda, kappa, h, eps)?;
    Ok((fam.metric(), HyperbolicDensity(fam), fam))
}

impl HyperbolicFamily {
    pub fn new(n: usize, lambda: f64, kappa: f64, h: f64, eps: f64) -> Result<Self, FinslerError> {
        check_common(n, eps)?;
        if !h.is_finite() {
            return Err(FinslerError::InvalidParameter(format!("h must be finite, got {h}")));
        }
        let theta = theta_of(lambda)?;
        let calibration = calibrate_k_eps(theta, kappa, eps)?;
        let vartheta = calibration.k_eps * (1.0 - theta);
        Ok(Self { n, lambda, theta, eps, kappa, h, calibration, vartheta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn k_eps(&self) -> f64 {
        self.calibration.k_eps
    }
    pub fn vartheta(&self) -> f64 {
        self.vartheta
    }
    pub fn calibration(&self) -> &Calibration {
        &self.calibration
    }
    pub fn sinh_constants(&self) -> Result<SinhBoundConstants, FinslerError> {
        sinh_bound_constants(self.theta, self.kappa)
    }

    pub fn metric(&self) -> RandersMetric<HyperbolicFamily> {
        RandersMetric::new(*self)
    }

    pub fn density(&self) -> HyperbolicDensity {
        HyperbolicDensity(*self)
    }

    /// `ρ_ε(x)` at any differentiation depth.
    pub fn rho_at<T: Real>(&self, x: &[T]) -> T {
        let r = norm(x);
        self.rho_of_bar(r * atanh_over(r))
    }

    fn rho_of_bar<T: Real>(&self, rb: T) -> T {
        rb * (rb * (1.0 - self.theta) + self.eps) / ((rb + self.eps) * self.vartheta)
    }

    /// Closed-form `Dρ_ε(x)`.
    pub fn drho(&self, x: &[f64]) -> Vec<f64> {
        let r = norm(x);
        let q = ray_ratio(r.atanh(), self.eps, self.theta);
        let s = (1.0 - q) / (self.vartheta * r * (1.0 - r * r));
        x.iter().map(|c| c * s).collect()
    }

    /// Closed-form `∇ρ_ε(x)`.
    pub fn grad_rho(&self, x: &[f64]) -> Vec<f64> {
        let r = norm(x);
        let q = ray_ratio(r.atanh(), self.eps, self.theta);
        let s = self.vartheta * (1.0 - r * r) / (r * (1.0 - q));
        x.iter().map(|c| c * s).collect()
    }

    /// Weighted density at hyperbolic radius `r̄`.
    pub fn density_at(&self, rb: f64) -> f64 {
        let n = self.n as f64;
        let q = ray_ratio(rb, self.eps, self.theta);
        let ln = -n * self.vartheta.ln() + (n + 1.0) * rb.cosh().ln() + 0.5 * (n + 1.0) * (-q * q).ln_1p()
            - (n - 1.0) * self.h * self.rho(rb);
        ln.exp()
    }

    /// `S_ε = √((tϑ−ε)² + 4tϑε(1−θ))` with `A = tϑ − ε`.
    fn root(&self, t: f64) -> (f64, f64) {
        let tv = t * self.vartheta;
        let a = tv - self.eps;
        (a, (a * a + 4.0 * tv * self.eps * (1.0 - self.theta)).sqrt())
    }
}

impl RandersData for HyperbolicFamily {
    fn dim(&self) -> usize {
        self.n
    }
    fn domain(&self) -> Domain {
        Domain::Ball { radius: BALL_RADIUS }
    }
    fn riemannian<T: Real>(&self, x: &[T]) -> Mat<T> {
        let d = T::one() - dot(x, x);
        let v2 = self.vartheta * self.vartheta;
        let diag = (d * v2).recip();
        let outer = (d * d * v2).recip();
        Mat::from_fn(self.n, |i, j| {
            let base = if i == j { diag } else { T::zero() };
            base + x[i] * x[j] * outer
        })
    }
    fn one_form<T: Real>(&self, x: &[T]) -> Vec<T> {
        let r = norm(x);
        let ratio = atanh_over(r);
        let rb = r * ratio;
        let e = rb + self.eps;
        let c = -(ratio * (rb + 2.0 * self.eps)) * self.theta / ((T::one() - r * r) * e * e * self.vartheta);
        x.iter().map(|&xi| xi * c).collect()
    }
    fn potential<T: Real>(&self, x: &[T]) -> Option<T> {
        let r = norm(x);
        let rb = r * atanh_over(r);
        Some(-(rb + T::cst(self.eps * self.eps) / (rb + self.eps)) * (self.theta / self.vartheta))
    }
}

impl Density for HyperbolicDensity {
    fn sigma<T: Real>(&self, x: &[T]) -> T {
        let fam = &self.0;
        let weight = (fam.rho_at(x) * (-((fam.n - 1) as f64) * fam.h)).exp();
        weight * busemann_hausdorff(fam, x)
    }
    fn kind(&self) -> DensityKind {
        DensityKind::Weighted
    }
}

impl RadialProfile for HyperbolicFamily {
    fn params(&self) -> FamilyParams {
        FamilyParams {
            n: self.n,
            lambda: self.lambda,
            theta: self.theta,
            eps: self.eps,
            kind: FamilyKind::Hyperbolic { kappa: self.kappa, h: self.h, k_eps: self.k_eps(), vartheta: self.vartheta },
        }
    }

    fn rho(&self, rb: f64) -> f64 {
        self.rho_of_bar(rb)
    }

    fn rho_rev(&self, rb: f64) -> f64 {
        rb * (rb * (1.0 + self.theta) + self.eps) / ((rb + self.eps) * self.vartheta)
    }

    fn phi(&self, t: f64) -> f64 {
        let (a, s) = self.root(t);
        if a >= 0.0 {
            (a + s) / (2.0 * (1.0 - self.theta))
        } else {
            2.0 * t * self.vartheta * self.eps / (s - a)
        }
    }

    fn dphi(&self, t: f64) -> f64 {
        let (a, s) = self.root(t);
        let v = self.vartheta;
        (v + v * (a + 2.0 * self.eps * (1.0 - self.theta)) / s) / (2.0 * (1.0 - self.theta))
    }

    fn ln_psi(&self, t: f64) -> f64 {
        let rb = self.phi(t);
        let q = ray_ratio(rb, self.eps, self.theta);
        let n = self.n as f64;
        self.dphi(t).ln() - n * self.vartheta.ln() + 0.5 * (n + 1.0) * (-q * q).ln_1p() + (n - 1.0) * ln_sinh(rb)
    }

    fn ln_weight(&self, t: f64) -> f64 {
        -((self.n - 1) as f64) * self.h * t
    }

    fn ray_curvature(&self, rb: f64) -> RayCurvature {
        let (t, e) = (self.theta, self.eps);
        let q = ray_ratio(rb, e, t);
        let s = rb + e;
        let e0 = s.powi(4);
        let e1 = 2.0 * rb.powi(4) + 8.0 * rb.powi(3) * e + (10.0 * rb * rb - 3.0) * e * e + 4.0 * rb * e.powi(3);
        let e2 = rb.powi(4) + 4.0 * rb.powi(3) * e + (4.0 * rb * rb - 3.0) * e * e;
        let poly = (e0 - e1 * t + e2 * t * t) / s.powi(4);
        let k = self.k_eps();
        let w = e / s;
        let n = self.n as f64;
        RayCurvature {
            flag: -k * k * (1.0 - t).powi(2) * poly / (1.0 - q).powi(4),
            reduced_s: (n - 1.0) * self.h - self.vartheta * (n + 1.0) * t * w * w / (s * (1.0 - q * q)),
            rev: (1.0 + q) / (1.0 - q),
        }
    }

    fn psi_bounds(&self) -> Result<PsiBounds, FinslerError> {
        let sc = self.sinh_constants()?;
        if self.eps >= sc.eps_tilde {
            return Err(FinslerError::InvalidParameter(format!(
                "psi bounds need eps < {:.6e}, got {}",
                sc.eps_tilde, self.eps
            )));
        }
        let n = self.n as f64;
        let t = self.theta;
        let v = self.vartheta;
        Ok(PsiBounds {
            lower: (1.0 - t * t).powf((n + 1.0) / 2.0) * sc.c_tilde.powf(n - 1.0) / v.powf(n - 1.0),
            upper: self.k_eps() / v.powf(n),
            sinh_rate: Some(self.k_eps()),
        })
    }

    fn coordinate_radius(&self, rb: f64) -> f64 {
        rb.tanh()
    }

    fn profile_radius(&self, r: f64) -> f64 {
        r.atanh()
    }

    fn rho_coordinate_sup(&self) -> f64 {
        self.rho(BALL_RADIUS.atanh())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam() -> HyperbolicFamily {
        HyperbolicFamily::new(2, 2.0, 1.0, 0.0, 0.1).unwrap()
    }

    #[test]
    fn one_form_norm_matches_ray_ratio() {
        let f = fam();
        let m = f.metric();
        for r in [0.05, 0.3, 0.9] {
            let x = [r * 0.6, r * 0.8];
            let b = m.one_form_norm(&x).unwrap();
            assert!((b - ray_ratio(r.atanh(), 0.1, 1.0 / 3.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn phi_inverts_rho() {
        let f = fam();
        for rb in [1e-8, 1e-3, 0.2, 3.0, 10.0] {
            assert!(((f.phi(f.rho(rb)) - rb) / rb).abs() < 1e-12);
        }
    }

    #[test]
    fn ray_curvature_limits() {
        let f = fam();
        let k = f.k_eps();
        let far = f.ray_curvature(1e6).flag;
        assert!((far + k * k).abs() < 1e-5 * k * k);
        let near = f.ray_curvature(0.0).flag;
        assert!((near + k * k * f.calibration().ratio_origin).abs() < 1e-12 * near.abs());
    }

    #[test]
    fn outside_ball_is_rejected() {
        let m = fam().metric();
        assert!(m.eval_f(&[1.0, 0.0], &[1.0, 0.0]).is_err());
    }
}
