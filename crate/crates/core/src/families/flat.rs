use crate::dual::{norm, Real};
use crate::error::FinslerError;
use crate::finsler::{BusemannHausdorff, Domain, RandersData, RandersMetric};
use crate::linalg::Mat;

use super::{check_common, ray_ratio, theta_of, FamilyKind, FamilyParams, PsiBounds, RadialProfile, RayCurvature};

/// `F_ε(x, y) = |y| − ⟨x, y⟩(|x| + 2ε)θ/(|x| + ε)²` on ℝⁿ with its
/// Busemann–Hausdorff measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatFamily {
    n: usize,
    lambda: f64,
    theta: f64,
    eps: f64,
}

pub fn make_flat_family(
    n: usize,
    lambda: f64,
    eps: f64,
) -> Result<(RandersMetric<FlatFamily>, BusemannHausdorff<FlatFamily>, FlatFamily), FinslerError> {
    let fam = FlatFamily::new(n, lambda, eps)?;
    Ok((fam.metric(), fam.density(), fam))
}

impl FlatFamily {
    pub fn new(n: usize, lambda: f64, eps: f64) -> Result<Self, FinslerError> {
        check_common(n, eps)?;
        Ok(Self { n, lambda, theta: theta_of(lambda)?, eps })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn metric(&self) -> RandersMetric<FlatFamily> {
        RandersMetric::new(*self)
    }

    pub fn density(&self) -> BusemannHausdorff<FlatFamily> {
        BusemannHausdorff(*self)
    }

    /// `ρ_ε(x)` at any differentiation depth.
    pub fn rho_at<T: Real>(&self, x: &[T]) -> T {
        let r = norm(x);
        r * (r * (1.0 - self.theta) + self.eps) / (r + self.eps)
    }

    /// Closed-form `Dρ_ε(x) = (1 − q(r)) x/r`.
    pub fn drho(&self, x: &[f64]) -> Vec<f64> {
        let r = norm(x);
        let s = (1.0 - ray_ratio(r, self.eps, self.theta)) / r;
        x.iter().map(|c| c * s).collect()
    }

    /// Closed-form `∇ρ_ε(x) = x / (r(1 − q(r)))`.
    pub fn grad_rho(&self, x: &[f64]) -> Vec<f64> {
        let r = norm(x);
        let s = 1.0 / (r * (1.0 - ray_ratio(r, self.eps, self.theta)));
        x.iter().map(|c| c * s).collect()
    }

    /// Busemann–Hausdorff density at radius `r`.
    pub fn density_at(&self, r: f64) -> f64 {
        let q = ray_ratio(r, self.eps, self.theta);
        (1.0 - q * q).powf((self.n + 1) as f64 / 2.0)
    }

    /// `K_ε(x, −x)`, positive everywhere off the origin.
    pub fn reverse_flag_curvature(&self, r: f64) -> f64 {
        let (t, e) = (self.theta, self.eps);
        let q = ray_ratio(r, e, t);
        let w = e / (r + e);
        3.0 * t * (1.0 + t) * w * w / ((r + e).powi(2) * (1.0 + q).powi(4))
    }

    /// `√((t+ε)² − 4tεθ)`, computed without squaring `t`.
    fn root(&self, t: f64) -> f64 {
        let s = t + self.eps;
        s * (1.0 - 4.0 * self.theta * (t / s) * (self.eps / s)).sqrt()
    }
}

impl RandersData for FlatFamily {
    fn dim(&self) -> usize {
        self.n
    }
    fn domain(&self) -> Domain {
        Domain::Whole
    }
    fn riemannian<T: Real>(&self, _x: &[T]) -> Mat<T> {
        Mat::identity(self.n)
    }
    fn one_form<T: Real>(&self, x: &[T]) -> Vec<T> {
        let r = norm(x);
        let e = r + self.eps;
        let c = -(r + 2.0 * self.eps) * self.theta / (e * e);
        x.iter().map(|&xi| xi * c).collect()
    }
    fn potential<T: Real>(&self, x: &[T]) -> Option<T> {
        let r = norm(x);
        Some(-(r + T::cst(self.eps * self.eps) / (r + self.eps)) * self.theta)
    }
}

impl RadialProfile for FlatFamily {
    fn params(&self) -> FamilyParams {
        FamilyParams { n: self.n, lambda: self.lambda, theta: self.theta, eps: self.eps, kind: FamilyKind::Flat }
    }

    fn rho(&self, r: f64) -> f64 {
        r * (r * (1.0 - self.theta) + self.eps) / (r + self.eps)
    }

    fn rho_rev(&self, r: f64) -> f64 {
        r * (r * (1.0 + self.theta) + self.eps) / (r + self.eps)
    }

    fn phi(&self, t: f64) -> f64 {
        let a = t - self.eps;
        let s = self.root(t);
        if a >= 0.0 {
            (a + s) / (2.0 * (1.0 - self.theta))
        } else {
            // Rationalized to avoid cancellation for t < ε.
            2.0 * t * self.eps / (s - a)
        }
    }

    fn dphi(&self, t: f64) -> f64 {
        let s = self.root(t);
        (1.0 + (t + self.eps - 2.0 * self.eps * self.theta) / s) / (2.0 * (1.0 - self.theta))
    }

    fn ln_psi(&self, t: f64) -> f64 {
        let r = self.phi(t);
        let q = ray_ratio(r, self.eps, self.theta);
        let n = self.n as f64;
        0.5 * (n + 1.0) * (-q * q).ln_1p() + (n - 1.0) * r.ln() + self.dphi(t).ln()
    }

    fn ray_curvature(&self, r: f64) -> RayCurvature {
        let (t, e) = (self.theta, self.eps);
        let q = ray_ratio(r, e, t);
        let w = e / (r + e);
        let n = self.n as f64;
        RayCurvature {
            flag: -3.0 * t * (1.0 - t) * w * w / ((r + e).powi(2) * (1.0 - q).powi(4)),
            reduced_s: -(n + 1.0) * t * w * w / ((r + e) * (1.0 - q * q)),
            rev: (1.0 + q) / (1.0 - q),
        }
    }

    fn psi_bounds(&self) -> Result<PsiBounds, FinslerError> {
        let t = self.theta;
        let n = self.n as f64;
        Ok(PsiBounds { lower: (1.0 - t * t).powf((n + 1.0) / 2.0), upper: (1.0 - t).powf(-n), sinh_rate: None })
    }

    fn coordinate_radius(&self, s: f64) -> f64 {
        s
    }

    fn profile_radius(&self, r: f64) -> f64 {
        r
    }
}
