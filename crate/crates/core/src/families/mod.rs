//! The two perturbed Randers families and their closed-form radial data.
//!
//! * [`FlatFamily`]: non-positively curved, non-reversible metrics on ℝⁿ
//!   with reversibility `λ`, approaching a conical limit as `ε → 0`.
//! * [`HyperbolicFamily`]: metrics on the unit ball with flag curvature
//!   `≤ −κ²` along rays from the origin and reduced S-curvature
//!   `≤ (n−1)h`.
//!
//! Each member exposes its metric ([`crate::finsler::RandersMetric`]), its
//! measure density, and a [`RadialProfile`]: the distance from the origin,
//! its inverse, the reduced radial density `ψ_ε`, and the dual-reversal
//! profile `h_ε`.

mod calibration;
mod flat;
mod hyperbolic;
mod table;

pub use calibration::{calibrate_k_eps, sinh_bound_constants, Calibration, CalibrationBranch, SinhBoundConstants};
pub use flat::{make_flat_family, FlatFamily};
pub use hyperbolic::{make_hyperbolic_family, HyperbolicDensity, HyperbolicFamily};
pub use table::{curvature_bounds, curvature_check, profile_table, CurvatureCheck, CurvatureRow, ProfileRow};

use serde::{Deserialize, Serialize};

use crate::dual::Real;
use crate::error::FinslerError;
use crate::finsler::{Density, RandersData};

/// `θ = (λ − 1)/(λ + 1)`.
pub fn theta_of(lambda: f64) -> Result<f64, FinslerError> {
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(FinslerError::InvalidParameter(format!("lambda must lie in (1, inf), got {lambda}")));
    }
    Ok((lambda - 1.0) / (lambda + 1.0))
}

pub(crate) fn check_common(n: usize, eps: f64) -> Result<(), FinslerError> {
    if n < 2 {
        return Err(FinslerError::InvalidParameter(format!("dimension must be at least 2, got {n}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(FinslerError::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// `q(s) = s(s+2ε)θ/(s+ε)²`, the norm of the one-form along a ray, written
/// as `θ(1 − ε²/(s+ε)²)` to stay accurate for `s ≪ ε` and `s ≫ ε`.
pub(crate) fn ray_ratio<T: Real>(s: T, eps: f64, theta: f64) -> T {
    let e = T::cst(eps) / (s + eps);
    (T::one() - e * e) * theta
}

/// `h_ε(s) = (1 − q)/(1 + q)`.
pub fn h_eps_profile(s: f64, eps: f64, theta: f64) -> f64 {
    let q = ray_ratio(s, eps, theta);
    (1.0 - q) / (1.0 + q)
}

/// `ln sinh(x)` for `x > 0`, accurate for large `x`.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 1.0 {
        x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
    } else {
        x.sinh().ln()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    Flat,
    Hyperbolic { kappa: f64, h: f64, k_eps: f64, vartheta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FamilyParams {
    pub n: usize,
    pub lambda: f64,
    pub theta: f64,
    pub eps: f64,
    #[serde(flatten)]
    pub kind: FamilyKind,
}

/// Closed-form curvature data along the ray direction `y = x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RayCurvature {
    pub flag: f64,
    pub reduced_s: f64,
    pub rev: f64,
}

/// Lower/upper bounds `c·B(t) ≤ ψ_ε(t) ≤ C·B(t)` with `B(t) = t^{n−1}`
/// (flat) or `sinh(kt)^{n−1}` (hyperbolic).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PsiBounds {
    pub lower: f64,
    pub upper: f64,
    /// `k` in `sinh(kt)`; `None` for the power reference.
    pub sinh_rate: Option<f64>,
}

impl PsiBounds {
    /// `ln B(t)` for dimension `n`.
    pub fn ln_reference(&self, n: usize, t: f64) -> f64 {
        let m = (n - 1) as f64;
        match self.sinh_rate {
            None => m * t.ln(),
            Some(k) => m * ln_sinh(k * t),
        }
    }
}

/// Radial data of a family member in the distance variable `t = ρ_ε`.
pub trait RadialProfile: Send + Sync {
    fn params(&self) -> FamilyParams;

    /// Distance from the origin at profile radius `s` (Euclidean `|x|` for
    /// the flat family, `arctanh |x|` for the hyperbolic one).
    fn rho(&self, s: f64) -> f64;
    /// Distance to the origin.
    fn rho_rev(&self, s: f64) -> f64;
    /// Inverse of [`Self::rho`].
    fn phi(&self, t: f64) -> f64;
    fn dphi(&self, t: f64) -> f64;
    /// `ln ψ_ε(t)`.
    fn ln_psi(&self, t: f64) -> f64;
    /// `ln e(t)`, the extra weight of the measure (zero when absent).
    fn ln_weight(&self, _t: f64) -> f64 {
        0.0
    }
    /// `F*(−Dρ)` at profile radius `s`.
    fn h_eps(&self, s: f64) -> f64 {
        let p = self.params();
        h_eps_profile(s, p.eps, p.theta)
    }
    fn ray_curvature(&self, s: f64) -> RayCurvature;
    fn psi_bounds(&self) -> Result<PsiBounds, FinslerError>;
    /// Euclidean coordinate radius for profile radius `s`.
    fn coordinate_radius(&self, s: f64) -> f64;
    /// Profile radius for a Euclidean coordinate radius.
    fn profile_radius(&self, r: f64) -> f64;
    /// Supremum of the distance function over the domain.
    fn rho_sup(&self) -> f64 {
        f64::INFINITY
    }
    /// Largest distance whose points still have representable coordinates.
    fn rho_coordinate_sup(&self) -> f64 {
        self.rho_sup()
    }

    fn psi(&self, t: f64) -> f64 {
        self.ln_psi(t).exp()
    }
}

/// A family member together with its measure and distance function, as
/// needed by the n-dimensional evaluators.
pub trait FamilyMember: RadialProfile + RandersData + Clone {
    type Measure: Density;
    fn measure(&self) -> Self::Measure;
    /// `ρ_ε(x)` at any differentiation depth.
    fn distance<T: Real>(&self, x: &[T]) -> T;
    /// `d/ds` of [`RadialProfile::coordinate_radius`].
    fn coordinate_radius_derivative(&self, s: f64) -> f64;
    /// `Dρ_ε(x)` by forward-mode differentiation of [`Self::distance`].
    fn distance_gradient(&self, x: &[f64]) -> Vec<f64> {
        crate::dual::gradient(&DistanceField(self), x)
    }
}

struct DistanceField<'a, M: ?Sized>(&'a M);

impl<M: FamilyMember> crate::dual::ScalarField for DistanceField<'_, M> {
    fn eval<T: Real>(&self, x: &[T]) -> T {
        self.0.distance(x)
    }
}

impl FamilyMember for FlatFamily {
    type Measure = crate::finsler::BusemannHausdorff<FlatFamily>;
    fn measure(&self) -> Self::Measure {
        self.density()
    }
    fn distance<T: Real>(&self, x: &[T]) -> T {
        self.rho_at(x)
    }
    fn coordinate_radius_derivative(&self, _s: f64) -> f64 {
        1.0
    }
}

impl FamilyMember for HyperbolicFamily {
    type Measure = HyperbolicDensity;
    fn measure(&self) -> Self::Measure {
        self.density()
    }
    fn distance<T: Real>(&self, x: &[T]) -> T {
        self.rho_at(x)
    }
    fn coordinate_radius_derivative(&self, s: f64) -> f64 {
        1.0 / s.cosh().powi(2)
    }
}

/// Serializable family selection; `eps` is supplied at build time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    Flat { n: usize, lambda: f64 },
    Hyperbolic {
        n: usize,
        lambda: f64,
        kappa: f64,
        #[serde(default)]
        h: f64,
    },
}

impl FamilyConfig {
    pub fn n(&self) -> usize {
        match *self {
            FamilyConfig::Flat { n, .. } | FamilyConfig::Hyperbolic { n, .. } => n,
        }
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            FamilyConfig::Flat { lambda, .. } | FamilyConfig::Hyperbolic { lambda, .. } => lambda,
        }
    }

    pub fn build(&self, eps: f64) -> Result<Family, FinslerError> {
        Ok(match *self {
            FamilyConfig::Flat { n, lambda } => Family::Flat(FlatFamily::new(n, lambda, eps)?),
            FamilyConfig::Hyperbolic { n, lambda, kappa, h } => Family::Hyperbolic(HyperbolicFamily::new(n, lambda, kappa, h, eps)?),
        })
    }
}

/// Either family, for code paths that select the family at run time.
#[derive(Clone, Debug)]
pub enum Family {
    Flat(FlatFamily),
    Hyperbolic(HyperbolicFamily),
}

macro_rules! delegate {
    ($self:ident, $f:ident($($a:expr),*)) => {
        match $self {
            Family::Flat(m) => m.$f($($a),*),
            Family::Hyperbolic(m) => m.$f($($a),*),
        }
    };
}

impl RadialProfile for Family {
    fn params(&self) -> FamilyParams {
        delegate!(self, params())
    }
    fn rho(&self, s: f64) -> f64 {
        delegate!(self, rho(s))
    }
    fn rho_rev(&self, s: f64) -> f64 {
        delegate!(self, rho_rev(s))
    }
    fn phi(&self, t: f64) -> f64 {
        delegate!(self, phi(t))
    }
    fn dphi(&self, t: f64) -> f64 {
        delegate!(self, dphi(t))
    }
    fn ln_psi(&self, t: f64) -> f64 {
        delegate!(self, ln_psi(t))
    }
    fn ln_weight(&self, t: f64) -> f64 {
        delegate!(self, ln_weight(t))
    }
    fn h_eps(&self, s: f64) -> f64 {
        delegate!(self, h_eps(s))
    }
    fn ray_curvature(&self, s: f64) -> RayCurvature {
        delegate!(self, ray_curvature(s))
    }
    fn psi_bounds(&self) -> Result<PsiBounds, FinslerError> {
        delegate!(self, psi_bounds())
    }
    fn coordinate_radius(&self, s: f64) -> f64 {
        delegate!(self, coordinate_radius(s))
    }
    fn profile_radius(&self, r: f64) -> f64 {
        delegate!(self, profile_radius(r))
    }
    fn rho_sup(&self) -> f64 {
        delegate!(self, rho_sup())
    }
    fn rho_coordinate_sup(&self) -> f64 {
        delegate!(self, rho_coordinate_sup())
    }
}
