use serde::Serialize;

use crate::error::FinslerError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationBranch {
    /// `k_ε = κ`.
    Kappa,
    /// `k_ε = κ/√K_{ε,0}`: the curvature bound is tightest at the origin.
    Origin,
    /// `k_ε = κ/√K_ε`: the curvature bound is tightest at the interior maximum.
    InteriorMaximum,
}

/// The calibration constant `k_ε` and the quantities it is built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub k_eps: f64,
    pub eps0: f64,
    /// `K_{ε,0}`, the ratio `−K/k_ε²` at the origin.
    pub ratio_origin: f64,
    /// `K_ε`, the minimum of `−K/k_ε²` over the ray (`+∞` when `ε > ε₀`).
    pub ratio_interior: f64,
    pub branch: CalibrationBranch,
}

fn check(theta: f64, kappa: f64, eps: f64) -> Result<(), FinslerError> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(FinslerError::InvalidParameter(format!("theta must lie in (0, 1), got {theta}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(FinslerError::InvalidParameter(format!("kappa must be positive, got {kappa}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(FinslerError::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    Ok(())
}

/// `ε₀ = √(3(1−θ)/(8θ))`.
pub fn eps0(theta: f64) -> f64 {
    (3.0 * (1.0 - theta) / (8.0 * theta)).sqrt()
}

pub fn calibrate_k_eps(theta: f64, kappa: f64, eps: f64) -> Result<Calibration, FinslerError> {
    check(theta, kappa, eps)?;
    let a = 1.0 - theta;
    let e0 = eps0(theta);
    let ratio_origin = a * a * (1.0 + 3.0 * theta * a / (eps * eps));
    let ratio_interior = if eps > e0 {
        f64::INFINITY
    } else {
        let s = (3.0 * a.powi(3) * (3.0 * a - 8.0 * eps * eps * theta)).max(0.0).sqrt();
        6.0 * a * a * (a * (3.0 * a - 2.0 * eps * eps * theta) + s).powi(3) / (3.0 * a * a + s).powi(4)
    };
    let candidates = [
        (kappa, CalibrationBranch::Kappa),
        (kappa / ratio_origin.sqrt(), CalibrationBranch::Origin),
        (kappa / ratio_interior.sqrt(), CalibrationBranch::InteriorMaximum),
    ];
    let (k_eps, branch) = candidates.into_iter().fold(candidates[0], |best, c| if c.0 > best.0 { c } else { best });
    if branch == CalibrationBranch::Kappa {
        log::debug!("k_eps = kappa at eps = {eps}");
    }
    Ok(Calibration { k_eps, eps0: e0, ratio_origin, ratio_interior, branch })
}

/// Constants of the two-sided bound `c̃ sinh(k_ε t) ≤ sinh(φ_ε(t)) ≤ sinh(k_ε t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SinhBoundConstants {
    /// Largest `ε ≤ ε₀/2` on the interior-maximum branch.
    pub eps_bar: f64,
    /// Upper bound of `k_ε` on `(0, ε̄]`.
    pub kappa_bar: f64,
    /// Split point between the small-`t` and large-`t` estimates.
    pub t_split: f64,
    pub c1: f64,
    /// The bound holds for every `ε < ε̃`.
    pub eps_tilde: f64,
    pub c2: f64,
    pub c_tilde: f64,
}

/// `s_ε = εθ/(1−θ)`.
pub fn sinh_shift(theta: f64, eps: f64) -> f64 {
    eps * theta / (1.0 - theta)
}

pub fn sinh_bound_constants(theta: f64, kappa: f64) -> Result<SinhBoundConstants, FinslerError> {
    let e0 = eps0(theta);
    check(theta, kappa, e0)?;
    let interior = |eps: f64| calibrate_k_eps(theta, kappa, eps).map(|c| c.branch == CalibrationBranch::InteriorMaximum);

    // K_{ε,0} → ∞ as ε → 0, so the interior branch is reached below some ε.
    let mut eps_bar = 0.5 * e0;
    while !interior(eps_bar)? {
        eps_bar *= 0.5;
        if eps_bar < 1e-12 * e0 {
            return Err(FinslerError::NonConvergence { achieved: eps_bar });
        }
    }

    let kappa_bar = (0..=256)
        .map(|i| eps_bar * 1e-6f64.powf(i as f64 / 256.0))
        .map(|e| calibrate_k_eps(theta, kappa, e).map(|c| c.k_eps))
        .try_fold(kappa, |m, k| k.map(|k| m.max(k)))?;

    let t_split = 1.0 / kappa_bar;
    let c1 = 0.5 * ((1.0 - theta) * kappa_bar * t_split).sinh() / (kappa_bar * t_split).sinh();

    let margin = |eps: f64| calibrate_k_eps(theta, kappa, eps).map(|c| t_split * c.k_eps - 2.0 * sinh_shift(theta, eps));
    let eps_tilde = if margin(eps_bar)? > 0.0 {
        eps_bar
    } else {
        let (mut lo, mut hi) = (0.0, eps_bar);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if margin(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let c2 = 1.0 / (2.0 * sinh_shift(theta, eps_tilde).cosh());
    Ok(SinhBoundConstants { eps_bar, kappa_bar, t_split, c1, eps_tilde, c2, c_tilde: c1.min(c2) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps0_at_one_third() {
        assert!((eps0(1.0 / 3.0) - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn limits_as_eps_vanishes() {
        let c = calibrate_k_eps(1.0 / 3.0, 1.0, 1e-6).unwrap();
        assert!(c.ratio_origin > 1e11);
        assert!((c.ratio_interior - 1.0).abs() < 1e-9);
        assert!((c.k_eps - 1.0).abs() < 1e-9);
    }

    #[test]
    fn large_eps_falls_back() {
        let c = calibrate_k_eps(1.0 / 3.0, 1.0, 5.0).unwrap();
        assert!(c.ratio_interior.is_infinite());
        assert_ne!(c.branch, CalibrationBranch::InteriorMaximum);
    }

    #[test]
    fn sinh_constants_are_ordered() {
        let s = sinh_bound_constants(1.0 / 3.0, 1.0).unwrap();
        assert!(s.eps_tilde <= s.eps_bar && s.eps_tilde > 0.0);
        assert!(s.kappa_bar >= 1.0);
        assert!(s.c_tilde > 0.0 && s.c_tilde <= 0.5);
    }
}
