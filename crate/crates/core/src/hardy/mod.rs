//! Hardy quotients `Q = λᵖ ∫ w(ρ)F*(Du)ᵖ dm / ∫ w(ρ)W(ρ)|u|ᵖ dm` for radial
//! tents `u = v_T(ρ)` on a family member.
//!
//! The radial evaluator reduces both integrals to one dimension through
//! `σ r^{n−1} dr = e(t)ψ(t) dt` and integrates piecewise between the knots
//! in the log domain. The Monte-Carlo evaluator in [`montecarlo`] samples
//! the n-dimensional integrands directly.

pub mod montecarlo;
mod reduced;

pub use montecarlo::{hardy_quotient_montecarlo, MonteCarloQuotient, MIN_SAMPLES};
pub use reduced::{reduced_integral_flat, reduced_integral_hyperbolic, ReferenceMeasure};

use serde::Serialize;

use crate::error::HardyError;
use crate::families::{h_eps_profile, RadialProfile};
use crate::quadrature::{integrate_log, ln_sum, LogEstimate, QuadratureSpec};
use crate::riccati::{RiccatiPair, Tent};
use crate::sharpness::{compute_l0, compute_l1, compute_l2};

/// A positive integral kept in the log domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Piece {
    pub ln: f64,
    /// `exp(ln)`; may overflow to infinity for extreme ranges.
    pub value: f64,
    pub rel_error: f64,
}

impl Piece {
    fn from_log(est: LogEstimate, ln_factor: f64) -> Self {
        let ln = est.ln() + ln_factor;
        Piece { ln, value: ln.exp(), rel_error: est.rel_error() }
    }
}

/// Middle-piece numerators under three readings of the gradient norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MiddleForms {
    /// `ln λᵖ ∫ w F*(Du)ᵖ`.
    pub ln_lambda_form: f64,
    /// `ln ∫ w max{F*(±Du)}ᵖ`.
    pub ln_max_form: f64,
    /// `ln ∫ w F*(−sgn(u) Du)ᵖ`.
    pub ln_sign_form: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuotientBreakdown {
    pub knots: [f64; 4],
    pub lambda: f64,
    pub p: f64,
    /// Numerator on `[t₁, t₂]`, where `F*(Dρ) = 1`.
    pub ramp_left: Piece,
    /// Numerator on `[t₂, t₃]`, where `F*(−Dρ) = h_ε`.
    pub middle: Piece,
    /// Numerator on `[t₃, t₄]`.
    pub ramp_right: Piece,
    pub denominator: Piece,
    /// `∫_{t₂}^{t₃} w W vᵖ e ψ`, the middle part of the denominator.
    pub denominator_middle: Piece,
    pub quotient: f64,
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    /// `λᵖ l₂ᵖ l₁ + λᵖ (C/c) l₀` when the ψ bounds are available.
    pub upper_bound: Option<f64>,
    /// Combined relative quadrature error of `Q`.
    pub rel_error: f64,
    pub middle_forms: MiddleForms,
}

impl QuotientBreakdown {
    /// `I_middle ≤ l₁ h_ε(·)ᵖ ∫ wWvᵖ e ψ`, the first step of the bound chain.
    pub fn middle_bound_holds(&self, tol: f64) -> bool {
        let rhs = self.l1.ln() + self.p * self.l2.ln() + self.denominator_middle.ln;
        self.middle.ln <= rhs + tol
    }
}

/// `ln(e(t)ψ(t))`.
fn ln_measure<M: RadialProfile + ?Sized>(member: &M, t: f64) -> f64 {
    member.ln_psi(t) + member.ln_weight(t)
}

pub fn hardy_quotient_radial<M, P>(member: &M, tent: &Tent<'_, P>, spec: &QuadratureSpec) -> Result<QuotientBreakdown, HardyError>
where
    M: RadialProfile + ?Sized,
    P: RiccatiPair,
{
    let knots = tent.knots();
    let [t1, t2, t3, t4] = knots;
    if !(t4 < member.rho_sup()) {
        return Err(HardyError::OutsideInterval { t: t4, right: member.rho_sup() });
    }
    let lf = tent.limit();
    let pair = lf.pair();
    let p = pair.order();
    let params = member.params();
    let lambda = params.lambda;
    let h = |t: f64| h_eps_profile(member.phi(t), params.eps, params.theta);
    let ln_w = |t: f64| pair.weight(t).ln();
    let ln_big_w = |t: f64| pair.hardy_weight(t).ln();
    let (ln_v2, ln_v3) = (tent.ln_v2(), tent.ln_v3());

    // Failures inside the integrand surface as NaN, which integrate_log rejects.
    // Nodes mapped back from ln t may overshoot the knots by one ulp.
    let ln_v = |t: f64| lf.ln_v(t).unwrap_or(f64::NAN);
    let ln_dv = |t: f64| lf.ln_abs_dv(t).unwrap_or(f64::NAN);

    let left = integrate_log(|t| ln_w(t) + ln_measure(member, t), t1, t2, spec)?;
    let ramp_left = Piece::from_log(left, p * (ln_v2 - (t2 - t1).ln()));
    let mid = integrate_log(|t| ln_w(t) + p * (ln_dv(t) + h(t).ln()) + ln_measure(member, t), t2, t3, spec)?;
    let middle = Piece::from_log(mid, 0.0);
    let right = integrate_log(|t| ln_w(t) + p * h(t).ln() + ln_measure(member, t), t3, t4, spec)?;
    let ramp_right = Piece::from_log(right, p * (ln_v3 - (t4 - t3).ln()));

    let j_left = integrate_log(
        |t| ln_w(t) + ln_big_w(t) + p * (ln_v2 + ((t - t1).max(0.0) / (t2 - t1)).ln()) + ln_measure(member, t),
        t1,
        t2,
        spec,
    )?;
    let j_mid = integrate_log(|t| ln_w(t) + ln_big_w(t) + p * ln_v(t) + ln_measure(member, t), t2, t3, spec)?;
    let j_right = integrate_log(
        |t| ln_w(t) + ln_big_w(t) + p * (ln_v3 + ((t4 - t).max(0.0) / (t4 - t3)).ln()) + ln_measure(member, t),
        t3,
        t4,
        spec,
    )?;
    let ln_j = ln_sum(&[j_left, j_mid, j_right]);
    let denominator = Piece { ln: ln_j, value: ln_j.exp(), rel_error: j_left.rel_error().max(j_mid.rel_error()).max(j_right.rel_error()) };
    let denominator_middle = Piece::from_log(j_mid, 0.0);

    let ln_i = ln_sum(&[
        LogEstimate { log_scale: ramp_left.ln, mantissa: 1.0, error: 0.0 },
        LogEstimate { log_scale: middle.ln, mantissa: 1.0, error: 0.0 },
        LogEstimate { log_scale: ramp_right.ln, mantissa: 1.0, error: 0.0 },
    ]);
    let quotient = (p * lambda.ln() + ln_i - ln_j).exp();
    let rel_error = [ramp_left, middle, ramp_right].iter().map(|x| x.rel_error).fold(0.0, f64::max) + denominator.rel_error;

    let plain = integrate_log(|t| ln_w(t) + p * ln_dv(t) + ln_measure(member, t), t2, t3, spec)?.ln();
    let middle_forms = MiddleForms { ln_lambda_form: p * lambda.ln() + middle.ln, ln_max_form: plain, ln_sign_form: plain };

    let l0 = compute_l0(member, lf, knots, spec)?;
    let l1 = compute_l1(pair, knots);
    let l2 = compute_l2(member, knots);
    let upper_bound = member.psi_bounds().ok().map(|b| {
        let lp = lambda.powf(p);
        lp * l2.powf(p) * l1 + lp * (b.upper / b.lower) * l0
    });

    Ok(QuotientBreakdown {
        knots,
        lambda,
        p,
        ramp_left,
        middle,
        ramp_right,
        denominator,
        denominator_middle,
        quotient,
        l0,
        l1,
        l2,
        upper_bound,
        rel_error,
        middle_forms,
    })
}
