use crate::error::HardyError;
use crate::families::{h_eps_profile, FamilyKind, RadialProfile};
use crate::hardy::ReferenceMeasure;
use crate::quadrature::QuadratureSpec;
use crate::riccati::{solution_ratio, LimitFunction, RiccatiPair};

/// Reference measure of the reduced integrals for a family member.
fn reference<M: RadialProfile + ?Sized>(member: &M) -> ReferenceMeasure {
    let p = member.params();
    match p.kind {
        FamilyKind::Flat => ReferenceMeasure::flat(p.n),
        FamilyKind::Hyperbolic { h, k_eps, .. } => ReferenceMeasure::hyperbolic(p.n, k_eps, h),
    }
}

/// `vᵖ(t₂)𝓘(w;t₁,t₂)/((t₂−t₁)ᵖ𝓘(wWvᵖ;t₂,t₃)) + vᵖ(t₃)𝓘(w;t₃,t₄)/((t₄−t₃)ᵖ𝓘(wWvᵖ;t₂,t₃))`
/// with the reduced integral `𝓘` of the member's reference measure.
pub fn compute_l0<M, P>(member: &M, lf: &LimitFunction<P>, knots: [f64; 4], spec: &QuadratureSpec) -> Result<f64, HardyError>
where
    M: RadialProfile + ?Sized,
    P: RiccatiPair,
{
    let [t1, t2, t3, t4] = knots;
    let mu = reference(member);
    let pair = lf.pair();
    let p = pair.order();
    let ln_w = |t: f64| pair.weight(t).ln();
    let mid = mu
        .integral(|t| ln_w(t) + pair.hardy_weight(t).ln() + p * lf.ln_v(t).unwrap_or(f64::NAN), t2, t3, spec)?
        .ln();
    let left = mu.integral(ln_w, t1, t2, spec)?.ln();
    let right = mu.integral(ln_w, t3, t4, spec)?.ln();
    let a = p * lf.ln_v(t2)? + left - p * (t2 - t1).ln() - mid;
    let b = p * lf.ln_v(t3)? + right - p * (t4 - t3).ln() - mid;
    Ok(a.exp() + b.exp())
}

/// `max_{t∈[t₂,t₃]} G(t)^{p′}/W(t)`: grid seeding then golden-section search.
pub fn compute_l1<P: RiccatiPair>(pair: &P, knots: [f64; 4]) -> f64 {
    let [_, t2, t3, _] = knots;
    const GRID: usize = 257;
    let node = |i: usize| t2 * (t3 / t2).powf(i as f64 / (GRID - 1) as f64);
    let f = |t: f64| solution_ratio(pair, t);
    let (best_i, best) = (0..GRID).map(|i| (i, f(node(i)))).fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let (mut a, mut b) = (node(best_i.saturating_sub(1)), node((best_i + 1).min(GRID - 1)));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut best = best;
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        let (fc, fd) = (f(c), f(d));
        best = best.max(fc).max(fd);
        if fc > fd {
            b = d;
        } else {
            a = c;
        }
    }
    best
}

/// Reversal factor on the middle piece: `h_ε(t₂)` for the flat family and
/// `h_ε((1−θ)κt₂)` for the hyperbolic one.
pub fn compute_l2<M: RadialProfile + ?Sized>(member: &M, knots: [f64; 4]) -> f64 {
    let p = member.params();
    let s = match p.kind {
        FamilyKind::Flat => knots[1],
        FamilyKind::Hyperbolic { kappa, .. } => (1.0 - p.theta) * kappa * knots[1],
    };
    h_eps_profile(s, p.eps, p.theta)
}
