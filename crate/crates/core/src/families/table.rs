use serde::Serialize;

use crate::error::FinslerError;
use crate::finsler::{fd, RandersMetric};

use super::{FamilyKind, FamilyMember, FamilyParams, RadialProfile, RayCurvature};

/// One row of closed-form radial data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    /// Profile radius (`|x|` or `arctanh |x|`).
    pub radius: f64,
    pub rho: f64,
    pub rho_rev: f64,
    pub h_eps: f64,
    pub flag: f64,
    pub reduced_s: f64,
    pub rev: f64,
}

pub fn profile_table<P: RadialProfile + ?Sized>(profile: &P, radii: &[f64]) -> Vec<ProfileRow> {
    radii
        .iter()
        .map(|&s| {
            let c = profile.ray_curvature(s);
            ProfileRow {
                radius: s,
                rho: profile.rho(s),
                rho_rev: profile.rho_rev(s),
                h_eps: profile.h_eps(s),
                flag: c.flag,
                reduced_s: c.reduced_s,
                rev: c.rev,
            }
        })
        .collect()
}

/// Closed-form ray data next to the engine's dual-number and
/// finite-difference evaluations at `x = coordinate_radius(s)·e`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureRow {
    pub radius: f64,
    pub closed: RayCurvature,
    pub h_eps: f64,
    pub engine: RayCurvature,
    /// `F*(−Dρ)` from the engine.
    pub engine_h_eps: f64,
    /// `F*(Dρ)` from the engine.
    pub eikonal: f64,
    pub fd_flag: f64,
    pub fd_reduced_s: f64,
    /// Largest relative deviation of the dual-number path.
    pub rel_dual: f64,
    /// Largest relative deviation of the finite-difference path.
    pub rel_fd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureCheck {
    pub rows: Vec<CurvatureRow>,
    pub max_rel_dual: f64,
    pub max_rel_fd: f64,
    /// `K ≤ K_max`, `S̄ ≤ S_max` and `rev ≤ λ` in every row (closed forms).
    pub bounds_hold: bool,
    pub flag_bound: f64,
    pub reduced_s_bound: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// Upper bounds `(K_max, S̄_max)` that the family is built to satisfy.
pub fn curvature_bounds(params: &FamilyParams) -> (f64, f64) {
    match params.kind {
        FamilyKind::Flat => (0.0, 0.0),
        FamilyKind::Hyperbolic { kappa, h, .. } => (-kappa * kappa, (params.n - 1) as f64 * h),
    }
}

/// Evaluates every radius along the diagonal ray `e ∝ (1, 1, …)`.
pub fn curvature_check<M: FamilyMember>(member: &M, radii: &[f64], tol: f64) -> Result<CurvatureCheck, FinslerError> {
    let metric = RandersMetric::new(member.clone());
    let density = member.measure();
    let params = member.params();
    let n = params.n;
    let (k_max, s_max) = curvature_bounds(&params);
    let mut rows = Vec::with_capacity(radii.len());
    for &s in radii {
        let r = member.coordinate_radius(s);
        let x = vec![r / (n as f64).sqrt(); n];
        let closed = member.ray_curvature(s);
        let engine = RayCurvature {
            flag: metric.flag_curvature_projective(&x, &x)?,
            reduced_s: metric.reduced_s_curvature(&density, &x, &x)?,
            rev: metric.reversibility(&x, &x)?,
        };
        let fd_flag = fd::flag_curvature_projective(&metric, &x, &x)?;
        let fd_reduced_s = fd::reduced_s_curvature(&metric, &density, &x, &x)?;
        let grad = member.distance_gradient(&x);
        let back: Vec<f64> = grad.iter().map(|v| -v).collect();
        let engine_h_eps = metric.eval_f_dual(&x, &back)?;
        let eikonal = metric.eval_f_dual(&x, &grad)?;
        let h_eps = member.h_eps(s);
        let rel_dual = [
            rel(engine.flag, closed.flag),
            rel(engine.reduced_s, closed.reduced_s),
            rel(engine.rev, closed.rev),
            rel(engine_h_eps, h_eps),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let rel_fd = rel(fd_flag, closed.flag).max(rel(fd_reduced_s, closed.reduced_s));
        rows.push(CurvatureRow { radius: s, closed, h_eps, engine, engine_h_eps, eikonal, fd_flag, fd_reduced_s, rel_dual, rel_fd });
    }
    let bounds_hold = rows
        .iter()
        .all(|r| r.closed.flag <= k_max + tol && r.closed.reduced_s <= s_max + tol && r.closed.rev <= params.lambda + tol);
    Ok(CurvatureCheck {
        max_rel_dual: rows.iter().map(|r| r.rel_dual).fold(0.0, f64::max),
        max_rel_fd: rows.iter().map(|r| r.rel_fd).fold(0.0, f64::max),
        rows,
        bounds_hold,
        flag_bound: k_max,
        reduced_s_bound: s_max,
    })
}
