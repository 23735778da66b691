//! Central finite-difference oracles for the dual-number evaluators.
//!
//! Three-point stencils use `1e−5·max(1, |x|)` for first and `1e−4·max(1, |x|)`
//! for nested second derivatives in `x`. The curvature oracles use five-point
//! stencils with ten times wider steps, capped near the origin and the boundary, because their
//! terms nearly cancel far from the origin. Steps in `y` scale with `|y|`,
//! matching the homogeneity in `y`.

use crate::dual::dot;
use crate::error::FinslerError;
use crate::linalg::Mat;

use super::measure::Density;
use super::{randers_norm, RandersData, RandersMetric};

pub fn first_step(x: &[f64]) -> f64 {
    1e-5 * dot(x, x).sqrt().max(1.0)
}

pub fn second_step(x: &[f64]) -> f64 {
    1e-4 * dot(x, x).sqrt().max(1.0)
}

pub fn vector_step(y: &[f64]) -> f64 {
    1e-4 * dot(y, y).sqrt()
}

fn shifted(v: &[f64], dir: &[f64], s: f64) -> Vec<f64> {
    v.iter().zip(dir).map(|(a, b)| a + s * b).collect()
}

/// Hessian of `½F²` in `y` by central differences.
pub fn fundamental_tensor<D: RandersData>(m: &RandersMetric<D>, x: &[f64], y: &[f64]) -> Result<Mat<f64>, FinslerError> {
    m.check_vector(x, y)?;
    let n = m.dim();
    let h = vector_step(y);
    let e = |f: &dyn Fn(&[f64]) -> f64, i: usize, j: usize| {
        let mut pp = y.to_vec();
        let mut pm = y.to_vec();
        let mut mp = y.to_vec();
        let mut mm = y.to_vec();
        pp[i] += h;
        pp[j] += h;
        pm[i] += h;
        pm[j] -= h;
        mp[i] -= h;
        mp[j] += h;
        mm[i] -= h;
        mm[j] -= h;
        (f(&pp) - f(&pm) - f(&mp) + f(&mm)) / (4.0 * h * h)
    };
    let half_sq = |v: &[f64]| 0.5 * randers_norm(m.data(), x, v).powi(2);
    Ok(Mat::from_fn(n, |i, j| e(&half_sq, i, j)))
}

/// `(1/2F) d/ds F(x + s y, y)` by a central difference.
pub fn projective_factor<D: RandersData>(m: &RandersMetric<D>, x: &[f64], y: &[f64]) -> f64 {
    let s = first_step(x) / dot(y, y).sqrt();
    let f = |p: &[f64]| randers_norm(m.data(), p, y);
    (f(&shifted(x, y, s)) - f(&shifted(x, y, -s))) / (2.0 * s) / (2.0 * f(x))
}

/// `scale·max(1, |x|)`, capped at `|x|/8` and at 1/64 of the distance to the
/// boundary so stencils stay where the metric is smooth.
fn wide_step<D: RandersData>(m: &RandersMetric<D>, x: &[f64], scale: f64) -> f64 {
    let r = dot(x, x).sqrt();
    let s = (scale * r.max(1.0)).min(m.data().domain().margin(x) / 64.0);
    if r > 0.0 {
        s.min(r / 8.0)
    } else {
        s
    }
}

/// Five-point central difference `g′(0)` with step `s`.
fn five_point(g: impl Fn(f64) -> f64, s: f64) -> f64 {
    (8.0 * (g(s) - g(-s)) - (g(2.0 * s) - g(-2.0 * s))) / (12.0 * s)
}

/// `(P² − d/ds P(x + s y, y)) / F²` with both derivatives taken by
/// five-point stencils, which tolerate the wider steps needed where the two
/// terms nearly cancel.
pub fn flag_curvature_projective<D: RandersData>(m: &RandersMetric<D>, x: &[f64], y: &[f64]) -> Result<f64, FinslerError> {
    let f = m.check_vector(x, y)?;
    let ny = dot(y, y).sqrt();
    let (s1, s2) = (wide_step(m, x, 1e-4) / ny, wide_step(m, x, 1e-3) / ny);
    let p_at = |z: &[f64]| {
        let g = |s: f64| randers_norm(m.data(), &shifted(z, y, s), y);
        five_point(g, s1) / (2.0 * g(0.0))
    };
    let p = p_at(x);
    let dp = five_point(|s| p_at(&shifted(x, y, s)), s2);
    Ok((p * p - dp) / (f * f))
}

/// `S = ∂(P yⁱ)/∂yⁱ − y·∇σ/σ` by five-point differences.
pub fn s_curvature<D: RandersData, M: Density>(m: &RandersMetric<D>, density: &M, x: &[f64], y: &[f64]) -> Result<f64, FinslerError> {
    m.check_vector(x, y)?;
    let n = m.dim();
    let ny = dot(y, y).sqrt();
    let h = 1e-3 * ny;
    let s1 = wide_step(m, x, 1e-4) / ny;
    let p_at = |v: &[f64]| {
        let g = |s: f64| randers_norm(m.data(), &shifted(x, v, s), v);
        five_point(g, s1) / (2.0 * g(0.0))
    };
    let div: f64 = (0..n)
        .map(|i| {
            let flux = |d: f64| {
                let mut v = y.to_vec();
                v[i] += d;
                p_at(&v) * v[i]
            };
            five_point(flux, h)
        })
        .sum();
    let s = wide_step(m, x, 1e-3) / ny;
    let sigma = density.sigma(x);
    let dsigma = five_point(|t| density.sigma(&shifted(x, y, t)), s);
    Ok(div - dsigma / sigma)
}

pub fn reduced_s_curvature<D: RandersData, M: Density>(m: &RandersMetric<D>, density: &M, x: &[f64], y: &[f64]) -> Result<f64, FinslerError> {
    let s = s_curvature(m, density, x, y)?;
    Ok(s / randers_norm(m.data(), x, y))
}
