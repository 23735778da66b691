use crate::dual::{dot, gradient, seed, seed_axis, Dual, Real, ScalarField};
use crate::error::FinslerError;

use super::measure::Density;
use super::tensor::spray;
use super::{randers_dual_norm, RandersData, RandersMetric};

/// `σ(x)·∇u(x)` with `∇u = ℓ*(Du)`.
fn weighted_gradient<T: Real, D: RandersData, M: Density, U: ScalarField>(
    d: &D,
    density: &M,
    u: &U,
    x: &[T],
) -> Result<Vec<T>, FinslerError> {
    let du = gradient(u, x);
    let xs: Vec<Dual<T>> = seed(x, None);
    let sigma = density.sigma(x);
    (0..x.len())
        .map(|k| {
            let r = randers_dual_norm(d, &xs, &seed_axis(&du, k))?;
            Ok(r.re * r.du * sigma)
        })
        .collect()
}

/// A sampled geodesic.
#[derive(Clone, Debug, PartialEq)]
pub struct Geodesic {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
}

impl Geodesic {
    /// Largest Euclidean distance from the line through the start point in
    /// the initial direction.
    pub fn line_deviation(&self) -> f64 {
        let x0 = &self.points[0];
        let v0 = &self.velocities[0];
        let nv = dot(v0, v0).sqrt();
        let dir: Vec<f64> = v0.iter().map(|c| c / nv).collect();
        self.points
            .iter()
            .map(|p| {
                let rel: Vec<f64> = p.iter().zip(x0).map(|(a, b)| a - b).collect();
                let along = dot(&rel, &dir);
                rel.iter().zip(&dir).map(|(r, e)| (r - along * e).powi(2)).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `∫ F(γ, γ̇) dt` by the composite Simpson rule (trapezoid on a
    /// trailing odd panel).
    pub fn length<D: RandersData>(&self, metric: &RandersMetric<D>) -> Result<f64, FinslerError> {
        let speeds: Vec<f64> = self
            .points
            .iter()
            .zip(&self.velocities)
            .map(|(x, v)| metric.eval_f(x, v))
            .collect::<Result<_, _>>()?;
        let m = speeds.len() - 1;
        let h = if m > 0 { self.times[1] - self.times[0] } else { 0.0 };
        let even = m - m % 2;
        let mut s = 0.0;
        for k in (0..even).step_by(2) {
            s += h / 3.0 * (speeds[k] + 4.0 * speeds[k + 1] + speeds[k + 2]);
        }
        if even < m {
            s += 0.5 * h * (speeds[m - 1] + speeds[m]);
        }
        Ok(s)
    }
}

impl<D: RandersData> RandersMetric<D> {
    /// Finsler Laplacian `Δu = (1/σ) ∂ᵢ(σ ∇uⁱ)`.
    pub fn laplacian<M: Density, U: ScalarField>(&self, density: &M, u: &U, x: &[f64]) -> Result<f64, FinslerError> {
        self.check_point(x)?;
        let du = gradient(u, x);
        if du.iter().all(|&c| c == 0.0) {
            return Err(FinslerError::ZeroVector);
        }
        let sigma = density.sigma(x);
        if !(sigma > 0.0) {
            return Err(FinslerError::NonPositiveDensity { value: sigma });
        }
        let mut div = 0.0;
        for i in 0..self.dim() {
            let v = weighted_gradient(&self.data, density, u, &seed_axis(x, i))?;
            div += v[i].du;
        }
        Ok(div / sigma)
    }

    /// Fixed-step RK4 for `ẍ + 2G(x, ẋ) = 0`.
    pub fn geodesic_integrate(&self, x0: &[f64], y0: &[f64], t_max: f64, steps: usize) -> Result<Geodesic, FinslerError> {
        self.check_vector(x0, y0)?;
        if steps == 0 || !(t_max > 0.0) {
            return Err(FinslerError::InvalidParameter("geodesic needs t_max > 0 and steps > 0".into()));
        }
        let n = self.dim();
        let h = t_max / steps as f64;
        let accel = |x: &[f64], v: &[f64]| -> Result<Vec<f64>, FinslerError> {
            if !self.data.domain().contains(x) {
                return Err(FinslerError::OutsideDomain { point: x.to_vec() });
            }
            Ok(spray(&self.data, x, v)?.into_iter().map(|g| -2.0 * g).collect())
        };
        let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + s * q).collect() };
        let mut out = Geodesic { times: vec![0.0], points: vec![x0.to_vec()], velocities: vec![y0.to_vec()] };
        let (mut x, mut v) = (x0.to_vec(), y0.to_vec());
        for step in 0..steps {
            let stage = |r: Result<Vec<f64>, FinslerError>| r.map_err(|_| FinslerError::GeodesicExit { step });
            let k1x = v.clone();
            let k1v = stage(accel(&x, &v))?;
            let k2x = axpy(&v, 0.5 * h, &k1v);
            let k2v = stage(accel(&axpy(&x, 0.5 * h, &k1x), &k2x))?;
            let k3x = axpy(&v, 0.5 * h, &k2v);
            let k3v = stage(accel(&axpy(&x, 0.5 * h, &k2x), &k3x))?;
            let k4x = axpy(&v, h, &k3v);
            let k4v = stage(accel(&axpy(&x, h, &k3x), &k4x))?;
            for i in 0..n {
                x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
                v[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
            }
            if !self.data.domain().contains(&x) {
                return Err(FinslerError::GeodesicExit { step });
            }
            out.times.push((step + 1) as f64 * h);
            out.points.push(x.clone());
            out.velocities.push(v.clone());
        }
        Ok(out)
    }
}
