//! Randers metrics `F(x, y) = √(yᵀa(x)y) + ⟨b(x), y⟩` on open subsets of ℝⁿ.
//!
//! A metric is described by a [`RandersData`] implementation, whose methods
//! are generic over [`Real`] so every geometric quantity can be
//! differentiated exactly with nested dual numbers. [`RandersMetric`] wraps
//! the data with domain and Randers-condition checks and exposes the
//! `f64` API.

mod curvature;
pub mod fd;
pub(crate) mod measure;
mod operators;
mod simple;
mod tensor;

pub use measure::{BusemannHausdorff, Density, DensityKind, Lebesgue, VolumeEstimate};
pub use operators::Geodesic;
pub use simple::{ConstantRanders, Euclidean};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{dot, hessian, lift, seed_axis, Dual, Real, ScalarField};
use crate::error::FinslerError;
use crate::linalg::Mat;

/// Where a metric is defined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Whole,
    /// Open Euclidean ball centered at the origin.
    Ball { radius: f64 },
}

impl Domain {
    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            Domain::Whole => x.iter().all(|v| v.is_finite()),
            Domain::Ball { radius } => x.iter().map(|v| v * v).sum::<f64>().sqrt() < radius,
        }
    }

    /// Euclidean distance from `x` to the boundary.
    pub fn margin(&self, x: &[f64]) -> f64 {
        match *self {
            Domain::Whole => f64::INFINITY,
            Domain::Ball { radius } => radius - x.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }
}

/// Coefficient fields of a Randers metric.
pub trait RandersData: Send + Sync {
    fn dim(&self) -> usize;
    fn domain(&self) -> Domain;
    /// Riemannian part `a_ij(x)`.
    fn riemannian<T: Real>(&self, x: &[T]) -> Mat<T>;
    /// One-form `b_i(x)`.
    fn one_form<T: Real>(&self, x: &[T]) -> Vec<T>;
    /// A potential `β` with `Dβ = b`, when one is known.
    fn potential<T: Real>(&self, _x: &[T]) -> Option<T> {
        None
    }
}

impl<D: RandersData> RandersData for &D {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn riemannian<T: Real>(&self, x: &[T]) -> Mat<T> {
        (**self).riemannian(x)
    }
    fn one_form<T: Real>(&self, x: &[T]) -> Vec<T> {
        (**self).one_form(x)
    }
    fn potential<T: Real>(&self, x: &[T]) -> Option<T> {
        (**self).potential(x)
    }
}

/// `F(x, y)` at any differentiation depth.
pub fn randers_norm<T: Real, D: RandersData>(d: &D, x: &[T], y: &[T]) -> T {
    let a = d.riemannian(x);
    let b = d.one_form(x);
    a.bilinear(y, y).sqrt() + dot(&b, y)
}

/// Squared `a`-norms needed by the dual: `(|ξ|², ⟨ξ, b⟩, |b|²)` in `a⁻¹`.
fn dual_quantities<T: Real, D: RandersData>(d: &D, x: &[T], xi: &[T]) -> Result<(T, T, T), FinslerError> {
    let a = d.riemannian(x);
    let b = d.one_form(x);
    let a_inv_b = a.solve(&b)?;
    let a_inv_xi = a.solve(xi)?;
    Ok((dot(xi, &a_inv_xi), dot(xi, &a_inv_b), dot(&b, &a_inv_b)))
}

/// Closed-form Randers dual norm `F*(x, ξ)`.
pub fn randers_dual_norm<T: Real, D: RandersData>(d: &D, x: &[T], xi: &[T]) -> Result<T, FinslerError> {
    let (xx, xb, bb) = dual_quantities(d, x, xi)?;
    let s = T::one() - bb;
    Ok((s * xx + xb * xb).sqrt() / s - xb / s)
}

/// Numerical tolerances used by metric operations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricTolerances {
    /// Refuse `(x, y)` with `F(x, y) < nonsmooth · |y|`.
    pub nonsmooth: f64,
    pub max_condition: f64,
    /// Largest projective-flatness residual accepted by the projective formulas.
    pub flatness: f64,
}

impl Default for MetricTolerances {
    fn default() -> Self {
        Self { nonsmooth: 1e-12, max_condition: 1e12, flatness: 1e-7 }
    }
}

/// Result of the generic dual-norm maximizer.
#[derive(Clone, Debug, PartialEq)]
pub struct DualSearch {
    pub value: f64,
    /// Unit Euclidean vector attaining the supremum.
    pub maximizer: Vec<f64>,
    /// Norm of the Riemannian gradient at the maximizer.
    pub residual: f64,
    pub newton_steps: usize,
}

#[derive(Clone, Debug)]
pub struct RandersMetric<D> {
    data: D,
    tol: MetricTolerances,
}

impl<D: RandersData> RandersMetric<D> {
    pub fn new(data: D) -> Self {
        Self { data, tol: MetricTolerances::default() }
    }

    pub fn with_tolerances(mut self, tol: MetricTolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn data(&self) -> &D {
        &self.data
    }

    pub fn tolerances(&self) -> &MetricTolerances {
        &self.tol
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    fn check_dim(&self, v: &[f64]) -> Result<(), FinslerError> {
        if v.len() != self.dim() {
            return Err(FinslerError::Dimension { expected: self.dim(), got: v.len() });
        }
        Ok(())
    }

    /// `‖b(x)‖_a`.
    pub fn one_form_norm(&self, x: &[f64]) -> Result<f64, FinslerError> {
        self.check_dim(x)?;
        let a = self.data.riemannian(x);
        let b = self.data.one_form(x);
        Ok(dot(&b, &a.solve(&b)?).sqrt())
    }

    /// Domain and Randers-condition check at `x`.
    pub fn check_point(&self, x: &[f64]) -> Result<(), FinslerError> {
        self.check_dim(x)?;
        if !self.data.domain().contains(x) {
            return Err(FinslerError::OutsideDomain { point: x.to_vec() });
        }
        let norm = self.one_form_norm(x)?;
        if !(norm < 1.0) {
            return Err(FinslerError::RandersCondition { norm });
        }
        Ok(())
    }

    /// Checks shared by all tensor operations: valid point, `y ≠ 0`, and
    /// `F(x, y)` bounded away from zero.
    fn check_vector(&self, x: &[f64], y: &[f64]) -> Result<f64, FinslerError> {
        self.check_point(x)?;
        self.check_dim(y)?;
        let ny = dot(y, y).sqrt();
        if ny == 0.0 {
            return Err(FinslerError::ZeroVector);
        }
        let f = randers_norm(&self.data, x, y);
        if !(f >= self.tol.nonsmooth * ny) {
            return Err(FinslerError::NonSmooth { value: f });
        }
        Ok(f)
    }

    pub fn eval_f(&self, x: &[f64], y: &[f64]) -> Result<f64, FinslerError> {
        self.check_point(x)?;
        self.check_dim(y)?;
        Ok(randers_norm(&self.data, x, y))
    }

    /// `F*(x, ξ)` by the Randers closed form.
    pub fn eval_f_dual(&self, x: &[f64], xi: &[f64]) -> Result<f64, FinslerError> {
        self.check_point(x)?;
        self.check_dim(xi)?;
        randers_dual_norm(&self.data, x, xi)
    }

    /// `F*(x, ξ) = sup ⟨ξ, y⟩ / F(x, y)` by direct maximization over the
    /// unit sphere: a dense start grid followed by Riemannian Newton steps.
    pub fn eval_f_dual_search(&self, x: &[f64], xi: &[f64]) -> Result<DualSearch, FinslerError> {
        self.check_point(x)?;
        self.check_dim(xi)?;
        let n = self.dim();
        let xi_norm = dot(xi, xi).sqrt();
        if xi_norm == 0.0 {
            return Ok(DualSearch { value: 0.0, maximizer: unit(n, 0), residual: 0.0, newton_steps: 0 });
        }
        let obj = DualObjective { data: &self.data, x, xi };
        let (best, start) = start_directions(n)
            .into_iter()
            .map(|y| (obj.eval(&y), y))
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .expect("nonempty start grid");
        newton_on_sphere(&obj, start, 1e-10 * best.abs().max(f64::MIN_POSITIVE))
    }

    /// `ℓ*(ξ) = F*(ξ) ∂F*/∂ξ`.
    pub fn legendre_dual(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>, FinslerError> {
        self.check_point(x)?;
        self.check_dim(xi)?;
        if xi.iter().all(|&v| v == 0.0) {
            return Err(FinslerError::ZeroVector);
        }
        let xs: Vec<Dual<f64>> = lift(x);
        (0..self.dim())
            .map(|k| {
                let r = randers_dual_norm(&self.data, &xs, &seed_axis(xi, k))?;
                Ok(r.re * r.du)
            })
            .collect()
    }

    /// `ℓ(y) = F(y) ∂F/∂y`.
    pub fn legendre(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>, FinslerError> {
        self.check_vector(x, y)?;
        let xs: Vec<Dual<f64>> = lift(x);
        Ok((0..self.dim())
            .map(|k| {
                let r = randers_norm(&self.data, &xs, &seed_axis(y, k));
                r.re * r.du
            })
            .collect())
    }

    /// `F(x, −y) / F(x, y)`.
    pub fn reversibility(&self, x: &[f64], y: &[f64]) -> Result<f64, FinslerError> {
        let f = self.check_vector(x, y)?;
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        Ok(randers_norm(&self.data, x, &neg) / f)
    }

    /// `F*(x, −ξ) / F*(x, ξ)`.
    pub fn dual_reversibility(&self, x: &[f64], xi: &[f64]) -> Result<f64, FinslerError> {
        let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
        Ok(self.eval_f_dual(x, &neg)? / self.eval_f_dual(x, xi)?)
    }

    /// Finite-difference gradient of the potential against the one-form:
    /// returns the largest component mismatch, or `None` without a potential.
    pub fn potential_mismatch(&self, x: &[f64]) -> Option<f64> {
        self.data.potential(x)?;
        let b = self.data.one_form(x);
        let h = 1e-5 * x.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let worst = (0..self.dim())
            .map(|k| {
                let mut p = x.to_vec();
                let mut m = x.to_vec();
                p[k] += h;
                m[k] -= h;
                let d = (self.data.potential(&p)? - self.data.potential(&m)?) / (2.0 * h);
                Some((d - b[k]).abs())
            })
            .try_fold(0.0f64, |acc, e| e.map(|e| acc.max(e)))?;
        Some(worst)
    }
}

fn unit(n: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    e
}

struct DualObjective<'a, D> {
    data: &'a D,
    x: &'a [f64],
    xi: &'a [f64],
}

impl<D: RandersData> ScalarField for DualObjective<'_, D> {
    fn eval<T: Real>(&self, y: &[T]) -> T {
        let x: Vec<T> = lift(self.x);
        let xi: Vec<T> = lift(self.xi);
        dot(&xi, y) / randers_norm(self.data, &x, y)
    }
}

/// Start grid: equally spaced angles (n = 2), a Fibonacci lattice (n = 3),
/// or seeded Gaussian directions (n > 3).
fn start_directions(n: usize) -> Vec<Vec<f64>> {
    match n {
        2 => (0..10_000)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 10_000.0;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            let m = 10_000;
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..m)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * k as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1a1);
            (0..100_000)
                .map(|_| {
                    let v: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
                    let s = dot(&v, &v).sqrt();
                    v.into_iter().map(|c| c / s).collect()
                })
                .collect()
        }
    }
}

pub(crate) fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box–Muller; u1 is kept away from zero.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn newton_on_sphere<D: RandersData>(obj: &DualObjective<'_, D>, mut y: Vec<f64>, tol: f64) -> Result<DualSearch, FinslerError> {
    let n = y.len();
    let mut residual = f64::INFINITY;
    for step in 0..50 {
        let (val, g, h) = hessian(obj, &y);
        // The objective is 0-homogeneous, so its gradient is tangent already.
        let yg = dot(&y, &g);
        let rg: Vec<f64> = (0..n).map(|i| g[i] - yg * y[i]).collect();
        residual = dot(&rg, &rg).sqrt();
        if residual <= tol {
            return Ok(DualSearch { value: val, maximizer: y, residual, newton_steps: step });
        }
        // Projected Hessian with the normal direction pinned.
        let proj = |i: usize, j: usize| (if i == j { 1.0 } else { 0.0 }) - y[i] * y[j];
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        s += proj(i, k) * h[k * n + l] * proj(l, j);
                    }
                }
                s -= yg * proj(i, j);
                s += y[i] * y[j];
                m.set(i, j, s);
            }
        }
        let rhs: Vec<f64> = rg.iter().map(|v| -v).collect();
        let mut d = m.solve(&rhs).unwrap_or_else(|_| rg.clone());
        // Fall back to gradient ascent if Newton would go downhill.
        if dot(&d, &rg) <= 0.0 {
            d = rg.clone();
        }
        let mut t = 1.0;
        let base = val;
        loop {
            let cand: Vec<f64> = (0..n).map(|i| y[i] + t * d[i]).collect();
            let s = dot(&cand, &cand).sqrt();
            let cand: Vec<f64> = cand.into_iter().map(|c| c / s).collect();
            if obj.eval(&cand) >= base - 1e-15 * base.abs() || t < 1e-12 {
                y = cand;
                break;
            }
            t *= 0.5;
        }
    }
    let (val, g, _) = hessian(obj, &y);
    let yg = dot(&y, &g);
    let rg: Vec<f64> = (0..n).map(|i| g[i] - yg * y[i]).collect();
    let final_res = dot(&rg, &rg).sqrt().min(residual);
    if final_res <= tol {
        Ok(DualSearch { value: val, maximizer: y, residual: final_res, newton_steps: 50 })
    } else {
        Err(FinslerError::NonConvergence { achieved: final_res })
    }
}
