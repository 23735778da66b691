use crate::dual::{lift, seed, seed_axis, Dual, Real};
use crate::error::FinslerError;
use crate::linalg::{check_spd, Mat};

use super::{randers_norm, RandersData, RandersMetric};

/// `g_ij(x, y) = ½ ∂²F²/∂yⁱ∂yʲ` by second-order duals in `y`.
pub(crate) fn fundamental<T: Real, D: RandersData>(d: &D, x: &[T], y: &[T]) -> Mat<T> {
    let n = y.len();
    let xs: Vec<Dual<Dual<T>>> = x.iter().map(|&v| Dual::constant(Dual::constant(v))).collect();
    let mut g = Mat::zeros(n);
    for i in 0..n {
        for j in i..n {
            let ys: Vec<Dual<Dual<T>>> = y
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let outer = if k == i { T::one() } else { T::zero() };
                    let inner = if k == j { T::one() } else { T::zero() };
                    Dual::new(Dual::new(v, inner), Dual::new(outer, T::zero()))
                })
                .collect();
            let f = randers_norm(d, &xs, &ys);
            let h = (f * f * 0.5).du.du;
            g.set(i, j, h);
            g.set(j, i, h);
        }
    }
    g
}

/// `∂g_ij/∂xᵏ` for every `k`.
pub(crate) fn fundamental_x_derivatives<T: Real, D: RandersData>(d: &D, x: &[T], y: &[T]) -> Vec<Mat<T>> {
    let n = x.len();
    let ys = seed(y, None);
    (0..n)
        .map(|k| {
            let g = fundamental(d, &seed_axis(x, k), &ys);
            Mat::from_fn(n, |i, j| g.at(i, j).du)
        })
        .collect()
}

/// Geodesic spray `Gⁱ = ¼ g^{il}(2 ∂ₖg_{jl} − ∂ₗg_{jk}) yʲyᵏ`.
pub(crate) fn spray<T: Real, D: RandersData>(d: &D, x: &[T], y: &[T]) -> Result<Vec<T>, FinslerError> {
    let n = y.len();
    let g = fundamental(d, x, y);
    let dg = fundamental_x_derivatives(d, x, y);
    let rhs: Vec<T> = (0..n)
        .map(|l| {
            let mut s = T::zero();
            for k in 0..n {
                let row = dg[k].mul_vec(y);
                s += row[l] * y[k] * 2.0;
            }
            s - dg[l].bilinear(y, y)
        })
        .collect();
    Ok(g.solve(&rhs)?.into_iter().map(|v| v * 0.25).collect())
}

impl<D: RandersData> RandersMetric<D> {
    /// Fundamental tensor `g_y`, checked for positive definiteness and
    /// conditioning.
    pub fn fundamental_tensor(&self, x: &[f64], y: &[f64]) -> Result<Mat<f64>, FinslerError> {
        self.check_vector(x, y)?;
        let g = fundamental(&self.data, x, y);
        check_spd(&g, self.tol.max_condition)?;
        Ok(g)
    }

    /// Geodesic spray coefficients `Gⁱ(x, y)` from the Christoffel-type formula.
    pub fn spray_coefficients(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>, FinslerError> {
        self.check_vector(x, y)?;
        let g = fundamental(&self.data, x, y);
        check_spd(&g, self.tol.max_condition)?;
        spray(&self.data, x, y)
    }

    /// `∂Gⁱ/∂xᵏ` (outer index `k`) at `f64`, used by curvature.
    pub(crate) fn spray_dx(&self, x: &[f64], y: &[f64]) -> Result<Vec<Vec<f64>>, FinslerError> {
        let ys: Vec<Dual<f64>> = lift(y);
        (0..self.dim())
            .map(|k| Ok(spray(&self.data, &seed_axis(x, k), &ys)?.iter().map(|v| v.du).collect()))
            .collect()
    }

    /// `∂Gⁱ/∂yʲ` (outer index `j`).
    pub(crate) fn spray_dy(&self, x: &[f64], y: &[f64]) -> Result<Vec<Vec<f64>>, FinslerError> {
        let xs: Vec<Dual<f64>> = lift(x);
        (0..self.dim())
            .map(|j| Ok(spray(&self.data, &xs, &seed_axis(y, j))?.iter().map(|v| v.du).collect()))
            .collect()
    }
}
