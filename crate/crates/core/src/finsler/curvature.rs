use crate::dual::{dot, lift, seed, seed_axis, Dual, Real};
use crate::error::FinslerError;
use crate::linalg::{check_spd, Mat};

use super::measure::Density;
use super::tensor::{fundamental, spray};
use super::{randers_norm, RandersData, RandersMetric};

/// `P(x, y) = (1/2F) ∂F/∂xᵏ yᵏ`, the directional x-derivative taken by
/// seeding `x` along `y`.
pub(crate) fn projective_factor<T: Real, D: RandersData>(d: &D, x: &[T], y: &[T]) -> T {
    let xs: Vec<Dual<T>> = seed(x, Some(y));
    let ys: Vec<Dual<T>> = seed(y, None);
    let f = randers_norm(d, &xs, &ys);
    f.du / (f.re * 2.0)
}

/// Dual vector seeded twice: the outer tangent is `outer`, the inner one is
/// coordinate `axis` (or nothing).
fn seed2(v: &[f64], outer: Option<&[f64]>, axis: Option<usize>) -> Vec<Dual<Dual<f64>>> {
    v.iter()
        .enumerate()
        .map(|(i, &c)| {
            let inner = if Some(i) == axis { 1.0 } else { 0.0 };
            let o = outer.map_or(0.0, |o| o[i]);
            Dual::new(Dual::new(c, inner), Dual::new(o, 0.0))
        })
        .collect()
}

impl<D: RandersData> RandersMetric<D> {
    pub fn projective_factor(&self, x: &[f64], y: &[f64]) -> Result<f64, FinslerError> {
        self.require_flat(x, y)?;
        Ok(projective_factor(&self.data, x, y))
    }

    /// `maxᵢ |∂²F/∂xᵏ∂yⁱ yᵏ − ∂F/∂xⁱ| / max(1, |∂F/∂xⁱ|)`; zero for
    /// projectively flat metrics. The scaling keeps the check meaningful where
    /// the metric blows up near a boundary.
    pub fn projective_flatness_residual(&self, x: &[f64], y: &[f64]) -> Result<f64, FinslerError> {
        self.check_vector(x, y)?;
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            let mixed = randers_norm(&self.data, &seed2(x, Some(y), None), &seed2(y, None, Some(i))).du.du;
            let ys: Vec<Dual<f64>> = lift(y);
            let dx = randers_norm(&self.data, &seed_axis(x, i), &ys).du;
            worst = worst.max((mixed - dx).abs() / dx.abs().max(1.0));
        }
        Ok(worst)
    }

    fn require_flat(&self, x: &[f64], y: &[f64]) -> Result<f64, FinslerError> {
        let residual = self.projective_flatness_residual(x, y)?;
        if residual > self.tol.flatness {
            return Err(FinslerError::NotProjectivelyFlat { residual });
        }
        Ok(residual)
    }

    /// Flag curvature of a projectively flat metric, `K = (P² − ∂P/∂xⁱ yⁱ)/F²`.
    pub fn flag_curvature_projective(&self, x: &[f64], y: &[f64]) -> Result<f64, FinslerError> {
        self.require_flat(x, y)?;
        let xs: Vec<Dual<f64>> = seed(x, Some(y));
        let ys: Vec<Dual<f64>> = lift(y);
        let p = projective_factor(&self.data, &xs, &ys);
        let f = randers_norm(&self.data, x, y);
        Ok((p.re * p.re - p.du) / (f * f))
    }

    /// Riemann curvature `Rⁱₖ` (row `i`, column `k`) of the spray:
    /// `2∂ₖGⁱ − yʲ∂²Gⁱ/∂xʲ∂yᵏ + 2Gʲ∂²Gⁱ/∂yʲ∂yᵏ − ∂Gⁱ/∂yʲ ∂Gʲ/∂yᵏ`.
    pub fn riemann_curvature(&self, x: &[f64], y: &[f64]) -> Result<Mat<f64>, FinslerError> {
        self.check_vector(x, y)?;
        check_spd(&fundamental(&self.data, x, y), self.tol.max_condition)?;
        let n = self.dim();
        let g0 = spray(&self.data, x, y)?;
        let dx = self.spray_dx(x, y)?;
        let dy = self.spray_dy(x, y)?;
        let mut r = Mat::zeros(n);
        for k in 0..n {
            // yʲ ∂/∂xʲ of ∂Gⁱ/∂yᵏ
            let mixed: Vec<f64> = spray(&self.data, &seed2(x, Some(y), None), &seed2(y, None, Some(k)))?
                .iter()
                .map(|v| v.du.du)
                .collect();
            // Gʲ ∂/∂yʲ of ∂Gⁱ/∂yᵏ
            let along: Vec<f64> = spray(&self.data, &seed2(x, None, None), &seed2(y, Some(&g0), Some(k)))?
                .iter()
                .map(|v| v.du.du)
                .collect();
            for i in 0..n {
                let quad: f64 = (0..n).map(|j| dy[j][i] * dy[k][j]).sum();
                r.set(i, k, 2.0 * dx[k][i] - mixed[i] + 2.0 * along[i] - quad);
            }
        }
        Ok(r)
    }

    /// Flag curvature `K(x, y, v) = g(R(v), v) / (g(y,y)g(v,v) − g(y,v)²)`.
    pub fn flag_curvature(&self, x: &[f64], y: &[f64], v: &[f64]) -> Result<f64, FinslerError> {
        self.check_dim(v)?;
        let r = self.riemann_curvature(x, y)?;
        let g = fundamental(&self.data, x, y);
        let gyy = g.bilinear(y, y);
        let gvv = g.bilinear(v, v);
        let gyv = g.bilinear(y, v);
        let denominator = gyy * gvv - gyv * gyv;
        if !(denominator > 1e-12 * gyy * gvv) {
            return Err(FinslerError::DegenerateFlag { denominator });
        }
        let rv = r.mul_vec(v);
        Ok(g.bilinear(&rv, v) / denominator)
    }

    /// `S(x, y) = ∂Gⁱ/∂yⁱ − yⁱ ∂ᵢσ/σ` with the projective spray `Gⁱ = P yⁱ`.
    pub fn s_curvature<M: Density>(&self, density: &M, x: &[f64], y: &[f64]) -> Result<f64, FinslerError> {
        self.require_flat(x, y)?;
        let sigma = density.sigma(x);
        if !(sigma > 0.0) {
            return Err(FinslerError::NonPositiveDensity { value: sigma });
        }
        let xs: Vec<Dual<f64>> = lift(x);
        let div: f64 = (0..self.dim())
            .map(|i| {
                let ys = seed_axis(y, i);
                (projective_factor(&self.data, &xs, &ys) * ys[i]).du
            })
            .sum();
        let dsigma = density.sigma(&seed(x, Some(y))).du;
        Ok(div - dsigma / sigma)
    }

    /// `S̄ = S / F`.
    pub fn reduced_s_curvature<M: Density>(&self, density: &M, x: &[f64], y: &[f64]) -> Result<f64, FinslerError> {
        let s = self.s_curvature(density, x, y)?;
        Ok(s / randers_norm(&self.data, x, y))
    }

    /// Largest relative deviation of the spray from `P y` over components.
    pub fn projective_deviation(&self, x: &[f64], y: &[f64]) -> Result<f64, FinslerError> {
        let g = self.spray_coefficients(x, y)?;
        let p = projective_factor(&self.data, x, y);
        let scale = dot(&g, &g).sqrt().max(f64::MIN_POSITIVE);
        Ok(g.iter().zip(y).map(|(gi, yi)| (gi - p * yi).abs()).fold(0.0, f64::max) / scale)
    }
}
