use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual::{dot, Real};
use crate::error::FinslerError;
use crate::linalg::symmetric_spectrum;

use super::{gaussian, randers_norm, RandersData, RandersMetric};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Lebesgue,
    BusemannHausdorff,
    Weighted,
}

/// A smooth positive density `σ(x)` with respect to Lebesgue measure.
pub trait Density: Send + Sync {
    fn sigma<T: Real>(&self, x: &[T]) -> T;
    fn kind(&self) -> DensityKind;
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Lebesgue;

impl Density for Lebesgue {
    fn sigma<T: Real>(&self, _x: &[T]) -> T {
        T::one()
    }
    fn kind(&self) -> DensityKind {
        DensityKind::Lebesgue
    }
}

/// Busemann–Hausdorff density of a Randers metric,
/// `(1 − ‖b‖²_a)^{(n+1)/2} √det a`.
#[derive(Clone, Debug, PartialEq)]
pub struct BusemannHausdorff<D>(pub D);

pub(crate) fn busemann_hausdorff<T: Real, D: RandersData>(d: &D, x: &[T]) -> T {
    let n = d.dim();
    let a = d.riemannian(x);
    let b = d.one_form(x);
    let bb = match a.solve(&b) {
        Ok(ab) => dot(&b, &ab),
        Err(_) => return T::cst(f64::NAN),
    };
    (T::one() - bb).powf((n + 1) as f64 / 2.0) * a.det().sqrt()
}

impl<D: RandersData> Density for BusemannHausdorff<D> {
    fn sigma<T: Real>(&self, x: &[T]) -> T {
        busemann_hausdorff(&self.0, x)
    }
    fn kind(&self) -> DensityKind {
        DensityKind::BusemannHausdorff
    }
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl<D: RandersData> RandersMetric<D> {
    /// Closed-form Busemann–Hausdorff density at `x`.
    pub fn bh_density(&self, x: &[f64]) -> Result<f64, FinslerError> {
        self.check_point(x)?;
        Ok(busemann_hausdorff(&self.data, x))
    }

    /// `vol(𝔹ⁿ) / vol{y : F(x, y) < 1}` by rejection sampling in a Euclidean
    /// ball that contains the unit `F`-ball.
    pub fn bh_density_montecarlo(&self, x: &[f64], samples: usize, seed: u64) -> Result<VolumeEstimate, FinslerError> {
        self.check_point(x)?;
        let n = self.dim();
        let a = self.data.riemannian(x);
        let lambda_min = symmetric_spectrum(&a).min;
        let b_norm = self.one_form_norm(x)?;
        // F(y) ≥ (1 − ‖b‖)√λ_min |y|
        let radius = 1.0 / ((1.0 - b_norm) * lambda_min.sqrt());
        const BATCH: usize = 1 << 14;
        let batches = samples.div_ceil(BATCH);
        let hits: usize = (0..batches)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                let m = BATCH.min(samples - k * BATCH);
                (0..m)
                    .filter(|_| {
                        let y = uniform_in_ball(&mut rng, n, radius);
                        randers_norm(&self.data, x, &y) < 1.0
                    })
                    .count()
            })
            .sum();
        let frac = hits as f64 / samples as f64;
        if hits == 0 {
            return Err(FinslerError::InvalidParameter("no samples landed in the unit ball".into()));
        }
        let value = 1.0 / (frac * radius.powi(n as i32));
        let std_error = value * ((1.0 - frac) / (frac * samples as f64)).sqrt();
        Ok(VolumeEstimate { value, std_error, samples })
    }
}

pub(crate) fn uniform_in_ball<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
    let s = dot(&v, &v).sqrt();
    let r = radius * rng.gen::<f64>().powf(1.0 / n as f64);
    v.into_iter().map(|c| c * r / s).collect()
}
