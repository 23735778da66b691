use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::HardyError;
use crate::families::FamilyMember;
use crate::finsler::{gaussian, Density, RandersMetric};
use crate::riccati::{RiccatiPair, Tent};

pub const MIN_SAMPLES: usize = 10_000;
const BATCH: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloQuotient {
    pub quotient: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Per-piece running sums of the two integrands.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    count: usize,
    num: f64,
    den: f64,
    num2: f64,
    den2: f64,
    cross: f64,
}

impl Moments {
    fn push(&mut self, a: f64, b: f64) {
        self.count += 1;
        self.num += a;
        self.den += b;
        self.num2 += a * a;
        self.den2 += b * b;
        self.cross += a * b;
    }

    fn merge(mut self, o: Moments) -> Moments {
        self.count += o.count;
        self.num += o.num;
        self.den += o.den;
        self.num2 += o.num2;
        self.den2 += o.den2;
        self.cross += o.cross;
        self
    }

    /// Means and the (co)variances of the means.
    fn summary(&self) -> (f64, f64, f64, f64, f64) {
        let n = self.count as f64;
        let (ma, mb) = (self.num / n, self.den / n);
        let va = (self.num2 / n - ma * ma) / (n - 1.0);
        let vb = (self.den2 / n - mb * mb) / (n - 1.0);
        let cab = (self.cross / n - ma * mb) / (n - 1.0);
        (ma, mb, va, vb, cab)
    }
}

/// Estimates both n-dimensional integrals by sampling `x = r(s)·ω` with `ω`
/// uniform on the sphere and the profile radius `s` log-uniform between
/// consecutive knot images. `F*(Du)` and the density come from the generic
/// Randers evaluators; `Du = v_T′(ρ)·Dρ` with `Dρ` by dual numbers.
pub fn hardy_quotient_montecarlo<M, P>(member: &M, tent: &Tent<'_, P>, samples: usize, seed: u64) -> Result<MonteCarloQuotient, HardyError>
where
    M: FamilyMember,
    P: RiccatiPair,
{
    if samples < MIN_SAMPLES {
        return Err(HardyError::TooFewSamples { got: samples, min: MIN_SAMPLES });
    }
    let knots = tent.knots();
    if !(knots[3] < member.rho_coordinate_sup()) {
        return Err(HardyError::OutsideInterval { t: knots[3], right: member.rho_coordinate_sup() });
    }
    let pair = tent.limit().pair();
    let p = pair.order();
    let lambda = member.params().lambda;
    let n = member.params().n;
    let metric = RandersMetric::new(member.clone());
    let density = member.measure();
    let bounds: Vec<f64> = knots.iter().map(|&t| member.phi(t)).collect();

    let per_piece = samples.div_ceil(3);
    let batches = per_piece.div_ceil(BATCH);
    let pieces: Vec<Moments> = (0..3)
        .map(|piece| {
            let (s0, s1) = (bounds[piece], bounds[piece + 1]);
            let span = (s1 / s0).ln();
            (0..batches)
                .into_par_iter()
                .map(|b| -> Result<Moments, HardyError> {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream((piece * batches + b) as u64);
                    let count = BATCH.min(per_piece - b * BATCH);
                    let mut m = Moments::default();
                    for _ in 0..count {
                        let s = s0 * (span * rng.gen::<f64>()).exp();
                        let mut dir: Vec<f64> = (0..n).map(|_| gaussian(&mut rng)).collect();
                        let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                        let r = member.coordinate_radius(s);
                        dir.iter_mut().for_each(|v| *v *= r / len);
                        let x = dir;
                        let jac = r.powi(n as i32 - 1) * member.coordinate_radius_derivative(s) * s * span;

                        let t = member.distance(&x);
                        let u = tent.value(t)?;
                        let slope = tent.derivative(t)?.right;
                        let du: Vec<f64> = member.distance_gradient(&x).into_iter().map(|g| g * slope).collect();
                        let dual = if slope == 0.0 { 0.0 } else { metric.eval_f_dual(&x, &du)? };
                        let sigma = density.sigma(&x);
                        let w = pair.weight(t);
                        let a = w * dual.powf(p) * sigma * jac;
                        let bv = w * pair.hardy_weight(t) * u.abs().powf(p) * sigma * jac;
                        m.push(a, bv);
                    }
                    Ok(m)
                })
                .try_reduce(Moments::default, |a, b| Ok(a.merge(b)))
        })
        .collect::<Result<_, _>>()?;

    let (mut i, mut j, mut vi, mut vj, mut cij) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for m in &pieces {
        let (a, b, va, vb, c) = m.summary();
        i += a;
        j += b;
        vi += va;
        vj += vb;
        cij += c;
    }
    let lp = lambda.powf(p);
    let quotient = lp * i / j;
    let rel_var = vi / (i * i) + vj / (j * j) - 2.0 * cij / (i * j);
    Ok(MonteCarloQuotient { quotient, std_error: quotient * rel_var.max(0.0).sqrt(), samples: per_piece * 3, seed })
}
