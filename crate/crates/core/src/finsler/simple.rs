use crate::dual::Real;
use crate::error::FinslerError;
use crate::linalg::Mat;

use super::{Domain, RandersData};

/// The flat Euclidean norm on ℝⁿ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Euclidean {
    n: usize,
}

impl Euclidean {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl RandersData for Euclidean {
    fn dim(&self) -> usize {
        self.n
    }
    fn domain(&self) -> Domain {
        Domain::Whole
    }
    fn riemannian<T: Real>(&self, _x: &[T]) -> Mat<T> {
        Mat::identity(self.n)
    }
    fn one_form<T: Real>(&self, _x: &[T]) -> Vec<T> {
        vec![T::zero(); self.n]
    }
    fn potential<T: Real>(&self, _x: &[T]) -> Option<T> {
        Some(T::zero())
    }
}

/// A Minkowski–Randers norm with constant coefficients.
///
/// The Randers condition is not checked here; it is enforced on every
/// evaluation by [`super::RandersMetric`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantRanders {
    a: Mat<f64>,
    b: Vec<f64>,
}

impl ConstantRanders {
    pub fn new(a: Mat<f64>, b: Vec<f64>) -> Result<Self, FinslerError> {
        if a.dim() != b.len() {
            return Err(FinslerError::Dimension { expected: a.dim(), got: b.len() });
        }
        if a.dim() < 2 {
            return Err(FinslerError::InvalidParameter("dimension must be at least 2".into()));
        }
        for i in 0..a.dim() {
            for j in 0..i {
                if (a.at(i, j) - a.at(j, i)).abs() > 1e-14 * (a.at(i, j).abs() + a.at(j, i).abs()) {
                    return Err(FinslerError::InvalidParameter("Riemannian part must be symmetric".into()));
                }
            }
        }
        Ok(Self { a, b })
    }
}

impl RandersData for ConstantRanders {
    fn dim(&self) -> usize {
        self.b.len()
    }
    fn domain(&self) -> Domain {
        Domain::Whole
    }
    fn riemannian<T: Real>(&self, _x: &[T]) -> Mat<T> {
        Mat::from_fn(self.dim(), |i, j| T::cst(self.a.at(i, j)))
    }
    fn one_form<T: Real>(&self, _x: &[T]) -> Vec<T> {
        self.b.iter().map(|&v| T::cst(v)).collect()
    }
    fn potential<T: Real>(&self, x: &[T]) -> Option<T> {
        Some(self.b.iter().zip(x).fold(T::zero(), |acc, (&b, &xi)| acc + xi * b))
    }
}
