//! Small dense square matrices over any [`Real`].

use crate::dual::Real;
use crate::error::FinslerError;

/// Row-major `n × n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self { n, data }
    }

    pub fn from_row_major(n: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data length");
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn mul_vec(&self, y: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).fold(T::zero(), |acc, j| acc + self.at(i, j) * y[j]))
            .collect()
    }

    /// `uᵀ M v`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> T {
        let mv = self.mul_vec(v);
        u.iter().zip(&mv).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn map_values(&self) -> Mat<f64> {
        Mat { n: self.n, data: self.data.iter().map(Real::value).collect() }
    }

    /// LU factorization with partial pivoting on the `f64` magnitudes.
    fn lu(&self) -> Result<(Vec<T>, Vec<usize>, f64), FinslerError> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].value().abs().total_cmp(&a[j * n + k].value().abs()))
                .unwrap_or(k);
            if a[p * n + k].value() == 0.0 {
                return Err(FinslerError::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                a[i * n + k] = f;
                for j in k + 1..n {
                    let u = a[k * n + j];
                    a[i * n + j] -= f * u;
                }
            }
        }
        Ok((a, perm, sign))
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, FinslerError> {
        let n = self.n;
        let (lu, perm, _) = self.lu()?;
        let mut x: Vec<T> = perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = lu[i * n + j];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = lu[i * n + j];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] = x[i] / lu[i * n + i];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self, FinslerError> {
        let n = self.n;
        let mut inv = Self::zeros(n);
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            let col = self.solve(&e)?;
            for i in 0..n {
                inv.set(i, j, col[i]);
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> T {
        match self.lu() {
            Ok((lu, _, sign)) => (0..self.n).fold(T::cst(sign), |acc, i| acc * lu[i * self.n + i]),
            Err(_) => T::zero(),
        }
    }
}

/// Spectral summary of a symmetric matrix.
#[derive(Clone, Copy, Debug)]
pub struct Spectrum {
    pub min: f64,
    pub max: f64,
}

impl Spectrum {
    pub fn condition(&self) -> f64 {
        self.max.abs() / self.min.abs()
    }
}

pub fn symmetric_spectrum(m: &Mat<f64>) -> Spectrum {
    let n = m.dim();
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (m.at(i, j) + m.at(j, i)));
    let eig = nalgebra::SymmetricEigen::new(dm).eigenvalues;
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Spectrum { min, max }
}

/// Accepts `m` only if it is positive definite with condition number at
/// most `max_condition`.
pub fn check_spd(m: &Mat<f64>, max_condition: f64) -> Result<Spectrum, FinslerError> {
    let s = symmetric_spectrum(m);
    if !(s.min > 0.0) {
        return Err(FinslerError::NotPositiveDefinite { min_eigenvalue: s.min });
    }
    if s.condition() > max_condition {
        return Err(FinslerError::IllConditioned { condition: s.condition() });
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_and_det_3x3() {
        let m = Mat::from_row_major(3, vec![2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        assert!((m.det() - 18.0).abs() < 1e-12);
        let x = m.solve(&[1.0, 2.0, 3.0]).unwrap();
        let back = m.mul_vec(&x);
        for (a, b) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let m = Mat::from_row_major(2, vec![0.0, 1.0, 1.0, 0.0]);
        assert_eq!(m.det(), -1.0);
        assert_eq!(m.inverse().unwrap(), m);
    }

    #[test]
    fn spd_guard() {
        let bad = Mat::from_row_major(2, vec![1.0, 0.0, 0.0, -1e-3]);
        assert!(matches!(check_spd(&bad, 1e12), Err(FinslerError::NotPositiveDefinite { .. })));
        let ill = Mat::from_row_major(2, vec![1.0, 0.0, 0.0, 1e-13]);
        assert!(matches!(check_spd(&ill, 1e12), Err(FinslerError::IllConditioned { .. })));
    }
}
