//! Forward-mode dual numbers.
//!
//! [`Dual<T>`] is generic over any [`Real`], so derivatives nest:
//! `Dual<Dual<f64>>` carries second derivatives, and so on. Geometry code is
//! written once against `T: Real` and instantiated at whatever depth a
//! quantity needs.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Scalar arithmetic shared by `f64` and every level of [`Dual`].
pub trait Real:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn cst(v: f64) -> Self;
    /// The underlying `f64` value with all derivative parts dropped.
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn powf(self, e: f64) -> Self;
    fn powi(self, e: i32) -> Self;
    fn atanh(self) -> Self;
    fn tanh(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn abs(self) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn one() -> Self {
        Self::cst(1.0)
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn powf(self, e: f64) -> Self {
        f64::powf(self, e)
    }
    fn powi(self, e: i32) -> Self {
        f64::powi(self, e)
    }
    fn atanh(self) -> Self {
        f64::atanh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

/// `re + du·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub du: T,
}

impl<T: Real> Dual<T> {
    pub fn new(re: T, du: T) -> Self {
        Self { re, du }
    }

    pub fn constant(re: T) -> Self {
        Self { re, du: T::zero() }
    }

    /// Seeds `re` as the differentiation variable.
    pub fn variable(re: T) -> Self {
        Self { re, du: T::one() }
    }

    fn chain(self, f: T, df: T) -> Self {
        Self { re: f, du: df * self.du }
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.du + o.du)
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.du - o.du)
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re, self.du * o.re + self.re * o.du)
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.re / o.re;
        Self::new(q, (self.du - q * o.du) / o.re)
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.du)
    }
}

impl<T: Real> Add<f64> for Dual<T> {
    type Output = Self;
    fn add(self, o: f64) -> Self {
        Self::new(self.re + o, self.du)
    }
}

impl<T: Real> Sub<f64> for Dual<T> {
    type Output = Self;
    fn sub(self, o: f64) -> Self {
        Self::new(self.re - o, self.du)
    }
}

impl<T: Real> Mul<f64> for Dual<T> {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        Self::new(self.re * o, self.du * o)
    }
}

impl<T: Real> Div<f64> for Dual<T> {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        Self::new(self.re / o, self.du / o)
    }
}

impl<T: Real> AddAssign for Dual<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Dual<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> MulAssign for Dual<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Real> Real for Dual<T> {
    fn cst(v: f64) -> Self {
        Self::constant(T::cst(v))
    }

    fn value(&self) -> f64 {
        self.re.value()
    }

    /// At zero the derivative is taken as 0 when the inner derivative
    /// vanishes (e.g. `|x|` at the origin along a null seed) and `inf`
    /// otherwise.
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        if s.value() == 0.0 {
            let du = if self.du.value() == 0.0 {
                T::zero()
            } else {
                T::cst(f64::INFINITY)
            };
            return Self::new(s, du);
        }
        Self::new(s, self.du / (s * 2.0))
    }

    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }

    fn ln(self) -> Self {
        self.chain(self.re.ln(), self.re.recip())
    }

    fn powf(self, e: f64) -> Self {
        self.chain(self.re.powf(e), self.re.powf(e - 1.0) * e)
    }

    fn powi(self, e: i32) -> Self {
        if e == 0 {
            return Self::one();
        }
        self.chain(self.re.powi(e), self.re.powi(e - 1) * e as f64)
    }

    fn atanh(self) -> Self {
        let d = (T::one() - self.re * self.re).recip();
        self.chain(self.re.atanh(), d)
    }

    fn tanh(self) -> Self {
        let t = self.re.tanh();
        self.chain(t, T::one() - t * t)
    }

    fn sinh(self) -> Self {
        self.chain(self.re.sinh(), self.re.cosh())
    }

    fn cosh(self) -> Self {
        self.chain(self.re.cosh(), self.re.sinh())
    }

    fn abs(self) -> Self {
        if self.re.value() < 0.0 {
            -self
        } else {
            self
        }
    }
}

/// A scalar function of a point that can be evaluated at any [`Real`] depth.
pub trait ScalarField: Sync {
    fn eval<T: Real>(&self, x: &[T]) -> T;
}

/// `atanh(r)/r`, smooth through `r = 0`.
pub fn atanh_over<T: Real>(r: T) -> T {
    if r.value().abs() < 1e-3 {
        let r2 = r * r;
        T::one() + r2 * (T::cst(1.0 / 3.0) + r2 * (T::cst(0.2) + r2 * (T::cst(1.0 / 7.0) + r2 / 9.0)))
    } else {
        r.atanh() / r
    }
}

pub fn norm<T: Real>(x: &[T]) -> T {
    dot(x, x).sqrt()
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&u, &v)| acc + u * v)
}

pub fn lift<T: Real>(x: &[f64]) -> Vec<T> {
    x.iter().map(|&v| T::cst(v)).collect()
}

pub fn values<T: Real>(x: &[T]) -> Vec<f64> {
    x.iter().map(Real::value).collect()
}

/// Constant dual vector `x`, optionally seeded with direction `dir`.
pub fn seed<T: Real>(x: &[T], dir: Option<&[T]>) -> Vec<Dual<T>> {
    match dir {
        Some(d) => x.iter().zip(d).map(|(&v, &e)| Dual::new(v, e)).collect(),
        None => x.iter().map(|&v| Dual::constant(v)).collect(),
    }
}

/// Dual vector with a unit seed in coordinate `k`.
pub fn seed_axis<T: Real>(x: &[T], k: usize) -> Vec<Dual<T>> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| if i == k { Dual::variable(v) } else { Dual::constant(v) })
        .collect()
}

/// Gradient of a scalar field at `x`.
pub fn gradient<T: Real, S: ScalarField>(f: &S, x: &[T]) -> Vec<T> {
    (0..x.len()).map(|k| f.eval(&seed_axis(x, k)).du).collect()
}

/// Value, gradient and Hessian (row-major, symmetric) by second-order duals.
pub fn hessian<T: Real, S: ScalarField>(f: &S, x: &[T]) -> (T, Vec<T>, Vec<T>) {
    let n = x.len();
    let mut grad = vec![T::zero(); n];
    let mut hess = vec![T::zero(); n * n];
    let mut val = T::zero();
    for i in 0..n {
        for j in i..n {
            let p: Vec<Dual<Dual<T>>> = x
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let a = if k == i { T::one() } else { T::zero() };
                    let b = if k == j { T::one() } else { T::zero() };
                    Dual::new(Dual::new(v, b), Dual::new(a, T::zero()))
                })
                .collect();
            let r = f.eval(&p);
            val = r.re.re;
            if i == j {
                grad[i] = r.re.du;
            }
            hess[i * n + j] = r.du.du;
            hess[j * n + i] = r.du.du;
        }
    }
    (val, grad, hess)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Dual::variable(2.0);
        let y = x * x / (x + 1.0);
        assert!((y.re - 4.0 / 3.0).abs() < 1e-15);
        // d/dx x²/(x+1) = (x² + 2x)/(x+1)²
        assert!((y.du - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn nested_second_derivative() {
        let x: Dual<Dual<f64>> = Dual::new(Dual::variable(0.3), Dual::new(1.0, 0.0));
        let y = x.sinh() * x.exp();
        let d2 = y.du.du;
        let expect = 0.3f64.sinh() * 0.3f64.exp() * 2.0 + 2.0 * 0.3f64.cosh() * 0.3f64.exp();
        assert!((d2 - expect).abs() < 1e-13);
    }

    #[test]
    fn sqrt_at_zero_with_null_seed() {
        let z = Dual::new(0.0, 0.0).sqrt();
        assert_eq!(z.du, 0.0);
        assert!(Dual::new(0.0, 1.0).sqrt().du.is_infinite());
    }

    #[test]
    fn atanh_over_is_continuous_across_branch() {
        let r = 0.999e-3f64;
        assert!((atanh_over(r) - r.atanh() / r).abs() < 1e-15);
        let d = atanh_over(Dual::variable(0.5)).du;
        let fd = (atanh_over(0.5 + 1e-6) - atanh_over(0.5 - 1e-6)) / 2e-6;
        assert!((d - fd).abs() < 1e-8);
    }

    struct Rosen;
    impl ScalarField for Rosen {
        fn eval<T: Real>(&self, x: &[T]) -> T {
            let a = T::one() - x[0];
            let b = x[1] - x[0] * x[0];
            a * a + b * b * 100.0
        }
    }

    #[test]
    fn hessian_of_rosenbrock() {
        let (_, g, h) = hessian(&Rosen, &[1.0, 1.0]);
        assert!(g.iter().all(|v| v.abs() < 1e-12));
        assert_eq!(h, vec![802.0, -400.0, -400.0, 200.0]);
    }
}
