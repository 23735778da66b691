use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::dual::Real;
use crate::error::HardyError;

use super::RiccatiPair;

/// Natural cubic spline through `(x_i, y_i)` with strictly increasing `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct NaturalSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the nodes.
    m: Vec<f64>,
}

impl NaturalSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, HardyError> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return Err(HardyError::Table(format!("spline needs at least 3 matching nodes, got {} and {}", n, y.len())));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(HardyError::Table("spline nodes must be finite and strictly increasing".into()));
        }
        // Thomas algorithm on the interior second derivatives.
        let mut m = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            diag[i] = 2.0 * (h0 + h1);
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            if i > 1 {
                let w = h0 / diag[i - 1];
                diag[i] -= w * h0;
                rhs[i] -= w * rhs[i - 1];
            }
        }
        for i in (1..n - 1).rev() {
            let upper = if i + 1 < n - 1 { (x[i + 1] - x[i]) * m[i + 1] } else { 0.0 };
            m[i] = (rhs[i] - upper) / diag[i];
        }
        Ok(Self { x, y, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Value at any differentiation depth; the cubic piece is chosen by the
    /// `f64` part; outside the nodes the end pieces are continued.
    pub fn eval<T: Real>(&self, t: T) -> T {
        let tv = t.value();
        let n = self.x.len();
        let i = match self.x.partition_point(|&xi| xi <= tv) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let a = (T::cst(x1) - t) / h;
        let b = (t - x0) / h;
        let cubic = |s: T| s * s * s - s;
        a * self.y[i] + b * self.y[i + 1] + (cubic(a) * self.m[i] + cubic(b) * self.m[i + 1]) * (h * h / 6.0)
    }
}

/// One CSV row `t,w,L,W,G`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabulatedRow {
    pub t: f64,
    pub w: f64,
    #[serde(rename = "L")]
    pub comparison: f64,
    #[serde(rename = "W")]
    pub hardy_weight: f64,
    #[serde(rename = "G")]
    pub solution: f64,
}

/// A pair given by samples, interpolated by natural cubic splines. `(Gw)′`
/// is the derivative of the interpolant.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedPair {
    p: f64,
    w: NaturalSpline,
    comparison: NaturalSpline,
    hardy_weight: NaturalSpline,
    solution: NaturalSpline,
}

impl TabulatedPair {
    pub fn new(p: f64, rows: &[TabulatedRow]) -> Result<Self, HardyError> {
        if !(p > 1.0) {
            return Err(HardyError::Pair(format!("order must exceed 1, got {p}")));
        }
        if let Some(r) = rows.iter().find(|r| !(r.t > 0.0 && r.w > 0.0 && r.hardy_weight > 0.0 && r.solution > 0.0)) {
            return Err(HardyError::Table(format!("t, w, W and G must be positive, row at t = {}", r.t)));
        }
        let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
        let col = |f: fn(&TabulatedRow) -> f64| NaturalSpline::new(t.clone(), rows.iter().map(f).collect());
        Ok(Self {
            p,
            w: col(|r| r.w)?,
            comparison: col(|r| r.comparison)?,
            hardy_weight: col(|r| r.hardy_weight)?,
            solution: col(|r| r.solution)?,
        })
    }

    pub fn from_csv<R: Read>(p: f64, reader: R) -> Result<Self, HardyError> {
        let rows = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader)
            .deserialize()
            .collect::<Result<Vec<TabulatedRow>, _>>()
            .map_err(|e| HardyError::Table(e.to_string()))?;
        Self::new(p, &rows)
    }
}

impl RiccatiPair for TabulatedPair {
    fn order(&self) -> f64 {
        self.p
    }
    fn interval(&self) -> (f64, f64) {
        self.w.domain()
    }
    fn weight<T: Real>(&self, t: T) -> T {
        self.w.eval(t)
    }
    fn comparison<T: Real>(&self, t: T) -> T {
        self.comparison.eval(t)
    }
    fn hardy_weight<T: Real>(&self, t: T) -> T {
        self.hardy_weight.eval(t)
    }
    fn solution<T: Real>(&self, t: T) -> T {
        self.solution.eval(t)
    }
}
