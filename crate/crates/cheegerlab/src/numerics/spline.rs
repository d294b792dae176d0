//! Cubic spline interpolation with analytic derivatives and exact piecewise
//! integrals, for tabulated warping and bounding profiles.

use crate::error::{Error, Result};

/// C2 cubic spline through `(x_i, y_i)` with a clamped or natural left end
/// and a natural right end.
///
/// Tabulated warping functions clamp the left slope to 1 (the model-space
/// boundary condition w'(0) = 1); generic tabulated data uses natural ends.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>, left_slope: Option<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 3 {
            return Err(Error::InvalidProfile(format!(
                "spline needs >= 3 samples, got {}",
                x.len()
            )));
        }
        if !x.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidProfile(
                "spline abscissae must be strictly increasing".into(),
            ));
        }
        let n = x.len();
        // Tridiagonal system for the knot second derivatives, natural right end.
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut lower = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        match left_slope {
            Some(s) => {
                let h0 = x[1] - x[0];
                diag[0] = 2.0 * h0;
                upper[0] = h0;
                rhs[0] = 6.0 * ((y[1] - y[0]) / h0 - s);
            }
            None => {
                diag[0] = 1.0;
            }
        }
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            lower[i] = h0;
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        diag[n - 1] = 1.0;

        // Thomas algorithm.
        let mut c = vec![0.0; n];
        c[0] = upper[0] / diag[0];
        rhs[0] /= diag[0];
        for i in 1..n {
            let denom = diag[i] - lower[i] * c[i - 1];
            if i < n - 1 {
                c[i] = upper[i] / denom;
            }
            rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = rhs[i] - c[i] * m[i + 1];
        }
        Ok(CubicSpline { x, y, m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }

    fn segment(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.m[i] + b * self.m[i + 1]
    }

    /// Integral of one segment from `x[i]` to `t` (with `t` inside segment `i`).
    fn segment_integral(&self, i: usize, t: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (a2, b2) = (a * a, b * b);
        h * ((1.0 - a2) / 2.0 * self.y[i] + b2 / 2.0 * self.y[i + 1])
            + h * h * h / 6.0
                * (self.m[i] * (a2 / 2.0 - a2 * a2 / 4.0 - 0.25)
                    + self.m[i + 1] * (b2 * b2 / 4.0 - b2 / 2.0))
    }

    /// Exact integral of the spline from `x_min` to `t`.
    pub fn integral(&self, t: f64) -> f64 {
        let seg = self.segment(t);
        let mut acc = 0.0;
        for i in 0..seg {
            acc += self.segment_integral(i, self.x[i + 1]);
        }
        acc + self.segment_integral(seg, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_sinh_and_derivatives() {
        let n = 2000;
        let xs: Vec<f64> = (0..n).map(|i| 5.0 * i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| x.sinh()).collect();
        let sp = CubicSpline::new(xs, ys, Some(1.0)).unwrap();
        for &t in &[0.3, 1.0, 2.5, 4.9] {
            assert!((sp.value(t) - t.sinh()).abs() < 1e-9);
            assert!((sp.derivative(t) - t.cosh()).abs() < 1e-6);
            assert!((sp.second_derivative(t) - t.sinh()).abs() < 1e-3);
            assert!((sp.integral(t) - (t.cosh() - 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn integral_matches_dense_riemann_sum_of_the_interpolant() {
        let f = |x: f64| x * x * x - 2.0 * x;
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let sp = CubicSpline::new(xs, ys, Some(-2.0)).unwrap();
        for &t in &[0.55, 2.0, 4.85] {
            // Composite Simpson on the interpolant itself.
            let n = 20_000;
            let h = t / n as f64;
            let mut acc = sp.value(0.0) + sp.value(t);
            for i in 1..n {
                acc += sp.value(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc *= h / 3.0;
            assert!((sp.integral(t) - acc).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn rejects_non_increasing_abscissae() {
        assert!(CubicSpline::new(vec![0.0, 1.0, 1.0], vec![0.0, 1.0, 2.0], None).is_err());
    }
}
