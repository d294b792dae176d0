//! One-dimensional calculus of warped-product model spaces M^m_w.
//!
//! A model space is the warped product [0, R) x_w S^{m-1} with w(0) = 0,
//! w'(0) = 1 and w > 0 on (0, R). Everything downstream (balance conditions,
//! Cheeger bounds, mesh comparisons) reduces to scalar functions of the
//! warping profile:
//!
//! - the distance-sphere mean curvature  eta_w = w'/w,
//! - the radial sectional curvature      K_w = -w''/w,
//! - sphere and ball volumes             omega * w^{m-1},  omega * int w^{m-1},
//! - the isoperimetric quotient          q_w = int_0^r w^{m-1} / w^{m-1}(r).
//!
//! Volume quotients are evaluated in log-scaled form
//! `q_w(r) = int_0^r exp((m-1)(ln w(t) - ln w(r))) dt`, which stays finite for
//! profiles that overflow f64 (e.g. exp(r^2) growth at r ~ 50) and keeps the
//! quadrature well conditioned for r deep in the asymptotic regime.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numerics::quadrature;
use crate::numerics::spline::CubicSpline;

/// Evaluations of eta/K are rejected below this radius: both have a 1/r
/// singularity at the center and limits are not extrapolated.
pub const R_MIN: f64 = 1e-8;

/// Scalar radial profile with two derivatives on (0, domain_end).
///
/// `log_value` must stay finite wherever the profile is positive, even when
/// `value` itself overflows; implementors override it with cancellation-free
/// forms where needed.
pub trait RadialProfile {
    fn domain_end(&self) -> f64;
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
    fn second_derivative(&self, r: f64) -> f64;

    fn log_value(&self, r: f64) -> f64 {
        self.value(r).ln()
    }

    /// Mean curvature of the distance sphere: eta(r) = w'(r)/w(r).
    fn mean_curvature(&self, r: f64) -> f64 {
        self.derivative(r) / self.value(r)
    }

    /// Radial sectional curvature: K(r) = -w''(r)/w(r).
    fn radial_curvature(&self, r: f64) -> f64 {
        -self.second_derivative(r) / self.value(r)
    }

    /// eta'(r) through the identity eta' = -K - eta^2.
    fn mean_curvature_derivative(&self, r: f64) -> f64 {
        -self.radial_curvature(r) - self.mean_curvature(r).powi(2)
    }

    /// Interior breakpoints where smoothness degrades (tabulated knots);
    /// quadrature panels split here.
    fn quadrature_knots(&self) -> &[f64] {
        &[]
    }
}

/// Named closed-form profiles that are not space forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticProfile {
    /// w(r) = exp(r^2) + r - 1: superexponential growth, positive curvature
    /// of the quotient at infinity; the standard example of a profile that is
    /// balanced from below but not from above.
    ExpRSquared,
}

impl AnalyticProfile {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "exp-r2" => Ok(AnalyticProfile::ExpRSquared),
            other => Err(Error::Spec(format!("unknown analytic profile '{other}'"))),
        }
    }
}

/// Warping function w: [0, R) -> R+ with w(0) = 0, w'(0) = 1.
#[derive(Debug, Clone)]
pub enum WarpingFunction {
    /// Space-form profile for curvature b: sin(sr)/s, r, or sinh(sr)/s.
    SpaceForm { b: f64 },
    Analytic(AnalyticProfile),
    Tabulated(TabulatedProfile),
}

/// Spline-backed profile loaded from (r, w) samples.
#[derive(Debug, Clone)]
pub struct TabulatedProfile {
    spline: CubicSpline,
}

impl WarpingFunction {
    pub fn space_form(b: f64) -> Self {
        WarpingFunction::SpaceForm { b }
    }

    /// Builds a tabulated profile from samples with strictly increasing radii
    /// starting at 0. The center conditions w(0) = 0, w'(0) = 1 are checked
    /// against the data (natural-spline slope at 0) within 1e-6, and w must
    /// be positive at every interior sample.
    pub fn tabulated(r: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if r.is_empty() || r[0] != 0.0 {
            return Err(Error::InvalidProfile("tabulated samples must start at r = 0".into()));
        }
        if w[0].abs() > 1e-6 {
            return Err(Error::InvalidProfile(format!("w(0) = {} violates w(0) = 0", w[0])));
        }
        if let Some(bad) = r.iter().zip(&w).skip(1).find(|(_, &wi)| wi <= 0.0) {
            return Err(Error::InvalidProfile(format!("w({}) = {} is not positive", bad.0, bad.1)));
        }
        let probe = CubicSpline::new(r.clone(), w.clone(), None)?;
        let slope0 = probe.derivative(0.0);
        if (slope0 - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidProfile(format!(
                "w'(0) = {slope0} violates w'(0) = 1 within 1e-6"
            )));
        }
        let spline = CubicSpline::new(r, w, Some(1.0))?;
        Ok(WarpingFunction::Tabulated(TabulatedProfile { spline }))
    }

    /// Parses the two-column CSV format with header line `r,w`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim().eq_ignore_ascii_case("r,w") => {}
            other => {
                return Err(Error::Spec(format!(
                    "warping CSV must start with header 'r,w', got {other:?}"
                )))
            }
        }
        let mut r = Vec::new();
        let mut w = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut it = line.split(',');
            let (a, b) = (it.next(), it.next());
            match (a, b) {
                (Some(a), Some(b)) => {
                    let rv: f64 = a.trim().parse().map_err(|_| {
                        Error::Spec(format!("bad radius on CSV line {}: '{a}'", i + 2))
                    })?;
                    let wv: f64 = b.trim().parse().map_err(|_| {
                        Error::Spec(format!("bad value on CSV line {}: '{b}'", i + 2))
                    })?;
                    r.push(rv);
                    w.push(wv);
                }
                _ => return Err(Error::Spec(format!("CSV line {} needs two columns", i + 2))),
            }
        }
        if !r.windows(2).all(|p| p[1] > p[0]) {
            return Err(Error::Spec("CSV radii must be strictly increasing".into()));
        }
        Self::tabulated(r, w)
    }

    pub fn is_space_form(&self) -> Option<f64> {
        match self {
            WarpingFunction::SpaceForm { b } => Some(*b),
            _ => None,
        }
    }
}

impl RadialProfile for WarpingFunction {
    fn domain_end(&self) -> f64 {
        match self {
            WarpingFunction::SpaceForm { b } if *b > 0.0 => std::f64::consts::PI / b.sqrt(),
            WarpingFunction::SpaceForm { .. } => f64::INFINITY,
            WarpingFunction::Analytic(_) => f64::INFINITY,
            WarpingFunction::Tabulated(t) => t.spline.x_max(),
        }
    }

    fn value(&self, r: f64) -> f64 {
        match self {
            WarpingFunction::SpaceForm { b } => {
                if *b > 0.0 {
                    let s = b.sqrt();
                    (s * r).sin() / s
                } else if *b == 0.0 {
                    r
                } else {
                    let s = (-b).sqrt();
                    (s * r).sinh() / s
                }
            }
            WarpingFunction::Analytic(AnalyticProfile::ExpRSquared) => (r * r).exp() + r - 1.0,
            WarpingFunction::Tabulated(t) => t.spline.value(r),
        }
    }

    fn derivative(&self, r: f64) -> f64 {
        match self {
            WarpingFunction::SpaceForm { b } => {
                if *b > 0.0 {
                    (b.sqrt() * r).cos()
                } else if *b == 0.0 {
                    1.0
                } else {
                    ((-b).sqrt() * r).cosh()
                }
            }
            WarpingFunction::Analytic(AnalyticProfile::ExpRSquared) => {
                2.0 * r * (r * r).exp() + 1.0
            }
            WarpingFunction::Tabulated(t) => t.spline.derivative(r),
        }
    }

    fn second_derivative(&self, r: f64) -> f64 {
        match self {
            // w'' = -b w for every space form.
            WarpingFunction::SpaceForm { b } => -b * self.value(r),
            WarpingFunction::Analytic(AnalyticProfile::ExpRSquared) => {
                (4.0 * r * r + 2.0) * (r * r).exp()
            }
            WarpingFunction::Tabulated(t) => t.spline.second_derivative(r),
        }
    }

    fn log_value(&self, r: f64) -> f64 {
        match self {
            WarpingFunction::SpaceForm { b } if *b < 0.0 => {
                let s = (-b).sqrt();
                let x = s * r;
                if x > 20.0 {
                    // ln(sinh(x)/s) = x - ln(2s) + ln(1 - e^{-2x})
                    x - (2.0 * s).ln() + (-(-2.0 * x).exp()).ln_1p()
                } else {
                    self.value(r).ln()
                }
            }
            WarpingFunction::Analytic(AnalyticProfile::ExpRSquared) => {
                r * r + ((r - 1.0) * (-r * r).exp()).ln_1p()
            }
            _ => self.value(r).ln(),
        }
    }

    fn mean_curvature(&self, r: f64) -> f64 {
        match self {
            WarpingFunction::SpaceForm { b } => {
                if *b > 0.0 {
                    let s = b.sqrt();
                    s / (s * r).tan()
                } else if *b == 0.0 {
                    1.0 / r
                } else {
                    let s = (-b).sqrt();
                    s / (s * r).tanh()
                }
            }
            WarpingFunction::Analytic(AnalyticProfile::ExpRSquared) => {
                let e = (-r * r).exp();
                (2.0 * r + e) / (1.0 + (r - 1.0) * e)
            }
            _ => self.derivative(r) / self.value(r),
        }
    }

    fn radial_curvature(&self, r: f64) -> f64 {
        match self {
            WarpingFunction::SpaceForm { b } => *b,
            WarpingFunction::Analytic(AnalyticProfile::ExpRSquared) => {
                let e = (-r * r).exp();
                -(4.0 * r * r + 2.0) / (1.0 + (r - 1.0) * e)
            }
            _ => -self.second_derivative(r) / self.value(r),
        }
    }

    fn quadrature_knots(&self) -> &[f64] {
        match self {
            WarpingFunction::Tabulated(t) => t.spline.knots(),
            _ => &[],
        }
    }
}

/// (m-1)-volume of the unit (m-1)-sphere: omega_{m-1} = 2 pi^{m/2} / Gamma(m/2).
pub fn unit_sphere_measure(m: usize) -> f64 {
    assert!(m >= 2);
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (0..=64).map(omega_exact).collect());
    if m <= 64 {
        cache[m]
    } else {
        omega_exact(m)
    }
}

fn omega_exact(m: usize) -> f64 {
    if m < 2 {
        return f64::NAN;
    }
    // Gamma(m/2) by the recursion Gamma(x+1) = x Gamma(x) from Gamma(1) or Gamma(1/2).
    let mut gamma;
    let mut x;
    if m % 2 == 0 {
        gamma = 1.0;
        x = 1.0;
    } else {
        gamma = std::f64::consts::PI.sqrt();
        x = 0.5;
    }
    while x < m as f64 / 2.0 - 0.25 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(m as f64 / 2.0) / gamma
}

fn check_radius(r: f64, lo: f64, hi: f64, what: &'static str) -> Result<()> {
    if !(r >= lo && r < hi) {
        return Err(Error::Domain { what, r, lo, hi });
    }
    Ok(())
}

/// Vol(S^w_r) = omega_{m-1} w(r)^{m-1} for any radial profile.
pub fn sphere_volume_of(m: usize, w: &impl RadialProfile, r: f64) -> Result<f64> {
    check_radius(r, 0.0, w.domain_end(), "sphere_volume")?;
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(unit_sphere_measure(m) * ((m as f64 - 1.0) * w.log_value(r)).exp())
}

/// Isoperimetric quotient q_w(r) = Vol(B^w_r)/Vol(S^w_r), evaluated in
/// log-scaled form so profiles far beyond f64 overflow stay computable.
pub fn quotient_of(m: usize, w: &impl RadialProfile, r: f64) -> Result<f64> {
    check_radius(r, 0.0, w.domain_end(), "isoperimetric_quotient")?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let lr = w.log_value(r);
    let p = m as f64 - 1.0;
    let q = quadrature::integrate(
        |t| {
            if t <= 0.0 {
                0.0
            } else {
                (p * (w.log_value(t) - lr)).exp()
            }
        },
        0.0,
        r,
        w.quadrature_knots(),
        1e-13 * r,
        1e-9,
    )?;
    Ok(q.value)
}

/// Vol(B^w_r) = omega_{m-1} int_0^r w^{m-1}(t) dt.
pub fn ball_volume_of(m: usize, w: &impl RadialProfile, r: f64) -> Result<f64> {
    Ok(sphere_volume_of(m, w, r)? * quotient_of(m, w, r)?)
}

/// Rotationally symmetric model space M^m_w.
#[derive(Debug, Clone)]
pub struct ModelSpace {
    m: usize,
    warping: WarpingFunction,
}

impl ModelSpace {
    pub fn new(m: usize, warping: WarpingFunction) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidProfile(format!("model dimension m = {m} must be >= 2")));
        }
        Ok(ModelSpace { m, warping })
    }

    pub fn dimension(&self) -> usize {
        self.m
    }

    pub fn warping(&self) -> &WarpingFunction {
        &self.warping
    }

    pub fn domain_end(&self) -> f64 {
        self.warping.domain_end()
    }

    /// w(r).
    pub fn eval_w(&self, r: f64) -> Result<f64> {
        check_radius(r, 0.0, self.domain_end(), "eval_w")?;
        Ok(self.warping.value(r))
    }

    /// eta_w(r) = w'(r)/w(r); singular at 0, rejected below R_MIN.
    pub fn eta_w(&self, r: f64) -> Result<f64> {
        check_radius(r, R_MIN, self.domain_end(), "eta_w")?;
        Ok(self.warping.mean_curvature(r))
    }

    /// K_w(r) = -w''(r)/w(r).
    pub fn curvature_k_w(&self, r: f64) -> Result<f64> {
        check_radius(r, R_MIN, self.domain_end(), "curvature_K_w")?;
        Ok(self.warping.radial_curvature(r))
    }

    pub fn sphere_volume(&self, r: f64) -> Result<f64> {
        sphere_volume_of(self.m, &self.warping, r)
    }

    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        ball_volume_of(self.m, &self.warping, r)
    }

    pub fn isoperimetric_quotient(&self, r: f64) -> Result<f64> {
        quotient_of(self.m, &self.warping, r)
    }
}
