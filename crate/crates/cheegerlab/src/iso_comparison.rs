//! Isoperimetric comparison spaces, balance conditions and Cheeger bound
//! values.
//!
//! Given a dimension m, an intermediary warping w and a radial bounding
//! function h, the comparison warping W solves
//! `W'/W = eta_w - (m/(m-1)) h` with `W'(0) = 1`,
//! whose closed form is `W(r) = w(r) exp(-(m/(m-1)) int_0^r h)`. The integral
//! of h is evaluated exactly per bounding kind (zero, constant, eta-pair
//! difference, spline integral), and an independent Simpson/Hermite ODE route
//! is kept alongside for cross-checking.
//!
//! Two balance conditions on a radius grid decide which comparison theorem
//! applies:
//!
//! - balanced from above:  eta_w >= 0  and  eta_W' <= 0,
//! - balanced from below:  q_W (eta_w - h) >= 1/m.
//!
//! The two Cheeger-bound values are tail limits along geometric probe radii:
//! `lim Vol(S^W)/Vol(B^W) = lim 1/q_W` (upper) and `(m-1) lim eta_W` (lower).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model_space::{quotient_of, RadialProfile, WarpingFunction, R_MIN};
use crate::numerics::limits::{geometric_probes, tail_limit, LimitEstimate};
use crate::numerics::ode::OdeTable;
use crate::numerics::spline::CubicSpline;

/// Absolute slack for the balance inequalities.
pub const BALANCE_TOL: f64 = 1e-9;
/// Disagreement threshold between the finite-difference and analytic forms
/// of eta_W' before a warning is recorded.
pub const CROSS_CHECK_TOL: f64 = 1e-6;
/// Relative tolerance for tail-limit convergence.
pub const LIMIT_REL_TOL: f64 = 1e-6;

/// Radial bound h on the o-radial mean curvature of the submanifold.
#[derive(Debug, Clone)]
pub enum BoundingFunction {
    Zero,
    Constant(f64),
    /// h_{a,b}(r) = ((m-1)/m)(eta_{w_a}(r) - eta_{w_b}(r)) for a < b <= 0;
    /// the dimension enters at evaluation time.
    HabPair { a: f64, b: f64 },
    Tabulated(CubicSpline),
}

impl BoundingFunction {
    pub fn hab(a: f64, b: f64) -> Result<Self> {
        if !(a < b && b <= 0.0) {
            return Err(Error::InvalidBounding(format!(
                "h_(a,b) requires a < b <= 0, got a = {a}, b = {b}"
            )));
        }
        Ok(BoundingFunction::HabPair { a, b })
    }

    /// Parses two-column CSV with header `r,h`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim().eq_ignore_ascii_case("r,h") => {}
            other => {
                return Err(Error::Spec(format!(
                    "bounding CSV must start with header 'r,h', got {other:?}"
                )))
            }
        }
        let mut r = Vec::new();
        let mut h = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut it = line.split(',');
            match (it.next(), it.next()) {
                (Some(a), Some(b)) => {
                    r.push(a.trim().parse::<f64>().map_err(|_| {
                        Error::Spec(format!("bad radius on CSV line {}", i + 2))
                    })?);
                    h.push(b.trim().parse::<f64>().map_err(|_| {
                        Error::Spec(format!("bad value on CSV line {}", i + 2))
                    })?);
                }
                _ => return Err(Error::Spec(format!("CSV line {} needs two columns", i + 2))),
            }
        }
        if r.first() != Some(&0.0) {
            return Err(Error::Spec("bounding CSV must start at r = 0".into()));
        }
        Ok(BoundingFunction::Tabulated(CubicSpline::new(r, h, None)?))
    }

    /// h(r); the dimension is needed by the eta-pair kind.
    pub fn value(&self, m: usize, r: f64) -> f64 {
        match self {
            BoundingFunction::Zero => 0.0,
            BoundingFunction::Constant(c) => *c,
            BoundingFunction::HabPair { a, b } => {
                let f = (m as f64 - 1.0) / m as f64;
                f * eta_difference(*a, *b, r)
            }
            BoundingFunction::Tabulated(s) => s.value(r),
        }
    }

    /// h'(r).
    pub fn derivative(&self, m: usize, r: f64) -> f64 {
        match self {
            BoundingFunction::Zero | BoundingFunction::Constant(_) => 0.0,
            BoundingFunction::HabPair { a, b } => {
                // eta_c' = -c - eta_c^2, so the difference telescopes to
                // (b - a) - (eta_a - eta_b)(eta_a + eta_b).
                let f = (m as f64 - 1.0) / m as f64;
                let d = eta_difference(*a, *b, r);
                let sum = eta_space_form(*a, r) + eta_space_form(*b, r);
                f * ((b - a) - d * sum)
            }
            BoundingFunction::Tabulated(s) => s.derivative(r),
        }
    }

    /// Exact antiderivative H(r) = int_0^r h(s) ds.
    pub fn antiderivative(&self, m: usize, r: f64) -> f64 {
        match self {
            BoundingFunction::Zero => 0.0,
            BoundingFunction::Constant(c) => c * r,
            BoundingFunction::HabPair { a, b } => {
                // int (eta_a - eta_b) = ln(w_a/w_b), which vanishes at 0.
                let f = (m as f64 - 1.0) / m as f64;
                let wa = WarpingFunction::space_form(*a);
                let wb = WarpingFunction::space_form(*b);
                if r == 0.0 {
                    0.0
                } else {
                    f * (wa.log_value(r) - wb.log_value(r))
                }
            }
            BoundingFunction::Tabulated(s) => s.integral(r),
        }
    }

    pub fn domain_end(&self) -> f64 {
        match self {
            BoundingFunction::Tabulated(s) => s.x_max(),
            _ => f64::INFINITY,
        }
    }

    fn knots(&self) -> &[f64] {
        match self {
            BoundingFunction::Tabulated(s) => s.knots(),
            _ => &[],
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            BoundingFunction::Zero => "zero",
            BoundingFunction::Constant(_) => "constant",
            BoundingFunction::HabPair { .. } => "hab",
            BoundingFunction::Tabulated(_) => "tabulated",
        }
    }
}

/// eta of the space form w_c, stable for every c <= 0 and c > 0.
fn eta_space_form(c: f64, r: f64) -> f64 {
    WarpingFunction::space_form(c).mean_curvature(r)
}

/// eta_{w_a}(r) - eta_{w_b}(r) without the 1/r cancellation near the center:
/// the Laurent expansions share the 1/r pole, so a short even series takes
/// over below r = 1e-3.
fn eta_difference(a: f64, b: f64, r: f64) -> f64 {
    if r < 1e-3 {
        (b - a) * r / 3.0 + (b * b - a * a) * r.powi(3) / 45.0
            + 2.0 * (b * b * b - a * a * a) * r.powi(5) / 945.0
    } else {
        eta_space_form(a, r) - eta_space_form(b, r)
    }
}

/// How the primary evaluation path of W was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConstructionMethod {
    ClosedForm,
    OdeIntegrated,
}

/// The constructed warping W, with both evaluation routes.
#[derive(Debug, Clone)]
pub struct ConstructedWarping {
    base: WarpingFunction,
    h: BoundingFunction,
    m: usize,
    coeff: f64,
    r_end: f64,
    ode: OdeTable,
    knots: Vec<f64>,
}

impl ConstructedWarping {
    /// exp factor exponent -c H(r) via the closed form.
    fn log_factor(&self, r: f64) -> f64 {
        -self.coeff * self.h.antiderivative(self.m, r)
    }

    /// Closed-form value (the primary route). h = Zero multiplies by
    /// exp(0) = 1 exactly, so W reproduces w bit-for-bit.
    pub fn value_closed_form(&self, r: f64) -> f64 {
        if matches!(self.h, BoundingFunction::Zero) {
            return self.base.value(r);
        }
        self.base.value(r) * self.log_factor(r).exp()
    }

    /// ODE-route value: Simpson integration of (ln(W/w))' = -c h with cubic
    /// Hermite interpolation between nodes.
    pub fn value_ode(&self, r: f64) -> f64 {
        if matches!(self.h, BoundingFunction::Zero) {
            return self.base.value(r);
        }
        self.base.value(r) * self.ode.value(r).exp()
    }

    pub fn base(&self) -> &WarpingFunction {
        &self.base
    }
}

impl RadialProfile for ConstructedWarping {
    fn domain_end(&self) -> f64 {
        self.r_end
    }

    fn value(&self, r: f64) -> f64 {
        self.value_closed_form(r)
    }

    fn derivative(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 1.0;
        }
        self.value(r) * self.mean_curvature(r)
    }

    fn second_derivative(&self, r: f64) -> f64 {
        let eta = self.mean_curvature(r);
        let eta_prime = self.base.mean_curvature_derivative(r)
            - self.coeff * self.h.derivative(self.m, r);
        self.value(r) * (eta * eta + eta_prime)
    }

    fn log_value(&self, r: f64) -> f64 {
        if matches!(self.h, BoundingFunction::Zero) {
            return self.base.log_value(r);
        }
        self.base.log_value(r) + self.log_factor(r)
    }

    fn mean_curvature(&self, r: f64) -> f64 {
        self.base.mean_curvature(r) - self.coeff * self.h.value(self.m, r)
    }

    fn quadrature_knots(&self) -> &[f64] {
        &self.knots
    }
}

/// A witness radius where a balance inequality fails.
#[derive(Debug, Clone, Serialize)]
pub struct BalanceWitness {
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub condition: String,
}

/// Outcome of one balance side.
#[derive(Debug, Clone, Serialize)]
pub struct BalanceSideVerdict {
    pub holds: bool,
    pub witness: Option<BalanceWitness>,
    pub warnings: Vec<String>,
}

/// Combined verdict, as emitted in reports.
#[derive(Debug, Clone, Serialize)]
pub struct BalanceVerdict {
    pub balanced_above: bool,
    pub balanced_below: bool,
    pub witness_above: Option<BalanceWitness>,
    pub witness_below: Option<BalanceWitness>,
    pub warnings: Vec<String>,
}

/// A Cheeger bound value with its tail diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct CheegerValue {
    pub value: f64,
    pub diagnostics: LimitEstimate,
    /// Whether the theorem hypothesis (the relevant balance condition) held
    /// on the probe-range grid.
    pub hypothesis_satisfied: bool,
    pub warnings: Vec<String>,
}

/// Isoperimetric comparison space M^m_W built from (m, w, h) on [0, R].
#[derive(Debug, Clone)]
pub struct IsoComparisonSpace {
    m: usize,
    w: WarpingFunction,
    h: BoundingFunction,
    warping: ConstructedWarping,
    construction_method: ConstructionMethod,
    cross_check_max_rel_dev: f64,
    r_end: f64,
}

/// Builds the comparison space, storing both construction routes and their
/// worst relative deviation over an internal log grid.
pub fn construct_w(
    m: usize,
    w: WarpingFunction,
    h: BoundingFunction,
    r_end: f64,
) -> Result<IsoComparisonSpace> {
    if m < 2 {
        return Err(Error::InvalidProfile(format!("dimension m = {m} must be >= 2")));
    }
    if !(r_end > 0.0) || r_end > w.domain_end() {
        return Err(Error::Domain { what: "construct_W: R", r: r_end, lo: 0.0, hi: w.domain_end() });
    }
    if r_end > h.domain_end() {
        return Err(Error::InvalidBounding(format!(
            "bounding function only defined up to {}, requested R = {r_end}",
            h.domain_end()
        )));
    }
    let h0 = h.value(m, 0.0);
    if !h0.is_finite() {
        return Err(Error::InvalidBounding(format!("h(0) = {h0} must be finite")));
    }

    let coeff = m as f64 / (m as f64 - 1.0);
    let hc = h.clone();
    let mc = m;
    let ode = OdeTable::integrate(move |r| -coeff * hc.value(mc, r), r_end, 4096, h.knots());

    let mut knots: Vec<f64> = w.quadrature_knots().to_vec();
    knots.extend_from_slice(h.knots());
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let warping = ConstructedWarping {
        base: w.clone(),
        h: h.clone(),
        m,
        coeff,
        r_end,
        ode,
        knots,
    };

    // Cross-check the two routes on a log grid spanning the domain.
    let mut max_dev = 0.0f64;
    for &r in &crate::numerics::log_grid(r_end * 1e-6, r_end, 64) {
        let a = warping.value_closed_form(r);
        let b = warping.value_ode(r);
        let dev = (a - b).abs() / a.abs().max(f64::MIN_POSITIVE);
        max_dev = max_dev.max(dev);
    }

    Ok(IsoComparisonSpace {
        m,
        w,
        h,
        warping,
        construction_method: ConstructionMethod::ClosedForm,
        cross_check_max_rel_dev: max_dev,
        r_end,
    })
}

impl IsoComparisonSpace {
    pub fn dimension(&self) -> usize {
        self.m
    }

    pub fn intermediary(&self) -> &WarpingFunction {
        &self.w
    }

    pub fn bounding(&self) -> &BoundingFunction {
        &self.h
    }

    pub fn warping(&self) -> &ConstructedWarping {
        &self.warping
    }

    pub fn construction_method(&self) -> ConstructionMethod {
        self.construction_method
    }

    pub fn cross_check_max_rel_dev(&self) -> f64 {
        self.cross_check_max_rel_dev
    }

    pub fn r_end(&self) -> f64 {
        self.r_end
    }

    /// eta_W(r) = eta_w(r) - (m/(m-1)) h(r), exact through the defining ODE.
    pub fn eta_w_cap(&self, r: f64) -> f64 {
        self.warping.mean_curvature(r)
    }

    /// q_W(r): isoperimetric quotient of the constructed model.
    pub fn quotient(&self, r: f64) -> Result<f64> {
        quotient_of(self.m, &self.warping, r)
    }

    pub fn sphere_volume(&self, r: f64) -> Result<f64> {
        crate::model_space::sphere_volume_of(self.m, &self.warping, r)
    }

    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        crate::model_space::ball_volume_of(self.m, &self.warping, r)
    }

    /// Central-difference eta_W'(r); the step shrinks near domain edges.
    fn eta_w_cap_prime_fd(&self, r: f64) -> f64 {
        let mut d = (1e-6 * r).max(1e-8);
        d = d.min(0.5 * (self.r_end - r)).min(0.5 * r);
        if d <= 0.0 {
            d = f64::EPSILON * r;
        }
        (self.eta_w_cap(r + d) - self.eta_w_cap(r - d)) / (2.0 * d)
    }

    fn check_grid(&self, grid: &[f64]) -> Result<()> {
        if grid.len() < 100 {
            return Err(Error::Spec(format!(
                "balance grid needs at least 100 points, got {}",
                grid.len()
            )));
        }
        for &r in grid {
            if !(r >= R_MIN && r < self.r_end) {
                return Err(Error::Domain { what: "balance grid", r, lo: R_MIN, hi: self.r_end });
            }
        }
        Ok(())
    }

    /// Balanced from above w.r.t. the constructing intermediary:
    /// eta_w >= 0 and eta_W' <= 0 on the grid.
    pub fn check_balanced_above(&self, grid: &[f64]) -> Result<BalanceSideVerdict> {
        self.check_balanced_above_wrt(&self.w, grid)
    }

    /// Same, against an explicit intermediary (mixed pairings as in the
    /// constellation examples).
    pub fn check_balanced_above_wrt(
        &self,
        wrt: &WarpingFunction,
        grid: &[f64],
    ) -> Result<BalanceSideVerdict> {
        self.check_grid(grid)?;
        let mut worst: Option<BalanceWitness> = None;
        let mut warnings = Vec::new();
        let mut cross_worst: Option<(f64, f64)> = None;
        let mf = self.m as f64;

        for &r in grid {
            let eta_w = wrt.mean_curvature(r);
            if eta_w < -BALANCE_TOL {
                let wit = BalanceWitness {
                    r,
                    lhs: eta_w,
                    rhs: 0.0,
                    condition: "eta_w(r) >= 0".into(),
                };
                if worst.as_ref().map_or(true, |w| wit.lhs < w.lhs) {
                    worst = Some(wit);
                }
            }
            let d_fd = self.eta_w_cap_prime_fd(r);
            if d_fd > BALANCE_TOL {
                let wit = BalanceWitness {
                    r,
                    lhs: d_fd,
                    rhs: 0.0,
                    condition: "eta_W'(r) <= 0".into(),
                };
                let better = match &worst {
                    Some(w) if w.condition == wit.condition => wit.lhs > w.lhs,
                    Some(_) => false,
                    None => true,
                };
                if better {
                    worst = Some(wit);
                }
            }
            // Equivalent form: -(m-1)(eta_w^2 + K_w) <= m h' iff eta_W' <= 0,
            // with eta_w/K_w of the constructing intermediary.
            let eta_c = self.w.mean_curvature(r);
            let k_c = self.w.radial_curvature(r);
            let d_analytic = (-k_c - eta_c * eta_c)
                - (mf / (mf - 1.0)) * self.h.derivative(self.m, r);
            let dev = (d_fd - d_analytic).abs();
            if dev > CROSS_CHECK_TOL * d_fd.abs().max(1.0)
                && cross_worst.map_or(true, |(_, d)| dev > d)
            {
                cross_worst = Some((r, dev));
            }
        }
        if let Some((r, dev)) = cross_worst {
            warnings.push(format!(
                "eta_W' forms disagree by {dev:.3e} at r = {r:.6} (finite-difference vs curvature identity)"
            ));
        }
        Ok(BalanceSideVerdict { holds: worst.is_none(), witness: worst, warnings })
    }

    /// Balanced from below: q_W (eta_w - h) >= 1/m on the grid.
    pub fn check_balanced_below(&self, grid: &[f64]) -> Result<BalanceSideVerdict> {
        self.check_balanced_below_wrt(&self.w, grid)
    }

    pub fn check_balanced_below_wrt(
        &self,
        wrt: &WarpingFunction,
        grid: &[f64],
    ) -> Result<BalanceSideVerdict> {
        self.check_grid(grid)?;
        let rhs = 1.0 / self.m as f64;
        let mut worst: Option<BalanceWitness> = None;
        for &r in grid {
            let q = self.quotient(r)?;
            let lhs = q * (wrt.mean_curvature(r) - self.h.value(self.m, r));
            if lhs < rhs - BALANCE_TOL {
                let wit = BalanceWitness {
                    r,
                    lhs,
                    rhs,
                    condition: "q_W(r) (eta_w(r) - h(r)) >= 1/m".into(),
                };
                if worst.as_ref().map_or(true, |w| wit.lhs < w.lhs) {
                    worst = Some(wit);
                }
            }
        }
        Ok(BalanceSideVerdict { holds: worst.is_none(), witness: worst, warnings: vec![] })
    }

    /// Both sides at once, in report form.
    pub fn balance_verdict(&self, grid: &[f64]) -> Result<BalanceVerdict> {
        self.balance_verdict_wrt(&self.w, grid)
    }

    pub fn balance_verdict_wrt(
        &self,
        wrt: &WarpingFunction,
        grid: &[f64],
    ) -> Result<BalanceVerdict> {
        let above = self.check_balanced_above_wrt(wrt, grid)?;
        let below = self.check_balanced_below_wrt(wrt, grid)?;
        let mut warnings = above.warnings;
        warnings.extend(below.warnings);
        Ok(BalanceVerdict {
            balanced_above: above.holds,
            balanced_below: below.holds,
            witness_above: above.witness,
            witness_below: below.witness,
            warnings,
        })
    }

    fn require_unbounded(&self, r_max: f64, what: &'static str) -> Result<()> {
        if let Some(b) = self.w.is_space_form() {
            if b > 0.0 {
                return Err(Error::InvalidProfile(
                    "Cheeger bounds need a pole: positive-curvature intermediaries are rejected"
                        .into(),
                ));
            }
        }
        if !(r_max > 0.0 && r_max <= self.r_end) {
            return Err(Error::Domain { what, r: r_max, lo: 0.0, hi: self.r_end });
        }
        Ok(())
    }

    fn hypothesis_grid(&self, r_max: f64) -> Vec<f64> {
        crate::numerics::log_grid(1e-3_f64.min(r_max * 1e-3), r_max * 0.999, 120)
    }

    /// Upper Cheeger value: lim_{t->inf} Vol(S^W_t)/Vol(B^W_t) estimated by
    /// tail extrapolation of 1/q_W along geometric probes up to `r_max`.
    pub fn cheeger_upper_value(&self, r_max: f64, probe_count: usize) -> Result<CheegerValue> {
        self.require_unbounded(r_max, "cheeger_upper_value")?;
        let mut warnings = Vec::new();
        let below = self.check_balanced_below(&self.hypothesis_grid(r_max))?;
        if !below.holds {
            warnings.push(
                "space is not balanced from below on the probe range: the upper-bound theorem hypothesis fails"
                    .to_string(),
            );
        }
        let probes = geometric_probes(r_max, probe_count.max(5));
        let mut values = Vec::with_capacity(probes.len());
        for &r in &probes {
            let q = self.quotient(r)?;
            values.push(1.0 / q);
        }
        let est = tail_limit(&probes, &values, LIMIT_REL_TOL);
        if !est.converged {
            return Err(Error::NonConvergentTail {
                what: format!("Vol(S^W)/Vol(B^W) tail up to r_max = {r_max}"),
                est_error: est.est_error,
            });
        }
        Ok(CheegerValue {
            value: est.extrapolated,
            diagnostics: est,
            hypothesis_satisfied: below.holds,
            warnings,
        })
    }

    /// Lower Cheeger value: (m-1) lim_{r->inf} eta_W(r).
    pub fn cheeger_lower_value(&self, r_max: f64, probe_count: usize) -> Result<CheegerValue> {
        self.require_unbounded(r_max, "cheeger_lower_value")?;
        let mut warnings = Vec::new();
        let above = self.check_balanced_above(&self.hypothesis_grid(r_max))?;
        if !above.holds {
            warnings.push(
                "space is not balanced from above on the probe range: the lower-bound theorem hypothesis fails"
                    .to_string(),
            );
        }
        let probes = geometric_probes(r_max, probe_count.max(5));
        let values: Vec<f64> = probes.iter().map(|&r| self.eta_w_cap(r)).collect();
        // Re-verify eta_W non-increasing along the probes.
        if let Some(w) = values.windows(2).zip(probes.windows(2)).find(|(v, _)| v[1] > v[0] + BALANCE_TOL)
        {
            warnings.push(format!(
                "eta_W increases along the probe grid at r = {:.6} (eqBalB re-check failed)",
                w.1[1]
            ));
        }
        let est = tail_limit(&probes, &values, LIMIT_REL_TOL);
        if !est.converged {
            return Err(Error::NonConvergentTail {
                what: format!("eta_W tail up to r_max = {r_max}"),
                est_error: est.est_error,
            });
        }
        let value = (self.m as f64 - 1.0) * est.extrapolated;
        if value < 0.0 {
            warnings.push(format!(
                "lower bound {value:.6} is negative and therefore vacuous (Cheeger constants are nonnegative)"
            ));
        }
        Ok(CheegerValue {
            value,
            diagnostics: est,
            hypothesis_satisfied: above.holds,
            warnings,
        })
    }
}

/// JSON constellation specification:
/// `{ "m": int, "ambient": {"b": real} | {"w_csv": path} | {"profile": name},
///    "h": {"kind": "zero"|"constant"|"hab"|"csv", ...}, "R": real }`.
#[derive(Debug, Clone, serde::Deserialize)]
pub struct ConstellationSpec {
    pub m: usize,
    pub ambient: WarpingSpec,
    pub h: BoundingSpec,
    #[serde(rename = "R")]
    pub r_end: f64,
    /// Optional intermediary override for the balance checks (mixed
    /// pairings); defaults to the constructing warping.
    #[serde(default)]
    pub balance_wrt: Option<WarpingSpec>,
}

#[derive(Debug, Clone, serde::Deserialize)]
pub struct WarpingSpec {
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub w_csv: Option<String>,
    #[serde(default)]
    pub profile: Option<String>,
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BoundingSpec {
    Zero,
    Constant { value: f64 },
    Hab { a: f64, b: f64 },
    Csv { path: String },
}

impl WarpingSpec {
    pub fn build(&self, base_dir: &std::path::Path) -> Result<WarpingFunction> {
        match (self.b, &self.w_csv, &self.profile) {
            (Some(b), None, None) => Ok(WarpingFunction::space_form(b)),
            (None, Some(path), None) => {
                let text = std::fs::read_to_string(base_dir.join(path))?;
                WarpingFunction::from_csv(&text)
            }
            (None, None, Some(name)) => {
                Ok(WarpingFunction::Analytic(crate::model_space::AnalyticProfile::parse(name)?))
            }
            _ => Err(Error::Spec(
                "ambient spec needs exactly one of 'b', 'w_csv', 'profile'".into(),
            )),
        }
    }
}

impl BoundingSpec {
    pub fn build(&self, base_dir: &std::path::Path) -> Result<BoundingFunction> {
        match self {
            BoundingSpec::Zero => Ok(BoundingFunction::Zero),
            BoundingSpec::Constant { value } => Ok(BoundingFunction::Constant(*value)),
            BoundingSpec::Hab { a, b } => BoundingFunction::hab(*a, *b),
            BoundingSpec::Csv { path } => {
                let text = std::fs::read_to_string(base_dir.join(path))?;
                BoundingFunction::from_csv(&text)
            }
        }
    }
}

/// A comparison constellation: ambient curvature bound, submanifold
/// dimension, bounding function and the constructed comparison space.
#[derive(Debug, Clone)]
pub struct ComparisonConstellation {
    m: usize,
    ambient_curvature: Option<f64>,
    space: IsoComparisonSpace,
    balance_wrt: Option<WarpingFunction>,
}

impl ComparisonConstellation {
    pub fn from_spec(spec: &ConstellationSpec, base_dir: &std::path::Path) -> Result<Self> {
        let w = spec.ambient.build(base_dir)?;
        if let Some(b) = w.is_space_form() {
            if b > 0.0 {
                return Err(Error::Spec(format!(
                    "constellations need an ambient curvature bound b <= 0 (a pole), got b = {b}"
                )));
            }
        }
        let h = spec.h.build(base_dir)?;
        let balance_wrt = match &spec.balance_wrt {
            Some(ws) => Some(ws.build(base_dir)?),
            None => None,
        };
        let space = construct_w(spec.m, w.clone(), h, spec.r_end)?;
        Ok(ComparisonConstellation {
            m: spec.m,
            ambient_curvature: w.is_space_form(),
            space,
            balance_wrt,
        })
    }

    pub fn parse_json(text: &str, base_dir: &std::path::Path) -> Result<Self> {
        let spec: ConstellationSpec =
            serde_json::from_str(text).map_err(|e| Error::Spec(format!("constellation JSON: {e}")))?;
        Self::from_spec(&spec, base_dir)
    }

    pub fn dimension(&self) -> usize {
        self.m
    }

    /// Curvature of the ambient bound when the intermediary is a space form.
    pub fn ambient_curvature(&self) -> Option<f64> {
        self.ambient_curvature
    }

    pub fn space(&self) -> &IsoComparisonSpace {
        &self.space
    }

    pub fn balance_verdict(&self, grid: &[f64]) -> Result<BalanceVerdict> {
        match &self.balance_wrt {
            Some(w) => self.space.balance_verdict_wrt(w, grid),
            None => self.space.balance_verdict(grid),
        }
    }
}
