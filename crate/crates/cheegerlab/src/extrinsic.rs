//! Extrinsic growth profiles of sampled submanifolds and the Cheeger
//! estimate from the extrinsic-ball exhaustion.
//!
//! For each radius t the extrinsic ball D_t = {r <= t} is measured by
//! clipping the per-face linear interpolant of r: fully contained faces
//! contribute their exact area, crossed faces contribute the area of the
//! sub-polygon cut off by the level line (fanned into geodesic triangles in
//! the hyperbolic model) and the length of the level segment. Vertices with
//! r = t count as inside (closed sublevel), consistently for areas and
//! boundary lengths.

use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};
use crate::iso_comparison::{CheegerValue, IsoComparisonSpace};
use crate::mesh::SampledSubmanifold;
use crate::numerics::pairwise_sum;

/// Growth data along a radius grid, with model-space reference values.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthProfile {
    pub t_grid: Vec<f64>,
    /// Vol(D_t).
    pub vol_d: Vec<f64>,
    /// Vol(boundary of D_t): total level-polyline length.
    pub vol_bdry: Vec<f64>,
    /// d/dt Vol(D_t) by central differences on the grid.
    pub vol_d_prime: Vec<f64>,
    /// Volume growth quotient f(t) = Vol(D_t)/Vol(B^W_t).
    pub f: Vec<f64>,
    /// Deficit F(t) = Vol(D_t)'/Vol(D_t) - Vol(S^W_t)/Vol(B^W_t).
    pub deficit: Vec<f64>,
    /// Model reference Vol(S^W_t)/Vol(B^W_t).
    pub ref_sphere_ball: Vec<f64>,
    pub truncation_radius: f64,
    /// Mesh-aware tolerance 10 h_max / t_min for PASS/FAIL verdicts.
    pub eps_mesh: f64,
}

/// One face clipped against the sublevel set {r_PL <= t}.
/// Returns (area inside, level-segment length).
pub(crate) fn clip_face(
    ambient: &AmbientSpace,
    pts: [&[f64]; 3],
    rv: [f64; 3],
    t: f64,
    full_area: f64,
) -> (f64, f64) {
    let inside = [rv[0] <= t, rv[1] <= t, rv[2] <= t];
    let n_in = inside.iter().filter(|&&b| b).count();
    match n_in {
        3 => return (full_area, 0.0),
        0 => return (0.0, 0.0),
        _ => {}
    }

    let mut p1 = [0.0f64; 4];
    let mut p2 = [0.0f64; 4];
    let dim = pts[0].len();

    let cross = |a: usize, b: usize, out: &mut [f64]| {
        // Crossing point on the edge from inside vertex a to outside b.
        let mu = (t - rv[a]) / (rv[b] - rv[a]);
        ambient.geodesic_point(pts[a], pts[b], mu, &mut out[..dim]);
    };

    if n_in == 1 {
        let a = inside.iter().position(|&b| b).unwrap();
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        cross(a, b, &mut p1);
        cross(a, c, &mut p2);
        let area = ambient.face_area_unchecked(pts[a], &p1[..dim], &p2[..dim]);
        let seg = ambient.distance_unchecked(&p1[..dim], &p2[..dim]);
        (area, seg)
    } else {
        let c = inside.iter().position(|&b| !b).unwrap();
        let (a, b) = ((c + 1) % 3, (c + 2) % 3);
        cross(b, c, &mut p1); // on edge B-C
        cross(a, c, &mut p2); // on edge A-C
        // Quad [A, B, P_bc, P_ca], fanned from A.
        let area = ambient.face_area_unchecked(pts[a], pts[b], &p1[..dim])
            + ambient.face_area_unchecked(pts[a], &p1[..dim], &p2[..dim]);
        let seg = ambient.distance_unchecked(&p1[..dim], &p2[..dim]);
        (area, seg)
    }
}

/// Vol(D_t) and Vol(boundary D_t) for one radius; face order fixed, chunked
/// pairwise accumulation, so the result is independent of threading.
fn measure_sublevel(mesh: &SampledSubmanifold, t: f64) -> (f64, f64) {
    let dim = mesh.ambient().coord_dim();
    let mut area_chunks = Vec::new();
    let mut bdry_chunks = Vec::new();
    let n = mesh.faces.len();
    let chunk = crate::mesh::PAR_CHUNK;
    let mut start = 0;
    while start < n {
        let end = (start + chunk).min(n);
        let mut area = 0.0;
        let mut bdry = 0.0;
        for i in start..end {
            if mesh.face_r_min[i] > t {
                continue;
            }
            if mesh.face_r_max[i] <= t {
                area += mesh.face_area[i];
                continue;
            }
            let f = mesh.faces[i];
            let pts = [
                &mesh.coords[f[0] as usize * dim..(f[0] as usize + 1) * dim],
                &mesh.coords[f[1] as usize * dim..(f[1] as usize + 1) * dim],
                &mesh.coords[f[2] as usize * dim..(f[2] as usize + 1) * dim],
            ];
            let rv = [
                mesh.r[f[0] as usize],
                mesh.r[f[1] as usize],
                mesh.r[f[2] as usize],
            ];
            let (a, s) = clip_face(mesh.ambient(), pts, rv, t, mesh.face_area[i]);
            area += a;
            bdry += s;
        }
        area_chunks.push(area);
        bdry_chunks.push(bdry);
        start = end;
    }
    (pairwise_sum(&area_chunks), pairwise_sum(&bdry_chunks))
}

/// Computes the growth profile of `mesh` against the comparison space.
pub fn compute_profile(
    mesh: &SampledSubmanifold,
    space: &IsoComparisonSpace,
    t_grid: &[f64],
) -> Result<GrowthProfile> {
    if space.dimension() != 2 {
        return Err(Error::AmbientMismatch(format!(
            "sampled submanifolds are surfaces (m = 2), comparison space has m = {}",
            space.dimension()
        )));
    }
    if t_grid.len() < 2 || !t_grid.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::Spec("t grid must be strictly increasing with >= 2 points".into()));
    }
    let trunc = mesh.truncation_radius();
    for &t in t_grid {
        if !(t > 0.0 && t <= trunc) {
            return Err(Error::Domain { what: "profile radius beyond truncation", r: t, lo: 0.0, hi: trunc });
        }
        if t >= space.r_end() {
            return Err(Error::Domain {
                what: "profile radius beyond comparison domain",
                r: t,
                lo: 0.0,
                hi: space.r_end(),
            });
        }
    }

    // Parallel over radii; each radius scans faces in fixed order.
    let measured: Vec<(f64, f64)> =
        t_grid.par_iter().map(|&t| measure_sublevel(mesh, t)).collect();
    let vol_d: Vec<f64> = measured.iter().map(|m| m.0).collect();
    let vol_bdry: Vec<f64> = measured.iter().map(|m| m.1).collect();
    if let Some(k) = vol_d.iter().position(|&v| v <= 0.0) {
        return Err(Error::Domain {
            what: "empty extrinsic ball",
            r: t_grid[k],
            lo: 0.0,
            hi: trunc,
        });
    }

    // Three-point Lagrange derivative (second order on nonuniform grids,
    // exact for quadratic volume functions; centered at interior points).
    let n = t_grid.len();
    let mut vol_d_prime = vec![0.0; n];
    for k in 0..n {
        let i = k.clamp(1, n - 2);
        let (x0, x1, x2) = (t_grid[i - 1], t_grid[i], t_grid[i + 1]);
        let (v0, v1, v2) = (vol_d[i - 1], vol_d[i], vol_d[i + 1]);
        let x = t_grid[k];
        vol_d_prime[k] = v0 * (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2))
            + v1 * (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2))
            + v2 * (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
    }

    let mut f = Vec::with_capacity(n);
    let mut refq = Vec::with_capacity(n);
    let mut deficit = Vec::with_capacity(n);
    for k in 0..n {
        let t = t_grid[k];
        let q = space.quotient(t)?;
        let ball = space.ball_volume(t)?;
        refq.push(1.0 / q);
        f.push(vol_d[k] / ball);
        deficit.push(vol_d_prime[k] / vol_d[k] - 1.0 / q);
    }

    Ok(GrowthProfile {
        t_grid: t_grid.to_vec(),
        vol_d,
        vol_bdry,
        vol_d_prime,
        f,
        deficit,
        ref_sphere_ball: refq,
        truncation_radius: trunc,
        eps_mesh: mesh.eps_mesh(t_grid[0]),
    })
}

impl GrowthProfile {
    /// Per-radius isoperimetric margin Vol(bdry D_t)/Vol(D_t) - reference.
    pub fn margins(&self) -> Vec<f64> {
        (0..self.t_grid.len())
            .map(|k| self.vol_bdry[k] / self.vol_d[k] - self.ref_sphere_ball[k])
            .collect()
    }

    /// Worst violation of f-monotonicity (0 when perfectly non-decreasing).
    pub fn worst_monotonicity_violation(&self) -> f64 {
        self.f
            .windows(2)
            .map(|w| (w[0] - w[1]).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Worst negativity of the deficit F(t) (0 when nonnegative).
    pub fn worst_deficit_negativity(&self) -> f64 {
        self.deficit.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max)
    }

    /// CSV with the column layout used by the CLI.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,vol_D,vol_bdry,vol_D_prime,f,F,ref_sphere_ball,margin\n");
        for k in 0..self.t_grid.len() {
            let margin = self.vol_bdry[k] / self.vol_d[k] - self.ref_sphere_ball[k];
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                self.t_grid[k],
                self.vol_d[k],
                self.vol_bdry[k],
                self.vol_d_prime[k],
                self.f[k],
                self.deficit[k],
                self.ref_sphere_ball[k],
                margin
            ));
        }
        s
    }
}

/// Length-weighted mean of the per-face PL gradient norm along the level
/// line {r = t}; used by the co-area consistency check
/// vol_D' ~ Vol(bdry D_t) / mean ||grad r||.
pub fn level_mean_gradient(mesh: &SampledSubmanifold, t: f64) -> Option<f64> {
    let dim = mesh.ambient().coord_dim();
    let mut len = 0.0;
    let mut weighted = 0.0;
    for (i, f) in mesh.faces.iter().enumerate() {
        if !(mesh.face_r_min[i] <= t && t < mesh.face_r_max[i]) {
            continue;
        }
        let pts = [
            &mesh.coords[f[0] as usize * dim..(f[0] as usize + 1) * dim],
            &mesh.coords[f[1] as usize * dim..(f[1] as usize + 1) * dim],
            &mesh.coords[f[2] as usize * dim..(f[2] as usize + 1) * dim],
        ];
        let rv = [mesh.r[f[0] as usize], mesh.r[f[1] as usize], mesh.r[f[2] as usize]];
        let (_, seg) = clip_face(mesh.ambient(), pts, rv, t, mesh.face_area[i]);
        len += seg;
        weighted += seg * mesh.face_grad_pl[i];
    }
    if len > 0.0 {
        Some(weighted / len)
    } else {
        None
    }
}

/// Margin report for the isoperimetric inequality
/// Vol(bdry D_t)/Vol(D_t) >= Vol(S^W_t)/Vol(B^W_t).
#[derive(Debug, Clone, Serialize)]
pub struct MarginReport {
    pub min_margin: f64,
    pub argmin_t: f64,
    pub eps_mesh: f64,
    pub pass: bool,
}

pub fn verify_isoperimetric_inequality(profile: &GrowthProfile) -> MarginReport {
    let margins = profile.margins();
    let mut min_margin = f64::INFINITY;
    let mut argmin_t = profile.t_grid[0];
    for (k, &m) in margins.iter().enumerate() {
        if m < min_margin {
            min_margin = m;
            argmin_t = profile.t_grid[k];
        }
    }
    MarginReport {
        min_margin,
        argmin_t,
        eps_mesh: profile.eps_mesh,
        pass: min_margin >= -profile.eps_mesh,
    }
}

/// Absolute slack used in the sandwich verdict of the Cheeger report: the
/// two desk-scale corollary checks pin the exhaustion estimate to the model
/// value within this tolerance.
pub const SANDWICH_TOL: f64 = 0.02;

/// Cheeger estimate from the exhaustion by extrinsic balls, compared with
/// the model-space bound values.
#[derive(Debug, Clone, Serialize)]
pub struct CheegerReport {
    /// min over the grid of Vol(bdry D_t)/Vol(D_t): an upper estimate of
    /// the Cheeger constant of P.
    pub upper_estimate_from_exhaustion: f64,
    pub argmin_t: f64,
    pub model_upper_bound: Option<CheegerValue>,
    pub model_lower_bound: Option<CheegerValue>,
    /// True when model_lower - tol <= exhaustion estimate (the exhaustion
    /// only ever produces upper bounds on the constant).
    pub sandwich_verdict: bool,
    pub sandwich_tol: f64,
    pub warnings: Vec<String>,
}

pub fn cheeger_estimate(
    mesh: &SampledSubmanifold,
    space: &IsoComparisonSpace,
    t_grid: &[f64],
) -> Result<CheegerReport> {
    let profile = compute_profile(mesh, space, t_grid)?;
    cheeger_estimate_from_profile(&profile, space)
}

pub fn cheeger_estimate_from_profile(
    profile: &GrowthProfile,
    space: &IsoComparisonSpace,
) -> Result<CheegerReport> {
    let mut upper = f64::INFINITY;
    let mut argmin_t = profile.t_grid[0];
    for k in 0..profile.t_grid.len() {
        let ratio = profile.vol_bdry[k] / profile.vol_d[k];
        if ratio < upper {
            upper = ratio;
            argmin_t = profile.t_grid[k];
        }
    }
    let mut warnings = Vec::new();
    let r_max = (0.99 * space.r_end()).min(40.0);
    let model_upper = match space.cheeger_upper_value(r_max, 9) {
        Ok(v) => Some(v),
        Err(e) => {
            warnings.push(format!("model upper bound unavailable: {e}"));
            None
        }
    };
    let model_lower = match space.cheeger_lower_value(r_max, 9) {
        Ok(v) => Some(v),
        Err(e) => {
            warnings.push(format!("model lower bound unavailable: {e}"));
            None
        }
    };
    let sandwich_verdict = match &model_lower {
        Some(l) => l.value - SANDWICH_TOL <= upper,
        None => false,
    };
    Ok(CheegerReport {
        upper_estimate_from_exhaustion: upper,
        argmin_t,
        model_upper_bound: model_upper,
        model_lower_bound: model_lower,
        sandwich_verdict,
        sandwich_tol: SANDWICH_TOL,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_surface, SurfaceKind};
    use crate::iso_comparison::{construct_w, BoundingFunction};
    use crate::model_space::WarpingFunction;
    use crate::numerics::{linear_grid, log_grid};

    fn flat_space(r_end: f64) -> IsoComparisonSpace {
        construct_w(2, WarpingFunction::space_form(0.0), BoundingFunction::Zero, r_end).unwrap()
    }

    fn hyper_space(r_end: f64) -> IsoComparisonSpace {
        construct_w(2, WarpingFunction::space_form(-1.0), BoundingFunction::Zero, r_end).unwrap()
    }

    #[test]
    fn plane_through_pole_is_the_equality_case() {
        let mesh = generate_surface(SurfaceKind::EuclideanPlaneThroughPole, 8.0, 0.6).unwrap();
        let space = flat_space(20.0);
        let grid = linear_grid(1.0, 7.5, 30);
        let p = compute_profile(&mesh, &space, &grid).unwrap();
        for (k, &t) in p.t_grid.iter().enumerate() {
            assert!((p.f[k] - 1.0).abs() < 1e-3, "f({t}) = {}", p.f[k]);
            let ratio = p.vol_bdry[k] / p.vol_d[k];
            let exact = 2.0 / t;
            assert!(
                (ratio - exact).abs() < 1e-3 * exact,
                "ratio({t}) = {ratio} vs {exact}"
            );
        }
        // Margins hover at zero in the equality case.
        let rep = verify_isoperimetric_inequality(&p);
        assert!(rep.pass);
        assert!(rep.min_margin.abs() < 1e-3);
    }

    #[test]
    fn hyperbolic_plane_profile_matches_closed_forms() {
        let mesh =
            generate_surface(SurfaceKind::HyperbolicGeodesicPlane { b: -1.0 }, 6.0, 3.0).unwrap();
        let space = hyper_space(20.0);
        let grid = linear_grid(1.0, 5.8, 25);
        let p = compute_profile(&mesh, &space, &grid).unwrap();
        for (k, &t) in p.t_grid.iter().enumerate() {
            let vol_exact = 2.0 * std::f64::consts::PI * (t.cosh() - 1.0);
            assert!(
                (p.vol_d[k] - vol_exact).abs() < 2e-3 * vol_exact,
                "vol({t}) = {} vs {vol_exact}",
                p.vol_d[k]
            );
            let ratio = p.vol_bdry[k] / p.vol_d[k];
            let exact = t.sinh() / (t.cosh() - 1.0);
            assert!(
                (ratio - exact).abs() < 1e-2 * exact,
                "ratio({t}) = {ratio} vs {exact}"
            );
        }
        let rep = verify_isoperimetric_inequality(&p);
        assert!(rep.pass);
    }

    #[test]
    fn catenoid_growth_is_monotone_with_finite_supremum() {
        let mesh = generate_surface(SurfaceKind::Catenoid { neck: 1.0 }, 20.0, 0.75).unwrap();
        let space = flat_space(30.0);
        let grid = log_grid(1.3, 19.0, 40);
        let p = compute_profile(&mesh, &space, &grid).unwrap();
        assert!(p.worst_monotonicity_violation() < p.eps_mesh);
        assert!(p.worst_deficit_negativity() < p.eps_mesh);
        // Two planar ends: f approaches 2 from below.
        let last = *p.f.last().unwrap();
        assert!(last > 1.8 && last < 2.05, "f(t_max) = {last}");
        // Margins strictly positive in the mid range (catenoid is not a cone).
        let margins = p.margins();
        let mid = margins[margins.len() / 2];
        assert!(mid > 0.0, "mid-range margin {mid}");
    }

    #[test]
    fn cheeger_report_for_the_hyperbolic_plane() {
        let mesh =
            generate_surface(SurfaceKind::HyperbolicGeodesicPlane { b: -1.0 }, 6.0, 3.0).unwrap();
        let space = hyper_space(50.0);
        let grid = log_grid(0.5, 5.8, 40);
        let rep = cheeger_estimate(&mesh, &space, &grid).unwrap();
        // coth(t/2) decreases towards 1: the min sits at the largest radius.
        let expect = (5.8f64 / 2.0).tanh().recip();
        assert!(
            (rep.upper_estimate_from_exhaustion - expect).abs() < 0.02,
            "estimate {} vs {expect}",
            rep.upper_estimate_from_exhaustion
        );
        assert!(rep.sandwich_verdict);
        let mu = rep.model_upper_bound.unwrap();
        let ml = rep.model_lower_bound.unwrap();
        assert!((mu.value - 1.0).abs() < 1e-6 && (ml.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn coarea_consistency_of_volume_derivative() {
        // Where ||grad r|| > 0.9, the co-area formula gives
        // vol_D' = Vol(bdry D_t) / mean ||grad r||, up to differencing and
        // clipping noise (5%).
        let cases = [
            (generate_surface(SurfaceKind::EuclideanPlaneThroughPole, 8.0, 0.6).unwrap(), 1.0, 7.5),
            (generate_surface(SurfaceKind::Catenoid { neck: 1.0 }, 15.0, 0.6).unwrap(), 6.0, 14.0),
        ];
        let space = flat_space(30.0);
        for (mesh, lo, hi) in &cases {
            let grid = linear_grid(*lo, *hi, 30);
            let p = compute_profile(mesh, &space, &grid).unwrap();
            for (k, &t) in p.t_grid.iter().enumerate().skip(1).take(p.t_grid.len() - 2) {
                let g = level_mean_gradient(mesh, t).unwrap();
                if g <= 0.9 {
                    continue;
                }
                let coarea = p.vol_bdry[k] / g;
                assert!(
                    (p.vol_d_prime[k] - coarea).abs() <= 0.05 * coarea,
                    "t = {t}: vol_D' = {} vs co-area {coarea} (grad {g})",
                    p.vol_d_prime[k]
                );
            }
        }
    }

    #[test]
    fn grid_beyond_truncation_is_rejected() {
        let mesh = generate_surface(SurfaceKind::EuclideanPlaneThroughPole, 4.0, 0.5).unwrap();
        let space = flat_space(20.0);
        let bad = linear_grid(1.0, 10.0, 5);
        assert!(compute_profile(&mesh, &space, &bad).is_err());
    }

    #[test]
    fn empty_sublevel_is_an_error_not_a_zero() {
        let mesh = generate_surface(SurfaceKind::Catenoid { neck: 1.0 }, 8.0, 0.5).unwrap();
        let space = flat_space(20.0);
        // The catenoid has no points with r < neck.
        let bad = linear_grid(0.2, 7.0, 10);
        assert!(compute_profile(&mesh, &space, &bad).is_err());
    }

    #[test]
    fn csv_layout_is_stable() {
        let mesh = generate_surface(SurfaceKind::EuclideanPlaneThroughPole, 4.0, 0.5).unwrap();
        let space = flat_space(20.0);
        let p = compute_profile(&mesh, &space, &linear_grid(1.0, 3.5, 5)).unwrap();
        let csv = p.to_csv();
        assert!(csv.starts_with("t,vol_D,vol_bdry,vol_D_prime,f,F,ref_sphere_ball,margin\n"));
        assert_eq!(csv.lines().count(), 6);
    }
}
