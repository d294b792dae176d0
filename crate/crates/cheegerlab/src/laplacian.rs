//! Discrete Laplacian of the extrinsic distance and the comparison /
//! divergence checks built on it.
//!
//! The operator is the cotangent Laplacian with barycentric cell areas;
//! corner cotangents come from the side-length flattening of each face
//! (geodesic edge lengths in the hyperbolic model), cell areas from the
//! exact face areas.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iso_comparison::IsoComparisonSpace;
use crate::mesh::SampledSubmanifold;
use crate::numerics::pairwise_sum;

/// Assembled pointwise Laplacian of r with per-vertex cells.
#[derive(Debug, Clone)]
pub struct CotanOperator {
    /// Barycentric cell area per vertex.
    pub cell_area: Vec<f64>,
    /// Laplacian of r per vertex (only meaningful where `credible`).
    pub laplacian_r: Vec<f64>,
    /// Interior vertices whose one-ring stays clear of the mesh boundary.
    pub credible: Vec<bool>,
    /// Largest |r_j - r_i| over the one-ring: the radial extent of the cell,
    /// used to clip boundary-band cells against a sublevel set.
    pub radial_gap: Vec<f64>,
}

pub fn cotan_operator(mesh: &SampledSubmanifold) -> CotanOperator {
    let nv = mesh.n_vertices();
    let dim = mesh.ambient().coord_dim();

    // Per-face corner cotangents from the flattened side lengths.
    let cots: Vec<[f64; 3]> = mesh
        .faces
        .par_iter()
        .map(|f| {
            let pa = &mesh.coords[f[0] as usize * dim..(f[0] as usize + 1) * dim];
            let pb = &mesh.coords[f[1] as usize * dim..(f[1] as usize + 1) * dim];
            let pc = &mesh.coords[f[2] as usize * dim..(f[2] as usize + 1) * dim];
            let amb = mesh.ambient();
            let la = amb.distance_unchecked(pb, pc); // opposite corner 0
            let lb = amb.distance_unchecked(pc, pa);
            let lc = amb.distance_unchecked(pa, pb);
            let (a2, b2, c2) = (la * la, lb * lb, lc * lc);
            let p = 0.5 * (la + lb + lc);
            let t_flat = (p * (p - la) * (p - lb) * (p - lc)).max(0.0).sqrt();
            if t_flat == 0.0 {
                return [0.0; 3];
            }
            [
                (b2 + c2 - a2) / (4.0 * t_flat),
                (c2 + a2 - b2) / (4.0 * t_flat),
                (a2 + b2 - c2) / (4.0 * t_flat),
            ]
        })
        .collect();

    let (offsets, items) = mesh.vertex_face_adjacency();
    let boundary = mesh.boundary_vertices();

    let results: Vec<(f64, f64, bool, f64)> = (0..nv)
        .into_par_iter()
        .map(|v| {
            let faces = &items[offsets[v] as usize..offsets[v + 1] as usize];
            let mut cell = 0.0;
            let mut acc = 0.0;
            let mut gap = 0.0f64;
            let mut credible = !boundary[v];
            for &fi in faces {
                let f = mesh.faces[fi as usize];
                cell += mesh.face_area[fi as usize] / 3.0;
                let k = f.iter().position(|&x| x as usize == v).unwrap();
                let (j1, j2) = ((k + 1) % 3, (k + 2) % 3);
                let (v1, v2) = (f[j1] as usize, f[j2] as usize);
                if boundary[v1] || boundary[v2] {
                    credible = false;
                }
                let c = cots[fi as usize];
                let rv = mesh.r[v];
                gap = gap.max((mesh.r[v1] - rv).abs()).max((mesh.r[v2] - rv).abs());
                // cot at the corner opposite an edge weights that edge.
                acc += 0.5 * (c[j2] * (mesh.r[v1] - rv) + c[j1] * (mesh.r[v2] - rv));
            }
            let lap = if cell > 0.0 { acc / cell } else { 0.0 };
            (cell, lap, credible, gap)
        })
        .collect();

    let mut cell_area = Vec::with_capacity(nv);
    let mut laplacian_r = Vec::with_capacity(nv);
    let mut credible = Vec::with_capacity(nv);
    let mut radial_gap = Vec::with_capacity(nv);
    for (c, l, cr, g) in results {
        cell_area.push(c);
        laplacian_r.push(l);
        credible.push(cr);
        radial_gap.push(g);
    }
    CotanOperator { cell_area, laplacian_r, credible, radial_gap }
}

/// Verdict of the pointwise comparison Delta r >= (m-1) eta_W(r) - delta.
#[derive(Debug, Clone, Serialize)]
pub struct LaplacianReport {
    /// Vertices entering the comparison (interior, r > 2 h_max).
    pub tested: usize,
    pub excluded_boundary: usize,
    pub excluded_near_pole: usize,
    pub violations: usize,
    pub violation_fraction: f64,
    /// Of the near-pole vertices, how many violate (diagnostic: violations
    /// are expected to concentrate there).
    pub near_pole_violations: usize,
    pub median_rel_residual: f64,
    pub p95_rel_residual: f64,
    /// Per-vertex slack is h_max (1 + |bound|).
    pub slack_scale: f64,
    pub pass: bool,
}

/// Runs the discrete Laplacian comparison on all interior vertices.
pub fn discrete_laplacian_check(
    mesh: &SampledSubmanifold,
    space: &IsoComparisonSpace,
) -> Result<LaplacianReport> {
    if space.dimension() != 2 {
        return Err(Error::AmbientMismatch(format!(
            "mesh comparison needs m = 2, space has m = {}",
            space.dimension()
        )));
    }
    let op = cotan_operator(mesh);
    let h_max = mesh.h_max();
    let near_pole_cut = 2.0 * h_max;
    let mf = space.dimension() as f64;

    let mut tested = 0usize;
    let mut excluded_boundary = 0usize;
    let mut excluded_near_pole = 0usize;
    let mut violations = 0usize;
    let mut near_pole_violations = 0usize;
    let mut residuals: Vec<f64> = Vec::new();

    for v in 0..mesh.n_vertices() {
        if !op.credible[v] {
            excluded_boundary += 1;
            continue;
        }
        let r = mesh.r[v];
        if r >= space.r_end() {
            excluded_boundary += 1;
            continue;
        }
        let bound = (mf - 1.0) * space.eta_w_cap(r);
        let delta = h_max * (1.0 + bound.abs());
        let lap = op.laplacian_r[v];
        let violated = lap < bound - delta;
        if r <= near_pole_cut {
            excluded_near_pole += 1;
            if violated {
                near_pole_violations += 1;
            }
            continue;
        }
        tested += 1;
        if violated {
            violations += 1;
        }
        residuals.push((lap - bound).abs() / bound.abs().max(1e-12));
    }
    if tested == 0 {
        return Err(Error::InvalidMesh(
            "no interior vertices beyond 2 h_max: mesh too coarse for the Laplacian check".into(),
        ));
    }
    residuals.sort_by(f64::total_cmp);
    let median = residuals[residuals.len() / 2];
    let p95 = residuals[((residuals.len() as f64 * 0.95) as usize).min(residuals.len() - 1)];
    let violation_fraction = violations as f64 / tested as f64;
    Ok(LaplacianReport {
        tested,
        excluded_boundary,
        excluded_near_pole,
        violations,
        violation_fraction,
        near_pole_violations,
        median_rel_residual: median,
        p95_rel_residual: p95,
        slack_scale: h_max,
        pass: violation_fraction < 0.05,
    })
}

/// Discrete divergence-theorem audit on D_t.
#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    pub t: f64,
    /// Sum of cell areas times Laplacian values over vertices with r <= t.
    pub interior_integral: f64,
    /// Flux of the PL gradient through the level polyline.
    pub boundary_flux: f64,
    pub rel_mismatch: f64,
    pub cells: usize,
    /// (m-1) sum of cell areas times eta_W(r_i) over cells beyond the pole
    /// neighborhood: the model-side lower bound for the restricted integral.
    pub model_bound_integral: f64,
    pub integral_dominates_model_bound: bool,
    pub pass: bool,
}

pub fn divergence_audit(
    mesh: &SampledSubmanifold,
    space: &IsoComparisonSpace,
    t: f64,
) -> Result<DivergenceReport> {
    // Radii below the mesh resolution enclose at most the pole cell; that is
    // a degenerate domain, reported as an error rather than a silent zero.
    if !(t > 2.0 * mesh.mean_edge() && t <= mesh.truncation_radius()) {
        return Err(Error::Domain {
            what: "divergence audit radius",
            r: t,
            lo: 2.0 * mesh.mean_edge(),
            hi: mesh.truncation_radius(),
        });
    }
    let op = cotan_operator(mesh);
    let mf = space.dimension() as f64;
    let pole_cut = 2.0 * mesh.h_max();

    let mut cell_terms: Vec<f64> = Vec::new();
    // The model-side comparison is restricted to cells beyond the pole
    // neighborhood, where eta_W is finite at the sampled radii; both sides
    // of the domination flag use the same restricted set.
    let mut model_terms: Vec<f64> = Vec::new();
    let mut interior_away_terms: Vec<f64> = Vec::new();
    for v in 0..mesh.n_vertices() {
        // Cells in the band around the level line enter with the fraction
        // of their radial extent below t; without this, whole rings of a
        // structured mesh flip at once and bias the domain by half a ring.
        let gap = op.radial_gap[v];
        let weight = if gap > 0.0 {
            (0.5 + (t - mesh.r[v]) / gap).clamp(0.0, 1.0)
        } else if mesh.r[v] <= t {
            1.0
        } else {
            0.0
        };
        if weight == 0.0 {
            continue;
        }
        if !op.credible[v] {
            return Err(Error::InvalidMesh(format!(
                "vertex {v} at r = {} touches the mesh boundary: D_t is contaminated at t = {t}",
                mesh.r[v]
            )));
        }
        cell_terms.push(weight * op.cell_area[v] * op.laplacian_r[v]);
        if mesh.r[v] > pole_cut && mesh.r[v] < space.r_end() {
            model_terms.push(weight * op.cell_area[v] * (mf - 1.0) * space.eta_w_cap(mesh.r[v]));
            interior_away_terms.push(weight * op.cell_area[v] * op.laplacian_r[v]);
        }
    }
    if cell_terms.is_empty() {
        return Err(Error::Domain {
            what: "divergence audit: no interior cells below t",
            r: t,
            lo: mesh.mean_edge(),
            hi: mesh.truncation_radius(),
        });
    }
    let interior_integral = pairwise_sum(&cell_terms);
    let model_bound_integral = pairwise_sum(&model_terms);
    let interior_away = pairwise_sum(&interior_away_terms);

    // Flux side: level segments weighted by the per-face PL gradient norm
    // (the outward conormal of the level line is the normalized gradient).
    let dim = mesh.ambient().coord_dim();
    let mut flux_terms: Vec<f64> = Vec::new();
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
        let (_, seg) = crate::extrinsic::clip_face(mesh.ambient(), pts, rv, t, mesh.face_area[i]);
        flux_terms.push(seg * mesh.face_grad_pl[i]);
    }
    let boundary_flux = pairwise_sum(&flux_terms);
    let rel_mismatch = (interior_integral - boundary_flux).abs()
        / interior_integral.abs().max(boundary_flux.abs()).max(1e-300);
    Ok(DivergenceReport {
        t,
        interior_integral,
        boundary_flux,
        rel_mismatch,
        cells: cell_terms.len(),
        model_bound_integral,
        integral_dominates_model_bound: interior_away
            >= model_bound_integral - 0.02 * model_bound_integral.abs(),
        pass: rel_mismatch < 0.02,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_surface, SurfaceKind};
    use crate::iso_comparison::{construct_w, BoundingFunction};
    use crate::model_space::WarpingFunction;

    fn flat_space(r_end: f64) -> IsoComparisonSpace {
        construct_w(2, WarpingFunction::space_form(0.0), BoundingFunction::Zero, r_end).unwrap()
    }

    fn hyper_space(r_end: f64) -> IsoComparisonSpace {
        construct_w(2, WarpingFunction::space_form(-1.0), BoundingFunction::Zero, r_end).unwrap()
    }

    #[test]
    fn plane_laplacian_matches_one_over_r() {
        let mesh = generate_surface(SurfaceKind::EuclideanPlaneThroughPole, 8.0, 1.0).unwrap();
        let rep = discrete_laplacian_check(&mesh, &flat_space(20.0)).unwrap();
        assert!(rep.pass, "violations {} / {}", rep.violations, rep.tested);
        assert!(rep.median_rel_residual < 0.05, "median {}", rep.median_rel_residual);
    }

    #[test]
    fn hyperbolic_plane_laplacian_matches_coth() {
        let mesh =
            generate_surface(SurfaceKind::HyperbolicGeodesicPlane { b: -1.0 }, 4.0, 5.0).unwrap();
        let rep = discrete_laplacian_check(&mesh, &hyper_space(20.0)).unwrap();
        assert!(rep.pass, "violations {} / {}", rep.violations, rep.tested);
        assert!(rep.median_rel_residual < 0.05, "median {}", rep.median_rel_residual);
    }

    #[test]
    fn catenoid_laplacian_dominates_flat_bound_away_from_the_neck() {
        let mesh = generate_surface(SurfaceKind::Catenoid { neck: 1.0 }, 12.0, 1.0).unwrap();
        let rep = discrete_laplacian_check(&mesh, &flat_space(30.0)).unwrap();
        assert!(rep.pass, "violations {} / {}", rep.violations, rep.tested);
    }

    #[test]
    fn divergence_audit_on_the_plane() {
        let mesh = generate_surface(SurfaceKind::EuclideanPlaneThroughPole, 8.0, 1.0).unwrap();
        let rep = divergence_audit(&mesh, &flat_space(20.0), 5.0).unwrap();
        // Exact value of the integral is 2 pi t.
        let exact = 2.0 * std::f64::consts::PI * 5.0;
        assert!(rep.pass, "mismatch {}", rep.rel_mismatch);
        assert!((rep.interior_integral - exact).abs() < 0.02 * exact);
        assert!((rep.boundary_flux - exact).abs() < 0.02 * exact);
        assert!(rep.integral_dominates_model_bound);
    }

    #[test]
    fn divergence_audit_on_the_hyperbolic_plane() {
        let mesh =
            generate_surface(SurfaceKind::HyperbolicGeodesicPlane { b: -1.0 }, 6.0, 3.0).unwrap();
        let rep = divergence_audit(&mesh, &hyper_space(20.0), 5.0).unwrap();
        let exact = 2.0 * std::f64::consts::PI * 5.0f64.sinh();
        assert!(rep.pass, "mismatch {}", rep.rel_mismatch);
        assert!((rep.interior_integral - exact).abs() < 0.03 * exact);
    }

    #[test]
    fn degenerate_radius_is_an_error() {
        let mesh = generate_surface(SurfaceKind::EuclideanPlaneThroughPole, 8.0, 0.5).unwrap();
        // Smaller than the first interior ring: no cells.
        assert!(divergence_audit(&mesh, &flat_space(20.0), 1e-6).is_err());
        // Beyond truncation: boundary contamination.
        assert!(divergence_audit(&mesh, &flat_space(20.0), 8.3).is_err());
    }
}
