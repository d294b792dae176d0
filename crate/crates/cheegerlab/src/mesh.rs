//! Sampled submanifolds: triangle meshes immersed in an ambient space form,
//! carrying per-vertex extrinsic distances and per-face data (intrinsic
//! area, PL gradient norm of r, r-range).
//!
//! The file format is an ASCII OFF variant with one extension: the first
//! line tags the ambient model, e.g. `#ambient euclidean n=3` or
//! `#ambient hyperboloid b=-1`. Vertices are ambient coordinates, faces are
//! `3 i j k` index triples.

use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::ambient::{AmbientModel, AmbientSpace, ON_MODEL_TOL};
use crate::error::{Error, Result};
use crate::numerics::pairwise_sum;

/// Chunk size for deterministic parallel scans; partial results are reduced
/// in chunk order so thread count never changes the output bits.
pub(crate) const PAR_CHUNK: usize = 8192;

#[derive(Debug, Clone)]
pub struct SampledSubmanifold {
    pub(crate) ambient: AmbientSpace,
    /// Flat vertex coordinates, stride = ambient.coord_dim().
    pub(crate) coords: Vec<f64>,
    pub(crate) faces: Vec<[u32; 3]>,
    /// Per-vertex extrinsic distance to the pole.
    pub(crate) r: Vec<f64>,
    pub(crate) face_area: Vec<f64>,
    pub(crate) face_grad_pl: Vec<f64>,
    pub(crate) face_r_min: Vec<f64>,
    pub(crate) face_r_max: Vec<f64>,
    pub(crate) boundary_vertex: Vec<bool>,
    truncation_radius: f64,
    h_max: f64,
    mean_edge: f64,
    max_radiality: f64,
}

impl SampledSubmanifold {
    /// Validates raw geometry and computes all derived per-vertex/per-face
    /// data. This is the single entry point for generated and loaded meshes.
    pub fn build(ambient: AmbientSpace, coords: Vec<f64>, faces: Vec<[u32; 3]>) -> Result<Self> {
        let dim = ambient.coord_dim();
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::InvalidMesh(format!(
                "coordinate array length {} is not a multiple of {dim}",
                coords.len()
            )));
        }
        let nv = coords.len() / dim;
        if faces.is_empty() {
            return Err(Error::InvalidMesh("mesh has no faces".into()));
        }
        for f in &faces {
            for &i in f {
                if i as usize >= nv {
                    return Err(Error::InvalidMesh(format!("face index {i} out of range ({nv} vertices)")));
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::InvalidMesh(format!("degenerate face {f:?}")));
            }
        }

        // On-model validation (hyperboloid constraint).
        if ambient.model() == AmbientModel::Hyperboloid {
            let bad = coords
                .par_chunks(dim)
                .map(|p| ambient.constraint_residual(p))
                .reduce(|| 0.0f64, f64::max);
            if bad > ON_MODEL_TOL {
                return Err(Error::OffModel { residual: bad });
            }
        }

        // Per-vertex extrinsic distance.
        let pole = ambient.pole();
        let r: Vec<f64> = coords
            .par_chunks(dim)
            .map(|p| ambient.distance_unchecked(&pole, p))
            .collect();

        // Edge scan: manifoldness, boundary, edge-length statistics.
        let mut edges: Vec<u64> = Vec::with_capacity(faces.len() * 3);
        for f in &faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                edges.push(((lo as u64) << 32) | hi as u64);
            }
        }
        edges.par_sort_unstable();
        let mut boundary_vertex = vec![false; nv];
        let mut i = 0;
        while i < edges.len() {
            let mut j = i + 1;
            while j < edges.len() && edges[j] == edges[i] {
                j += 1;
            }
            let mult = j - i;
            if mult > 2 {
                return Err(Error::InvalidMesh(format!(
                    "edge ({}, {}) is shared by {mult} faces: mesh is not edge-manifold",
                    edges[i] >> 32,
                    edges[i] & 0xffff_ffff
                )));
            }
            if mult == 1 {
                boundary_vertex[(edges[i] >> 32) as usize] = true;
                boundary_vertex[(edges[i] & 0xffff_ffff) as usize] = true;
            }
            i = j;
        }

        // Per-face data: area, PL gradient norm, r-range, radiality,
        // edge-length stats. Chunked so reductions are order-fixed.
        struct FaceChunk {
            area: Vec<f64>,
            grad: Vec<f64>,
            rmin: Vec<f64>,
            rmax: Vec<f64>,
            max_edge: f64,
            sum_edge: f64,
            n_edge: usize,
            max_radiality: f64,
            first_bad_area: Option<usize>,
        }
        let chunks: Vec<FaceChunk> = faces
            .par_chunks(PAR_CHUNK)
            .enumerate()
            .map(|(ci, chunk)| {
                let mut out = FaceChunk {
                    area: Vec::with_capacity(chunk.len()),
                    grad: Vec::with_capacity(chunk.len()),
                    rmin: Vec::with_capacity(chunk.len()),
                    rmax: Vec::with_capacity(chunk.len()),
                    max_edge: 0.0,
                    sum_edge: 0.0,
                    n_edge: 0,
                    max_radiality: 0.0,
                    first_bad_area: None,
                };
                let mut grad_buf = vec![0.0; dim];
                let mut cen = vec![0.0; dim];
                for (k, f) in chunk.iter().enumerate() {
                    let pa = &coords[f[0] as usize * dim..(f[0] as usize + 1) * dim];
                    let pb = &coords[f[1] as usize * dim..(f[1] as usize + 1) * dim];
                    let pc = &coords[f[2] as usize * dim..(f[2] as usize + 1) * dim];
                    let (ra, rb, rc) = (r[f[0] as usize], r[f[1] as usize], r[f[2] as usize]);

                    let lab = ambient.distance_unchecked(pa, pb);
                    let lbc = ambient.distance_unchecked(pb, pc);
                    let lca = ambient.distance_unchecked(pc, pa);
                    out.max_edge = out.max_edge.max(lab).max(lbc).max(lca);
                    out.sum_edge += lab + lbc + lca;
                    out.n_edge += 3;

                    let area = ambient.face_area_unchecked(pa, pb, pc);
                    if !(area > 0.0 && area.is_finite()) && out.first_bad_area.is_none() {
                        out.first_bad_area = Some(ci * PAR_CHUNK + k);
                    }
                    out.area.push(area);
                    out.rmin.push(ra.min(rb).min(rc));
                    out.rmax.push(ra.max(rb).max(rc));
                    out.grad.push(pl_gradient_norm(lab, lbc, lca, ra, rb, rc));

                    let rad = radiality_norm(&ambient, pa, pb, pc, &mut cen, &mut grad_buf);
                    out.max_radiality = out.max_radiality.max(rad);
                }
                out
            })
            .collect();

        let mut face_area = Vec::with_capacity(faces.len());
        let mut face_grad_pl = Vec::with_capacity(faces.len());
        let mut face_r_min = Vec::with_capacity(faces.len());
        let mut face_r_max = Vec::with_capacity(faces.len());
        let mut h_max = 0.0f64;
        let mut max_radiality = 0.0f64;
        let mut edge_sums = Vec::with_capacity(chunks.len());
        let mut n_edges_total = 0usize;
        for c in &chunks {
            if let Some(idx) = c.first_bad_area {
                return Err(Error::InvalidMesh(format!("face {idx} has non-positive area")));
            }
            face_area.extend_from_slice(&c.area);
            face_grad_pl.extend_from_slice(&c.grad);
            face_r_min.extend_from_slice(&c.rmin);
            face_r_max.extend_from_slice(&c.rmax);
            h_max = h_max.max(c.max_edge);
            max_radiality = max_radiality.max(c.max_radiality);
            edge_sums.push(c.sum_edge);
            n_edges_total += c.n_edge;
        }
        let mean_edge = pairwise_sum(&edge_sums) / n_edges_total as f64;

        let truncation_radius = r
            .iter()
            .zip(&boundary_vertex)
            .filter(|(_, &b)| b)
            .map(|(&ri, _)| ri)
            .fold(f64::INFINITY, f64::min);

        Ok(SampledSubmanifold {
            ambient,
            coords,
            faces,
            r,
            face_area,
            face_grad_pl,
            face_r_min,
            face_r_max,
            boundary_vertex,
            truncation_radius,
            h_max,
            mean_edge,
            max_radiality,
        })
    }

    pub fn ambient(&self) -> &AmbientSpace {
        &self.ambient
    }

    pub fn n_vertices(&self) -> usize {
        self.r.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        let d = self.ambient.coord_dim();
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn vertex_r(&self) -> &[f64] {
        &self.r
    }

    pub fn face_areas(&self) -> &[f64] {
        &self.face_area
    }

    pub fn face_grad_norms(&self) -> &[f64] {
        &self.face_grad_pl
    }

    pub fn boundary_vertices(&self) -> &[bool] {
        &self.boundary_vertex
    }

    /// Largest radius up to which the mesh certainly covers the submanifold
    /// (minimum extrinsic distance over boundary vertices).
    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    /// Largest extrinsic distance reached by any vertex.
    pub fn max_vertex_r(&self) -> f64 {
        self.r.iter().copied().fold(0.0, f64::max)
    }

    /// Maximum edge length.
    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn mean_edge(&self) -> f64 {
        self.mean_edge
    }

    /// Worst per-face norm of the tangential projection of the ambient
    /// radial gradient; the radiality decomposition bounds it by 1.
    pub fn max_radiality(&self) -> f64 {
        self.max_radiality
    }

    pub fn total_area(&self) -> f64 {
        pairwise_sum(&self.face_area)
    }

    /// Mesh-awareness constant attached to PASS/FAIL verdicts:
    /// eps_mesh = 10 h_max / t_min.
    pub fn eps_mesh(&self, t_min: f64) -> f64 {
        10.0 * self.h_max / t_min
    }

    /// Serializes to the tagged OFF format (deterministic bytes).
    pub fn to_off_string(&self) -> String {
        let dim = self.ambient.coord_dim();
        let mut s = String::with_capacity(self.coords.len() * 20 + self.faces.len() * 24);
        s.push_str(&self.ambient.header_line());
        s.push('\n');
        s.push_str("OFF\n");
        s.push_str(&format!("{} {} 0\n", self.n_vertices(), self.n_faces()));
        for p in self.coords.chunks(dim) {
            for (k, v) in p.iter().enumerate() {
                if k > 0 {
                    s.push(' ');
                }
                s.push_str(&format!("{v}"));
            }
            s.push('\n');
        }
        for f in &self.faces {
            s.push_str(&format!("3 {} {} {}\n", f[0], f[1], f[2]));
        }
        s
    }

    pub fn write_off(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = BufWriter::new(file);
        w.write_all(self.to_off_string().as_bytes())?;
        Ok(())
    }

    pub fn read_off(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_off_str(&text)
    }

    pub fn from_off_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| {
            let t = l.trim();
            !t.is_empty() && (!t.starts_with('#') || t.starts_with("#ambient"))
        });
        let header = lines
            .next()
            .ok_or_else(|| Error::Spec("empty mesh file".into()))?
            .trim()
            .to_string();
        if !header.starts_with("#ambient") {
            return Err(Error::Spec("first line must be the '#ambient ...' tag".into()));
        }
        match lines.next().map(str::trim) {
            Some("OFF") => {}
            other => return Err(Error::Spec(format!("expected OFF magic, got {other:?}"))),
        }
        let counts = lines.next().ok_or_else(|| Error::Spec("missing count line".into()))?;
        let mut it = counts.split_whitespace();
        let nv: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Spec("bad vertex count".into()))?;
        let nf: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Spec("bad face count".into()))?;

        let mut coords: Vec<f64> = Vec::new();
        let mut coord_dim = 0usize;
        for k in 0..nv {
            let line = lines
                .next()
                .ok_or_else(|| Error::Spec(format!("missing vertex line {k}")))?;
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Spec(format!("bad vertex line: '{line}'")))?;
            if k == 0 {
                coord_dim = vals.len();
                if coord_dim < 2 {
                    return Err(Error::Spec("vertices need at least 2 coordinates".into()));
                }
            } else if vals.len() != coord_dim {
                return Err(Error::Spec(format!(
                    "vertex {k} has {} coordinates, expected {coord_dim}",
                    vals.len()
                )));
            }
            coords.extend_from_slice(&vals);
        }
        let ambient = AmbientSpace::from_header_line(&header, coord_dim)?;

        let mut faces = Vec::with_capacity(nf);
        for k in 0..nf {
            let line = lines
                .next()
                .ok_or_else(|| Error::Spec(format!("missing face line {k}")))?;
            let vals: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Spec(format!("bad face line: '{line}'")))?;
            if vals.len() != 4 || vals[0] != 3 {
                return Err(Error::Spec(format!("faces must be triangles ('3 i j k'): '{line}'")));
            }
            faces.push([vals[1], vals[2], vals[3]]);
        }
        Self::build(ambient, coords, faces)
    }

    /// Vertex -> incident faces adjacency in CSR form.
    pub fn vertex_face_adjacency(&self) -> (Vec<u32>, Vec<u32>) {
        let nv = self.n_vertices();
        let mut counts = vec![0u32; nv + 1];
        for f in &self.faces {
            for &v in f {
                counts[v as usize + 1] += 1;
            }
        }
        for i in 0..nv {
            counts[i + 1] += counts[i];
        }
        let mut items = vec![0u32; self.faces.len() * 3];
        let mut cursor = counts.clone();
        for (fi, f) in self.faces.iter().enumerate() {
            for &v in f {
                items[cursor[v as usize] as usize] = fi as u32;
                cursor[v as usize] += 1;
            }
        }
        (counts, items)
    }
}

/// Gradient norm of the per-face linear interpolant of r, computed on the
/// side-length flattening of the triangle (isometric for Euclidean faces,
/// first-order consistent for curved ones).
fn pl_gradient_norm(lab: f64, lbc: f64, lca: f64, ra: f64, rb: f64, rc: f64) -> f64 {
    // Flatten: A = (0,0), B = (lab, 0), C = (x2, y2).
    let x2 = (lab * lab + lca * lca - lbc * lbc) / (2.0 * lab);
    let y2 = (lca * lca - x2 * x2).max(0.0).sqrt();
    if y2 == 0.0 {
        return f64::INFINITY;
    }
    let gx = (rb - ra) / lab;
    let gy = (rc - ra - gx * x2) / y2;
    (gx * gx + gy * gy).sqrt()
}

/// Norm of the projection of the ambient radial gradient onto the face
/// tangent plane at the (projected) centroid; the discrete form of the
/// radiality decomposition, always <= 1 up to rounding.
fn radiality_norm(
    ambient: &AmbientSpace,
    pa: &[f64],
    pb: &[f64],
    pc: &[f64],
    cen: &mut [f64],
    grad: &mut [f64],
) -> f64 {
    let dim = pa.len();
    for i in 0..dim {
        cen[i] = (pa[i] + pb[i] + pc[i]) / 3.0;
    }
    ambient.project_to_model(cen);
    if ambient.radial_gradient(cen, grad).is_err() {
        return 0.0; // centroid at the pole: the face spans r = 0, skip
    }
    // Tangent-plane basis from the two edge vectors, projected to the
    // tangent space at the centroid and orthonormalized.
    let mut e1 = vec![0.0; dim];
    let mut e2 = vec![0.0; dim];
    for i in 0..dim {
        e1[i] = pb[i] - pa[i];
        e2[i] = pc[i] - pa[i];
    }
    if ambient.model() == AmbientModel::Hyperboloid {
        // v -> v - (<v,c>/<c,c>) c keeps vectors tangent to the sheet.
        let cc = ambient.minkowski_dot(cen, cen);
        let p1 = ambient.minkowski_dot(&e1, cen) / cc;
        let p2 = ambient.minkowski_dot(&e2, cen) / cc;
        for i in 0..dim {
            e1[i] -= p1 * cen[i];
            e2[i] -= p2 * cen[i];
        }
    }
    let n1 = ambient.tangent_dot(&e1, &e1).max(0.0).sqrt();
    if n1 == 0.0 {
        return 0.0;
    }
    for v in e1.iter_mut() {
        *v /= n1;
    }
    let d12 = ambient.tangent_dot(&e1, &e2);
    for i in 0..dim {
        e2[i] -= d12 * e1[i];
    }
    let n2 = ambient.tangent_dot(&e2, &e2).max(0.0).sqrt();
    let g1 = ambient.tangent_dot(grad, &e1);
    let g2 = if n2 > 0.0 {
        ambient.tangent_dot(grad, &e2) / n2
    } else {
        0.0
    };
    (g1 * g1 + g2 * g2).sqrt()
}
