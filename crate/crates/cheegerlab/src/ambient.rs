//! Exact geometry of the ambient space forms K^n(b), b <= 0: the Euclidean
//! model and the hyperboloid (Minkowski) model, with closed-form distances,
//! geodesic interpolation and geodesic-triangle areas.
//!
//! Points are flat coordinate slices: n entries in the Euclidean model and
//! n+1 in the hyperboloid model (signature (-,+,...,+), upper sheet, with
//! <x,x> = 1/b). The pole is canonical: the origin, respectively
//! (1/sqrt(-b), 0, ..., 0).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::stable_acosh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AmbientModel {
    Euclidean,
    Hyperboloid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmbientSpace {
    n: usize,
    b: f64,
    model: AmbientModel,
}

/// Tolerance for the on-model constraint of stored points.
pub const ON_MODEL_TOL: f64 = 1e-9;

impl AmbientSpace {
    pub fn euclidean(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::AmbientMismatch(format!("ambient dimension n = {n} must be >= 2")));
        }
        Ok(AmbientSpace { n, b: 0.0, model: AmbientModel::Euclidean })
    }

    pub fn hyperboloid(n: usize, b: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::AmbientMismatch(format!("ambient dimension n = {n} must be >= 2")));
        }
        if !(b < 0.0) {
            return Err(Error::AmbientMismatch(format!(
                "hyperboloid model needs b < 0, got b = {b}"
            )));
        }
        Ok(AmbientSpace { n, b, model: AmbientModel::Hyperboloid })
    }

    pub fn model(&self) -> AmbientModel {
        self.model
    }

    /// Manifold dimension n.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Sectional curvature b (0 for Euclidean).
    pub fn curvature(&self) -> f64 {
        self.b
    }

    /// Number of coordinates per point.
    pub fn coord_dim(&self) -> usize {
        match self.model {
            AmbientModel::Euclidean => self.n,
            AmbientModel::Hyperboloid => self.n + 1,
        }
    }

    /// The canonical pole: origin / (1/sqrt(-b), 0, ..., 0).
    pub fn pole(&self) -> Vec<f64> {
        let mut o = vec![0.0; self.coord_dim()];
        if self.model == AmbientModel::Hyperboloid {
            o[0] = 1.0 / (-self.b).sqrt();
        }
        o
    }

    pub fn minkowski_dot(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = -x[0] * y[0];
        for i in 1..x.len() {
            acc += x[i] * y[i];
        }
        acc
    }

    /// Residual of the model constraint at `x` (0 for Euclidean points).
    ///
    /// Measured relative to the magnitude of the quadratic-form terms
    /// (x_0^2): the absolute residual of the Minkowski form cannot be
    /// evaluated below x_0^2 * eps in f64, so an absolute criterion would
    /// spuriously reject every point at large radii.
    pub fn constraint_residual(&self, x: &[f64]) -> f64 {
        match self.model {
            AmbientModel::Euclidean => 0.0,
            AmbientModel::Hyperboloid => {
                if x[0] <= 0.0 {
                    return f64::INFINITY;
                }
                let scale = (1.0 / -self.b).max(x[0] * x[0]);
                (self.minkowski_dot(x, x) - 1.0 / self.b).abs() / scale
            }
        }
    }

    pub fn check_on_model(&self, x: &[f64], tol: f64) -> Result<()> {
        let res = self.constraint_residual(x);
        if res > tol {
            return Err(Error::OffModel { residual: res });
        }
        Ok(())
    }

    /// Rescales a near-model point exactly onto the hyperboloid sheet.
    pub fn project_to_model(&self, x: &mut [f64]) {
        if self.model == AmbientModel::Hyperboloid {
            let q = self.minkowski_dot(x, x);
            if q < 0.0 {
                let alpha = ((1.0 / self.b) / q).sqrt();
                for v in x.iter_mut() {
                    *v *= alpha;
                }
            }
        }
    }

    /// Extrinsic distance r(x) = dist(o, x) to the canonical pole.
    ///
    /// Off-model points are rejected (tolerance 1e-8 on the constraint).
    pub fn extrinsic_distance(&self, x: &[f64]) -> Result<f64> {
        self.check_on_model(x, 1e-8)?;
        Ok(self.distance_unchecked(&self.pole(), x))
    }

    /// Geodesic distance between two model points (no validation).
    pub fn distance_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.model {
            AmbientModel::Euclidean => {
                let mut acc = 0.0;
                for i in 0..x.len() {
                    let d = x[i] - y[i];
                    acc += d * d;
                }
                acc.sqrt()
            }
            AmbientModel::Hyperboloid => {
                let s = (-self.b).sqrt();
                let u = self.b * self.minkowski_dot(x, y);
                stable_acosh(u.max(1.0)) / s
            }
        }
    }

    /// Point at arc-length fraction `mu` along the geodesic from `x` to `y`.
    pub fn geodesic_point(&self, x: &[f64], y: &[f64], mu: f64, out: &mut [f64]) {
        match self.model {
            AmbientModel::Euclidean => {
                for i in 0..x.len() {
                    out[i] = (1.0 - mu) * x[i] + mu * y[i];
                }
            }
            AmbientModel::Hyperboloid => {
                let s = (-self.b).sqrt();
                let d = s * self.distance_unchecked(x, y);
                if d < 1e-12 {
                    for i in 0..x.len() {
                        out[i] = (1.0 - mu) * x[i] + mu * y[i];
                    }
                } else {
                    let denom = d.sinh();
                    let ca = ((1.0 - mu) * d).sinh() / denom;
                    let cb = (mu * d).sinh() / denom;
                    for i in 0..x.len() {
                        out[i] = ca * x[i] + cb * y[i];
                    }
                }
                self.project_to_model(out);
            }
        }
    }

    /// Area of the geodesic triangle with the given vertices.
    ///
    /// Euclidean: Gram-determinant formula (any ambient dimension).
    /// Hyperboloid: angle defect, evaluated through the hyperbolic
    /// L'Huilier identity tan(defect/4) = sqrt(prod tanh(...)) which keeps
    /// full precision for small triangles where the raw law-of-cosines
    /// defect cancels catastrophically.
    pub fn face_area(&self, a: &[f64], b: &[f64], c: &[f64]) -> Result<f64> {
        let area = self.face_area_unchecked(a, b, c);
        if !(area > 0.0) || !area.is_finite() {
            return Err(Error::InvalidMesh(format!("degenerate triangle (area = {area})")));
        }
        Ok(area)
    }

    pub fn face_area_unchecked(&self, a: &[f64], b: &[f64], c: &[f64]) -> f64 {
        match self.model {
            AmbientModel::Euclidean => {
                let mut e1sq = 0.0;
                let mut e2sq = 0.0;
                let mut dot = 0.0;
                for i in 0..a.len() {
                    let u = b[i] - a[i];
                    let v = c[i] - a[i];
                    e1sq += u * u;
                    e2sq += v * v;
                    dot += u * v;
                }
                0.5 * (e1sq * e2sq - dot * dot).max(0.0).sqrt()
            }
            AmbientModel::Hyperboloid => {
                let s = (-self.b).sqrt();
                let d1 = s * self.distance_unchecked(b, c);
                let d2 = s * self.distance_unchecked(c, a);
                let d3 = s * self.distance_unchecked(a, b);
                self.defect_from_sides(d1, d2, d3) / (s * s)
            }
        }
    }

    /// Angle defect of a unit-curvature hyperbolic triangle from its sides.
    fn defect_from_sides(&self, d1: f64, d2: f64, d3: f64) -> f64 {
        let p = 0.5 * (d1 + d2 + d3);
        let prod = (0.5 * p).tanh()
            * (0.5 * (p - d1)).max(0.0).tanh()
            * (0.5 * (p - d2)).max(0.0).tanh()
            * (0.5 * (p - d3)).max(0.0).tanh();
        4.0 * prod.max(0.0).sqrt().atan()
    }

    /// Ambient gradient of the extrinsic distance at `x` (a unit tangent
    /// vector pointing along the radial geodesic away from the pole).
    pub fn radial_gradient(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        match self.model {
            AmbientModel::Euclidean => {
                let mut norm = 0.0;
                for &v in x.iter() {
                    norm += v * v;
                }
                let norm = norm.sqrt();
                if norm < 1e-12 {
                    return Err(Error::Domain {
                        what: "radial gradient at the pole",
                        r: norm,
                        lo: 1e-12,
                        hi: f64::INFINITY,
                    });
                }
                for i in 0..x.len() {
                    out[i] = x[i] / norm;
                }
                Ok(())
            }
            AmbientModel::Hyperboloid => {
                let s = (-self.b).sqrt();
                // Unit-hyperboloid coordinates: X = s x, O = s o = (1,0,..).
                let x0 = s * x[0];
                let d = stable_acosh(x0.max(1.0));
                if d < 1e-12 {
                    return Err(Error::Domain {
                        what: "radial gradient at the pole",
                        r: d,
                        lo: 1e-12,
                        hi: f64::INFINITY,
                    });
                }
                let (ch, sh) = (d.cosh(), d.sinh());
                // grad = (cosh(d) X - O)/sinh(d), expressed in x-coordinates.
                out[0] = (ch * x0 - 1.0) / sh;
                for i in 1..x.len() {
                    out[i] = ch * (s * x[i]) / sh;
                }
                Ok(())
            }
        }
    }

    /// Inner product of tangent vectors (Euclidean dot or Minkowski form).
    pub fn tangent_dot(&self, u: &[f64], v: &[f64]) -> f64 {
        match self.model {
            AmbientModel::Euclidean => u.iter().zip(v).map(|(a, b)| a * b).sum(),
            AmbientModel::Hyperboloid => self.minkowski_dot(u, v),
        }
    }

    /// Header tag for the mesh file format.
    pub fn header_line(&self) -> String {
        match self.model {
            AmbientModel::Euclidean => format!("#ambient euclidean n={}", self.n),
            AmbientModel::Hyperboloid => format!("#ambient hyperboloid b={}", self.b),
        }
    }

    /// Parses the `#ambient ...` header line.
    pub fn from_header_line(line: &str, coord_dim: usize) -> Result<Self> {
        let rest = line
            .strip_prefix("#ambient")
            .ok_or_else(|| Error::Spec(format!("mesh header must start with '#ambient': {line}")))?
            .trim();
        let mut parts = rest.split_whitespace();
        match parts.next() {
            Some("euclidean") => {
                let mut n = None;
                for kv in parts {
                    if let Some(v) = kv.strip_prefix("n=") {
                        n = Some(v.parse::<usize>().map_err(|_| {
                            Error::Spec(format!("bad dimension in header: {kv}"))
                        })?);
                    }
                }
                let n = n.unwrap_or(coord_dim);
                if n != coord_dim {
                    return Err(Error::AmbientMismatch(format!(
                        "header says n = {n} but vertices have {coord_dim} coordinates"
                    )));
                }
                AmbientSpace::euclidean(n)
            }
            Some("hyperboloid") => {
                let mut b = None;
                for kv in parts {
                    if let Some(v) = kv.strip_prefix("b=") {
                        b = Some(v.parse::<f64>().map_err(|_| {
                            Error::Spec(format!("bad curvature in header: {kv}"))
                        })?);
                    }
                }
                let b = b.ok_or_else(|| Error::Spec("hyperboloid header needs b=<real>".into()))?;
                if coord_dim < 3 {
                    return Err(Error::AmbientMismatch(
                        "hyperboloid vertices need >= 3 coordinates".into(),
                    ));
                }
                AmbientSpace::hyperboloid(coord_dim - 1, b)
            }
            other => Err(Error::Spec(format!("unknown ambient model {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_distance_is_pythagorean() {
        let a = AmbientSpace::euclidean(3).unwrap();
        assert_eq!(a.extrinsic_distance(&[3.0, 4.0, 0.0]).unwrap(), 5.0);
        assert_eq!(a.extrinsic_distance(&a.pole()).unwrap(), 0.0);
    }

    #[test]
    fn hyperboloid_distance_matches_the_parameter() {
        let a = AmbientSpace::hyperboloid(3, -1.0).unwrap();
        let x = [2.0f64.cosh(), 2.0f64.sinh(), 0.0, 0.0];
        assert!((a.extrinsic_distance(&x).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(a.extrinsic_distance(&a.pole()).unwrap(), 0.0);

        // Scaled curvature: points at parameter rho sit at distance rho.
        let s = 2.0f64; // b = -4
        let a4 = AmbientSpace::hyperboloid(3, -4.0).unwrap();
        let rho = 1.3;
        let x4 = [(s * rho).cosh() / s, (s * rho).sinh() / s, 0.0, 0.0];
        assert!((a4.extrinsic_distance(&x4).unwrap() - rho).abs() < 1e-12);
    }

    #[test]
    fn off_model_points_are_rejected() {
        let a = AmbientSpace::hyperboloid(3, -1.0).unwrap();
        assert!(a.extrinsic_distance(&[1.1, 0.0, 0.0, 0.0]).is_err());
        // Lower sheet.
        assert!(a.extrinsic_distance(&[-1.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn euclidean_face_area() {
        let a = AmbientSpace::euclidean(3).unwrap();
        let area = a
            .face_area(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0])
            .unwrap();
        assert!((area - 0.5).abs() < 1e-15);
        assert!(a
            .face_area(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0])
            .is_err());
    }

    /// Places an equilateral geodesic triangle with circumradius rho on the
    /// unit hyperboloid and returns its vertices.
    fn equilateral(a: &AmbientSpace, rho: f64) -> [[f64; 4]; 3] {
        let mut pts = [[0.0; 4]; 3];
        for (k, p) in pts.iter_mut().enumerate() {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            *p = [rho.cosh(), rho.sinh() * th.cos(), rho.sinh() * th.sin(), 0.0];
        }
        let _ = a;
        pts
    }

    #[test]
    fn small_hyperbolic_triangles_match_heron() {
        let amb = AmbientSpace::hyperboloid(3, -1.0).unwrap();
        // Circumradius chosen so sides come out near 1e-3.
        let pts = equilateral(&amb, 1e-3 / 3.0f64.sqrt());
        let s1 = amb.distance_unchecked(&pts[0], &pts[1]);
        let s2 = amb.distance_unchecked(&pts[1], &pts[2]);
        let s3 = amb.distance_unchecked(&pts[2], &pts[0]);
        let p = 0.5 * (s1 + s2 + s3);
        let heron = (p * (p - s1) * (p - s2) * (p - s3)).sqrt();
        let got = amb.face_area(&pts[0], &pts[1], &pts[2]).unwrap();
        assert!(
            (got - heron).abs() <= 1e-5 * heron,
            "area {got} vs Heron {heron} (rel {})",
            (got - heron).abs() / heron
        );
    }

    #[test]
    fn large_hyperbolic_triangle_area_is_below_pi() {
        let amb = AmbientSpace::hyperboloid(3, -1.0).unwrap();
        // Solve for the circumradius giving side length 5:
        // cosh(side) = cosh^2 rho - sinh^2 rho cos(2 pi/3).
        let side = 5.0f64;
        let sinh2 = (side.cosh() - 1.0) / 1.5;
        let rho = sinh2.sqrt().asinh();
        let pts = equilateral(&amb, rho);
        let d = amb.distance_unchecked(&pts[0], &pts[1]);
        assert!((d - side).abs() < 1e-9);
        let area = amb.face_area(&pts[0], &pts[1], &pts[2]).unwrap();
        assert!(area < std::f64::consts::PI);
        assert!(area > 2.0, "a side-5 triangle is already close to ideal");
    }

    #[test]
    fn defect_matches_law_of_cosines_for_moderate_triangles() {
        let amb = AmbientSpace::hyperboloid(3, -1.0).unwrap();
        for &side in &[0.5f64, 1.0, 5.0] {
            let sinh2 = (side.cosh() - 1.0) / 1.5;
            let rho = sinh2.sqrt().asinh();
            let pts = equilateral(&amb, rho);
            // Oracle: interior angle from the hyperbolic law of cosines.
            let ca = (side.cosh() * side.cosh() - side.cosh())
                / (side.sinh() * side.sinh());
            let defect = std::f64::consts::PI - 3.0 * ca.acos();
            let got = amb.face_area(&pts[0], &pts[1], &pts[2]).unwrap();
            assert!(
                (got - defect).abs() < 1e-9 * defect.max(1e-6),
                "side={side}: {got} vs {defect}"
            );
        }
    }

    #[test]
    fn geodesic_interpolation_stays_on_model_and_splits_distances() {
        let amb = AmbientSpace::hyperboloid(3, -1.0).unwrap();
        let x = [1.5f64.cosh(), 1.5f64.sinh(), 0.0, 0.0];
        let y = [2.0f64.cosh(), 0.0, 2.0f64.sinh(), 0.0];
        let d = amb.distance_unchecked(&x, &y);
        let mut mid = [0.0; 4];
        amb.geodesic_point(&x, &y, 0.25, &mut mid);
        assert!(amb.constraint_residual(&mid) < 1e-12);
        assert!((amb.distance_unchecked(&x, &mid) - 0.25 * d).abs() < 1e-10);
        assert!((amb.distance_unchecked(&mid, &y) - 0.75 * d).abs() < 1e-10);
    }

    #[test]
    fn radial_gradient_is_unit_and_radial() {
        let amb = AmbientSpace::hyperboloid(3, -1.0).unwrap();
        let x = [1.2f64.cosh(), 1.2f64.sinh() * 0.6, 1.2f64.sinh() * 0.8, 0.0];
        let mut g = [0.0; 4];
        amb.radial_gradient(&x, &mut g).unwrap();
        assert!((amb.minkowski_dot(&g, &g) - 1.0).abs() < 1e-10, "unit tangent");
        assert!(amb.minkowski_dot(&g, &x).abs() < 1e-10, "tangent to the sheet");

        let e = AmbientSpace::euclidean(3).unwrap();
        let mut ge = [0.0; 3];
        e.radial_gradient(&[3.0, 4.0, 0.0], &mut ge).unwrap();
        assert!((ge[0] - 0.6).abs() < 1e-15 && (ge[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn header_round_trip() {
        let e = AmbientSpace::euclidean(3).unwrap();
        assert_eq!(e.header_line(), "#ambient euclidean n=3");
        assert_eq!(AmbientSpace::from_header_line(&e.header_line(), 3).unwrap(), e);

        let h = AmbientSpace::hyperboloid(3, -1.0).unwrap();
        assert_eq!(h.header_line(), "#ambient hyperboloid b=-1");
        assert_eq!(AmbientSpace::from_header_line(&h.header_line(), 4).unwrap(), h);

        assert!(AmbientSpace::from_header_line("#ambient euclidean n=3", 4).is_err());
        assert!(AmbientSpace::from_header_line("#something", 3).is_err());
    }
}
