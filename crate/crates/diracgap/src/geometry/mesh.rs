//! Structured triangulation of star-shaped domains by mapped concentric rings.

use num_complex::Complex64;

use super::{BoundaryCurve, GeometryError};
use crate::quadrature::GAUSS3_SEGMENT;

/// Per-node boundary data carried by the mesh: the exact parameter value and
/// the exact tangent phase and curvature evaluated from the parametrization.
#[derive(Debug, Clone)]
pub struct BoundaryVertex {
    pub vertex: usize,
    pub theta: f64,
    pub tangent: Complex64,
    pub curvature: f64,
}

/// Quadrature node on a boundary arc: weight includes the arclength density,
/// `xi` is the position fraction along the edge used for linear traces.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryGaussNode {
    pub weight: f64,
    pub curvature: f64,
    pub xi: f64,
}

/// Boundary arc between two consecutive boundary vertices (counterclockwise).
#[derive(Debug, Clone)]
pub struct BoundaryEdge {
    /// indices into the boundary vertex list, edge runs a -> b with increasing arclength
    pub a: usize,
    pub b: usize,
    pub arc_len: f64,
    pub gauss: [BoundaryGaussNode; 3],
}

/// Triangle mesh over a star-shaped domain. Boundary vertices lie exactly on
/// the curve; interior rings are the boundary scaled toward the origin.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub curve: BoundaryCurve,
    pub h: f64,
    pub rings: usize,
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_vertices: Vec<BoundaryVertex>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// vertex id -> index into boundary_vertices, None for interior vertices
    pub boundary_index: Vec<Option<usize>>,
}

/// Mesh quality limit: longest edge squared over twice the area, ~1.15 for an
/// equilateral triangle.
const ASPECT_LIMIT: f64 = 12.0;

impl Mesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary_vertices.len()
    }

    pub fn n_interior(&self) -> usize {
        self.n_vertices() - self.n_boundary()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let p = &self.vertices;
        0.5 * ((p[b][0] - p[a][0]) * (p[c][1] - p[a][1])
            - (p[c][0] - p[a][0]) * (p[b][1] - p[a][1]))
    }

    pub fn triangle_area_sum(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    pub fn longest_edge(&self) -> f64 {
        let mut l2: f64 = 0.0;
        for t in &self.triangles {
            for k in 0..3 {
                let a = self.vertices[t[k]];
                let b = self.vertices[t[(k + 1) % 3]];
                let d = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
                l2 = l2.max(d);
            }
        }
        l2.sqrt()
    }

    /// Structural checks: positive orientation, edge incidence counts, aspect
    /// ratio. Returns the worst aspect ratio.
    pub fn validate(&self) -> Result<f64, GeometryError> {
        let mut worst: f64 = 0.0;
        for t in 0..self.triangles.len() {
            let area = self.triangle_area(t);
            if area <= 0.0 {
                return Err(GeometryError::DegenerateMesh(format!(
                    "triangle {t} has non-positive area {area:.3e}"
                )));
            }
            let [a, b, c] = self.triangles[t];
            let mut l2: f64 = 0.0;
            for (u, v) in [(a, b), (b, c), (c, a)] {
                let d = (self.vertices[u][0] - self.vertices[v][0]).powi(2)
                    + (self.vertices[u][1] - self.vertices[v][1]).powi(2);
                l2 = l2.max(d);
            }
            let aspect = l2 / (2.0 * area);
            worst = worst.max(aspect);
            if aspect > ASPECT_LIMIT {
                return Err(GeometryError::DegenerateMesh(format!(
                    "triangle {t} aspect ratio {aspect:.2} exceeds limit {ASPECT_LIMIT}"
                )));
            }
        }
        // every edge is shared by two triangles, except boundary edges by one
        let mut counts = std::collections::HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (u, v) = (t[k], t[(k + 1) % 3]);
                let key = (u.min(v), u.max(v));
                *counts.entry(key).or_insert(0usize) += 1;
            }
        }
        for e in &self.boundary_edges {
            let u = self.boundary_vertices[e.a].vertex;
            let v = self.boundary_vertices[e.b].vertex;
            let key = (u.min(v), u.max(v));
            if counts.get(&key) != Some(&1) {
                return Err(GeometryError::DegenerateMesh(format!(
                    "boundary edge {key:?} not incident to exactly one triangle"
                )));
            }
            counts.remove(&key);
        }
        for (key, c) in counts {
            if c != 2 {
                return Err(GeometryError::DegenerateMesh(format!(
                    "interior edge {key:?} incident to {c} triangles"
                )));
            }
        }
        Ok(worst)
    }

    /// Same connectivity with all vertex coordinates multiplied by `factor`;
    /// boundary geometric data rescales exactly (κ/factor, ds·factor).
    pub fn scaled(&self, factor: f64) -> Mesh {
        let mut m = self.clone();
        m.curve = self.curve.scaled(factor);
        m.h = self.h * factor;
        for v in &mut m.vertices {
            v[0] *= factor;
            v[1] *= factor;
        }
        for bv in &mut m.boundary_vertices {
            bv.curvature /= factor;
        }
        for e in &mut m.boundary_edges {
            e.arc_len *= factor;
            for g in &mut e.gauss {
                g.weight *= factor;
                g.curvature /= factor;
            }
        }
        m
    }
}

/// Triangulates the domain bounded by `curve` with target mesh size `h`.
///
/// # Arguments
/// * `curve` - validated counterclockwise boundary
/// * `h` - nominal element size; must satisfy 0 < h < diameter/4
///
/// # Returns
/// A validated mesh whose longest edge is at most 2h.
pub fn triangulate(curve: &BoundaryCurve, h: f64) -> Result<Mesh, GeometryError> {
    let diameter = curve.diameter();
    if !(h > 0.0 && h < diameter / 4.0) {
        return Err(GeometryError::BadMeshSize { h, diameter });
    }
    let (max_pos, max_speed) = curve.size_bounds();
    let by_boundary = (2.0 * std::f64::consts::PI * max_speed / (6.0 * h)).ceil() as usize;
    let by_radius = (max_pos / h).ceil() as usize;
    let rings = by_boundary.max(by_radius).max(3);
    triangulate_rings(curve, rings, h)
}

/// Ring-count-controlled variant; `triangulate` chooses `rings` from `h`.
/// Meshes with ring counts n and 2n have nested vertex sets.
pub fn triangulate_rings(
    curve: &BoundaryCurve,
    rings: usize,
    nominal_h: f64,
) -> Result<Mesh, GeometryError> {
    assert!(rings >= 1);
    let n_r = rings;
    let two_pi = 2.0 * std::f64::consts::PI;

    // ring j holds 6j vertices at parameters 2πi/(6j), scaled by j/n_r
    let ring_start = |j: usize| if j == 0 { 0 } else { 1 + 3 * j * (j - 1) };
    let n_vertices = ring_start(n_r) + 6 * n_r;
    let mut vertices = Vec::with_capacity(n_vertices);
    vertices.push([0.0, 0.0]);
    for j in 1..=n_r {
        let rho = j as f64 / n_r as f64;
        let m = 6 * j;
        for i in 0..m {
            let theta = two_pi * i as f64 / m as f64;
            let p = curve.position(theta);
            vertices.push([rho * p[0], rho * p[1]]);
        }
    }
    debug_assert_eq!(vertices.len(), n_vertices);

    let mut triangles = Vec::with_capacity(6 * n_r * n_r);
    // innermost fan around the center
    for i in 0..6usize {
        triangles.push([0, 1 + i, 1 + (i + 1) % 6]);
    }
    for j in 2..=n_r {
        let m_in = 6 * (j - 1);
        let m_out = 6 * j;
        let s_in = ring_start(j - 1);
        let s_out = ring_start(j);
        let inner = |p: usize| s_in + p % m_in;
        let outer = |p: usize| s_out + p % m_out;
        for sector in 0..6usize {
            let in0 = sector * (j - 1);
            let out0 = sector * j;
            for p in 0..(j - 1) {
                triangles.push([outer(out0 + p), outer(out0 + p + 1), inner(in0 + p)]);
                triangles.push([inner(in0 + p), outer(out0 + p + 1), inner(in0 + p + 1)]);
            }
            triangles.push([outer(out0 + j - 1), outer(out0 + j), inner(in0 + j - 1)]);
        }
    }

    let n_b = 6 * n_r;
    let s_bnd = ring_start(n_r);
    let mut boundary_vertices = Vec::with_capacity(n_b);
    let mut boundary_index = vec![None; n_vertices];
    for i in 0..n_b {
        let theta = two_pi * i as f64 / n_b as f64;
        let cp = curve.evaluate(theta);
        boundary_index[s_bnd + i] = Some(i);
        boundary_vertices.push(BoundaryVertex {
            vertex: s_bnd + i,
            theta,
            tangent: cp.tangent,
            curvature: cp.curvature,
        });
    }
    let dtheta = two_pi / n_b as f64;
    let mut boundary_edges = Vec::with_capacity(n_b);
    for i in 0..n_b {
        let theta_a = two_pi * i as f64 / n_b as f64;
        let gauss = GAUSS3_SEGMENT.map(|(xi, w)| {
            let cp = curve.evaluate(theta_a + xi * dtheta);
            BoundaryGaussNode {
                weight: w * cp.speed * dtheta,
                curvature: cp.curvature,
                xi,
            }
        });
        boundary_edges.push(BoundaryEdge {
            a: i,
            b: (i + 1) % n_b,
            arc_len: curve.arc_length(theta_a, theta_a + dtheta),
            gauss,
        });
    }

    let mesh = Mesh {
        curve: curve.clone(),
        h: nominal_h,
        rings: n_r,
        vertices,
        triangles,
        boundary_vertices,
        boundary_edges,
        boundary_index,
    };
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Harmonic;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn disc() -> BoundaryCurve {
        BoundaryCurve::disc(1.0).unwrap()
    }

    #[test]
    fn counts_and_structure() {
        let m = triangulate(&disc(), 0.2).unwrap();
        // rings = max(ceil(2π/1.2), ceil(1/0.2), 3) = 6
        assert_eq!(m.rings, 6);
        assert_eq!(m.n_boundary(), 36);
        assert_eq!(m.n_vertices(), 1 + 3 * 6 * 5 + 36);
        assert_eq!(m.triangles.len(), 6 * 6 * 6);
        assert_eq!(
            m.n_vertices() as isize - (m.edge_count() as isize) + m.triangles.len() as isize,
            1
        );
    }

    impl Mesh {
        fn edge_count(&self) -> usize {
            let mut set = std::collections::HashSet::new();
            for t in &self.triangles {
                for k in 0..3 {
                    let (u, v) = (t[k], t[(k + 1) % 3]);
                    set.insert((u.min(v), u.max(v)));
                }
            }
            set.len()
        }
    }

    #[test]
    fn refinement_roughly_doubles_boundary() {
        let coarse = triangulate(&disc(), 0.2).unwrap();
        let fine = triangulate(&disc(), 0.1).unwrap();
        assert_eq!(coarse.n_boundary(), 36);
        assert_eq!(fine.n_boundary(), 66);
        let ratio = fine.n_boundary() as f64 / coarse.n_boundary() as f64;
        assert!(ratio > 1.5 && ratio < 2.5);
    }

    #[test]
    fn boundary_vertices_sit_on_curve() {
        let m = triangulate(&disc(), 0.15).unwrap();
        for bv in &m.boundary_vertices {
            let p = m.vertices[bv.vertex];
            let q = m.curve.position(bv.theta);
            assert_eq!(p, q);
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((r - 1.0).abs() <= 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn longest_edge_bounded_by_twice_h() {
        for h in [0.3, 0.2, 0.1] {
            let m = triangulate(&disc(), h).unwrap();
            assert!(
                m.longest_edge() <= 2.0 * h,
                "h={h} edge={}",
                m.longest_edge()
            );
        }
        let ell = BoundaryCurve::ellipse(1.5, 0.75).unwrap();
        let m = triangulate(&ell, 0.15).unwrap();
        assert!(m.longest_edge() <= 2.0 * 0.15);
    }

    #[test]
    fn triangle_area_sum_converges_to_curve_area() {
        let star = BoundaryCurve::fourier(
            1.0,
            vec![Harmonic {
                n: 3,
                a: 0.2,
                b: 0.0,
            }],
        )
        .unwrap();
        let exact = star.area();
        let mut errs = Vec::new();
        for rings in [8, 16, 32] {
            let m = triangulate_rings(&star, rings, 1.0 / rings as f64).unwrap();
            errs.push((exact - m.triangle_area_sum()).abs());
        }
        // polygonal area defect is O(h^2): each refinement divides the error by ~4
        assert!(errs[1] < errs[0] / 3.0, "{errs:?}");
        assert!(errs[2] < errs[1] / 3.0, "{errs:?}");
    }

    #[test]
    fn mesh_validates_on_all_domains() {
        for c in [
            disc(),
            BoundaryCurve::ellipse(1.5, 0.75).unwrap(),
            BoundaryCurve::fourier(
                1.0,
                vec![Harmonic {
                    n: 3,
                    a: 0.2,
                    b: 0.0,
                }],
            )
            .unwrap(),
        ] {
            let m = triangulate(&c, 0.1).unwrap();
            m.validate().unwrap();
        }
    }

    #[test]
    fn nested_rings_share_vertices() {
        let star = BoundaryCurve::fourier(
            1.0,
            vec![Harmonic {
                n: 3,
                a: 0.2,
                b: 0.0,
            }],
        )
        .unwrap();
        let coarse = triangulate_rings(&star, 6, 0.2).unwrap();
        let fine = triangulate_rings(&star, 12, 0.1).unwrap();
        // ring j of the coarse mesh appears as ring 2j of the fine mesh
        let fine_set: std::collections::HashSet<[u64; 2]> = fine
            .vertices
            .iter()
            .map(|v| [v[0].to_bits(), v[1].to_bits()])
            .collect();
        let mut missing = 0;
        for v in &coarse.vertices {
            if !fine_set.contains(&[v[0].to_bits(), v[1].to_bits()]) {
                missing += 1;
            }
        }
        assert_eq!(missing, 0);
    }

    #[test]
    fn rejects_bad_mesh_size() {
        assert!(matches!(
            triangulate(&disc(), 0.0),
            Err(GeometryError::BadMeshSize { .. })
        ));
        assert!(matches!(
            triangulate(&disc(), 1.0),
            Err(GeometryError::BadMeshSize { .. })
        ));
    }

    #[test]
    fn boundary_edge_arclengths_sum_to_perimeter() {
        let m = triangulate(&disc(), 0.2).unwrap();
        let total: f64 = m.boundary_edges.iter().map(|e| e.arc_len).sum();
        assert_relative_eq!(total, 2.0 * PI, max_relative = 1e-12);
        // gauss weights also integrate the perimeter
        let gtotal: f64 = m
            .boundary_edges
            .iter()
            .flat_map(|e| e.gauss.iter().map(|g| g.weight))
            .sum();
        assert_relative_eq!(gtotal, 2.0 * PI, max_relative = 1e-9);
    }

    #[test]
    fn scaled_mesh_rescales_geometry_exactly() {
        let m = triangulate(&disc(), 0.2).unwrap();
        let s = m.scaled(3.0);
        for (a, b) in m.vertices.iter().zip(&s.vertices) {
            assert_eq!(b[0], 3.0 * a[0]);
            assert_eq!(b[1], 3.0 * a[1]);
        }
        for (ea, eb) in m.boundary_edges.iter().zip(&s.boundary_edges) {
            for (ga, gb) in ea.gauss.iter().zip(&eb.gauss) {
                assert_eq!(gb.weight, 3.0 * ga.weight);
                assert_eq!(gb.curvature, ga.curvature / 3.0);
            }
        }
    }
}
