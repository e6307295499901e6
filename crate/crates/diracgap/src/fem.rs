//! Finite-element assembly of the Dirac quadratic form on the constrained
//! spinor space.
//!
//! The operator is T = σ₁(−i∂₁) + σ₂(−i∂₂), acting componentwise as
//! (Tu)₁ = (−i∂₁ − ∂₂)u₂ and (Tu)₂ = (−i∂₁ + ∂₂)u₁. For a trace satisfying
//! u₂ = β t u₁ an integration by parts of ‖Tu‖² leaves, besides the Dirichlet
//! energy, the boundary integral
//!
//!   ∮ [ β²κ |u₁|² + i(1 − β²) u₁* ∂ₛu₁ ] ds,
//!
//! obtained by substituting the trace relation into i∮⟨u, σ₃ t·∇u⟩ ds and
//! using ∂ₛt = −κ n t n̄ = iκt on a counterclockwise curve. For β² = 1 the
//! tangential term vanishes and the κ term is ½∮κ⟨u,u⟩ ds, since
//! ⟨u,u⟩ = 2|u₁|² on the boundary.
//!
//! The primary discretization is this squared form: it is Hermitian positive
//! semidefinite up to boundary consistency error and free of the spectral
//! pollution a direct first-order discretization suffers. The first-order
//! path is also provided, flagged experimental, and its spectrum is only
//! trusted after cross-filtering against the squared-form Ritz values.

use crate::boundary::BoundaryFamily;
use crate::geometry::{GeometryError, Mesh};
use crate::sparse::{Csr, Triplets};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Which sesquilinear form a problem discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    /// q_η(u) = ‖Tu‖² with the boundary terms above; eigenvalues are λ².
    Squared,
    /// Symmetrized ½[(φ,Tu) + (Tφ,u)]; eigenvalues are signed λ, subject to
    /// pollution and only meaningful after cross-filtering.
    FirstOrder,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProblemMeta {
    pub domain: String,
    pub form: FormKind,
    pub h: f64,
    pub eta: f64,
    pub beta: f64,
    pub n_vertices: usize,
    pub n_boundary: usize,
    pub n_reduced: usize,
}

/// The discrete pencil (S, M) on reduced DOFs plus the constraint map R back
/// to full nodal spinor DOFs (component-blocked: u₁ nodes then u₂ nodes).
#[derive(Debug, Clone)]
pub struct AssembledProblem {
    pub s: Csr,
    pub m: Csr,
    pub r: Csr,
    pub meta: ProblemMeta,
}

/// Scalar P1 building blocks shared by the two-spinor and four-spinor paths.
/// All lists are triplet streams over nodal indices in a fixed element order,
/// so every assembly downstream is deterministic.
pub(crate) struct ScalarBlocks {
    pub n: usize,
    pub stiffness: Vec<(usize, usize, f64)>,
    pub mass: Vec<(usize, usize, f64)>,
    /// ∮ κ φ_i φ_j ds over the boundary, exact curvature, 3-point Gauss.
    pub kappa_boundary: Vec<(usize, usize, f64)>,
    /// Hermitized ∮ i φ_i ∂ₛφ_j ds: per edge ±i/2 between its endpoints.
    pub tangential: Vec<(usize, usize, Complex64)>,
    /// ∫ φ_p (−i∂₁ − ∂₂) φ_q dx, the block mapping u₂ into component 1.
    pub first_order_y: Vec<(usize, usize, Complex64)>,
    /// ∫ φ_p (−i∂₁ + ∂₂) φ_q dx, the block mapping u₁ into component 2.
    pub first_order_x: Vec<(usize, usize, Complex64)>,
}

/// Gradient coefficients of the three P1 hat functions on triangle `tri`:
/// ∇φ_i = (b_i, c_i)/(2A), returned as (b, c, area).
pub(crate) fn tri_coeffs(mesh: &Mesh, tri: &[usize; 3]) -> ([f64; 3], [f64; 3], f64) {
    let p: Vec<[f64; 2]> = tri.iter().map(|&v| mesh.vertices[v]).collect();
    let area2 =
        (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
    let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
    (b, c, 0.5 * area2)
}

pub(crate) fn scalar_blocks(mesh: &Mesh) -> ScalarBlocks {
    let n = mesh.n_vertices();
    let mut stiffness = Vec::with_capacity(9 * mesh.triangles.len());
    let mut mass = Vec::with_capacity(9 * mesh.triangles.len());
    let mut first_order_y = Vec::with_capacity(9 * mesh.triangles.len());
    let mut first_order_x = Vec::with_capacity(9 * mesh.triangles.len());

    for tri in &mesh.triangles {
        let p: Vec<[f64; 2]> = tri.iter().map(|&v| mesh.vertices[v]).collect();
        let area2 =
            (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let area = 0.5 * area2;
        // gradient coefficients: ∇φ_i = (b_i, c_i) / (2A)
        let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
        let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
        for i in 0..3 {
            for j in 0..3 {
                let gi = tri[i];
                let gj = tri[j];
                stiffness.push((gi, gj, (b[i] * b[j] + c[i] * c[j]) / (2.0 * area2)));
                let mij = if i == j { area / 6.0 } else { area / 12.0 };
                mass.push((gi, gj, mij));
                // ∫ φ_i (w·∇φ_j) = (A/3)(w·∇φ_j) = (w·(b_j, c_j))/6
                first_order_y.push((gi, gj, Complex64::new(-c[j] / 6.0, -b[j] / 6.0)));
                first_order_x.push((gi, gj, Complex64::new(c[j] / 6.0, -b[j] / 6.0)));
            }
        }
    }

    let mut kappa_boundary = Vec::with_capacity(4 * mesh.boundary_edges.len());
    let mut tangential = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for edge in &mesh.boundary_edges {
        let ga = mesh.boundary_vertices[edge.a].vertex;
        let gb = mesh.boundary_vertices[edge.b].vertex;
        let mut e = [[0.0f64; 2]; 2];
        for g in &edge.gauss {
            let phi = [1.0 - g.xi, g.xi];
            for i in 0..2 {
                for j in 0..2 {
                    e[i][j] += g.weight * g.curvature * phi[i] * phi[j];
                }
            }
        }
        kappa_boundary.push((ga, ga, e[0][0]));
        kappa_boundary.push((ga, gb, e[0][1]));
        kappa_boundary.push((gb, ga, e[1][0]));
        kappa_boundary.push((gb, gb, e[1][1]));
        // ½(Q + Q*) of Q_pq = i∫φ_p ∂ₛφ_q collapses to ±i/2, independent of
        // edge length, because ∫φ_a ∂ₛφ_b = −∫φ_a ∂ₛφ_a = ½ on any segment
        tangential.push((ga, gb, Complex64::new(0.0, 0.5)));
        tangential.push((gb, ga, Complex64::new(0.0, -0.5)));
    }

    ScalarBlocks {
        n,
        stiffness,
        mass,
        kappa_boundary,
        tangential,
        first_order_y,
        first_order_x,
    }
}

/// The reduced-DOF layout for the nodal constraint u₂ = β t u₁: interior
/// vertices keep two complex DOFs, boundary vertices one.
pub(crate) struct Reduction {
    pub n_reduced: usize,
    /// Per vertex, the reduced index of (u₁-like, u₂-like); equal for
    /// boundary vertices.
    pub index: Vec<[usize; 2]>,
}

pub(crate) fn reduction_layout(mesh: &Mesh) -> Reduction {
    let n = mesh.n_vertices();
    let mut index = vec![[usize::MAX; 2]; n];
    let mut next = 0usize;
    for v in 0..n {
        if mesh.boundary_index[v].is_some() {
            index[v] = [next, next];
            next += 1;
        } else {
            index[v] = [next, next + 1];
            next += 2;
        }
    }
    Reduction {
        n_reduced: next,
        index,
    }
}

fn constraint_map(mesh: &Mesh, fam: &BoundaryFamily, layout: &Reduction) -> Csr {
    let n = mesh.n_vertices();
    let beta = Complex64::new(fam.beta(), 0.0);
    let mut t = Triplets::new(2 * n, layout.n_reduced);
    for v in 0..n {
        if let Some(bi) = mesh.boundary_index[v] {
            let tangent = mesh.boundary_vertices[bi].tangent;
            t.push(v, layout.index[v][0], Complex64::ONE);
            t.push(n + v, layout.index[v][0], beta * tangent);
        } else {
            t.push(v, layout.index[v][0], Complex64::ONE);
            t.push(n + v, layout.index[v][1], Complex64::ONE);
        }
    }
    t.to_csr()
}

fn reduce(full: &Csr, r: &Csr) -> Csr {
    r.adjoint().matmul(&full.matmul(r)).hermitianize()
}

fn mass_full(blocks: &ScalarBlocks) -> Csr {
    let n = blocks.n;
    let mut t = Triplets::new(2 * n, 2 * n);
    for &(i, j, v) in &blocks.mass {
        t.push(i, j, Complex64::new(v, 0.0));
        t.push(n + i, n + j, Complex64::new(v, 0.0));
    }
    t.to_csr().hermitianize()
}

fn meta_for(mesh: &Mesh, fam: &BoundaryFamily, form: FormKind, n_reduced: usize) -> ProblemMeta {
    ProblemMeta {
        domain: mesh.curve.label(),
        form,
        h: mesh.h,
        eta: fam.eta(),
        beta: fam.beta(),
        n_vertices: mesh.n_vertices(),
        n_boundary: mesh.n_boundary(),
        n_reduced,
    }
}

/// Assemble the squared-form pencil (S, M) with the nodal constraint map R.
///
/// S discretizes q_η(u,v) = (∇u,∇v) + ∮[β²κ u₁*v₁ + i(1−β²) u₁*∂ₛv₁] ds on
/// the constrained space, via S = R*(S_full)R; Hermiticity is exact.
pub fn assemble(mesh: &Mesh, fam: &BoundaryFamily) -> Result<AssembledProblem, FemError> {
    mesh.validate()?;
    let blocks = scalar_blocks(mesh);
    let n = blocks.n;
    let beta = fam.beta();
    let beta_sq = beta * beta;
    let tangential_coeff = 1.0 - beta_sq;

    let mut t = Triplets::new(2 * n, 2 * n);
    for &(i, j, v) in &blocks.stiffness {
        t.push(i, j, Complex64::new(v, 0.0));
        t.push(n + i, n + j, Complex64::new(v, 0.0));
    }
    for &(i, j, v) in &blocks.kappa_boundary {
        t.push(i, j, Complex64::new(beta_sq * v, 0.0));
    }
    for &(i, j, v) in &blocks.tangential {
        t.push(i, j, v * tangential_coeff);
    }
    let s_full = t.to_csr().hermitianize();

    let layout = reduction_layout(mesh);
    let r = constraint_map(mesh, fam, &layout);
    let s = reduce(&s_full, &r);
    let m = reduce(&mass_full(&blocks), &r);
    let meta = meta_for(mesh, fam, FormKind::Squared, layout.n_reduced);
    Ok(AssembledProblem { s, m, r, meta })
}

/// Assemble the symmetrized first-order pencil (K, M) on the same constrained
/// space. Experimental: signed spectra from this path must be cross-filtered
/// against the squared form before use.
pub fn assemble_first_order(
    mesh: &Mesh,
    fam: &BoundaryFamily,
) -> Result<AssembledProblem, FemError> {
    mesh.validate()?;
    let blocks = scalar_blocks(mesh);
    let n = blocks.n;

    let mut t = Triplets::new(2 * n, 2 * n);
    for &(i, j, v) in &blocks.first_order_y {
        t.push(i, n + j, v);
    }
    for &(i, j, v) in &blocks.first_order_x {
        t.push(n + i, j, v);
    }
    let k_full = t.to_csr().hermitianize();

    let layout = reduction_layout(mesh);
    let r = constraint_map(mesh, fam, &layout);
    let s = reduce(&k_full, &r);
    let m = reduce(&mass_full(&blocks), &r);
    let meta = meta_for(mesh, fam, FormKind::FirstOrder, layout.n_reduced);
    Ok(AssembledProblem { s, m, r, meta })
}

/// Accept a signed eigenvalue λ from the first-order path only when λ²
/// matches some squared-form Ritz value within a relative tolerance.
pub fn cross_filter(signed: &[f64], squared_ritz: &[f64], tol: f64) -> Vec<f64> {
    signed
        .iter()
        .copied()
        .filter(|lambda| {
            let lsq = lambda * lambda;
            squared_ritz
                .iter()
                .any(|mu| (lsq - mu).abs() <= tol * mu.abs().max(1.0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{triangulate, BoundaryCurve, Harmonic};
    use crate::sparse::LdlFactor;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn disc_problem(h: f64, eta: f64) -> AssembledProblem {
        let curve = BoundaryCurve::disc(1.0).unwrap();
        let mesh = triangulate(&curve, h).unwrap();
        assemble(&mesh, &BoundaryFamily::new(eta).unwrap()).unwrap()
    }

    #[test]
    fn hermiticity_is_exact() {
        let curves = [
            BoundaryCurve::disc(1.0).unwrap(),
            BoundaryCurve::ellipse(1.5, 1.0).unwrap(),
            BoundaryCurve::fourier(
                1.0,
                vec![Harmonic {
                    n: 3,
                    a: 0.1,
                    b: 0.0,
                }],
            )
            .unwrap(),
        ];
        for curve in curves {
            let mesh = triangulate(&curve, 0.25).unwrap();
            for eta in [0.0, PI / 4.0, PI, 4.0] {
                let fam = BoundaryFamily::new(eta).unwrap();
                let p = assemble(&mesh, &fam).unwrap();
                assert_eq!(p.s.hermitian_deviation(), 0.0);
                assert_eq!(p.m.hermitian_deviation(), 0.0);
                let k = assemble_first_order(&mesh, &fam).unwrap();
                assert_eq!(k.s.hermitian_deviation(), 0.0);
            }
        }
    }

    #[test]
    fn reduced_dimension_counts() {
        let p = disc_problem(0.2, 0.0);
        let expected = 2 * (p.meta.n_vertices - p.meta.n_boundary) + p.meta.n_boundary;
        assert_eq!(p.meta.n_reduced, expected);
        assert_eq!(p.s.rows, expected);
        assert_eq!(p.m.rows, expected);
        assert_eq!(p.r.rows, 2 * p.meta.n_vertices);
        assert_eq!(p.r.cols, expected);
    }

    #[test]
    fn mass_is_positive_definite() {
        let p = disc_problem(0.2, PI / 4.0);
        let f = LdlFactor::new(&p.m, 1e-13).unwrap();
        assert_eq!(f.negative_pivots(), 0);
    }

    #[test]
    fn squared_form_definite_on_convex_domains_at_unit_beta() {
        for curve in [
            BoundaryCurve::disc(1.0).unwrap(),
            BoundaryCurve::ellipse(1.5, 1.0).unwrap(),
        ] {
            let mesh = triangulate(&curve, 0.2).unwrap();
            for eta in [0.0, PI] {
                let p = assemble(&mesh, &BoundaryFamily::new(eta).unwrap()).unwrap();
                let f = LdlFactor::new(&p.s, 1e-14).unwrap();
                assert_eq!(f.negative_pivots(), 0, "eta = {eta}");
            }
        }
    }

    /// The ±1 sign per reduced DOF realizing the σ₃ conjugation that maps the
    /// η = 0 problem onto the η = π problem: interior u₂ DOFs flip.
    fn sigma3_signs(mesh: &crate::geometry::Mesh) -> Vec<f64> {
        let layout = reduction_layout(mesh);
        let mut signs = vec![1.0; layout.n_reduced];
        for v in 0..mesh.n_vertices() {
            if mesh.boundary_index[v].is_none() {
                signs[layout.index[v][1]] = -1.0;
            }
        }
        signs
    }

    #[test]
    fn eta_pi_is_a_sign_conjugation_of_eta_zero() {
        // β(0) = 1 and β(π) = −1 exactly, so R_π = σ₃ R₀ D with D = ±1
        // diagonal, and σ₃ commutes with the β² = 1 full form; the reduced
        // pencils are then related by the exact sign flips of D
        let mesh = triangulate(&BoundaryCurve::disc(1.0).unwrap(), 0.25).unwrap();
        let p0 = assemble(&mesh, &BoundaryFamily::new(0.0).unwrap()).unwrap();
        let ppi = assemble(&mesh, &BoundaryFamily::new(PI).unwrap()).unwrap();
        let signs = sigma3_signs(&mesh);
        assert_eq!(p0.s.col_idx, ppi.s.col_idx);
        for (slot, (a, b)) in p0.s.values.iter().zip(&ppi.s.values).enumerate() {
            let row = p0.s.row_ptr.partition_point(|&p| p <= slot) - 1;
            let col = p0.s.col_idx[slot];
            let conjugated = signs[row] * signs[col] * a;
            assert_eq!(conjugated, *b, "slot ({row},{col})");
        }
        for (slot, (a, b)) in p0.m.values.iter().zip(&ppi.m.values).enumerate() {
            let row = p0.m.row_ptr.partition_point(|&p| p <= slot) - 1;
            let col = p0.m.col_idx[slot];
            assert_eq!(signs[row] * signs[col] * a, *b);
        }
    }

    #[test]
    fn complex_entries_only_touch_boundary_dofs() {
        // away from the boundary the form is pure stiffness and mass, which
        // are real; every imaginary part must involve a boundary DOF, where
        // the tangent phases of R and the tangential term live
        let mesh = triangulate(&BoundaryCurve::disc(1.0).unwrap(), 0.25).unwrap();
        let layout = reduction_layout(&mesh);
        let mut is_boundary_dof = vec![false; layout.n_reduced];
        for v in 0..mesh.n_vertices() {
            if mesh.boundary_index[v].is_some() {
                is_boundary_dof[layout.index[v][0]] = true;
            }
        }
        for eta in [0.0, PI / 4.0, PI] {
            let p = assemble(&mesh, &BoundaryFamily::new(eta).unwrap()).unwrap();
            for row in 0..p.s.rows {
                for (col, v) in p.s.row(row) {
                    if v.im != 0.0 {
                        assert!(
                            is_boundary_dof[row] || is_boundary_dof[col],
                            "imaginary entry at interior pair ({row},{col})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn interior_interior_entries_are_eta_independent() {
        // η enters only through β²κ, the tangential term, and R's boundary
        // phases; entries coupling two interior DOFs never see any of those
        let mesh = triangulate(&BoundaryCurve::disc(1.0).unwrap(), 0.25).unwrap();
        let p0 = assemble(&mesh, &BoundaryFamily::new(0.0).unwrap()).unwrap();
        let p1 = assemble(&mesh, &BoundaryFamily::new(PI / 4.0).unwrap()).unwrap();
        let layout = reduction_layout(&mesh);
        let mut interior = vec![false; layout.n_reduced];
        for v in 0..mesh.n_vertices() {
            if mesh.boundary_index[v].is_none() {
                interior[layout.index[v][0]] = true;
                interior[layout.index[v][1]] = true;
            }
        }
        for row in 0..p0.s.rows {
            if !interior[row] {
                continue;
            }
            let row0: Vec<_> = p0.s.row(row).filter(|(c, _)| interior[*c]).collect();
            let row1: Vec<_> = p1.s.row(row).filter(|(c, _)| interior[*c]).collect();
            assert_eq!(row0, row1);
        }
    }

    #[test]
    fn power_of_two_scaling_is_bitwise() {
        let mesh = triangulate(&BoundaryCurve::disc(1.0).unwrap(), 0.25).unwrap();
        let scaled = mesh.scaled(2.0);
        let fam = BoundaryFamily::new(PI / 4.0).unwrap();
        let p1 = assemble(&mesh, &fam).unwrap();
        let p2 = assemble(&scaled, &fam).unwrap();
        assert_eq!(p1.s.col_idx, p2.s.col_idx);
        for (a, b) in p1.s.values.iter().zip(&p2.s.values) {
            assert_eq!(a, b, "S must be scale-invariant");
        }
        for (a, b) in p1.m.values.iter().zip(&p2.m.values) {
            assert_eq!(4.0 * a, *b, "M must scale by r²");
        }
    }

    #[test]
    fn generic_scaling_within_roundoff() {
        let mesh = triangulate(&BoundaryCurve::ellipse(1.5, 1.0).unwrap(), 0.3).unwrap();
        let scaled = mesh.scaled(3.0);
        let fam = BoundaryFamily::new(1.0).unwrap();
        let p1 = assemble(&mesh, &fam).unwrap();
        let p2 = assemble(&scaled, &fam).unwrap();
        let scale = p1.s.max_abs();
        for (a, b) in p1.s.values.iter().zip(&p2.s.values) {
            assert!((a - b).norm() <= 1e-13 * scale);
        }
        for (a, b) in p1.m.values.iter().zip(&p2.m.values) {
            assert_relative_eq!(9.0 * a.re, b.re, max_relative = 1e-12);
        }
    }

    #[test]
    fn first_order_is_block_antidiagonal_in_components() {
        let mesh = triangulate(&BoundaryCurve::disc(1.0).unwrap(), 0.3).unwrap();
        let blocks = scalar_blocks(&mesh);
        let n = blocks.n;
        let mut t = Triplets::new(2 * n, 2 * n);
        for &(i, j, v) in &blocks.first_order_y {
            t.push(i, n + j, v);
        }
        for &(i, j, v) in &blocks.first_order_x {
            t.push(n + i, j, v);
        }
        let k_full = t.to_csr().hermitianize();
        for i in 0..n {
            for (j, _) in k_full.row(i) {
                assert!(j >= n, "component-1 row couples only to component 2");
            }
            for (j, _) in k_full.row(n + i) {
                assert!(j < n);
            }
        }
    }

    #[test]
    fn cross_filter_keeps_only_matched_values() {
        let squared = [1.0, 4.0, 9.1];
        let signed = [-3.017, -1.0, 0.5, 1.0002, 2.0];
        let kept = cross_filter(&signed, &squared, 1e-2);
        assert_eq!(kept, vec![-3.017, -1.0, 1.0002, 2.0]);
    }

    #[test]
    fn stiffness_rows_sum_to_zero() {
        // ∇(Σφ_i) = 0 elementwise, so constants annihilate the full stiffness
        let mesh = triangulate(
            &BoundaryCurve::fourier(
                1.0,
                vec![Harmonic {
                    n: 2,
                    a: 0.05,
                    b: 0.02,
                }],
            )
            .unwrap(),
            0.3,
        )
        .unwrap();
        let blocks = scalar_blocks(&mesh);
        let mut t = Triplets::new(blocks.n, blocks.n);
        for &(i, j, v) in &blocks.stiffness {
            t.push(i, j, Complex64::new(v, 0.0));
        }
        let a = t.to_csr();
        let ones = vec![Complex64::ONE; blocks.n];
        let out = a.matvec_alloc(&ones);
        let max = out.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        assert!(max < 1e-12 * a.max_abs());
    }

    #[test]
    fn mass_total_equals_mesh_area_twice() {
        let mesh = triangulate(&BoundaryCurve::disc(1.0).unwrap(), 0.2).unwrap();
        let blocks = scalar_blocks(&mesh);
        let full = mass_full(&blocks);
        let ones = vec![Complex64::ONE; full.rows];
        let m_ones = full.matvec_alloc(&ones);
        let total: Complex64 = ones.iter().zip(&m_ones).map(|(a, b)| a.conj() * b).sum();
        // two components, each integrating 1 over the mesh polygon
        assert_relative_eq!(
            total.re,
            2.0 * mesh.triangle_area_sum(),
            max_relative = 1e-12
        );
    }
}
