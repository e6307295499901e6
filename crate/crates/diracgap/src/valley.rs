//! Two-valley four-spinor problems: assembly under the valley boundary
//! conditions, the component permutation that exposes their block structure,
//! and the spectral equivalence with the two-spinor problems.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::boundary::{BoundaryError, ValleyBoundary};
use crate::eigen::{full_pencil_spectrum, EigenError};
use crate::fem::{self, AssembledProblem, FormKind};
use crate::geometry::{GeometryError, Mesh};
use crate::sparse::{Csr, SparseError, Triplets};

#[derive(Debug, Error)]
pub enum ValleyError {
    #[error("projector at vertex {vertex} is numerically rank-deficient (gram det {det:.3e})")]
    DegenerateProjector { vertex: usize, det: f64 },
    #[error("operation requires an armchair problem, got {kind}")]
    NotArmchair { kind: String },
    #[error("transformed problem missed the expected block structure by {deviation:.3e}")]
    StructureMismatch { deviation: f64 },
    #[error("companion problem mismatch: {reason}")]
    CompanionMismatch { reason: String },
    #[error("spectra differ by {deviation:.3e}, beyond the tolerance {tol:.3e}")]
    SpectrumMismatch { deviation: f64, tol: f64 },
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

#[derive(Debug, Clone, Serialize)]
pub struct FourSpinorMeta {
    pub domain: String,
    pub h: f64,
    pub kind: ValleyBoundary,
    pub n_vertices: usize,
    pub n_boundary: usize,
    pub n_reduced: usize,
}

/// First-order four-spinor pencil on the trace-constrained space. Each
/// boundary node keeps the two complex DOFs spanning the admissible trace
/// plane; interior nodes keep all four components.
pub struct FourSpinorProblem {
    pub k4: Csr,
    pub m4: Csr,
    pub r4: Csr,
    pub meta: FourSpinorMeta,
    /// per vertex: reduced indices of the four components, or
    /// [first trace DOF, second trace DOF, MAX, MAX] on the boundary
    layout: Vec<[usize; 4]>,
    /// boundary vertex ids with their tangent phases
    boundary: Vec<(usize, Complex64)>,
}

/// Assembles K4 = diag(T, T) and the four-component mass on the constrained
/// space, reducing each boundary node to the rank-2 admissible trace plane.
pub fn assemble_four_spinor(
    mesh: &Mesh,
    vb: &ValleyBoundary,
) -> Result<FourSpinorProblem, ValleyError> {
    mesh.validate()?;
    let blocks = fem::scalar_blocks(mesh);
    let n = blocks.n;

    let mut tk = Triplets::new(4 * n, 4 * n);
    for &(i, j, y) in &blocks.first_order_y {
        tk.push(i, n + j, y);
        tk.push(2 * n + i, 3 * n + j, y);
    }
    for &(i, j, x) in &blocks.first_order_x {
        tk.push(n + i, j, x);
        tk.push(3 * n + i, 2 * n + j, x);
    }
    let k_full = tk.to_csr().hermitianize();

    let mut tm = Triplets::new(4 * n, 4 * n);
    for &(i, j, m) in &blocks.mass {
        for comp in 0..4 {
            tm.push(comp * n + i, comp * n + j, Complex64::new(m, 0.0));
        }
    }
    let m_full = tm.to_csr().hermitianize();

    let mut layout = vec![[usize::MAX; 4]; n];
    let mut next = 0usize;
    for v in 0..n {
        if mesh.boundary_index[v].is_some() {
            layout[v] = [next, next + 1, usize::MAX, usize::MAX];
            next += 2;
        } else {
            layout[v] = [next, next + 1, next + 2, next + 3];
            next += 4;
        }
    }
    let n_reduced = next;

    let mut boundary = Vec::with_capacity(mesh.n_boundary());
    let mut tr = Triplets::new(4 * n, n_reduced);
    for v in 0..n {
        match mesh.boundary_index[v] {
            Some(bi) => {
                let tangent = mesh.boundary_vertices[bi].tangent;
                boundary.push((v, tangent));
                let cols = vb.trace_columns(tangent)?;
                let g11: f64 = cols[0].iter().map(|z| z.norm_sqr()).sum();
                let g22: f64 = cols[1].iter().map(|z| z.norm_sqr()).sum();
                let g12: Complex64 = cols[0]
                    .iter()
                    .zip(&cols[1])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let det = g11 * g22 - g12.norm_sqr();
                if det < 1e-8 {
                    return Err(ValleyError::DegenerateProjector { vertex: v, det });
                }
                for comp in 0..4 {
                    tr.push(comp * n + v, layout[v][0], cols[0][comp]);
                    tr.push(comp * n + v, layout[v][1], cols[1][comp]);
                }
            }
            None => {
                for comp in 0..4 {
                    tr.push(comp * n + v, layout[v][comp], Complex64::ONE);
                }
            }
        }
    }
    let r4 = tr.to_csr();

    let k4 = r4.adjoint().matmul(&k_full.matmul(&r4)).hermitianize();
    let m4 = r4.adjoint().matmul(&m_full.matmul(&r4)).hermitianize();

    Ok(FourSpinorProblem {
        k4,
        m4,
        r4,
        meta: FourSpinorMeta {
            domain: mesh.curve.label(),
            h: mesh.h,
            kind: *vb,
            n_vertices: n,
            n_boundary: mesh.n_boundary(),
            n_reduced,
        },
        layout,
        boundary,
    })
}

/// Relabeling of the reduced four-spinor DOFs into two two-spinor blocks,
/// with a unit phase tag that strips the armchair valley phase.
struct Relabel {
    /// target block (0 or 1) per reduced DOF
    block: Vec<u8>,
    /// index inside the block, following the two-spinor reduced layout
    slot: Vec<usize>,
    /// 0: phase 1, 1: phase nu; net entry phase is conj(phase_i) phase_j
    tag: Vec<u8>,
    n2: usize,
}

/// Component routing per kind: (block, two-spinor component slot, tag) for
/// each original interior component, plus tags for the two boundary DOFs.
fn relabel(prob: &FourSpinorProblem) -> Relabel {
    let (comp_map, boundary_tags): ([(u8, usize, u8); 4], [u8; 2]) = match prob.meta.kind {
        ValleyBoundary::Armchair { .. } => (
            // the valley swap sends components (0, 3) to the first block and
            // (2, 1) to the second, both in (u1, u2) order
            [(0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)],
            [0, 1],
        ),
        _ => ([(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 0)], [0, 0]),
    };

    let nr = prob.meta.n_reduced;
    let mut block = vec![0u8; nr];
    let mut slot = vec![0usize; nr];
    let mut tag = vec![0u8; nr];
    let mut next = [0usize; 2];
    for v in 0..prob.meta.n_vertices {
        let l = prob.layout[v];
        if l[2] == usize::MAX {
            for side in 0..2 {
                block[l[side]] = side as u8;
                slot[l[side]] = next[side];
                tag[l[side]] = boundary_tags[side];
                next[side] += 1;
            }
        } else {
            for comp in 0..4 {
                let (b, s, t) = comp_map[comp];
                block[l[comp]] = b;
                slot[l[comp]] = next[b as usize] + s;
                tag[l[comp]] = t;
            }
            next[0] += 2;
            next[1] += 2;
        }
    }
    debug_assert_eq!(next[0], next[1]);
    Relabel {
        block,
        slot,
        tag,
        n2: next[0],
    }
}

/// The four two-spinor-sized blocks of a relabeled matrix.
struct Routed {
    blocks: [[Csr; 2]; 2],
}

fn route(matrix: &Csr, rl: &Relabel, nu: Complex64) -> Routed {
    let mut t = [
        [Triplets::new(rl.n2, rl.n2), Triplets::new(rl.n2, rl.n2)],
        [Triplets::new(rl.n2, rl.n2), Triplets::new(rl.n2, rl.n2)],
    ];
    for i in 0..matrix.rows {
        for (j, v) in matrix.row(i) {
            let value = match (rl.tag[i], rl.tag[j]) {
                (0, 1) => v * nu,
                (1, 0) => v * nu.conj(),
                _ => v,
            };
            t[rl.block[i] as usize][rl.block[j] as usize].push(rl.slot[i], rl.slot[j], value);
        }
    }
    let [[aa, ab], [ba, bb]] = t;
    Routed {
        blocks: [[aa.to_csr(), ab.to_csr()], [ba.to_csr(), bb.to_csr()]],
    }
}

/// K4 after the valley swap and phase rotation: exactly anti-block-diagonal,
/// both off blocks carrying the same two-spinor first-order matrix.
pub struct ArmchairBlockForm {
    pub upper: Csr,
    pub lower: Csr,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArmchairStructureReport {
    pub nu_phase: f64,
    /// entries surviving in the diagonal blocks (structurally zero)
    pub diagonal_nnz: usize,
    pub diagonal_max: f64,
    /// max |upper* - lower|
    pub off_adjoint_deviation: f64,
    /// max deviation of the rotated boundary matrix from diag(sigma t, sigma t)
    pub boundary_matrix_deviation: f64,
}

const STRUCTURE_GATE: f64 = 1e-12;

/// Applies the discrete valley swap (second and fourth components) plus the
/// phase rotation that removes nu, and verifies the anti-block-diagonal
/// structure and the per-node boundary matrix.
pub fn permute_armchair(
    prob: &FourSpinorProblem,
) -> Result<(ArmchairBlockForm, ArmchairStructureReport), ValleyError> {
    let ValleyBoundary::Armchair { nu_phase } = prob.meta.kind else {
        return Err(ValleyError::NotArmchair {
            kind: format!("{:?}", prob.meta.kind),
        });
    };
    let nu = prob.meta.kind.nu();
    let rl = relabel(prob);
    let routed = route(&prob.k4, &rl, nu);
    let [[aa, ab], [ba, bb]] = routed.blocks;

    let diagonal_nnz = aa.nnz() + bb.nnz();
    let diagonal_max = aa.max_abs().max(bb.max_abs());
    let off_adjoint_deviation = ab.adjoint().add_scaled(&ba, -Complex64::ONE).max_abs();

    // per-node check: U A U* = diag(sigma t, sigma t) for the unitary that
    // swaps the valleys and rotates away nu
    let mut u = nalgebra::Matrix4::<Complex64>::zeros();
    u[(0, 0)] = Complex64::ONE;
    u[(1, 3)] = nu.conj();
    u[(2, 2)] = nu.conj();
    u[(3, 1)] = Complex64::ONE;
    let mut boundary_matrix_deviation = 0.0f64;
    for &(_, tangent) in &prob.boundary {
        let rotated = u * prob.meta.kind.matrix(tangent) * u.adjoint();
        let mut target = nalgebra::Matrix4::<Complex64>::zeros();
        target[(0, 1)] = tangent.conj();
        target[(1, 0)] = tangent;
        target[(2, 3)] = tangent.conj();
        target[(3, 2)] = tangent;
        let dev = (rotated - target)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        boundary_matrix_deviation = boundary_matrix_deviation.max(dev);
    }

    let report = ArmchairStructureReport {
        nu_phase,
        diagonal_nnz,
        diagonal_max,
        off_adjoint_deviation,
        boundary_matrix_deviation,
    };
    let worst = diagonal_max
        .max(off_adjoint_deviation)
        .max(boundary_matrix_deviation);
    if diagonal_nnz != 0 || worst > STRUCTURE_GATE {
        return Err(ValleyError::StructureMismatch { deviation: worst });
    }
    Ok((
        ArmchairBlockForm {
            upper: ab,
            lower: ba,
        },
        report,
    ))
}

/// The infinite-mass problem relabeled into its two decoupled two-spinor
/// halves, one per valley.
pub struct InfiniteMassSplit {
    pub k_first: Csr,
    pub m_first: Csr,
    pub k_second: Csr,
    pub m_second: Csr,
    pub off_diagonal_nnz: usize,
}

/// Splits the infinite-mass four-spinor problem into the two valley blocks.
/// The first block carries the unit-beta condition, the second its sign
/// opposite, so the four-spinor spectrum is exactly the union of the two.
pub fn split_infinite_mass(prob: &FourSpinorProblem) -> Result<InfiniteMassSplit, ValleyError> {
    if prob.meta.kind != ValleyBoundary::InfiniteMass {
        return Err(ValleyError::NotArmchair {
            kind: format!("{:?}", prob.meta.kind),
        });
    }
    let rl = relabel(prob);
    let k = route(&prob.k4, &rl, Complex64::ONE);
    let m = route(&prob.m4, &rl, Complex64::ONE);
    let [[kaa, kab], [kba, kbb]] = k.blocks;
    let [[maa, mab], [mba, mbb]] = m.blocks;
    let off_diagonal_nnz = kab.nnz() + kba.nnz() + mab.nnz() + mba.nnz();
    if off_diagonal_nnz != 0 {
        return Err(ValleyError::StructureMismatch {
            deviation: kab
                .max_abs()
                .max(kba.max_abs())
                .max(mab.max_abs())
                .max(mba.max_abs()),
        });
    }
    Ok(InfiniteMassSplit {
        k_first: kaa,
        m_first: maa,
        k_second: kbb,
        m_second: mbb,
        off_diagonal_nnz,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub structure: ArmchairStructureReport,
    /// max |upper block - two-spinor K|
    pub k_block_deviation: f64,
    /// max deviation of the two mass diagonal blocks from the two-spinor mass
    pub m_block_deviation: f64,
    /// entries surviving in the off-diagonal mass blocks (structurally zero)
    pub m_off_diagonal_nnz: usize,
    /// max |sorted four-spinor spectrum - sorted (+/-) two-spinor spectrum|
    pub spectrum_deviation: f64,
    /// max |lambda_k + lambda_(rev k)| over the four-spinor spectrum
    pub negation_symmetry: f64,
    pub gap_four_spinor: f64,
    pub gap_two_spinor: f64,
}

/// Verifies spec(K4, M4) = {+/- lambda : lambda in spec(K, M)} for an armchair
/// problem against the eta = 0 first-order problem on the same mesh, both
/// structurally (block extraction) and spectrally (dense eigensolve).
pub fn spectral_equivalence_check(
    prob: &FourSpinorProblem,
    two_spinor: &AssembledProblem,
    tol: f64,
) -> Result<EquivalenceReport, ValleyError> {
    if !matches!(prob.meta.kind, ValleyBoundary::Armchair { .. }) {
        return Err(ValleyError::NotArmchair {
            kind: format!("{:?}", prob.meta.kind),
        });
    }
    if two_spinor.meta.form != FormKind::FirstOrder {
        return Err(ValleyError::CompanionMismatch {
            reason: "companion must be the first-order form".into(),
        });
    }
    if (two_spinor.meta.beta - 1.0).abs() > 1e-12 {
        return Err(ValleyError::CompanionMismatch {
            reason: format!("companion must have beta = 1, got {}", two_spinor.meta.beta),
        });
    }
    if two_spinor.meta.n_vertices != prob.meta.n_vertices
        || two_spinor.meta.n_boundary != prob.meta.n_boundary
    {
        return Err(ValleyError::CompanionMismatch {
            reason: "different mesh".into(),
        });
    }

    let (blocks, structure) = permute_armchair(prob)?;
    let k_block_deviation = blocks
        .upper
        .add_scaled(&two_spinor.s, -Complex64::ONE)
        .max_abs()
        .max(
            blocks
                .lower
                .add_scaled(&two_spinor.s, -Complex64::ONE)
                .max_abs(),
        );

    let rl = relabel(prob);
    let routed_m = route(&prob.m4, &rl, prob.meta.kind.nu());
    let [[maa, mab], [mba, mbb]] = routed_m.blocks;
    let m_off_diagonal_nnz = mab.nnz() + mba.nnz();
    let m_block_deviation = maa
        .add_scaled(&two_spinor.m, -Complex64::ONE)
        .max_abs()
        .max(mbb.add_scaled(&two_spinor.m, -Complex64::ONE).max_abs());

    let four = full_pencil_spectrum(&prob.k4, &prob.m4)?;
    let two = full_pencil_spectrum(&two_spinor.s, &two_spinor.m)?;
    let mut expected: Vec<f64> = two.iter().flat_map(|&l| [l, -l]).collect();
    expected.sort_by(f64::total_cmp);
    let spectrum_deviation = four
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let negation_symmetry = four
        .iter()
        .zip(four.iter().rev())
        .map(|(a, b)| (a + b).abs())
        .fold(0.0f64, f64::max);
    let gap_four_spinor = four.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
    let gap_two_spinor = two.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);

    let report = EquivalenceReport {
        structure,
        k_block_deviation,
        m_block_deviation,
        m_off_diagonal_nnz,
        spectrum_deviation,
        negation_symmetry,
        gap_four_spinor,
        gap_two_spinor,
    };
    let worst = spectrum_deviation
        .max(negation_symmetry)
        .max(k_block_deviation)
        .max(m_block_deviation);
    if m_off_diagonal_nnz != 0 || worst > tol {
        return Err(ValleyError::SpectrumMismatch {
            deviation: worst,
            tol,
        });
    }
    Ok(report)
}
