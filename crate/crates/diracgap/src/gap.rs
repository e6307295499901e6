//! The area-scaled spectral gap bound and the checkable ingredients behind it:
//! the one-component decomposition identity, the auxiliary Neumann problem,
//! and the weighted ground-state inequality.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::boundary::BoundaryFamily;
use crate::eigen::EigenResult;
use crate::fem::{self, AssembledProblem};
use crate::geometry::{GeometryError, Mesh};
use crate::quadrature::TRI7;
use crate::sparse::{LdlFactor, SparseError, Triplets};

/// hbar times the Fermi velocity of graphene, in eV nm.
pub const HBAR_VFERMI_EV_NM: f64 = 0.6582;

/// Nodal boundary-condition residuals above this (relative to the field
/// magnitude) disqualify a spinor from the decomposition identity.
const BC_GATE: f64 = 1e-10;

/// Mismatch allowed between the exact boundary data and its quadrature before
/// the Neumann problem is declared unsolvable.
const COMPATIBILITY_GATE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum GapError {
    #[error("domain area must be positive and finite, got {area}")]
    BadArea { area: f64 },
    #[error("no computed eigenvalues to compare against the bound")]
    EmptyResult,
    #[error("spinor field has {len} entries, expected {expected}")]
    FieldLength { len: usize, expected: usize },
    #[error("boundary condition violated at vertex {vertex}: residual {residual:.3e}")]
    BcViolation { vertex: usize, residual: f64 },
    #[error("Neumann data incompatible: residual {residual:.3e} exceeds {COMPATIBILITY_GATE:.0e}")]
    NeumannIncompatible { residual: f64 },
    #[error("the weighted inequality needs |beta| = 1 (eta 0 or pi), got eta = {eta}")]
    WrongEta { eta: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

/// Lower bound sqrt(2 pi / area) * B for the first eigenvalue magnitude.
pub fn gap_lower_bound(area: f64, fam: &BoundaryFamily) -> Result<f64, GapError> {
    if !(area > 0.0 && area.is_finite()) {
        return Err(GapError::BadArea { area });
    }
    Ok((2.0 * PI / area).sqrt() * fam.b_factor())
}

/// Gap in eV for a graphene flake of the given area in nm^2 under the optimal
/// (infinite-mass) boundary condition.
pub fn physical_gap(area_nm2: f64) -> Result<f64, GapError> {
    if !(area_nm2 > 0.0 && area_nm2.is_finite()) {
        return Err(GapError::BadArea { area: area_nm2 });
    }
    Ok(2.0 * (2.0 * PI).sqrt() * HBAR_VFERMI_EV_NM / area_nm2.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Power-law fit v(h) = v* + C h^p through the last three refinement levels.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RichardsonFit {
    pub estimate: f64,
    pub order: f64,
}

/// Eliminates the leading error term from a refinement sequence, allowing a
/// general (not necessarily factor-2) ratio between consecutive mesh sizes.
/// Returns None for fewer than three levels or when no order in [0.3, 6]
/// explains the differences (non-monotone or stalled convergence).
pub fn richardson_extrapolate(hs: &[f64], values: &[f64]) -> Option<RichardsonFit> {
    let n = hs.len();
    if n < 3 || values.len() != n {
        return None;
    }
    let (h1, h2, h3) = (hs[n - 3], hs[n - 2], hs[n - 1]);
    if !(h1 > h2 && h2 > h3 && h3 > 0.0) {
        return None;
    }
    let (v1, v2, v3) = (values[n - 3], values[n - 2], values[n - 1]);
    let d12 = v1 - v2;
    let d23 = v2 - v3;
    if d23 == 0.0 || d12 / d23 <= 0.0 {
        return None;
    }
    let target = d12 / d23;
    // (h1^p - h2^p)/(h2^p - h3^p) grows monotonically in p, so bisect
    let gap_ratio = |p: f64| (h1.powf(p) - h2.powf(p)) / (h2.powf(p) - h3.powf(p));
    let (mut lo, mut hi) = (0.3, 6.0);
    if gap_ratio(lo) > target || gap_ratio(hi) < target {
        return None;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if gap_ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let order = 0.5 * (lo + hi);
    let c = d23 / (h2.powf(order) - h3.powf(order));
    Some(RichardsonFit {
        estimate: v3 - c * h3.powf(order),
        order,
    })
}

/// Outcome of comparing a computed spectrum against the area-scaled bound.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub area: f64,
    pub eta: f64,
    pub b_factor: f64,
    /// sqrt(2 pi / area) * B
    pub bound: f64,
    /// smallest computed |lambda|
    pub gap: f64,
    /// gap - bound
    pub margin: f64,
    /// discretization allowance subtracted from the bound before judging
    pub budget: f64,
    pub verdict: Verdict,
}

/// Compares the smallest computed eigenvalue magnitude against the bound.
/// The verdict is `Pass` iff gap >= bound - budget.
pub fn check_gap(
    res: &EigenResult,
    area: f64,
    fam: &BoundaryFamily,
    budget: f64,
) -> Result<GapReport, GapError> {
    let bound = gap_lower_bound(area, fam)?;
    let gap = *res.gaps.first().ok_or(GapError::EmptyResult)?;
    let verdict = if gap >= bound - budget {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(GapReport {
        area,
        eta: fam.eta(),
        b_factor: fam.b_factor(),
        bound,
        gap,
        margin: gap - bound,
        budget,
        verdict,
    })
}

/// Both sides of the decomposition identity evaluated on one nodal spinor.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaIdentityReport {
    pub eta: f64,
    pub b_factor: f64,
    /// diagonal factors defining v, so v = (scale[0] u1, scale[1] u2)
    pub v_scale: [f64; 2],
    /// ||T w||^2 + 2 Re <T v, T w>
    pub lhs: f64,
    /// (1 - B^2) times the squared norm of the surviving first-order piece
    pub rhs: f64,
    /// |lhs - rhs| relative to the magnitude of the terms entering lhs
    pub rel_error: f64,
    pub cross_term: Complex64,
    pub w_norm_sq: f64,
}

/// The splitting u = v + w together with the identity report.
#[derive(Debug, Clone)]
pub struct LemmaDecomposition {
    pub v: Vec<Complex64>,
    pub w: Vec<Complex64>,
    pub report: LemmaIdentityReport,
}

/// Applies T = sigma . (-i grad) to a P1 spinor on one triangle, given the
/// per-vertex values and the gradient coefficients.
fn t_on_triangle(
    vals1: [Complex64; 3],
    vals2: [Complex64; 3],
    b: [f64; 3],
    c: [f64; 3],
    area: f64,
) -> [Complex64; 2] {
    let mut d1u1 = Complex64::ZERO;
    let mut d2u1 = Complex64::ZERO;
    let mut d1u2 = Complex64::ZERO;
    let mut d2u2 = Complex64::ZERO;
    for k in 0..3 {
        let g = Complex64::new(b[k] / (2.0 * area), c[k] / (2.0 * area));
        d1u1 += vals1[k] * g.re;
        d2u1 += vals1[k] * g.im;
        d1u2 += vals2[k] * g.re;
        d2u2 += vals2[k] * g.im;
    }
    let i = Complex64::i();
    [-i * d1u2 - d2u2, -i * d1u1 + d2u1]
}

/// Splits u into v + w where v satisfies the |beta| = 1 condition and w has a
/// single nonzero component, then evaluates the identity
/// ||T w||^2 + 2 Re <T v, T w> = (1 - B^2) ||first-order piece||^2
/// discretely on the mesh.
///
/// The field u must hold 2 n nodal values (component 1 then component 2) and
/// satisfy u2 = beta t u1 at every boundary vertex.
pub fn lemma_decompose(
    mesh: &Mesh,
    fam: &BoundaryFamily,
    u: &[Complex64],
) -> Result<LemmaDecomposition, GapError> {
    let n = mesh.n_vertices();
    if u.len() != 2 * n {
        return Err(GapError::FieldLength {
            len: u.len(),
            expected: 2 * n,
        });
    }
    let beta = fam.beta();
    let b_factor = fam.b_factor();

    let scale_u = u.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    for bv in &mesh.boundary_vertices {
        let v = bv.vertex;
        let residual = (u[n + v] - beta * bv.tangent * u[v]).norm();
        if residual > BC_GATE * scale_u {
            return Err(GapError::BcViolation {
                vertex: v,
                residual,
            });
        }
    }

    // |beta| <= 1: rescale component 1 so v satisfies the eta = 0 condition
    // and w lives in component 1. |beta| > 1: rescale component 2 so v
    // satisfies the eta = pi condition and w lives in component 2.
    let upper = beta.abs() <= 1.0;
    let v_scale = if upper {
        [beta, 1.0]
    } else {
        [1.0, -1.0 / beta]
    };

    let mut v = u.to_vec();
    let mut w = vec![Complex64::ZERO; 2 * n];
    for k in 0..n {
        v[k] = u[k] * v_scale[0];
        v[n + k] = u[n + k] * v_scale[1];
        w[k] = u[k] - v[k];
        w[n + k] = u[n + k] - v[n + k];
    }

    let mut tw_norm_sq = 0.0;
    let mut cross = Complex64::ZERO;
    let mut first_order_sq = 0.0;
    let mut w_norm_sq = 0.0;
    for tri in &mesh.triangles {
        let (b, c, area) = fem::tri_coeffs(mesh, tri);
        let pick = |field: &[Complex64], comp: usize| {
            [
                field[comp * n + tri[0]],
                field[comp * n + tri[1]],
                field[comp * n + tri[2]],
            ]
        };
        let tv = t_on_triangle(pick(&v, 0), pick(&v, 1), b, c, area);
        let tw = t_on_triangle(pick(&w, 0), pick(&w, 1), b, c, area);
        let weight = area.abs();
        tw_norm_sq += weight * (tw[0].norm_sqr() + tw[1].norm_sqr());
        cross += weight * (tv[0].conj() * tw[0] + tv[1].conj() * tw[1]);
        // the piece of T u the decomposition cannot cancel: X u1 when w sits
        // in component 1, Y u2 when it sits in component 2
        let tu = t_on_triangle(pick(u, 0), pick(u, 1), b, c, area);
        let surviving = if upper { tu[1] } else { tu[0] };
        first_order_sq += weight * surviving.norm_sqr();
        let wm: f64 = (0..3)
            .map(|k| w[tri[k]].norm_sqr() + w[n + tri[k]].norm_sqr())
            .sum();
        w_norm_sq += weight * wm / 3.0;
    }

    let lhs = tw_norm_sq + 2.0 * cross.re;
    let rhs = (1.0 - b_factor * b_factor) * first_order_sq;
    let scale = tw_norm_sq + 2.0 * cross.norm() + rhs.abs();
    let rel_error = if scale > 0.0 {
        (lhs - rhs).abs() / scale
    } else {
        0.0
    };

    Ok(LemmaDecomposition {
        v,
        w,
        report: LemmaIdentityReport {
            eta: fam.eta(),
            b_factor,
            v_scale,
            lhs,
            rhs,
            rel_error,
            cross_term: cross,
            w_norm_sq,
        },
    })
}

/// Solution of the auxiliary Neumann problem: laplacian f = C in the domain,
/// normal derivative of f = -kappa/2 on the boundary, C = -pi / area.
#[derive(Debug, Clone, Serialize)]
pub struct NeumannSolution {
    pub c: f64,
    /// nodal values, gauged to zero mass-weighted mean
    pub f: Vec<f64>,
    /// relative algebraic residual of the solved linear system
    pub interior_residual: f64,
    /// |boundary integral of -kappa/2 + pi|, the solvability defect
    pub compatibility_residual: f64,
}

/// Solves the auxiliary Neumann problem on the mesh. The total-curvature
/// identity makes the data compatible for every smooth boundary; the singular
/// constant mode is fixed by the zero mass-weighted mean gauge.
pub fn solve_neumann(mesh: &Mesh) -> Result<NeumannSolution, GapError> {
    mesh.validate()?;
    let n = mesh.n_vertices();
    let area = mesh.curve.area();
    let c = -PI / area;
    let blocks = fem::scalar_blocks(mesh);

    let kappa_total: f64 = blocks.kappa_boundary.iter().map(|e| e.2).sum();
    let compatibility_residual = (-0.5 * kappa_total + PI).abs();
    if compatibility_residual > COMPATIBILITY_GATE {
        return Err(GapError::NeumannIncompatible {
            residual: compatibility_residual,
        });
    }

    // weak form: (grad f, grad phi) = -C (1, phi) - (kappa/2, phi)_boundary
    let mut load = vec![0.0f64; n];
    for &(i, _, m) in &blocks.mass {
        load[i] -= c * m;
    }
    for &(i, _, k) in &blocks.kappa_boundary {
        load[i] -= 0.5 * k;
    }
    // project the defect of the discrete data (polygon area vs curve area)
    // onto the solvable range of the singular stiffness matrix
    let mean = load.iter().sum::<f64>() / n as f64;
    for l in load.iter_mut() {
        *l -= mean;
    }

    // pin one node to make the system definite; the dropped equation is a
    // linear combination of the kept ones once the load sums to zero
    let mut t = Triplets::new(n, n);
    for &(i, j, a) in &blocks.stiffness {
        if i != 0 && j != 0 {
            t.push(i, j, Complex64::new(a, 0.0));
        }
    }
    t.push(0, 0, Complex64::ONE);
    let pinned = t.to_csr();
    let factor = LdlFactor::new(&pinned, 1e-13)?;
    let rhs: Vec<Complex64> = load
        .iter()
        .enumerate()
        .map(|(i, &l)| Complex64::new(if i == 0 { 0.0 } else { l }, 0.0))
        .collect();
    let mut f: Vec<f64> = factor.solve(&rhs).iter().map(|z| z.re).collect();

    // gauge: subtract the mass-weighted mean so sum_ij M_ij f_j = 0
    let mut weighted = 0.0;
    let mut total = 0.0;
    for &(_, j, m) in &blocks.mass {
        weighted += m * f[j];
        total += m;
    }
    let shift = weighted / total;
    for fi in f.iter_mut() {
        *fi -= shift;
    }

    let mut residual_sq = 0.0;
    let mut load_sq = 0.0;
    let mut af = vec![0.0f64; n];
    for &(i, j, a) in &blocks.stiffness {
        af[i] += a * f[j];
    }
    for i in 0..n {
        residual_sq += (af[i] - load[i]).powi(2);
        load_sq += load[i].powi(2);
    }
    let interior_residual = residual_sq.sqrt() / load_sq.sqrt().max(1e-300);

    Ok(NeumannSolution {
        c,
        f,
        interior_residual,
        compatibility_residual,
    })
}

/// One eigenpair run through the weighted ground-state inequality.
#[derive(Debug, Clone, Serialize)]
pub struct ProofPairCheck {
    pub mu: f64,
    /// W = integral of exp(-2 f) |u|^2
    pub weight: f64,
    /// (mu / 2 + C) W, nonnegative for true eigenpairs up to discretization
    pub margin: f64,
    /// recomputed relative residual ||S x - mu M x|| / ||M x||
    pub residual: f64,
    /// false when the residual gate rejects the pair
    pub eigenpair: bool,
}

/// The weighted inequality mu/2 W >= -C W evaluated pair by pair.
#[derive(Debug, Clone, Serialize)]
pub struct ProofCheckReport {
    pub c: f64,
    pub residual_gate: f64,
    pub pairs: Vec<ProofPairCheck>,
}

/// Re-derives the gap bound for one computed spectrum through the auxiliary
/// function: for |beta| = 1 the substitution u = exp(-f) (weighted spinor)
/// turns the eigenvalue equation into mu/2 W >= -C W with
/// W = integral exp(-2 f) |u|^2. Reports the margin (mu/2 + C) W per pair.
///
/// Pairs whose recomputed residual exceeds the gate are flagged instead of
/// trusted; the margin is still reported for diagnosis.
pub fn proof_inequality_check(
    mesh: &Mesh,
    prob: &AssembledProblem,
    res: &EigenResult,
    neumann: &NeumannSolution,
) -> Result<ProofCheckReport, GapError> {
    if (prob.meta.beta.abs() - 1.0).abs() > 1e-12 {
        return Err(GapError::WrongEta { eta: prob.meta.eta });
    }
    if res.eigenvalues.is_empty() {
        return Err(GapError::EmptyResult);
    }
    let n = mesh.n_vertices();
    let c = neumann.c;
    let residual_gate = (100.0 * res.tol).max(1e-8);

    let mut pairs = Vec::with_capacity(res.eigenvalues.len());
    for (idx, &mu) in res.eigenvalues.iter().enumerate() {
        let x = &res.vectors[idx];
        let sx = prob.s.matvec_alloc(x);
        let mx = prob.m.matvec_alloc(x);
        let num: f64 = sx
            .iter()
            .zip(&mx)
            .map(|(s, m)| (s - Complex64::new(mu, 0.0) * m).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let den: f64 = mx.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let residual = num / den.max(1e-300);

        let full = prob.r.matvec_alloc(x);
        let mut weight = 0.0;
        for tri in &mesh.triangles {
            let (_, _, area) = fem::tri_coeffs(mesh, tri);
            for (bary, qw) in TRI7 {
                let mut fq = 0.0;
                let mut u1 = Complex64::ZERO;
                let mut u2 = Complex64::ZERO;
                for k in 0..3 {
                    fq += bary[k] * neumann.f[tri[k]];
                    u1 += bary[k] * full[tri[k]];
                    u2 += bary[k] * full[n + tri[k]];
                }
                weight += qw * area.abs() * (-2.0 * fq).exp() * (u1.norm_sqr() + u2.norm_sqr());
            }
        }
        pairs.push(ProofPairCheck {
            mu,
            weight,
            margin: (0.5 * mu + c) * weight,
            residual,
            eigenpair: residual <= residual_gate,
        });
    }

    Ok(ProofCheckReport {
        c,
        residual_gate,
        pairs,
    })
}
