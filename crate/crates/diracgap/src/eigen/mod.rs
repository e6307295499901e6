//! Eigensolvers for the assembled Hermitian pencils, with certified
//! residuals: a shift-invert Lanczos primary path and a dense oracle.

mod dense;
mod lanczos;

pub use dense::{full_pencil_eigen, full_pencil_spectrum, DENSE_DIM_LIMIT};
pub use lanczos::{relative_residual, smallest_pencil_eigenpairs};

use crate::fem::AssembledProblem;
use crate::sparse::SparseError;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("pencil dimensions do not match")]
    DimensionMismatch,
    #[error("invalid request: {reason}")]
    BadRequest { reason: String },
    #[error("mass matrix is not positive definite")]
    IndefiniteMass,
    #[error("no spectral shift in the guard ladder made S - sigma*M definite")]
    ShiftGuardExhausted,
    #[error("could not generate a start vector outside the converged subspace")]
    StartVectorDegenerate,
    #[error(
        "no convergence: {wanted} pairs requested, subspace reached {subspace} at tol {tol:.1e}"
    )]
    NoConvergence {
        subspace: usize,
        wanted: usize,
        tol: f64,
    },
    #[error("dense path supports dim <= {limit}, got {dim}")]
    DenseTooLarge { dim: usize, limit: usize },
    #[error("recomputed residual {recomputed:.3e} exceeds reported {reported:.3e} by more than 10x for pair {index}")]
    ResidualMismatch {
        index: usize,
        reported: f64,
        recomputed: f64,
    },
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolveDiagnostics {
    pub subspace_dim: usize,
    pub restarts: u32,
    pub shift: f64,
}

/// Converged eigenpairs of (S, M), ascending, with recovered gap magnitudes
/// |λ| = √max(μ, 0) and per-pair relative residuals ‖Sx − μMx‖/‖Mx‖.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    pub gaps: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
    pub residuals: Vec<f64>,
    pub tol: f64,
    pub diagnostics: SolveDiagnostics,
}

/// The k smallest eigenpairs of the assembled problem; deterministic for a
/// fixed seed. Defaults used by the CLI: tol 1e−8, seed 42.
pub fn smallest_eigenpairs(
    prob: &AssembledProblem,
    k: usize,
    tol: f64,
    seed: u64,
) -> Result<EigenResult, EigenError> {
    smallest_pencil_eigenpairs(&prob.s, &prob.m, k, tol, seed)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub recomputed: Vec<f64>,
    /// Indices of pairs whose recomputed residual exceeds the solve tolerance.
    pub flagged: Vec<usize>,
}

/// Recompute every residual with fresh matrix-vector products, independently
/// of anything the solver cached.
pub fn verify_residuals(
    prob: &AssembledProblem,
    res: &EigenResult,
) -> Result<ResidualReport, EigenError> {
    let mut recomputed = Vec::with_capacity(res.eigenvalues.len());
    let mut flagged = Vec::new();
    for (i, (mu, x)) in res.eigenvalues.iter().zip(&res.vectors).enumerate() {
        if x.len() != prob.s.rows {
            return Err(EigenError::DimensionMismatch);
        }
        let r = relative_residual(&prob.s, &prob.m, *mu, x);
        if r > 10.0 * res.residuals[i].max(1e-15) {
            return Err(EigenError::ResidualMismatch {
                index: i,
                reported: res.residuals[i],
                recomputed: r,
            });
        }
        if r > res.tol {
            flagged.push(i);
        }
        recomputed.push(r);
    }
    Ok(ResidualReport {
        recomputed,
        flagged,
    })
}
