//! Shift-invert Lanczos for the smallest eigenvalues of a Hermitian pencil.
//!
//! The iteration runs on the operator (S − σM)⁻¹M in the M-inner product,
//! with full two-pass reorthogonalization against all cached basis vectors,
//! so the tridiagonal Rayleigh quotient stays trustworthy at desk scales.

use crate::sparse::{Csr, LdlFactor, SparseError};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{EigenError, EigenResult, SolveDiagnostics};

const PIVOT_FLOOR: f64 = 1e-13;
/// Shifts attempted when S itself is not positive definite: σ must stay
/// below the smallest pencil eigenvalue for shift-invert to be valid.
const SHIFT_LADDER: [f64; 4] = [0.0, -1.0, -100.0, -1e4];

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(y: &mut [Complex64], alpha: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Smallest-k eigenpairs of (s, m); see `smallest_eigenpairs` for the
/// contract. This is the matrix-level entry point.
pub fn smallest_pencil_eigenpairs(
    s: &Csr,
    m: &Csr,
    k: usize,
    tol: f64,
    seed: u64,
) -> Result<EigenResult, EigenError> {
    let n = s.rows;
    if s.cols != n || m.rows != n || m.cols != n {
        return Err(EigenError::DimensionMismatch);
    }
    if k == 0 || 4 * k > n {
        return Err(EigenError::BadRequest {
            reason: format!("k = {k} outside 1..=dim/4 for dim = {n}"),
        });
    }
    if !(tol > 1e-14 && tol < 1e-2) {
        return Err(EigenError::BadRequest {
            reason: format!("tolerance {tol} outside (1e-14, 1e-2)"),
        });
    }

    let m_factor = LdlFactor::new(m, PIVOT_FLOOR).map_err(mass_error)?;
    if m_factor.negative_pivots() > 0 {
        return Err(EigenError::IndefiniteMass);
    }
    drop(m_factor);

    let (factor, shift) = shifted_factorization(s, m)?;

    let max_subspace = n.min((6 * k + 40).max(80));
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut m_basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut restarts = 0u32;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    push_random_start(&mut rng, n, m, &mut basis, &mut m_basis)?;

    loop {
        let j = basis.len() - 1;
        let mut u = factor.solve(&m_basis[j]);
        let alpha = dot(&m_basis[j], &u).re;
        axpy(&mut u, Complex64::new(-alpha, 0.0), &basis[j]);
        if j > 0 && betas[j - 1] != 0.0 {
            axpy(&mut u, Complex64::new(-betas[j - 1], 0.0), &basis[j - 1]);
        }
        for _ in 0..2 {
            for i in 0..basis.len() {
                let c = dot(&m_basis[i], &u);
                if c != Complex64::ZERO {
                    axpy(&mut u, -c, &basis[i]);
                }
            }
        }
        alphas.push(alpha);

        let mu = m.matvec_alloc(&u);
        let norm_sq = dot(&u, &mu).re.max(0.0);
        let beta = norm_sq.sqrt();
        let scale = alphas.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
        let breakdown = beta <= 1e-13 * scale;

        if basis.len() >= k + 1 || breakdown {
            if let Some(result) =
                try_extract(s, m, &basis, &alphas, &betas, beta, k, tol, shift, restarts)
            {
                return Ok(result);
            }
        }
        if basis.len() == max_subspace {
            return Err(EigenError::NoConvergence {
                subspace: basis.len(),
                wanted: k,
                tol,
            });
        }

        if breakdown {
            // invariant subspace captured; restart in its M-orthogonal
            // complement with a fresh seeded direction
            restarts += 1;
            if restarts > 16 {
                return Err(EigenError::NoConvergence {
                    subspace: basis.len(),
                    wanted: k,
                    tol,
                });
            }
            betas.push(0.0);
            push_random_start(&mut rng, n, m, &mut basis, &mut m_basis)?;
        } else {
            betas.push(beta);
            let inv = Complex64::new(1.0 / beta, 0.0);
            basis.push(u.iter().map(|z| z * inv).collect());
            m_basis.push(mu.iter().map(|z| z * inv).collect());
        }
    }
}

fn mass_error(e: SparseError) -> EigenError {
    match e {
        SparseError::SingularPivot { .. } => EigenError::IndefiniteMass,
        other => EigenError::Sparse(other),
    }
}

/// Factor S − σM for the first σ in the ladder that is definite-feasible.
fn shifted_factorization(s: &Csr, m: &Csr) -> Result<(LdlFactor, f64), EigenError> {
    let mut last: Option<SparseError> = None;
    for &shift in &SHIFT_LADDER {
        let shifted = if shift == 0.0 {
            s.clone()
        } else {
            s.add_scaled(m, Complex64::new(-shift, 0.0))
        };
        match LdlFactor::new(&shifted, PIVOT_FLOOR) {
            Ok(f) if f.negative_pivots() == 0 => return Ok((f, shift)),
            Ok(_) => last = None,
            Err(e) => last = Some(e),
        }
    }
    match last {
        Some(e) => Err(EigenError::Sparse(e)),
        None => Err(EigenError::ShiftGuardExhausted),
    }
}

fn push_random_start(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: &Csr,
    basis: &mut Vec<Vec<Complex64>>,
    m_basis: &mut Vec<Vec<Complex64>>,
) -> Result<(), EigenError> {
    for _attempt in 0..8 {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        for _ in 0..2 {
            let projections: Vec<Complex64> = m_basis.iter().map(|w| dot(w, &v)).collect();
            for (w, c) in basis.iter().zip(projections) {
                if c != Complex64::ZERO {
                    axpy(&mut v, -c, w);
                }
            }
        }
        let mv = m.matvec_alloc(&v);
        let norm = dot(&v, &mv).re.max(0.0).sqrt();
        if norm > 1e-8 {
            let inv = Complex64::new(1.0 / norm, 0.0);
            basis.push(v.iter().map(|z| z * inv).collect());
            m_basis.push(mv.iter().map(|z| z * inv).collect());
            return Ok(());
        }
    }
    Err(EigenError::StartVectorDegenerate)
}

/// Solve the tridiagonal Rayleigh quotient, map Ritz values back through the
/// shift, and accept only if k pairs meet the true residual tolerance.
#[allow(clippy::too_many_arguments)]
fn try_extract(
    s: &Csr,
    m: &Csr,
    basis: &[Vec<Complex64>],
    alphas: &[f64],
    betas: &[f64],
    beta_last: f64,
    k: usize,
    tol: f64,
    shift: f64,
    restarts: u32,
) -> Option<EigenResult> {
    let j = alphas.len();
    if j < k {
        return None;
    }
    let mut t = nalgebra::DMatrix::<f64>::zeros(j, j);
    for (i, &a) in alphas.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in betas.iter().take(j.saturating_sub(1)).enumerate() {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let sym = nalgebra::SymmetricEigen::new(t);
    // θ = 1/(μ − σ): the k smallest μ are the k largest θ
    let mut order: Vec<usize> = (0..j).collect();
    order.sort_by(|&a, &b| sym.eigenvalues[b].total_cmp(&sym.eigenvalues[a]));
    let candidates = &order[..k];

    // cheap Lanczos bound first: β_last · |last row of Ritz vector|
    for &c in candidates {
        let theta = sym.eigenvalues[c];
        if theta <= 0.0 {
            return None;
        }
        let bound = beta_last * sym.eigenvectors[(j - 1, c)].abs();
        if bound > tol * theta.abs().max(1e-30) * 0.1 {
            return None;
        }
    }

    let n = basis[0].len();
    let mut eigenvalues = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for &c in candidates {
        let theta = sym.eigenvalues[c];
        let mu = shift + 1.0 / theta;
        let mut x = vec![Complex64::ZERO; n];
        for (i, v) in basis.iter().enumerate().take(j) {
            axpy(&mut x, Complex64::new(sym.eigenvectors[(i, c)], 0.0), v);
        }
        let mx = m.matvec_alloc(&x);
        let norm = dot(&x, &mx).re.max(0.0).sqrt();
        if norm == 0.0 {
            return None;
        }
        let inv = Complex64::new(1.0 / norm, 0.0);
        for xi in &mut x {
            *xi *= inv;
        }
        let residual = relative_residual(s, m, mu, &x);
        if residual > tol {
            return None;
        }
        eigenvalues.push(mu);
        vectors.push(x);
        residuals.push(residual);
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
    let residuals: Vec<f64> = order.iter().map(|&i| residuals[i]).collect();
    let vectors: Vec<Vec<Complex64>> = order.iter().map(|&i| vectors[i].clone()).collect();
    let gaps = eigenvalues.iter().map(|&mu| mu.max(0.0).sqrt()).collect();
    Some(EigenResult {
        eigenvalues,
        gaps,
        vectors,
        residuals,
        tol,
        diagnostics: SolveDiagnostics {
            subspace_dim: j,
            restarts,
            shift,
        },
    })
}

/// ‖Sx − μMx‖ / ‖Mx‖ in the Euclidean norm.
pub fn relative_residual(s: &Csr, m: &Csr, mu: f64, x: &[Complex64]) -> f64 {
    let sx = s.matvec_alloc(x);
    let mx = m.matvec_alloc(x);
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (a, b) in sx.iter().zip(&mx) {
        num += (a - b * mu).norm_sqr();
        den += b.norm_sqr();
    }
    num.sqrt() / den.sqrt().max(1e-300)
}
