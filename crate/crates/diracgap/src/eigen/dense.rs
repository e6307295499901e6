//! Dense eigensolver used as an internal oracle and for full-spectrum checks.

use crate::sparse::Csr;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::EigenError;

/// Cap above which the dense path refuses to run; beyond this the sparse
/// solver is the only supported route.
pub const DENSE_DIM_LIMIT: usize = 2000;

/// Full ascending spectrum of the Hermitian pencil (A, M), M positive
/// definite, via a Cholesky congruence to a standard Hermitian problem.
pub fn full_pencil_spectrum(a: &Csr, m: &Csr) -> Result<Vec<f64>, EigenError> {
    let (values, _) = full_pencil_eigen(a, m)?;
    Ok(values)
}

/// Full spectrum plus M-orthonormal eigenvectors (as columns).
pub fn full_pencil_eigen(a: &Csr, m: &Csr) -> Result<(Vec<f64>, DMatrix<Complex64>), EigenError> {
    let n = a.rows;
    if n != a.cols || m.rows != n || m.cols != n {
        return Err(EigenError::DimensionMismatch);
    }
    if n > DENSE_DIM_LIMIT {
        return Err(EigenError::DenseTooLarge {
            dim: n,
            limit: DENSE_DIM_LIMIT,
        });
    }
    let m_dense = m.to_dense();
    let chol = m_dense.cholesky().ok_or(EigenError::IndefiniteMass)?;
    let l = chol.l();
    // the complex Cholesky in nalgebra takes complex square roots of bad
    // pivots instead of failing, so positive definiteness needs an explicit
    // check on the factor diagonal
    for i in 0..n {
        let d = l[(i, i)];
        if !(d.re > 0.0 && d.im.abs() <= 1e-12 * (1.0 + d.re.abs())) {
            return Err(EigenError::IndefiniteMass);
        }
    }
    // C = L⁻¹ A L⁻ᴴ shares the pencil's spectrum
    let tmp = l
        .solve_lower_triangular(&a.to_dense())
        .ok_or(EigenError::IndefiniteMass)?;
    let c = l
        .solve_lower_triangular(&tmp.adjoint())
        .ok_or(EigenError::IndefiniteMass)?
        .adjoint();
    let c_sym = (c.adjoint() + &c) * Complex64::new(0.5, 0.0);
    let sym = nalgebra::SymmetricEigen::new(c_sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sym.eigenvalues[i].total_cmp(&sym.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| sym.eigenvalues[i]).collect();
    // x = L⁻ᴴ y undoes the congruence; resulting columns are M-orthonormal
    let l_adj = l.adjoint();
    let mut vectors = DMatrix::zeros(n, n);
    for (col_out, &col_in) in order.iter().enumerate() {
        let y = sym.eigenvectors.column(col_in).into_owned();
        let x = l_adj
            .solve_upper_triangular(&y)
            .ok_or(EigenError::IndefiniteMass)?;
        vectors.set_column(col_out, &x);
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::Triplets;
    use approx::assert_relative_eq;

    fn diag(values: &[f64]) -> Csr {
        let mut t = Triplets::new(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            t.push(i, i, Complex64::new(v, 0.0));
        }
        t.to_csr()
    }

    #[test]
    fn diagonal_pencil() {
        let a = diag(&[3.0, 1.0, 2.0]);
        let m = diag(&[1.0, 1.0, 1.0]);
        let (vals, vecs) = full_pencil_eigen(&a, &m).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        // eigenvector of λ=1 is e₁
        assert_relative_eq!(vecs[(1, 0)].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nontrivial_mass() {
        // A = diag(1, 4), M = diag(4, 1) → spectrum {1/4, 4}
        let a = diag(&[1.0, 4.0]);
        let m = diag(&[4.0, 1.0]);
        let vals = full_pencil_spectrum(&a, &m).unwrap();
        assert_relative_eq!(vals[0], 0.25, epsilon = 1e-13);
        assert_relative_eq!(vals[1], 4.0, epsilon = 1e-13);
    }

    #[test]
    fn complex_hermitian_pair() {
        // A = [[2, i],[−i, 2]], eigenvalues 1, 3
        let mut t = Triplets::new(2, 2);
        t.push(0, 0, Complex64::new(2.0, 0.0));
        t.push(0, 1, Complex64::new(0.0, 1.0));
        t.push(1, 0, Complex64::new(0.0, -1.0));
        t.push(1, 1, Complex64::new(2.0, 0.0));
        let a = t.to_csr();
        let m = Csr::identity(2);
        let (vals, vecs) = full_pencil_eigen(&a, &m).unwrap();
        assert_relative_eq!(vals[0], 1.0, epsilon = 1e-13);
        assert_relative_eq!(vals[1], 3.0, epsilon = 1e-13);
        // residual check A x = λ x
        let ad = a.to_dense();
        for j in 0..2 {
            let x = vecs.column(j).into_owned();
            let r = &ad * &x - x.scale(vals[j]);
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn indefinite_mass_rejected() {
        let a = diag(&[1.0, 1.0]);
        let m = diag(&[1.0, -1.0]);
        assert!(matches!(
            full_pencil_spectrum(&a, &m),
            Err(EigenError::IndefiniteMass)
        ));
    }

    #[test]
    fn m_orthonormality_of_returned_vectors() {
        // random-ish Hermitian A and PD M
        let n = 6;
        let mut ta = Triplets::new(n, n);
        let mut tm = Triplets::new(n, n);
        for i in 0..n {
            ta.push(i, i, Complex64::new(i as f64 + 1.0, 0.0));
            tm.push(i, i, Complex64::new(1.0 + 0.1 * i as f64, 0.0));
            if i + 1 < n {
                ta.push_hermitian(i, i + 1, Complex64::new(0.3, 0.7));
                tm.push_hermitian(i, i + 1, Complex64::new(0.05, 0.02));
            }
        }
        let a = ta.to_csr().hermitianize();
        let m = tm.to_csr().hermitianize();
        let (_, vecs) = full_pencil_eigen(&a, &m).unwrap();
        let gram = vecs.adjoint() * m.to_dense() * &vecs;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-10);
            }
        }
    }
}
