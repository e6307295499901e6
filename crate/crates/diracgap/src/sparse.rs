//! Compressed sparse row storage and a sparse LDL* factorization for complex Hermitian matrices.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("zero or near-zero pivot at column {col} (|d| = {magnitude:.3e})")]
    SingularPivot { col: usize, magnitude: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Triplet accumulator for building sparse matrices.
#[derive(Debug, Clone)]
pub struct Triplets {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl Triplets {
    pub fn new(rows: usize, cols: usize) -> Self {
        Triplets {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(i < self.rows && j < self.cols);
        if v != Complex64::ZERO {
            self.entries.push((i, j, v));
        }
    }

    /// Adds v at (i, j) and its conjugate at (j, i); diagonal entries are added once.
    pub fn push_hermitian(&mut self, i: usize, j: usize, v: Complex64) {
        if i == j {
            self.push(i, j, Complex64::new(v.re, 0.0));
        } else {
            self.push(i, j, v);
            self.push(j, i, v.conj());
        }
    }

    pub fn to_csr(&self) -> Csr {
        Csr::from_triplets(self)
    }
}

/// Complex CSR matrix with sorted column indices and summed duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub rows: usize,
    pub cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl Csr {
    pub fn from_triplets(t: &Triplets) -> Csr {
        let mut counts = vec![0usize; t.rows + 1];
        for &(i, _, _) in &t.entries {
            counts[i + 1] += 1;
        }
        for i in 0..t.rows {
            counts[i + 1] += counts[i];
        }
        // stable sort: duplicates sum in insertion order, so equal triplet
        // streams produce bitwise-equal matrices regardless of what other
        // entries surround them
        let mut order: Vec<usize> = (0..t.entries.len()).collect();
        order.sort_by_key(|&e| (t.entries[e].0, t.entries[e].1));

        let mut row_ptr = vec![0usize; t.rows + 1];
        let mut col_idx = Vec::with_capacity(t.entries.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(t.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for &e in &order {
            let (i, j, v) = t.entries[e];
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..t.rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr {
            rows: t.rows,
            cols: t.cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Csr {
        Csr {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![Complex64::ONE; n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&j) {
            Ok(p) => self.values[lo + p],
            Err(_) => Complex64::ZERO,
        }
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for i in 0..self.rows {
            let mut acc = Complex64::ZERO;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            y[i] = acc;
        }
    }

    pub fn matvec_alloc(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::ZERO; self.rows];
        self.matvec(x, &mut y);
        y
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Csr {
        let mut t = Triplets::new(self.cols, self.rows);
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                t.push(j, i, v.conj());
            }
        }
        t.to_csr()
    }

    pub fn matmul(&self, other: &Csr) -> Csr {
        assert_eq!(self.cols, other.rows);
        let mut t = Triplets::new(self.rows, other.cols);
        let mut acc: Vec<Complex64> = vec![Complex64::ZERO; other.cols];
        let mut touched: Vec<usize> = Vec::new();
        for i in 0..self.rows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if acc[j] == Complex64::ZERO {
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                t.push(i, j, acc[j]);
                acc[j] = Complex64::ZERO;
            }
            touched.clear();
        }
        t.to_csr()
    }

    /// (A + A*)/2; exact Hermitian symmetry by construction, real diagonal.
    pub fn hermitianize(&self) -> Csr {
        assert_eq!(self.rows, self.cols);
        let adj = self.adjoint();
        let mut t = Triplets::new(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                t.push(i, j, v * 0.5);
            }
            for (j, v) in adj.row(i) {
                t.push(i, j, v * 0.5);
            }
        }
        let mut out = t.to_csr();
        for i in 0..out.rows {
            for p in out.row_ptr[i]..out.row_ptr[i + 1] {
                if out.col_idx[p] == i {
                    out.values[p] = Complex64::new(out.values[p].re, 0.0);
                }
            }
        }
        out
    }

    /// max |A_ij - conj(A_ji)| over stored entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                dev = dev.max((v - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn scale(&self, c: Complex64) -> Csr {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        out
    }

    /// self + c*other, matching dimensions required.
    pub fn add_scaled(&self, other: &Csr, c: Complex64) -> Csr {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut t = Triplets::new(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                t.push(i, j, v);
            }
            for (j, v) in other.row(i) {
                t.push(i, j, c * v);
            }
        }
        t.to_csr()
    }

    /// Symmetric permutation B = A[p, p] with an optional diagonal phase:
    /// B_ij = conj(phase_i) * A[p_i, p_j] * phase_j.
    pub fn permute_symmetric(&self, p: &[usize], phase: Option<&[Complex64]>) -> Csr {
        assert_eq!(self.rows, self.cols);
        assert_eq!(p.len(), self.rows);
        let mut inv = vec![0usize; p.len()];
        for (new, &old) in p.iter().enumerate() {
            inv[old] = new;
        }
        let mut t = Triplets::new(self.rows, self.cols);
        for new_i in 0..self.rows {
            let old_i = p[new_i];
            for (old_j, v) in self.row(old_i) {
                let new_j = inv[old_j];
                let w = match phase {
                    Some(ph) => ph[new_i].conj() * v * ph[new_j],
                    None => v,
                };
                t.push(new_i, new_j, w);
            }
        }
        t.to_csr()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut m = nalgebra::DMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Reverse Cuthill-McKee ordering computed on the sparsity graph.
/// Returns the permutation p such that new index k corresponds to old index p[k].
pub fn reverse_cuthill_mckee(a: &Csr) -> Vec<usize> {
    let n = a.rows;
    let degree = |i: usize| a.row_ptr[i + 1] - a.row_ptr[i];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    loop {
        // start each component at a minimum-degree vertex
        let start = match (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree(i), i))
        {
            Some(s) => s,
            None => break,
        };
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(start);
        visited[start] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = a
                .row(u)
                .map(|(j, _)| j)
                .filter(|&j| j != u && !visited[j])
                .collect();
            nbrs.sort_unstable_by_key(|&j| (degree(j), j));
            for j in nbrs {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

/// Sparse LDL* factorization of a Hermitian matrix, up-looking, no pivoting.
///
/// Suitable for positive definite matrices and mildly indefinite shifted pencils;
/// a zero pivot aborts with `SingularPivot`. An RCM preordering keeps fill local
/// for the planar meshes produced by this crate.
pub struct LdlFactor {
    n: usize,
    perm: Vec<usize>,
    // L stored by columns (unit diagonal implicit), D real
    l_colptr: Vec<usize>,
    l_rowidx: Vec<usize>,
    l_values: Vec<Complex64>,
    d: Vec<f64>,
}

impl LdlFactor {
    /// Factor P A P^T = L D L*. `pivot_floor` rejects pivots with |d| below
    /// pivot_floor * max|diag| as singular.
    pub fn new(a: &Csr, pivot_floor: f64) -> Result<LdlFactor, SparseError> {
        if a.rows != a.cols {
            return Err(SparseError::NotSquare {
                rows: a.rows,
                cols: a.cols,
            });
        }
        let n = a.rows;
        let perm = reverse_cuthill_mckee(a);
        let b = a.permute_symmetric(&perm, None);

        // upper-triangular columns of B accessed via rows of the Hermitian matrix:
        // column k entries (i <= k) are conj(B[k, i]) for i <= k.
        let upper_col = |k: usize| {
            b.row(k)
                .filter(move |&(j, _)| j <= k)
                .map(move |(j, v)| (j, v.conj()))
        };

        // elimination tree
        let mut parent = vec![usize::MAX; n];
        let mut ancestor = vec![usize::MAX; n];
        for k in 0..n {
            for (i, _) in upper_col(k) {
                if i >= k {
                    continue;
                }
                let mut j = i;
                while ancestor[j] != usize::MAX && ancestor[j] != k {
                    let next = ancestor[j];
                    ancestor[j] = k;
                    j = next;
                }
                if ancestor[j] == usize::MAX {
                    ancestor[j] = k;
                    parent[j] = k;
                }
            }
        }

        // column counts of L
        let mut lnz = vec![0usize; n];
        let mut flag = vec![usize::MAX; n];
        for k in 0..n {
            flag[k] = k;
            for (i, _) in upper_col(k) {
                if i >= k {
                    continue;
                }
                let mut j = i;
                while flag[j] != k {
                    lnz[j] += 1;
                    flag[j] = k;
                    j = parent[j];
                }
            }
        }
        let mut l_colptr = vec![0usize; n + 1];
        for k in 0..n {
            l_colptr[k + 1] = l_colptr[k] + lnz[k];
        }
        let total = l_colptr[n];
        let mut l_rowidx = vec![0usize; total];
        let mut l_values = vec![Complex64::ZERO; total];
        let mut l_next: Vec<usize> = l_colptr[..n].to_vec();

        let mut d = vec![0.0f64; n];
        let mut y = vec![Complex64::ZERO; n];
        let mut pattern = vec![0usize; n];
        let mut stack = vec![0usize; n];
        let mut flag = vec![usize::MAX; n];
        let max_diag = {
            let mut m: f64 = 0.0;
            for k in 0..n {
                m = m.max(b.get(k, k).re.abs());
            }
            m.max(f64::MIN_POSITIVE)
        };

        for k in 0..n {
            flag[k] = k;
            let mut top = n;
            let mut dk = 0.0f64;
            for (i, v) in upper_col(k) {
                if i == k {
                    dk = v.re;
                    continue;
                }
                y[i] += v;
                let mut len = 0usize;
                let mut j = i;
                while flag[j] != k {
                    stack[len] = j;
                    len += 1;
                    flag[j] = k;
                    j = parent[j];
                }
                while len > 0 {
                    len -= 1;
                    top -= 1;
                    pattern[top] = stack[len];
                }
            }
            for pp in top..n {
                let j = pattern[pp];
                let yj = y[j];
                y[j] = Complex64::ZERO;
                // updates from column j to later rows in this column's pattern
                for q in l_colptr[j]..l_next[j] {
                    y[l_rowidx[q]] -= l_values[q] * yj;
                }
                let lkj = yj.conj() / d[j];
                dk -= (lkj * yj).re;
                l_rowidx[l_next[j]] = k;
                l_values[l_next[j]] = lkj;
                l_next[j] += 1;
            }
            if dk == 0.0 || dk.abs() < pivot_floor * max_diag {
                return Err(SparseError::SingularPivot {
                    col: k,
                    magnitude: dk.abs(),
                });
            }
            d[k] = dk;
        }

        Ok(LdlFactor {
            n,
            perm,
            l_colptr,
            l_rowidx,
            l_values,
            d,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of negative pivots (matrix inertia below the shift).
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&x| x < 0.0).count()
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(rhs.len(), self.n);
        let mut x: Vec<Complex64> = (0..self.n).map(|k| rhs[self.perm[k]]).collect();
        // forward: L z = b
        for j in 0..self.n {
            let xj = x[j];
            for q in self.l_colptr[j]..self.l_colptr[j + 1] {
                x[self.l_rowidx[q]] -= self.l_values[q] * xj;
            }
        }
        for j in 0..self.n {
            x[j] /= self.d[j];
        }
        // backward: L* x = z
        for j in (0..self.n).rev() {
            let mut acc = x[j];
            for q in self.l_colptr[j]..self.l_colptr[j + 1] {
                acc -= self.l_values[q].conj() * x[self.l_rowidx[q]];
            }
            x[j] = acc;
        }
        let mut out = vec![Complex64::ZERO; self.n];
        for k in 0..self.n {
            out[self.perm[k]] = x[k];
        }
        out
    }
}
