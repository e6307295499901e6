//! The η-family of local boundary conditions and their valley-resolved forms.
//!
//! A boundary condition is the constraint P₋ γu = 0 with P± = (1 ± A_η)/2 and
//! A_η = cos(η) σ·t + sin(η) σ₃, where t is the unit tangent phase. On the
//! range of P₊ the trace satisfies u₂ = β t u₁ with β = (1 − sin η)/cos η.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("η = {eta} is within {margin:.1e} of the zigzag angle π/2 + kπ; β is unbounded there")]
    NearZigzag { eta: f64, margin: f64 },
    #[error("zigzag boundary conditions are excluded from spectral computations: the operator is not self-adjoint on that domain and carries an infinite-dimensional zero mode space")]
    ZigzagSpectralUse,
}

/// Guard below which cos η is treated as zero (the zigzag angle).
pub const ZIGZAG_GUARD: f64 = 1e-9;

/// One member of the η-family, with η normalized into [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFamily {
    eta: f64,
}

impl BoundaryFamily {
    pub fn new(eta: f64) -> Result<Self, BoundaryError> {
        let tau = 2.0 * std::f64::consts::PI;
        let normalized = eta.rem_euclid(tau);
        let cos = normalized.cos();
        if cos.abs() <= ZIGZAG_GUARD {
            return Err(BoundaryError::NearZigzag {
                eta,
                margin: cos.abs(),
            });
        }
        Ok(BoundaryFamily { eta: normalized })
    }

    /// The infinite-mass condition η = 0.
    pub fn infinite_mass() -> Self {
        BoundaryFamily { eta: 0.0 }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// β = (1 − sin η)/cos η. Evaluated as cos η/(1 + sin η) when sin η ≥ 0,
    /// which is the same quantity without cancellation.
    ///
    /// sin of the f64 representation of π is O(ε) rather than zero; snapping
    /// it restores the exact values β(0) = 1 and β(π) = −1, which downstream
    /// code relies on for bit-exact coincidence of those two conditions.
    pub fn beta(&self) -> f64 {
        let s = self.eta.sin();
        let c = self.eta.cos();
        let s = if s.abs() < 4.0 * f64::EPSILON { 0.0 } else { s };
        if s >= 0.0 {
            c / (1.0 + s)
        } else {
            (1.0 - s) / c
        }
    }

    /// B = min(|β|, 1/|β|) ∈ (0, 1]; the constant in the gap bound.
    pub fn b_factor(&self) -> f64 {
        let beta = self.beta().abs();
        beta.min(1.0 / beta)
    }

    /// A_η(t) = cos(η) σ·t + sin(η) σ₃ as a 2x2 Hermitian unitary.
    pub fn reflection_matrix(&self, tangent: Complex64) -> Matrix2<Complex64> {
        let c = Complex64::new(self.eta.cos(), 0.0);
        let s = Complex64::new(self.eta.sin(), 0.0);
        Matrix2::new(s, c * tangent.conj(), c * tangent, -s)
    }

    /// Spectral projectors P± = (1 ± A_η)/2. Returns (P₊, P₋).
    pub fn projectors(&self, tangent: Complex64) -> (Matrix2<Complex64>, Matrix2<Complex64>) {
        let a = self.reflection_matrix(tangent);
        let half = Complex64::new(0.5, 0.0);
        let id = Matrix2::identity();
        ((id + a) * half, (id - a) * half)
    }

    /// The boundary trace constraint direction: (1, β t) spans the range of P₊.
    pub fn trace_column(&self, tangent: Complex64) -> [Complex64; 2] {
        [Complex64::ONE, Complex64::new(self.beta(), 0.0) * tangent]
    }
}

/// Boundary conditions for the four-spinor (two-valley) problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ValleyBoundary {
    /// A = diag(σ₃, −σ₃); couples no valleys, kills no first components.
    Zigzag,
    /// A = diag(σ·t, −σ·t); decouples into the η = 0 and η = π conditions.
    InfiniteMass,
    /// A = [[0, ν̄ σ·t], [ν σ·t, 0]] with a unimodular valley-mixing phase ν.
    Armchair { nu_phase: f64 },
}

impl ValleyBoundary {
    pub fn nu(&self) -> Complex64 {
        match self {
            ValleyBoundary::Armchair { nu_phase } => Complex64::from_polar(1.0, *nu_phase),
            _ => Complex64::ONE,
        }
    }

    /// The 4x4 boundary reflection matrix at tangent phase t.
    pub fn matrix(&self, tangent: Complex64) -> Matrix4<Complex64> {
        let zero = Complex64::ZERO;
        let one = Complex64::ONE;
        let sigma_t = |f: Complex64| {
            // σ·t scaled by f
            [[zero, f * tangent.conj()], [f * tangent, zero]]
        };
        match self {
            ValleyBoundary::Zigzag => {
                Matrix4::from_diagonal(&nalgebra::Vector4::new(one, -one, -one, one))
            }
            ValleyBoundary::InfiniteMass => {
                let p = sigma_t(one);
                let m = sigma_t(-one);
                Matrix4::new(
                    p[0][0], p[0][1], zero, zero, p[1][0], p[1][1], zero, zero, zero, zero,
                    m[0][0], m[0][1], zero, zero, m[1][0], m[1][1],
                )
            }
            ValleyBoundary::Armchair { .. } => {
                let nu = self.nu();
                let up = sigma_t(nu.conj());
                let lo = sigma_t(nu);
                Matrix4::new(
                    zero, zero, up[0][0], up[0][1], zero, zero, up[1][0], up[1][1], lo[0][0],
                    lo[0][1], zero, zero, lo[1][0], lo[1][1], zero, zero,
                )
            }
        }
    }

    /// Basis columns of the admissible trace space (the +1 eigenspace of the
    /// reflection matrix), two per boundary node.
    ///
    /// The armchair columns are scaled so that applying the valley swap and the
    /// ν-phase rotation carries them onto the infinite-mass columns exactly.
    pub fn trace_columns(&self, tangent: Complex64) -> Result<[[Complex64; 4]; 2], BoundaryError> {
        let zero = Complex64::ZERO;
        let one = Complex64::ONE;
        match self {
            ValleyBoundary::Zigzag => Err(BoundaryError::ZigzagSpectralUse),
            ValleyBoundary::InfiniteMass => {
                Ok([[one, tangent, zero, zero], [zero, zero, one, -tangent]])
            }
            ValleyBoundary::Armchair { .. } => {
                let nu = self.nu();
                Ok([
                    [one, zero, zero, nu * tangent],
                    [zero, nu.conj() * tangent, one, zero],
                ])
            }
        }
    }
}
