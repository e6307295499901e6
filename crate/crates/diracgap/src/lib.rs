//! Spectral laboratory for the two-dimensional Dirac operator on bounded
//! smooth domains under the η-family of local boundary conditions.
//!
//! The operator is T = σ₁(−i∂₁) + σ₂(−i∂₂) acting on two-component spinors,
//! with the boundary relation u₂ = β(η) t u₁ linking the components through
//! the unit tangent t. Every member of the family obeys the gap bound
//! λ² ≥ 2πB²/|Ω| with B = min(|β|, 1/|β|), and this crate computes both sides:
//! eigenvalues through a squared-form finite element discretization, the bound
//! through the domain area, and every ingredient of the underlying argument
//! (the decomposition identity, the auxiliary Neumann function, the weighted
//! ground-state inequality, and the four-spinor valley reduction) as a
//! directly checkable computation.
//!
//! Module map:
//!
//! - [`geometry`] - boundary curves, curvature, and the ring mesh generator
//! - [`boundary`] - the β(η) family and the valley boundary conditions
//! - [`fem`] - P1 assembly of the squared and first-order forms
//! - [`eigen`] - shift-invert Lanczos and the dense pencil fallback
//! - [`disc_analytic`] - Bessel functions and the exact disc spectrum
//! - [`gap`] - the bound, the proof-ingredient checks, and extrapolation
//! - [`valley`] - four-spinor problems and their two-spinor reduction
//! - [`cli`] - the `diracgap` command line front end
//!
//! Each major capability has a runnable example:
//!
//! - **`disc_spectrum`** - analytic Bessel roots vs the finite element path
//! - **`gap_bound`** - one solve judged against the bound, plus the eV scale
//! - **`eta_sweep`** - gap and bound across the boundary family
//! - **`convergence`** - refinement ladder and Richardson extrapolation
//! - **`neumann_check`** - the auxiliary Neumann problem and weighted margins
//! - **`lemma_identity`** - the decomposition identity at rounding level
//! - **`valley_armchair`** - four-spinor spectra and the two-spinor reduction
//!
//! ```bash
//! cargo run --release --example gap_bound
//! cargo run --release --example valley_armchair
//! ```

pub mod boundary;
pub mod cli;
pub mod disc_analytic;
pub mod eigen;
pub mod fem;
pub mod gap;
pub mod geometry;
pub mod quadrature;
pub mod sparse;
pub mod valley;
