//! Acceptance gate: one test per criterion, each printing a PASS line with
//! the measured numbers (visible with --nocapture). Expensive solves are
//! shared through lazily initialized tables.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::Instant;

use diracgap::boundary::{BoundaryFamily, ValleyBoundary};
use diracgap::geometry::{triangulate, BoundaryCurve, Harmonic, Mesh};
use diracgap::{disc_analytic, eigen, fem, gap, valley};
use num_complex::Complex64;

const LEVELS: [f64; 3] = [0.2, 0.1, 0.05];
const ETAS: [f64; 5] = [0.0, PI / 6.0, PI / 4.0, PI / 3.0, PI];
const DOMAIN_NAMES: [&str; 3] = ["disc", "ellipse", "star"];

fn domains() -> Vec<BoundaryCurve> {
    vec![
        BoundaryCurve::disc(1.0).unwrap(),
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
    ]
}

/// meshes()[domain][level], levels 0.2 / 0.1 / 0.05
fn meshes() -> &'static Vec<Vec<Mesh>> {
    static CACHE: OnceLock<Vec<Vec<Mesh>>> = OnceLock::new();
    CACHE.get_or_init(|| {
        domains()
            .iter()
            .map(|c| LEVELS.iter().map(|&h| triangulate(c, h).unwrap()).collect())
            .collect()
    })
}

struct Cell {
    sqrt_mu: [f64; 3],
    estimate: f64,
    order: f64,
    budget: f64,
    bound: f64,
}

/// One refinement ladder per (domain, eta) pair of the theorem matrix.
fn table() -> &'static HashMap<(usize, u64), Cell> {
    static CACHE: OnceLock<HashMap<(usize, u64), Cell>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let doms = domains();
        let meshes = meshes();
        let mut cells = HashMap::new();
        for (d, curve) in doms.iter().enumerate() {
            for &eta in &ETAS {
                let fam = BoundaryFamily::new(eta).unwrap();
                let mut sqrt_mu = [0.0; 3];
                let mut h_eff = [0.0; 3];
                for (l, mesh) in meshes[d].iter().enumerate() {
                    let prob = fem::assemble(mesh, &fam).unwrap();
                    let res = eigen::smallest_eigenpairs(&prob, 1, 1e-9, 0).unwrap();
                    sqrt_mu[l] = res.gaps[0];
                    h_eff[l] = 1.0 / mesh.rings as f64;
                }
                let fit = gap::richardson_extrapolate(&h_eff, &sqrt_mu).unwrap_or_else(|| {
                    panic!("no power-law fit for domain {d} at eta {eta}: {sqrt_mu:?}")
                });
                let budget = 3.0 * (sqrt_mu[2] - fit.estimate).abs();
                let bound = gap::gap_lower_bound(curve.area(), &fam).unwrap();
                cells.insert(
                    (d, eta.to_bits()),
                    Cell {
                        sqrt_mu,
                        estimate: fit.estimate,
                        order: fit.order,
                        budget,
                        bound,
                    },
                );
            }
        }
        cells
    })
}

fn cell(d: usize, eta: f64) -> &'static Cell {
    &table()[&(d, eta.to_bits())]
}

#[test]
fn criterion_1_disc_analytic_value() {
    let start = Instant::now();
    let spectrum = disc_analytic::disc_eigenvalues(1.0, 0, 1).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let root = spectrum.smallest().unwrap();
    let offset = (root.k - 1.435).abs();
    assert!(
        offset <= 5e-4,
        "k0(1) = {} is {offset:.2e} from 1.435",
        root.k
    );
    assert!(
        root.residual <= 1e-12,
        "root residual {:.3e}",
        root.residual
    );
    assert!(elapsed < 1.0, "took {elapsed:.3} s");
    println!(
        "acceptance 1: PASS  k0(1) = {:.12}, |k0 - 1.435| = {offset:.2e} <= 5e-4, \
         residual {:.1e} <= 1e-12, {:.0} ms < 1 s",
        root.k,
        root.residual,
        elapsed * 1e3
    );
}

#[test]
fn criterion_2_bound_comparison_on_the_disc() {
    let start = Instant::now();
    let k0 = disc_analytic::k0(1.0).unwrap();
    let sqrt2 = 2.0_f64.sqrt();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(k0 > sqrt2, "k0 {k0} must exceed sqrt(2) {sqrt2}");
    let margin = k0 - sqrt2;
    // 0.0207 is the margin quoted at three reported decimals (1.435 - sqrt 2);
    // the recomputed closed forms must land within that rounding slack
    assert!((margin - 0.0207).abs() <= 5e-4, "margin {margin}");
    assert!(elapsed < 1.0, "took {elapsed:.3} s");
    println!(
        "acceptance 2: PASS  k0 = {k0:.12} > sqrt(2) = {sqrt2:.12}, margin {margin:.6} \
         within 5e-4 of 0.0207, {:.0} ms < 1 s",
        elapsed * 1e3
    );
}

#[test]
fn criterion_3_fem_matches_the_analytic_disc() {
    let c = cell(0, 0.0);
    let k0 = disc_analytic::k0(1.0).unwrap();
    let rel = (c.sqrt_mu[2] - k0).abs() / k0;
    assert!(
        rel <= 0.01,
        "sqrt_mu1(h=0.05) = {} off by {rel:.2e}",
        c.sqrt_mu[2]
    );
    let extr = (c.estimate - k0).abs();
    assert!(
        extr <= 2e-3,
        "richardson estimate {} off by {extr:.2e}",
        c.estimate
    );
    println!(
        "acceptance 3: PASS  sqrt_mu1(h=0.05) = {:.9} within {rel:.2e} of k0 (gate 1e-2); \
         richardson {:.9} within {extr:.2e} (gate 2e-3), observed order {:.3}",
        c.sqrt_mu[2], c.estimate, c.order
    );
}

#[test]
fn criterion_4_theorem_matrix_passes_all_cells() {
    let mut passed = 0;
    for d in 0..3 {
        for &eta in &ETAS {
            let c = cell(d, eta);
            let margin = c.sqrt_mu[2] - (c.bound - c.budget);
            println!(
                "  cell {:<8} eta {eta:<20}: sqrt_mu1 {:.9} >= bound {:.9} - budget {:.2e} \
                 (margin {margin:.6})",
                DOMAIN_NAMES[d], c.sqrt_mu[2], c.bound, c.budget
            );
            assert!(
                c.sqrt_mu[2] >= c.bound - c.budget,
                "{} eta {eta}: {} < {} - {:.3e}",
                DOMAIN_NAMES[d],
                c.sqrt_mu[2],
                c.bound,
                c.budget
            );
            passed += 1;
        }
    }
    println!(
        "acceptance 4: PASS  {passed}/15 cells satisfy sqrt_mu1 >= sqrt(2 pi / area) B - budget"
    );
}

#[test]
fn criterion_5_exact_scaling_of_the_spectrum() {
    let star = |r: f64| {
        BoundaryCurve::fourier(
            r,
            vec![Harmonic {
                n: 3,
                a: 0.2 * r,
                b: 0.0,
            }],
        )
        .unwrap()
    };
    let fam = BoundaryFamily::new(PI / 4.0).unwrap();
    let h = 0.15;
    let base_mesh = triangulate(&star(1.0), h).unwrap();
    let base_prob = fem::assemble(&base_mesh, &fam).unwrap();
    let base = eigen::smallest_eigenpairs(&base_prob, 2, 1e-10, 0).unwrap();
    let mut worst = 0.0_f64;
    for r in [0.5, 3.0] {
        let mesh = triangulate(&star(r), h * r).unwrap();
        assert_eq!(mesh.rings, base_mesh.rings);
        let prob = fem::assemble(&mesh, &fam).unwrap();
        assert_eq!(prob.meta.n_reduced, base_prob.meta.n_reduced);
        let scaled = eigen::smallest_eigenpairs(&prob, 2, 1e-10, 0).unwrap();
        for i in 0..2 {
            let expected = base.gaps[i] / r;
            let rel = (scaled.gaps[i] - expected).abs() / expected;
            worst = worst.max(rel);
            assert!(
                rel <= 1e-10,
                "r = {r}, pair {i}: relative deviation {rel:.3e}"
            );
        }
    }
    println!(
        "acceptance 5: PASS  |lambda|(r Omega) = |lambda|(Omega)/r for r in {{0.5, 3}}, \
         worst relative deviation {worst:.2e} <= 1e-10"
    );
}

#[test]
fn criterion_6_neumann_proof_machinery() {
    // (a) solvability residual on every domain
    let mut worst_compat = 0.0_f64;
    for (d, levels) in meshes().iter().enumerate() {
        let ns = gap::solve_neumann(&levels[1]).unwrap();
        worst_compat = worst_compat.max(ns.compatibility_residual);
        assert!(
            ns.compatibility_residual <= 1e-8,
            "{}: solvability residual {:.3e}",
            DOMAIN_NAMES[d],
            ns.compatibility_residual
        );
    }

    // (b) disc profile -|x|^2/4 + const: max nodal error follows the P1
    // max-norm law h^2 log(1/h) across the three levels
    let mut errors = [0.0; 3];
    let mut h_eff = [0.0; 3];
    for (l, mesh) in meshes()[0].iter().enumerate() {
        let ns = gap::solve_neumann(mesh).unwrap();
        let exact: Vec<f64> = mesh
            .vertices
            .iter()
            .map(|p| -(p[0] * p[0] + p[1] * p[1]) / 4.0)
            .collect();
        let (mut num, mut den) = (0.0, 0.0);
        for tri in &mesh.triangles {
            let [a, b, c] = [
                mesh.vertices[tri[0]],
                mesh.vertices[tri[1]],
                mesh.vertices[tri[2]],
            ];
            let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs();
            for &v in tri {
                num += area / 3.0 * exact[v];
                den += area / 3.0;
            }
        }
        let mean = num / den;
        errors[l] = (0..mesh.vertices.len())
            .map(|v| (ns.f[v] - (exact[v] - mean)).abs())
            .fold(0.0_f64, f64::max);
        h_eff[l] = 1.0 / mesh.rings as f64;
    }
    assert!(
        errors[0] > errors[1] && errors[1] > errors[2],
        "errors not decreasing: {errors:?}"
    );
    assert!(
        errors[2] <= 5e-4,
        "finest max nodal error {:.3e}",
        errors[2]
    );
    for step in 0..2 {
        let measured = errors[step] / errors[step + 1];
        let model = (h_eff[step] * h_eff[step] * (1.0 / h_eff[step]).ln())
            / (h_eff[step + 1] * h_eff[step + 1] * (1.0 / h_eff[step + 1]).ln());
        let dev = (measured / model - 1.0).abs();
        assert!(
            dev <= 0.15,
            "refinement {step}: error ratio {measured:.3} vs h^2 log model {model:.3}"
        );
    }

    // (c) weighted inequality margins for |beta| = 1 eigenpairs
    let mut worst_margin = f64::INFINITY;
    for (d, levels) in meshes().iter().enumerate() {
        let mesh = &levels[1];
        let ns = gap::solve_neumann(mesh).unwrap();
        for eta in [0.0, PI] {
            let fam = BoundaryFamily::new(eta).unwrap();
            let prob = fem::assemble(mesh, &fam).unwrap();
            let res = eigen::smallest_eigenpairs(&prob, 4, 1e-9, 0).unwrap();
            let report = gap::proof_inequality_check(mesh, &prob, &res, &ns).unwrap();
            let budget = cell(d, eta).budget;
            for pair in &report.pairs {
                assert!(pair.eigenpair, "{}: residual gate hit", DOMAIN_NAMES[d]);
                worst_margin = worst_margin.min(pair.margin);
                assert!(
                    pair.margin >= -budget,
                    "{} eta {eta}: margin {} below -{budget:.3e}",
                    DOMAIN_NAMES[d],
                    pair.margin
                );
            }
        }
    }
    println!(
        "acceptance 6: PASS  solvability <= {worst_compat:.2e} (gate 1e-8); disc profile max \
         error {:.2e} -> {:.2e} -> {:.2e} follows h^2 log(1/h) within 15%; all weighted \
         margins >= {worst_margin:.4} > -budget",
        errors[0], errors[1], errors[2]
    );
}

/// Integral over the unit disc of (1 + 4 y^2) exp(2(x - y^2)): the analytic
/// value of the surviving first-order energy for u1 = exp(x - y^2), computed
/// with a periodic trapezoid rule in the angle and Simpson in the radius.
fn analytic_first_order_energy() -> f64 {
    let nr = 512usize;
    let nt = 512usize;
    let mut radial = vec![0.0; nr + 1];
    for (i, slot) in radial.iter_mut().enumerate() {
        let r = i as f64 / nr as f64;
        let mut acc = 0.0;
        for j in 0..nt {
            let th = 2.0 * PI * j as f64 / nt as f64;
            let (s, c) = th.sin_cos();
            acc += (1.0 + 4.0 * r * r * s * s) * (2.0 * (r * c - r * r * s * s)).exp();
        }
        *slot = r * acc * (2.0 * PI / nt as f64);
    }
    let mut total = 0.0;
    for i in (0..nr).step_by(2) {
        total += radial[i] + 4.0 * radial[i + 1] + radial[i + 2];
    }
    total / (3.0 * nr as f64)
}

#[test]
fn criterion_7_lemma_identity_against_the_analytic_energy() {
    let fam = BoundaryFamily::new(PI / 4.0).unwrap();
    let beta = fam.beta();
    let b = fam.b_factor();
    let rhs_analytic = (1.0 - b * b) * analytic_first_order_energy();
    let mut rels = [0.0; 3];
    let mut worst_cross = 0.0_f64;
    for (l, mesh) in meshes()[0].iter().enumerate() {
        let n = mesh.vertices.len();
        let mut u = vec![Complex64::ZERO; 2 * n];
        for (v, p) in mesh.vertices.iter().enumerate() {
            // u2 = beta * tangent * u1 on the unit circle, tangent = i(x + iy)
            let u1 = Complex64::new((p[0] - p[1] * p[1]).exp(), 0.0);
            u[v] = u1;
            u[n + v] = Complex64::i() * Complex64::new(p[0], p[1]) * u1 * beta;
        }
        let dec = gap::lemma_decompose(mesh, &fam, &u).unwrap();
        rels[l] = (dec.report.lhs - rhs_analytic).abs() / rhs_analytic.abs();
        let cross_rel = dec.report.cross_term.im.abs() / dec.report.cross_term.norm();
        worst_cross = worst_cross.max(cross_rel);
        assert!(cross_rel <= 1e-12, "cross term not real: {cross_rel:.3e}");
    }
    assert!(
        rels[0] > rels[1] && rels[1] > rels[2],
        "not decreasing: {rels:?}"
    );
    assert!(
        rels[2] <= 1e-3,
        "relative error at h = 0.05 is {:.3e}",
        rels[2]
    );
    println!(
        "acceptance 7: PASS  ||Tw||^2 + 2Re<Tv,Tw> vs (1 - B^2)||Xu1||^2 at eta = pi/4: \
         rel err {:.2e} -> {:.2e} -> {:.2e} (gate 1e-3 at h = 0.05, decreasing); \
         <Tv,Tw> real within {worst_cross:.2e} <= 1e-12",
        rels[0], rels[1], rels[2]
    );
}

#[test]
fn criterion_8_valley_reductions() {
    let curve = BoundaryCurve::ellipse(1.5, 0.75).unwrap();
    let mesh = triangulate(&curve, 0.25).unwrap();
    let fam0 = BoundaryFamily::new(0.0).unwrap();
    let two = fem::assemble_first_order(&mesh, &fam0).unwrap();

    let armchair_nu = ValleyBoundary::Armchair { nu_phase: PI / 3.0 };
    let four_nu = valley::assemble_four_spinor(&mesh, &armchair_nu).unwrap();
    let rep = valley::spectral_equivalence_check(&four_nu, &two, 1e-10).unwrap();

    let armchair_one = ValleyBoundary::Armchair { nu_phase: 0.0 };
    let four_one = valley::assemble_four_spinor(&mesh, &armchair_one).unwrap();
    let spec_one = eigen::full_pencil_spectrum(&four_one.k4, &four_one.m4).unwrap();
    let spec_nu = eigen::full_pencil_spectrum(&four_nu.k4, &four_nu.m4).unwrap();
    let nu_invariance = spec_one
        .iter()
        .zip(&spec_nu)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    assert!(
        nu_invariance <= 1e-10,
        "nu invariance broken: {nu_invariance:.3e}"
    );

    let four_im = valley::assemble_four_spinor(&mesh, &ValleyBoundary::InfiniteMass).unwrap();
    let split = valley::split_infinite_mass(&four_im).unwrap();
    assert_eq!(split.off_diagonal_nnz, 0);
    let full = eigen::full_pencil_spectrum(&four_im.k4, &four_im.m4).unwrap();
    let first = eigen::full_pencil_spectrum(&split.k_first, &split.m_first).unwrap();
    let second = eigen::full_pencil_spectrum(&split.k_second, &split.m_second).unwrap();
    let mut union: Vec<f64> = first.into_iter().chain(second).collect();
    union.sort_by(f64::total_cmp);
    let union_dev = full
        .iter()
        .zip(&union)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    assert!(
        union_dev <= 1e-10,
        "infinite-mass union deviates by {union_dev:.3e}"
    );

    // gap bound with B = 1, budgeted by the eta = 0 richardson ladder
    let c = cell(1, 0.0);
    let budget = 3.0 * (rep.gap_four_spinor - c.estimate).abs();
    assert!(
        rep.gap_four_spinor >= c.bound - budget,
        "armchair gap {} < {} - {budget:.3e}",
        rep.gap_four_spinor,
        c.bound
    );
    println!(
        "acceptance 8: PASS  infinite-mass union dev {union_dev:.2e} <= 1e-10; armchair \
         +/- spectrum dev {:.2e} <= 1e-10; nu-invariance dev {nu_invariance:.2e} <= 1e-10; \
         armchair gap {:.6} >= bound {:.6} - budget {budget:.2e} (B = 1)",
        rep.spectrum_deviation, rep.gap_four_spinor, c.bound
    );
}

#[test]
fn criterion_9_property_suite() {
    // Hermiticity of every assembled matrix, bitwise
    for (d, levels) in meshes().iter().enumerate() {
        let mesh = &levels[1];
        for eta in [0.0, PI / 4.0, PI] {
            let fam = BoundaryFamily::new(eta).unwrap();
            let squared = fem::assemble(mesh, &fam).unwrap();
            let first = fem::assemble_first_order(mesh, &fam).unwrap();
            for prob in [&squared, &first] {
                assert_eq!(
                    prob.s.hermitian_deviation(),
                    0.0,
                    "{} eta {eta}",
                    DOMAIN_NAMES[d]
                );
                assert_eq!(
                    prob.m.hermitian_deviation(),
                    0.0,
                    "{} eta {eta}",
                    DOMAIN_NAMES[d]
                );
            }
        }
    }
    let coarse = triangulate(&BoundaryCurve::disc(1.0).unwrap(), 0.25).unwrap();
    for vb in [
        ValleyBoundary::InfiniteMass,
        ValleyBoundary::Armchair { nu_phase: PI / 3.0 },
    ] {
        let four = valley::assemble_four_spinor(&coarse, &vb).unwrap();
        assert_eq!(four.k4.hermitian_deviation(), 0.0);
        assert_eq!(four.m4.hermitian_deviation(), 0.0);
    }

    // total curvature 2 pi on every domain
    let mut worst_curv = 0.0_f64;
    for levels in meshes() {
        let total: f64 = levels[1]
            .boundary_edges
            .iter()
            .flat_map(|e| e.gauss.iter())
            .map(|g| g.weight * g.curvature)
            .sum();
        worst_curv = worst_curv.max((total - 2.0 * PI).abs());
    }
    assert!(
        worst_curv <= 1e-8,
        "total curvature off by {worst_curv:.3e}"
    );

    // beta branch formulas, bitwise on all four sign branches
    for eta in [PI / 4.0, 2.5, 3.8, 5.7] {
        let fam = BoundaryFamily::new(eta).unwrap();
        let (s, c) = (eta.sin(), eta.cos());
        let expected = if s >= 0.0 {
            c / (1.0 + s)
        } else {
            (1.0 - s) / c
        };
        assert_eq!(fam.beta(), expected, "eta {eta}");
        assert_eq!(fam.b_factor(), expected.abs().min(1.0 / expected.abs()));
    }
    assert_eq!(BoundaryFamily::new(0.0).unwrap().beta(), 1.0);
    assert_eq!(BoundaryFamily::new(PI).unwrap().beta(), -1.0);

    // determinism: identical seeds produce bitwise identical results
    let mesh = &meshes()[0][1];
    let fam = BoundaryFamily::new(PI / 6.0).unwrap();
    let prob = fem::assemble(mesh, &fam).unwrap();
    let one = eigen::smallest_eigenpairs(&prob, 3, 1e-9, 7).unwrap();
    let two = eigen::smallest_eigenpairs(&prob, 3, 1e-9, 7).unwrap();
    for i in 0..3 {
        assert_eq!(one.eigenvalues[i].to_bits(), two.eigenvalues[i].to_bits());
        assert_eq!(one.gaps[i].to_bits(), two.gaps[i].to_bits());
        assert_eq!(one.residuals[i].to_bits(), two.residuals[i].to_bits());
        for (a, b) in one.vectors[i].iter().zip(&two.vectors[i]) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
    println!(
        "acceptance 9: PASS  hermiticity exact on all assembled matrices; total curvature \
         within {worst_curv:.2e} of 2 pi (gate 1e-8); beta branch formulas bitwise on all \
         four branches; solver bitwise deterministic per seed"
    );
}
