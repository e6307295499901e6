//! Valley-coupled four-spinor problems. The armchair condition mixes the two
//! Dirac points, yet a diagonal phase permutation maps the problem onto an
//! antidiagonal doubling of the eta = 0 two-spinor operator, so its spectrum
//! is the symmetric set {+/- lambda}. The infinite mass condition never mixes
//! valleys and splits exactly into an eta = 0 and an eta = pi block.

use std::f64::consts::PI;

use diracgap::boundary::{BoundaryFamily, ValleyBoundary};
use diracgap::geometry::{triangulate, BoundaryCurve};
use diracgap::{eigen, fem, valley};

fn main() {
    let curve = BoundaryCurve::disc(1.0).unwrap();
    let mesh = triangulate(&curve, 0.25).unwrap();

    let armchair = ValleyBoundary::Armchair { nu_phase: PI / 3.0 };
    let four = valley::assemble_four_spinor(&mesh, &armchair).unwrap();
    let fam = BoundaryFamily::new(0.0).unwrap();
    let two = fem::assemble_first_order(&mesh, &fam).unwrap();
    let rep = valley::spectral_equivalence_check(&four, &two, 1e-10).unwrap();

    println!(
        "armchair, nu phase pi/3, reduced dim {}",
        four.meta.n_reduced
    );
    println!(
        "  diagonal block entries       {}",
        rep.structure.diagonal_nnz
    );
    println!(
        "  off-block adjoint deviation  {:.2e}",
        rep.structure.off_adjoint_deviation
    );
    println!(
        "  K block deviation            {:.2e}",
        rep.k_block_deviation
    );
    println!(
        "  mass block deviation         {:.2e}",
        rep.m_block_deviation
    );
    println!(
        "  spectrum vs +/- two-spinor   {:.2e}",
        rep.spectrum_deviation
    );
    println!(
        "  negation symmetry            {:.2e}",
        rep.negation_symmetry
    );
    println!("  gap four-spinor              {:.12}", rep.gap_four_spinor);
    println!("  gap two-spinor               {:.12}", rep.gap_two_spinor);

    let im = ValleyBoundary::InfiniteMass;
    let four = valley::assemble_four_spinor(&mesh, &im).unwrap();
    let split = valley::split_infinite_mass(&four).unwrap();
    let full = eigen::full_pencil_spectrum(&four.k4, &four.m4).unwrap();
    let first = eigen::full_pencil_spectrum(&split.k_first, &split.m_first).unwrap();
    let second = eigen::full_pencil_spectrum(&split.k_second, &split.m_second).unwrap();
    let mut union: Vec<f64> = first.into_iter().chain(second).collect();
    union.sort_by(f64::total_cmp);
    let dev = full
        .iter()
        .zip(&union)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    let gap = full.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);

    println!();
    println!("infinite mass, reduced dim {}", four.meta.n_reduced);
    println!("  off-diagonal coupling nnz    {}", split.off_diagonal_nnz);
    println!("  spectrum vs block union      {dev:.2e}");
    println!("  gap                          {gap:.12}");
}
