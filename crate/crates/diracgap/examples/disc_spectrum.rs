//! Analytic Dirac spectrum of the disc from the Bessel root scan, checked
//! against the finite element path at eta = 0.

use diracgap::boundary::BoundaryFamily;
use diracgap::geometry::{triangulate, BoundaryCurve};
use diracgap::{disc_analytic, eigen, fem};

fn main() {
    let spectrum = disc_analytic::disc_eigenvalues(1.0, 3, 3).unwrap();
    println!("roots of J_m(k) = J_(m+1)(k) on the unit disc:");
    println!("{:>3} {:>6} {:>20} {:>12}", "m", "index", "k", "residual");
    for root in &spectrum.roots {
        println!(
            "{:>3} {:>6} {:>20.15} {:>12.2e}",
            root.m, root.index, root.k, root.residual
        );
    }
    let k0 = spectrum.smallest().unwrap().k;

    let curve = BoundaryCurve::disc(1.0).unwrap();
    let fam = BoundaryFamily::new(0.0).unwrap();
    let mesh = triangulate(&curve, 0.1).unwrap();
    let prob = fem::assemble(&mesh, &fam).unwrap();
    let res = eigen::smallest_eigenpairs(&prob, 1, 1e-9, 0).unwrap();

    println!();
    println!("smallest analytic k      {k0:.12}");
    println!("finite element sqrt(mu)  {:.12}   (h = 0.1)", res.gaps[0]);
    println!(
        "relative offset          {:.2e}",
        (res.gaps[0] - k0).abs() / k0
    );
}
