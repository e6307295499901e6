//! Refinement study on the disc: sqrt(mu_1) converges at second order and
//! Richardson extrapolation lands on the analytic Bessel root.

use diracgap::boundary::BoundaryFamily;
use diracgap::geometry::{triangulate, BoundaryCurve};
use diracgap::{disc_analytic, eigen, fem, gap};

fn main() {
    let curve = BoundaryCurve::disc(1.0).unwrap();
    let fam = BoundaryFamily::new(0.0).unwrap();

    let mut h_eff = Vec::new();
    let mut values = Vec::new();
    println!(
        "{:>7} {:>7} {:>10} {:>20}",
        "h", "rings", "h_eff", "sqrt_mu1"
    );
    for h in [0.3, 0.15, 0.075] {
        let mesh = triangulate(&curve, h).unwrap();
        let prob = fem::assemble(&mesh, &fam).unwrap();
        let res = eigen::smallest_eigenpairs(&prob, 1, 1e-9, 0).unwrap();
        let he = 1.0 / mesh.rings as f64;
        println!(
            "{:>7} {:>7} {:>10.6} {:>20.15}",
            h, mesh.rings, he, res.gaps[0]
        );
        h_eff.push(he);
        values.push(res.gaps[0]);
    }

    let fit = gap::richardson_extrapolate(&h_eff, &values).unwrap();
    let k0 = disc_analytic::k0(1.0).unwrap();
    println!();
    println!("richardson estimate  {:.12}", fit.estimate);
    println!("observed order       {:.4}", fit.order);
    println!("analytic k0          {k0:.12}");
    println!("estimate offset      {:.2e}", (fit.estimate - k0).abs());
}
