//! The auxiliary Neumann problem behind the proof: laplacian f = -pi/area
//! with normal derivative -kappa/2, solvable because the total curvature of a
//! smooth boundary is exactly 2 pi. On the disc the solution is -|x|^2/4 up
//! to the gauge constant, and feeding exp(-f) into the weighted inequality
//! gives a strictly positive margin for every computed eigenpair.

use diracgap::boundary::BoundaryFamily;
use diracgap::geometry::{triangulate, BoundaryCurve, Harmonic};
use diracgap::{eigen, fem, gap};

fn main() {
    let domains = [
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
    ];
    println!(
        "{:<28} {:>12} {:>14} {:>14}",
        "domain", "C", "compatibility", "interior"
    );
    for curve in &domains {
        let mesh = triangulate(curve, 0.1).unwrap();
        let ns = gap::solve_neumann(&mesh).unwrap();
        println!(
            "{:<28} {:>12.8} {:>14.2e} {:>14.2e}",
            curve.label(),
            ns.c,
            ns.compatibility_residual,
            ns.interior_residual
        );
    }

    let curve = BoundaryCurve::disc(1.0).unwrap();
    let mesh = triangulate(&curve, 0.1).unwrap();
    let ns = gap::solve_neumann(&mesh).unwrap();
    let exact: Vec<f64> = mesh
        .vertices
        .iter()
        .map(|p| -(p[0] * p[0] + p[1] * p[1]) / 4.0)
        .collect();
    // mass-matrix row sums are the hat-function integrals: A/3 per triangle
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
    let dev = mesh
        .vertices
        .iter()
        .enumerate()
        .map(|(v, _)| (ns.f[v] - (exact[v] - mean)).abs())
        .fold(0.0_f64, f64::max);
    println!();
    println!("disc profile deviation from -|x|^2/4 (gauged): {dev:.2e}");

    let fam = BoundaryFamily::new(0.0).unwrap();
    let prob = fem::assemble(&mesh, &fam).unwrap();
    let res = eigen::smallest_eigenpairs(&prob, 3, 1e-9, 0).unwrap();
    let report = gap::proof_inequality_check(&mesh, &prob, &res, &ns).unwrap();
    println!();
    println!("weighted inequality margins (mu/2 + C) W at eta = 0:");
    println!("{:>20} {:>14} {:>14}", "mu", "W", "margin");
    for pair in &report.pairs {
        println!(
            "{:>20.12} {:>14.9} {:>14.9}",
            pair.mu, pair.weight, pair.margin
        );
    }
}
