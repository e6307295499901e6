//! Gap versus bound across the boundary family on a Fourier star domain.
//! B shrinks toward the zigzag angle and the computed gap tracks it from above.

use std::f64::consts::PI;

use diracgap::boundary::BoundaryFamily;
use diracgap::gap::Verdict;
use diracgap::geometry::{triangulate, BoundaryCurve, Harmonic};
use diracgap::{eigen, fem, gap};

fn main() {
    let curve = BoundaryCurve::fourier(
        1.0,
        vec![Harmonic {
            n: 3,
            a: 0.2,
            b: 0.0,
        }],
    )
    .unwrap();
    let mesh = triangulate(&curve, 0.12).unwrap();
    println!("domain {}   area {:.9}", curve.label(), curve.area());
    println!(
        "{:>10} {:>10} {:>12} {:>12} {:>12} {:>6}",
        "eta", "B", "bound", "gap", "margin", "pass"
    );
    for eta in [0.0, PI / 6.0, PI / 4.0, PI / 3.0, 1.2, PI] {
        let fam = BoundaryFamily::new(eta).unwrap();
        let prob = fem::assemble(&mesh, &fam).unwrap();
        let res = eigen::smallest_eigenpairs(&prob, 1, 1e-9, 0).unwrap();
        let report = gap::check_gap(&res, curve.area(), &fam, 0.0).unwrap();
        println!(
            "{:>10.6} {:>10.6} {:>12.8} {:>12.8} {:>12.8} {:>6}",
            eta,
            report.b_factor,
            report.bound,
            report.gap,
            report.margin,
            report.verdict == Verdict::Pass,
        );
    }
}
