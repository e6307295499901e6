//! The spectral gap bound sqrt(2 pi / area) * B on one domain, plus the
//! physical scale it sets for a graphene flake of the same area.

use diracgap::boundary::BoundaryFamily;
use diracgap::geometry::{triangulate, BoundaryCurve};
use diracgap::{eigen, fem, gap};

fn main() {
    let curve = BoundaryCurve::ellipse(1.5, 0.75).unwrap();
    let fam = BoundaryFamily::new(std::f64::consts::FRAC_PI_6).unwrap();
    let mesh = triangulate(&curve, 0.08).unwrap();
    let prob = fem::assemble(&mesh, &fam).unwrap();
    let res = eigen::smallest_eigenpairs(&prob, 3, 1e-9, 0).unwrap();
    let report = gap::check_gap(&res, curve.area(), &fam, 0.0).unwrap();

    println!("domain        {}", curve.label());
    println!(
        "eta           {:.6}   beta {:.6}   B {:.6}",
        fam.eta(),
        fam.beta(),
        fam.b_factor()
    );
    println!("area          {:.9}", report.area);
    println!("computed gap  {:.9}", report.gap);
    println!("lower bound   {:.9}", report.bound);
    println!("margin        {:.9}", report.margin);
    println!("verdict       {:?}", report.verdict);

    let area_nm2 = 10.9;
    let ev = gap::physical_gap(area_nm2).unwrap();
    println!();
    println!("a {area_nm2} nm^2 flake with B = 1 opens a gap of at least {ev:.3} eV");
}
