//! Parametrized C^2 boundary curves: disc, ellipse, and truncated Fourier star.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GeometryError;

/// One Fourier harmonic of a star-shaped radius function:
/// contributes a*cos(n θ) + b*sin(n θ).
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Harmonic {
    pub n: u32,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
}

/// Closed counterclockwise boundary curve, parametrized by θ ∈ [0, 2π).
///
/// All variants are star-shaped about the origin, which the mesh generator
/// relies on. Construction validates positivity of the radius and the total
/// curvature ∮κ ds = 2π.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum BoundaryCurve {
    Disc {
        #[serde(rename = "R")]
        r: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    Fourier {
        r0: f64,
        harmonics: Vec<Harmonic>,
    },
}

/// Pointwise curve data at a parameter value.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub point: [f64; 2],
    /// unit tangent as a complex phase t1 + i t2
    pub tangent: Complex64,
    /// outward unit normal as a complex number n1 + i n2
    pub normal: Complex64,
    pub curvature: f64,
    /// |dγ/dθ|, the arclength density
    pub speed: f64,
}

impl BoundaryCurve {
    pub fn disc(r: f64) -> Result<Self, GeometryError> {
        let c = BoundaryCurve::Disc { r };
        c.validate()?;
        Ok(c)
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self, GeometryError> {
        let c = BoundaryCurve::Ellipse { a, b };
        c.validate()?;
        Ok(c)
    }

    pub fn fourier(r0: f64, harmonics: Vec<Harmonic>) -> Result<Self, GeometryError> {
        let c = BoundaryCurve::Fourier { r0, harmonics };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        match self {
            BoundaryCurve::Disc { r } => {
                if !r.is_finite() || *r <= 0.0 {
                    return Err(GeometryError::InvalidCurve(format!(
                        "disc radius {r} must be positive"
                    )));
                }
            }
            BoundaryCurve::Ellipse { a, b } => {
                if !(a.is_finite() && b.is_finite()) || *a <= 0.0 || *b <= 0.0 {
                    return Err(GeometryError::InvalidCurve(format!(
                        "ellipse semi-axes ({a}, {b}) must be positive"
                    )));
                }
            }
            BoundaryCurve::Fourier { r0, harmonics } => {
                if !r0.is_finite() || *r0 <= 0.0 {
                    return Err(GeometryError::InvalidCurve(format!(
                        "base radius {r0} must be positive"
                    )));
                }
                for h in harmonics {
                    if h.n == 0 || !h.a.is_finite() || !h.b.is_finite() {
                        return Err(GeometryError::InvalidCurve(
                            "harmonics need n >= 1 and finite coefficients".into(),
                        ));
                    }
                }
                // positivity of r(θ) checked on a dense grid
                let samples = 256 * (1 + harmonics.iter().map(|h| h.n).max().unwrap_or(1) as usize);
                for i in 0..samples {
                    let theta = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
                    let r = self.radius(theta);
                    if r <= 0.0 {
                        return Err(GeometryError::InvalidCurve(format!(
                            "radius {r:.3e} non-positive at θ = {theta:.4}"
                        )));
                    }
                }
            }
        }
        let total = self.total_curvature();
        if (total - 2.0 * std::f64::consts::PI).abs() > 1e-8 {
            return Err(GeometryError::InvalidCurve(format!(
                "total curvature {total} deviates from 2π; curve is not simple"
            )));
        }
        Ok(())
    }

    fn radius(&self, theta: f64) -> f64 {
        match self {
            BoundaryCurve::Disc { r } => *r,
            BoundaryCurve::Ellipse { .. } => unreachable!("ellipse is not in polar form"),
            BoundaryCurve::Fourier { r0, harmonics } => {
                let mut r = *r0;
                for h in harmonics {
                    let (s, c) = (h.n as f64 * theta).sin_cos();
                    r += h.a * c + h.b * s;
                }
                r
            }
        }
    }

    /// Position γ(θ).
    pub fn position(&self, theta: f64) -> [f64; 2] {
        let (s, c) = theta.sin_cos();
        match self {
            BoundaryCurve::Disc { r } => [r * c, r * s],
            BoundaryCurve::Ellipse { a, b } => [a * c, b * s],
            BoundaryCurve::Fourier { .. } => {
                let r = self.radius(theta);
                [r * c, r * s]
            }
        }
    }

    /// First and second θ-derivatives of γ, both analytic.
    fn derivatives(&self, theta: f64) -> ([f64; 2], [f64; 2]) {
        let (s, c) = theta.sin_cos();
        match self {
            BoundaryCurve::Disc { r } => ([-r * s, r * c], [-r * c, -r * s]),
            BoundaryCurve::Ellipse { a, b } => ([-a * s, b * c], [-a * c, -b * s]),
            BoundaryCurve::Fourier { r0, harmonics } => {
                let mut r = *r0;
                let mut dr = 0.0;
                let mut ddr = 0.0;
                for h in harmonics {
                    let n = h.n as f64;
                    let (sn, cn) = (n * theta).sin_cos();
                    r += h.a * cn + h.b * sn;
                    dr += n * (-h.a * sn + h.b * cn);
                    ddr += n * n * (-h.a * cn - h.b * sn);
                }
                let d1 = [dr * c - r * s, dr * s + r * c];
                let d2 = [
                    ddr * c - 2.0 * dr * s - r * c,
                    ddr * s + 2.0 * dr * c - r * s,
                ];
                (d1, d2)
            }
        }
    }

    /// Evaluates position, unit tangent phase, outward normal, and signed
    /// curvature at θ. Counterclockwise orientation gives κ = 1/R on a circle.
    pub fn evaluate(&self, theta: f64) -> CurvePoint {
        let point = self.position(theta);
        let (d1, d2) = self.derivatives(theta);
        let speed = (d1[0] * d1[0] + d1[1] * d1[1]).sqrt();
        let tangent = Complex64::new(d1[0] / speed, d1[1] / speed);
        // outward normal is the tangent rotated by -90 degrees
        let normal = tangent * Complex64::new(0.0, -1.0);
        let curvature = (d1[0] * d2[1] - d1[1] * d2[0]) / (speed * speed * speed);
        CurvePoint {
            point,
            tangent,
            normal,
            curvature,
            speed,
        }
    }

    /// Enclosed area by the Green's-theorem quadrature ½∮(x y' − y x') dθ.
    ///
    /// The integrand is a trigonometric polynomial for every curve in the
    /// family, so the uniform trapezoid rule below the Nyquist count is exact
    /// up to roundoff.
    pub fn area(&self) -> f64 {
        let n = self.quadrature_points();
        let mut acc = 0.0;
        for i in 0..n {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let p = self.position(theta);
            let (d1, _) = self.derivatives(theta);
            acc += 0.5 * (p[0] * d1[1] - p[1] * d1[0]);
        }
        acc * 2.0 * std::f64::consts::PI / n as f64
    }

    /// ∮ κ ds over the closed curve; equals 2π for every simple C^2 curve.
    pub fn total_curvature(&self) -> f64 {
        // periodic analytic integrand: uniform trapezoid converges spectrally
        let n = (8 * self.quadrature_points()).max(1024);
        let mut acc = 0.0;
        for i in 0..n {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let (d1, d2) = self.derivatives(theta);
            let speed2 = d1[0] * d1[0] + d1[1] * d1[1];
            acc += (d1[0] * d2[1] - d1[1] * d2[0]) / speed2;
        }
        acc * 2.0 * std::f64::consts::PI / n as f64
    }

    fn quadrature_points(&self) -> usize {
        let max_n = match self {
            BoundaryCurve::Fourier { harmonics, .. } => {
                harmonics.iter().map(|h| h.n).max().unwrap_or(0) as usize
            }
            _ => 1,
        };
        (8 * max_n + 64).max(64)
    }

    /// Arc length of the parameter interval [θ0, θ1] by composite 5-point Gauss.
    pub fn arc_length(&self, theta0: f64, theta1: f64) -> f64 {
        let pieces = 4;
        let mut acc = 0.0;
        for k in 0..pieces {
            let a = theta0 + (theta1 - theta0) * k as f64 / pieces as f64;
            let b = theta0 + (theta1 - theta0) * (k + 1) as f64 / pieces as f64;
            for (x, w) in crate::quadrature::GAUSS5_SEGMENT {
                let theta = a + (b - a) * x;
                let (d1, _) = self.derivatives(theta);
                acc += w * (b - a) * (d1[0] * d1[0] + d1[1] * d1[1]).sqrt();
            }
        }
        acc
    }

    /// Largest distance between two boundary points, estimated on a dense grid.
    pub fn diameter(&self) -> f64 {
        let n = 256;
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|i| self.position(2.0 * std::f64::consts::PI * i as f64 / n as f64))
            .collect();
        let mut d2: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = pts[i][0] - pts[j][0];
                let dy = pts[i][1] - pts[j][1];
                d2 = d2.max(dx * dx + dy * dy);
            }
        }
        d2.sqrt()
    }

    /// max over θ of |γ(θ)| and |γ'(θ)|, used by the mesh generator to bound
    /// element sizes.
    pub fn size_bounds(&self) -> (f64, f64) {
        let n = 1024;
        let mut max_pos: f64 = 0.0;
        let mut max_speed: f64 = 0.0;
        for i in 0..n {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let p = self.position(theta);
            let (d1, _) = self.derivatives(theta);
            max_pos = max_pos.max((p[0] * p[0] + p[1] * p[1]).sqrt());
            max_speed = max_speed.max((d1[0] * d1[0] + d1[1] * d1[1]).sqrt());
        }
        (max_pos, max_speed)
    }

    /// Short human-readable identifier for reports and file names.
    pub fn label(&self) -> String {
        match self {
            BoundaryCurve::Disc { r } => format!("disc(R={r})"),
            BoundaryCurve::Ellipse { a, b } => format!("ellipse(a={a},b={b})"),
            BoundaryCurve::Fourier { r0, harmonics } => {
                let terms: Vec<String> = harmonics
                    .iter()
                    .map(|h| format!("{}:{},{}", h.n, h.a, h.b))
                    .collect();
                format!("fourier(r0={r0};{})", terms.join(";"))
            }
        }
    }

    /// The same shape scaled by a positive factor.
    pub fn scaled(&self, factor: f64) -> BoundaryCurve {
        match self {
            BoundaryCurve::Disc { r } => BoundaryCurve::Disc { r: r * factor },
            BoundaryCurve::Ellipse { a, b } => BoundaryCurve::Ellipse {
                a: a * factor,
                b: b * factor,
            },
            BoundaryCurve::Fourier { r0, harmonics } => BoundaryCurve::Fourier {
                r0: r0 * factor,
                harmonics: harmonics
                    .iter()
                    .map(|h| Harmonic {
                        n: h.n,
                        a: h.a * factor,
                        b: h.b * factor,
                    })
                    .collect(),
            },
        }
    }
}
