//! Closed-form disc spectrum via Bessel functions, the independent analytic
//! oracle the finite-element pipeline is validated against.
//!
//! On a disc of radius R the radial reduction of the operator turns the
//! boundary condition u₂ = t u₁ into the transcendental condition
//! J_m(kR) = J_{m+1}(kR) per angular index m ≥ 0. The Bessel evaluation is
//! deliberately in-repo so the oracle shares no code with what it validates.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiscError {
    #[error("Bessel order n = {n} outside supported range 0..=50")]
    OrderOutOfRange { n: u32 },
    #[error("Bessel argument x = {x} outside supported range |x| <= 100")]
    ArgumentOutOfRange { x: f64 },
    #[error("disc radius {radius} must be positive and finite")]
    BadRadius { radius: f64 },
    #[error("angular index cap m_max = {m_max} exceeds supported maximum 20")]
    TooManyChannels { m_max: u32 },
    #[error("per-channel root count {per_m} outside 1..=10")]
    BadRootCount { per_m: u32 },
    #[error("root polish stalled in channel m = {m}: residual {residual:.3e}")]
    PolishFailure { m: u32, residual: f64 },
}

const MAX_ORDER: u32 = 50;
const MAX_ARGUMENT: f64 = 100.0;
/// Crossover between the ascending series and Miller's backward recurrence.
const SERIES_LIMIT: f64 = 9.0;

/// J_n(x), the Bessel function of the first kind of integer order.
///
/// Ascending series for |x| ≤ 9, backward recurrence normalized by the
/// Neumann sum J₀ + 2·Σ J_{2k} = 1 beyond. Absolute error ≤ 1e−12 on the
/// supported domain 0 ≤ n ≤ 50, |x| ≤ 100.
pub fn bessel_j(n: u32, x: f64) -> Result<f64, DiscError> {
    if n > MAX_ORDER {
        return Err(DiscError::OrderOutOfRange { n });
    }
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(DiscError::ArgumentOutOfRange { x });
    }
    let ax = x.abs();
    let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let value = if ax <= SERIES_LIMIT {
        series(n, ax)
    } else {
        miller(n, ax)
    };
    Ok(sign * value)
}

/// Ascending power series Σ (−1)^k (x/2)^{n+2k} / (k! (n+k)!).
fn series(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let half = x / 2.0;
    let mut term = 1.0;
    for i in 1..=n {
        term *= half / i as f64;
    }
    let mut sum = term;
    let q = half * half;
    for k in 0..80u32 {
        term *= -q / ((k + 1) as f64 * (n + k + 1) as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs().max(1e-280) && k as f64 >= half {
            break;
        }
    }
    sum
}

/// One backward-recurrence sweep from index `start` down to 0, returning the
/// normalized J_n.
fn miller_pass(n: u32, x: f64, start: u32) -> f64 {
    debug_assert!(start >= n);
    let mut above = 0.0f64;
    let mut current = 1e-30f64;
    let mut norm = 0.0f64;
    let mut captured = f64::NAN;
    let mut k = start;
    loop {
        if k == n {
            captured = current;
        }
        if k == 0 {
            norm += current;
            break;
        }
        if k % 2 == 0 {
            norm += 2.0 * current;
        }
        let below = (2.0 * k as f64 / x) * current - above;
        above = current;
        current = below;
        k -= 1;
        if current.abs() > 1e250 {
            above /= 1e250;
            current /= 1e250;
            norm /= 1e250;
            if !captured.is_nan() {
                captured /= 1e250;
            }
        }
    }
    captured / norm
}

/// Miller's algorithm with an adaptive starting index: the start is raised
/// until two successive sweeps agree, which certifies the seed decay.
fn miller(n: u32, x: f64) -> f64 {
    let base = n.max(x.ceil() as u32);
    let mut start = base + 22;
    if start % 2 == 1 {
        start += 1;
    }
    let mut previous = miller_pass(n, x, start);
    loop {
        start += 20;
        let refined = miller_pass(n, x, start);
        if (refined - previous).abs() <= 1e-15 * refined.abs().max(1e-280) || start > base + 300 {
            return refined;
        }
        previous = refined;
    }
}

/// The radial boundary condition in the scaled variable z = kR.
fn radial_mismatch(m: u32, z: f64) -> f64 {
    // orders stay within domain because callers cap m at 20
    bessel_j(m, z).unwrap() - bessel_j(m + 1, z).unwrap()
}

/// One positive root of the radial condition with its search provenance.
#[derive(Debug, Clone, Serialize)]
pub struct RootRecord {
    pub m: u32,
    /// 1-based position of the root within its channel.
    pub index: u32,
    pub k: f64,
    pub bracket: (f64, f64),
    pub iterations: u32,
    pub residual: f64,
}

/// Positive disc eigenvalues grouped by angular index.
#[derive(Debug, Clone, Serialize)]
pub struct DiscSpectrum {
    pub radius: f64,
    pub roots: Vec<RootRecord>,
}

impl DiscSpectrum {
    pub fn smallest(&self) -> Option<&RootRecord> {
        self.roots.iter().min_by(|a, b| a.k.total_cmp(&b.k))
    }

    pub fn channel(&self, m: u32) -> impl Iterator<Item = &RootRecord> {
        self.roots.iter().filter(move |r| r.m == m)
    }
}

const SCAN_START: f64 = 1e-3;
const SCAN_END: f64 = 20.0;
const SCAN_STEP: f64 = 1e-3;

/// Bisect then secant-polish a sign change of the radial condition.
fn refine_root(m: u32, mut lo: f64, mut hi: f64) -> (f64, u32) {
    let mut f_lo = radial_mismatch(m, lo);
    let mut iterations = 0u32;
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = radial_mismatch(m, mid);
        iterations += 1;
        if f_mid == 0.0 {
            return (mid, iterations);
        }
        if (f_lo < 0.0) == (f_mid < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    // secant polish inside the final bracket
    let mut a = lo;
    let mut b = hi;
    let mut fa = radial_mismatch(m, a);
    let mut fb = radial_mismatch(m, b);
    for _ in 0..4 {
        if fa == fb {
            break;
        }
        let c = b - fb * (b - a) / (fb - fa);
        if !(lo..=hi).contains(&c) {
            break;
        }
        iterations += 1;
        a = b;
        fa = fb;
        b = c;
        fb = radial_mismatch(m, b);
    }
    if fb.abs() <= fa.abs() {
        (b, iterations)
    } else {
        (a, iterations)
    }
}

/// All roots of J_m(kR) = J_{m+1}(kR) inside the scan window kR ∈ (0, 20],
/// up to `per_m` roots for each m ≤ m_max.
pub fn disc_eigenvalues(radius: f64, m_max: u32, per_m: u32) -> Result<DiscSpectrum, DiscError> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(DiscError::BadRadius { radius });
    }
    if m_max > 20 {
        return Err(DiscError::TooManyChannels { m_max });
    }
    if per_m == 0 || per_m > 10 {
        return Err(DiscError::BadRootCount { per_m });
    }
    let mut roots = Vec::new();
    for m in 0..=m_max {
        roots.extend(channel_roots(radius, m, per_m)?);
    }
    Ok(DiscSpectrum { radius, roots })
}

fn channel_roots(radius: f64, m: u32, per_m: u32) -> Result<Vec<RootRecord>, DiscError> {
    let mut found = Vec::new();
    let steps = ((SCAN_END - SCAN_START) / SCAN_STEP).round() as u64;
    let mut z_prev = SCAN_START;
    let mut f_prev = radial_mismatch(m, z_prev);
    for i in 1..=steps {
        let z = SCAN_START + i as f64 * SCAN_STEP;
        let f = radial_mismatch(m, z);
        if f_prev == 0.0 || (f_prev < 0.0) != (f < 0.0) {
            let (z_root, iterations) = if f_prev == 0.0 {
                (z_prev, 0)
            } else {
                refine_root(m, z_prev, z)
            };
            let k = z_root / radius;
            let residual = radial_mismatch(m, k * radius).abs();
            if residual > 1e-12 {
                return Err(DiscError::PolishFailure { m, residual });
            }
            found.push(RootRecord {
                m,
                index: found.len() as u32 + 1,
                k,
                bracket: (z_prev / radius, z / radius),
                iterations,
                residual,
            });
            if found.len() as u32 >= per_m {
                break;
            }
        }
        z_prev = z;
        f_prev = f;
    }
    Ok(found)
}

/// Smallest positive k with J₀(kR) = J₁(kR): the lowest disc eigenvalue
/// magnitude under the η = 0 condition.
pub fn k0(radius: f64) -> Result<f64, DiscError> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(DiscError::BadRadius { radius });
    }
    let roots = channel_roots(radius, 0, 1)?;
    debug_assert_eq!(roots.len(), 1, "scan window always brackets the first root");
    Ok(roots[0].k)
}
