//! Fixed quadrature rules on the reference triangle and the unit segment.

/// 3-point Gauss-Legendre nodes and weights on [0, 1], exact through degree 5.
pub const GAUSS3_SEGMENT: [(f64, f64); 3] = [
    (0.1127016653792583, 0.2777777777777778),
    (0.5, 0.4444444444444444),
    (0.8872983346207417, 0.2777777777777778),
];

/// 5-point Gauss-Legendre nodes and weights on [0, 1], exact through degree 9.
pub const GAUSS5_SEGMENT: [(f64, f64); 5] = [
    (0.04691007703066800, 0.1184634425280945),
    (0.2307653449471585, 0.2393143352496832),
    (0.5, 0.2844444444444444),
    (0.7692346550528415, 0.2393143352496832),
    (0.9530899229693320, 0.1184634425280945),
];

/// 7-point rule on the reference triangle (barycentric coordinates, weights
/// summing to 1), exact through degree 5.
pub const TRI7: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    (
        [0.0597158717897698, 0.4701420641051151, 0.4701420641051151],
        0.1323941527885062,
    ),
    (
        [0.4701420641051151, 0.0597158717897698, 0.4701420641051151],
        0.1323941527885062,
    ),
    (
        [0.4701420641051151, 0.4701420641051151, 0.0597158717897698],
        0.1323941527885062,
    ),
    (
        [0.7974269853530873, 0.1012865073234563, 0.1012865073234563],
        0.1259391805448271,
    ),
    (
        [0.1012865073234563, 0.7974269853530873, 0.1012865073234563],
        0.1259391805448271,
    ),
    (
        [0.1012865073234563, 0.1012865073234563, 0.7974269853530873],
        0.1259391805448271,
    ),
];

/// Integrates f over a triangle with vertices p0, p1, p2 using the degree-5 rule.
pub fn integrate_triangle<F: FnMut(f64, f64) -> f64>(
    p0: [f64; 2],
    p1: [f64; 2],
    p2: [f64; 2],
    mut f: F,
) -> f64 {
    let area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1])).abs();
    let mut acc = 0.0;
    for (bary, w) in TRI7 {
        let x = bary[0] * p0[0] + bary[1] * p1[0] + bary[2] * p2[0];
        let y = bary[0] * p0[1] + bary[1] * p1[1] + bary[2] * p2[1];
        acc += w * f(x, y);
    }
    acc * area
}
