//! Quadrature oracle independent of the library's adaptive integrator.
#![allow(dead_code)]

const NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

/// Composite five-point Gauss–Legendre with `panels` equal panels,
/// additionally split at `breaks` (kinks of the integrand).
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], panels: usize) -> f64 {
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&k| k > a && k < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let h = (w[1] - w[0]) / panels as f64;
        for k in 0..panels {
            let lo = w[0] + h * k as f64;
            let mid = lo + 0.5 * h;
            total += 0.5
                * h
                * NODES
                    .iter()
                    .zip(WEIGHTS)
                    .map(|(t, wt)| wt * f(mid + 0.5 * h * t))
                    .sum::<f64>();
        }
    }
    total
}

/// Generalized inverse of a nondecreasing `g` on `[a, b]` by bisection.
pub fn bisect_inverse(g: impl Fn(f64) -> f64, p: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (a, b);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= p {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
