//! Scalar numerics: the Gaussian tail function and a fixed Gauss-Legendre rule.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::sync::OnceLock;

/// Gaussian tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Roots of `P_n` are refined by Newton's method from the Chebyshev-like
/// initial guess; weights follow from `P_n'` at each root.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Number of nodes in the production rule for the `theta` integrals.
pub const THETA_NODES: usize = 64;

/// The `THETA_NODES`-point rule mapped onto `[0, pi/2]`, pre-multiplied by `1/pi`,
/// stored as `(sin^2 theta, weight)` pairs.
pub(crate) fn theta_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let (x, w) = gauss_legendre(THETA_NODES);
        x.iter()
            .zip(&w)
            .map(|(&xi, &wi)| {
                let theta = FRAC_PI_2 * 0.5 * (xi + 1.0);
                let s = theta.sin();
                (s * s, wi * FRAC_PI_2 * 0.5 / PI)
            })
            .collect()
    })
}

/// `(1/pi) * integral_0^{pi/2} f(sin^2 theta) d theta` with the production rule.
pub fn integrate_theta<F: Fn(f64) -> f64>(f: F) -> f64 {
    theta_rule().iter().map(|&(s2, w)| w * f(s2)).sum()
}

/// Below this `c = lambda / (4 N0)` the integrand dips too sharply near
/// `theta = 0` for a single rule and [`integrate_theta_graded`] switches to panels.
pub const GRADED_THRESHOLD: f64 = 0.05;

/// Like [`integrate_theta`] for integrands whose narrowest feature near
/// `theta = 0` has width about `sqrt(c_min)`. Small `c_min` uses dyadically
/// graded panels `[0, t_1], [t_1, 2 t_1], ...` each with the production rule.
pub fn integrate_theta_graded<F: Fn(f64) -> f64>(f: F, c_min: f64) -> f64 {
    if c_min >= GRADED_THRESHOLD {
        return integrate_theta(f);
    }
    let (x, w) = gl_base();
    let mut panels = 1;
    let mut left = FRAC_PI_2;
    while left > 0.25 * c_min.sqrt() && panels < 60 {
        left *= 0.5;
        panels += 1;
    }
    let mut total = 0.0;
    let mut a = 0.0;
    let mut b = left;
    for _ in 0..panels {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let part: f64 = x
            .iter()
            .zip(w)
            .map(|(&xi, &wi)| {
                let s = (mid + half * xi).sin();
                wi * f(s * s)
            })
            .sum();
        total += half * part;
        a = b;
        b = (2.0 * b).min(FRAC_PI_2);
    }
    total / PI
}

fn gl_base() -> (&'static [f64], &'static [f64]) {
    static BASE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (x, w) = BASE.get_or_init(|| gauss_legendre(THETA_NODES));
    (x, w)
}

/// Binomial coefficient as `f64` (exact for the small arguments used here).
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
