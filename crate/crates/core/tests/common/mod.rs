//! Independent reference values for the integration tests.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

pub fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(1/pi) int_0^{pi/2} (sin^2 t / (sin^2 t + c))^r dt` in closed form:
/// `[(1-mu)/2]^r sum_{k<r} binom(r-1+k, k) [(1+mu)/2]^k`, `mu = sqrt(c/(1+c))`.
pub fn single_upep(c: f64, r: u32) -> f64 {
    let mu = (c / (1.0 + c)).sqrt();
    // 1 - mu without cancellation
    let one_minus = 1.0 / ((1.0 + c) * (1.0 + mu));
    let lead = (0.5 * one_minus).powi(r as i32);
    let tail: f64 = (0..u64::from(r))
        .map(|k| binomial(u64::from(r) - 1 + k, k) * (0.5 * (1.0 + mu)).powi(k as i32))
        .sum();
    lead * tail
}

/// Two eigenvalues with `c_d = lambda_d / (4 N0)`, via partial fractions in
/// `t = 1 / sin^2`: `1/((1+c1 t)^r (1+c2 t)^r) = sum_j a_j/(1+c1 t)^j + b_j/(1+c2 t)^j`.
pub fn pair_upep(c1: f64, c2: f64, r: u32) -> f64 {
    if (c1 - c2).abs() <= 1e-12 * c1.max(c2) {
        return single_upep(c1, 2 * r);
    }
    let side = |ca: f64, cb: f64| -> f64 {
        let alpha = ca / (ca - cb);
        let beta = cb / (ca - cb);
        let ru = u64::from(r);
        (1..=ru)
            .map(|j| {
                let i = ru - j;
                let coef = alpha.powi(r as i32) * binomial(ru + i - 1, i) * (-beta).powi(i as i32);
                coef * single_upep(ca, j as u32)
            })
            .sum()
    };
    side(c1, c2) + side(c2, c1)
}

/// `n`-interval trapezoid rule for `(1/pi) int_0^{pi/2} f(sin^2 t) dt`.
pub fn trapezoid_theta<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    let h = FRAC_PI_2 / n as f64;
    let mut s = 0.5 * (f(0.0) + f(1.0));
    for i in 1..n {
        let t = (i as f64 * h).sin();
        s += f(t * t);
    }
    s * h / PI
}

/// Linear interpolation of `log10(ber)` to find where a decreasing curve crosses `target`.
pub fn crossing(points: &[(f64, f64)], target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        if b0 > target && b1 <= target && b1 > 0.0 {
            let (l0, l1, lt) = (b0.log10(), b1.log10(), target.log10());
            Some(s0 + (s1 - s0) * (l0 - lt) / (l0 - l1))
        } else {
            None
        }
    })
}
