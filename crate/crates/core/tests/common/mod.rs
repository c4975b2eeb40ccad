#![allow(dead_code)]

use gce_core::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Eighth-order central first derivative of `f` at `x`.
pub fn d1(f: &dyn Fn(f64) -> Complex64, x: f64, h: f64) -> Complex64 {
    const W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let mut acc = c(0.0, 0.0);
    for (k, w) in W.iter().enumerate() {
        let s = (k + 1) as f64 * h;
        acc += (f(x + s) - f(x - s)) * *w;
    }
    acc / h
}

/// Eighth-order central second derivative of `f` at `x`.
pub fn d2(f: &dyn Fn(f64) -> Complex64, x: f64, h: f64) -> Complex64 {
    const W0: f64 = -205.0 / 72.0;
    const W: [f64; 4] = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let mut acc = f(x) * W0;
    for (k, w) in W.iter().enumerate() {
        let s = (k + 1) as f64 * h;
        acc += (f(x + s) + f(x - s)) * *w;
    }
    acc / (h * h)
}

/// `count` sample points spread over `(lo, hi)`, each at least `margin` away from
/// every breakpoint.
pub fn interior_points(lo: f64, hi: f64, count: usize, breakpoints: &[f64], margin: f64) -> Vec<f64> {
    let candidates = 4 * count;
    let step = (hi - lo) / candidates as f64;
    let usable: Vec<f64> = (0..candidates)
        .map(|k| lo + step * (k as f64 + 0.5))
        .filter(|x| breakpoints.iter().all(|b| (x - b).abs() > margin))
        .collect();
    assert!(usable.len() >= count, "not enough sample points away from breakpoints");
    (0..count).map(|i| usable[i * usable.len() / count]).collect()
}

pub fn max_dev(values: &[Complex64]) -> f64 {
    let mean = values.iter().sum::<Complex64>() / values.len() as f64;
    values.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max) / mean.norm().max(1e-30)
}
