//! One-dimensional quadrature: adaptive Gauss–Legendre on intervals and the
//! trapezoid rule for periodic integrands.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    let nf = order as f64;
    for i in 0..order {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(order, x);
        if d != 0.0 {
            dp = d;
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Fixed rule over `[a, b]`.
pub fn fixed_rule(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes.iter().zip(weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Adaptive quadrature settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveConfig {
    pub order: usize,
    /// Absolute error target for the whole interval.
    pub tol: f64,
    pub max_depth: u32,
    /// Cap on the total number of bisections.
    pub max_subdivisions: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig { order: 10, tol: 1e-10, max_depth: 40, max_subdivisions: 4000 }
    }
}

/// Value and error estimate of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Recursive bisection until the rule on a cell agrees with the sum over its
/// two halves. Fails with [`Error::NotConverged`] if the summed estimate
/// exceeds `cfg.tol`.
pub fn adaptive_gauss_legendre(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, cfg: &AdaptiveConfig) -> Result<Integral> {
    let (nodes, weights) = gauss_legendre(cfg.order);
    let whole = fixed_rule(f, a, b, &nodes, &weights);
    let mut budget = cfg.max_subdivisions;
    let (value, error) = refine(f, a, b, whole, cfg.tol, cfg.max_depth, &mut budget, &nodes, &weights);
    if !(error <= cfg.tol) {
        return Err(Error::NotConverged { estimate: error, tolerance: cfg.tol });
    }
    Ok(Integral { value, error })
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut usize,
    nodes: &[f64],
    weights: &[f64],
) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let left = fixed_rule(f, a, mid, nodes, weights);
    let right = fixed_rule(f, mid, b, nodes, weights);
    let err = (left + right - whole).abs();
    if err <= tol || depth == 0 || *budget == 0 {
        return (left + right, err);
    }
    *budget -= 1;
    let (lv, le) = refine(f, a, mid, left, 0.5 * tol, depth - 1, budget, nodes, weights);
    let (rv, re) = refine(f, mid, b, right, 0.5 * tol, depth - 1, budget, nodes, weights);
    (lv + rv, le + re)
}

/// Trapezoid rule with `nodes` equispaced points over one period `[0, 2π)`.
pub fn periodic_trapezoid(f: &mut dyn FnMut(f64) -> f64, nodes: usize) -> f64 {
    let h = 2.0 * core::f64::consts::PI / nodes as f64;
    (0..nodes).map(|j| f(j as f64 * h)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(6);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // ∫ x^10 = 2/11 needs degree 11 ≤ 2·6 − 1
        let v = fixed_rule(&mut |t| t.powi(10), -1.0, 1.0, &x, &w);
        assert!((v - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        // ∫₀¹ √(1−s) ds = 2/3
        let cfg = AdaptiveConfig { tol: 1e-11, ..AdaptiveConfig::default() };
        let r = adaptive_gauss_legendre(&mut |s| (1.0 - s).sqrt(), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn adaptive_reports_failure() {
        let cfg = AdaptiveConfig { tol: 1e-12, max_depth: 2, order: 4, max_subdivisions: 100 };
        let r = adaptive_gauss_legendre(&mut |s| 1.0 / s.sqrt(), 0.0, 1.0, &cfg);
        assert!(matches!(r, Err(Error::NotConverged { .. })));
    }

    #[test]
    fn trapezoid_is_spectral_for_trig() {
        let v = periodic_trapezoid(&mut |t| (3.0 * t).cos().powi(2), 16);
        assert!((v - core::f64::consts::PI).abs() < 1e-14);
    }
}
