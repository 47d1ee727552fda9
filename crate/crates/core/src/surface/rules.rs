//! 1-D quadrature rules used to build surface node lattices.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1], ascending nodes.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Newton iteration on P_n from the Chebyshev initial guess; computes the
    // i-th largest root, stored in ascending order.
    for i in 0..n {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, t);
            let step = p / dp;
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, p_prime) = legendre_with_derivative(n, t);
        nodes[i] = -t;
        weights[i] = 2.0 / ((1.0 - t * t) * p_prime * p_prime);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = 0.0;
    for k in 0..n {
        let p2 = p1;
        p1 = p0;
        p0 = ((2 * k + 1) as f64 * t * p1 - k as f64 * p2) / (k as f64 + 1.0);
    }
    let dp = n as f64 * (t * p0 - p1) / (t * t - 1.0);
    (p0, dp)
}

/// Node/weight pairs covering [a, b].
///
/// Periodic directions get the uniform trapezoid lattice (no endpoint
/// duplication); non-periodic directions get Gauss–Legendre, whose nodes stay
/// strictly interior and therefore never land on polar chart singularities.
pub fn line_rule(a: f64, b: f64, n: usize, periodic: bool) -> Vec<(f64, f64)> {
    let span = b - a;
    if periodic {
        let h = span / n as f64;
        (0..n).map(|i| (a + i as f64 * h, h)).collect()
    } else {
        let (nodes, weights) = gauss_legendre(n);
        nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| (a + 0.5 * span * (x + 1.0), 0.5 * span * w))
            .collect()
    }
}
