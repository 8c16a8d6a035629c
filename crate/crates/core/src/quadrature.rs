//! Gauss–Hermite rules and uniform composite rules.

use std::f64::consts::PI;

/// Nodes of the `n`-point Gauss–Hermite rule together with the weights
/// rescaled by `e^{x²}`, so that `∫ g(x) dx ≈ Σ wᵢ g(xᵢ)` for integrands that
/// already contain their own Gaussian decay.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    /// `wᵢ e^{xᵢ²}` where `wᵢ` are the classical weights for `∫ e^{-x²} f`.
    pub scaled_weights: Vec<f64>,
}

/// Orthonormal Hermite polynomials `pₙ(z)` and `√(2n) pₙ₋₁(z)` in the form
/// `(value, derivative, log_scale)`, rescaled on the fly so large `n` cannot
/// overflow. The true values are `value · e^{log_scale}`.
fn orthonormal_pair(n: usize, z: f64) -> (f64, f64, f64) {
    let mut p1 = PI.powf(-0.25);
    let mut p2 = 0.0;
    let mut log_scale = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
        if p1.abs() > 1e150 {
            p1 *= 1e-150;
            p2 *= 1e-150;
            log_scale += 150.0 * 10f64.ln();
        }
    }
    (p1, (2.0 * n as f64).sqrt() * p2, log_scale)
}

/// Number of eigenvalues of the Jacobi matrix of order `n` below `x`.
fn sturm_count(n: usize, x: f64) -> usize {
    let mut count = 0;
    let mut q = -x;
    if q < 0.0 {
        count += 1;
    }
    for k in 1..n {
        let b2 = k as f64 / 2.0;
        let denom = if q == 0.0 { f64::EPSILON } else { q };
        q = -x - b2 / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

impl GaussHermite {
    /// Nodes by Sturm bisection on the Jacobi matrix, polished by Newton
    /// steps on the orthonormal recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Hermite rule needs at least one node");
        let bound = (2.0 * n as f64 + 2.0).sqrt();
        let mut nodes = Vec::with_capacity(n);
        let mut scaled_weights = Vec::with_capacity(n);
        for i in 0..n {
            let (mut lo, mut hi) = (-bound, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if sturm_count(n, mid) > i {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                    break;
                }
            }
            let mut z = 0.5 * (lo + hi);
            for _ in 0..3 {
                let (p, dp, _) = orthonormal_pair(n, z);
                if dp == 0.0 {
                    break;
                }
                let step = p / dp;
                if step.abs() > hi - lo + 1e-12 {
                    break;
                }
                z -= step;
            }
            let (_, dp, log_scale) = orthonormal_pair(n, z);
            // wᵢ e^{zᵢ²} = 2 e^{z²} / p'(z)²
            let lw = 2f64.ln() - 2.0 * (dp.abs().ln() + log_scale) + z * z;
            nodes.push(if n % 2 == 1 && i == n / 2 { 0.0 } else { z });
            scaled_weights.push(lw.exp());
        }
        GaussHermite {
            nodes,
            scaled_weights,
        }
    }

    /// `∫ g(x) dx` for `g` with Gaussian-type decay.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }
}

/// `n` equally spaced points covering `[lo, hi]` including both ends.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + h * i as f64).collect()
}

/// Composite trapezoid rule on samples at uniform spacing `h`.
pub fn trapezoid_uniform(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (values[0] + values[n - 1]) + values[1..n - 1].iter().sum::<f64>()),
    }
}

/// Composite trapezoid rule on arbitrary increasing abscissae.
pub fn trapezoid(t: &[f64], values: &[f64]) -> f64 {
    t.windows(2)
        .zip(values.windows(2))
        .map(|(tw, vw)| 0.5 * (tw[1] - tw[0]) * (vw[0] + vw[1]))
        .sum()
}
