//! Hermite functions `hₙ(x) = (2ⁿn!√π)^{-1/2} Hₙ(x) e^{-x²/2}`, coefficient
//! transforms and tail estimates.
//!
//! Coefficients are `dₙ = ⟨f e^{|x|²/2}, hₙ⟩`, so that data of the form
//! `Σ dₙ hₙ e^{-|x|²/2}` is reproduced exactly. Another common convention
//! differs by `(-1)ⁿ`; [`b_from_d`] absorbs that sign.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussHermite;
use crate::special::factorial;

/// `hₙ(x) e^{x²/2}` for `n = 0..=order`, i.e. the orthonormal polynomials.
pub fn hermite_polys(order: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    out.push(PI.powf(-0.25));
    if order >= 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for n in 1..order {
        let nf = n as f64;
        let next = x * (2.0 / (nf + 1.0)).sqrt() * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// `h₀(x), …, h_order(x)`.
pub fn hermite_fns(order: usize, x: f64) -> Vec<f64> {
    let g = (-0.5 * x * x).exp();
    let mut v = hermite_polys(order, x);
    v.iter_mut().for_each(|h| *h *= g);
    v
}

pub fn hermite_fn(n: usize, x: f64) -> f64 {
    hermite_fns(n, x)[n]
}

/// Coefficients `dₙ` over the full tensor index set `{0..=order}^dim`, stored
/// row-major with the last coordinate fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteCoeffs {
    #[serde(rename = "N")]
    pub order: usize,
    pub dim: usize,
    pub d: Vec<f64>,
}

impl HermiteCoeffs {
    pub fn zeros(order: usize, dim: usize) -> Self {
        HermiteCoeffs {
            order,
            dim,
            d: vec![0.0; (order + 1).pow(dim as u32)],
        }
    }

    /// One-dimensional coefficients from a list.
    pub fn from_list(d: Vec<f64>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::Parameter("empty Hermite coefficient list".into()));
        }
        Ok(HermiteCoeffs {
            order: d.len() - 1,
            dim: 1,
            d,
        })
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        multi_index(flat, self.order + 1, self.dim)
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * (self.order + 1) + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.d[self.flat_index(idx)]
    }

    /// `Σ dₙ hₙ(x) e^{-|x|²/2}`.
    pub fn reconstruct(&self, x: &[f64]) -> f64 {
        let polys: Vec<Vec<f64>> = x.iter().map(|&xi| hermite_fns(self.order, xi)).collect();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let g = (-0.5 * r2).exp();
        self.d
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(flat, &v)| {
                let idx = self.multi_index(flat);
                v * idx.iter().zip(&polys).map(|(&n, p)| p[n]).product::<f64>()
            })
            .sum::<f64>()
            * g
    }

    /// `√Σ dₙ²` over indices with some coordinate above `n`.
    pub fn tail_beyond(&self, n: usize) -> f64 {
        self.d
            .iter()
            .enumerate()
            .filter(|(flat, _)| self.multi_index(*flat).iter().any(|&k| k > n))
            .map(|(_, v)| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Restriction to the indices with every coordinate `≤ n`.
    pub fn truncate(&self, n: usize) -> HermiteCoeffs {
        let n = n.min(self.order);
        let mut out = HermiteCoeffs::zeros(n, self.dim);
        for flat in 0..out.len() {
            let idx = out.multi_index(flat);
            out.d[flat] = self.get(&idx);
        }
        out
    }

    /// CSV with columns `index,d_n`; multi-indices are joined with `:`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,d_n\n");
        for (flat, v) in self.d.iter().enumerate() {
            let idx: Vec<String> = self.multi_index(flat).iter().map(|i| i.to_string()).collect();
            out.push_str(&format!("{},{:.17e}\n", idx.join(":"), v));
        }
        out
    }
}

pub(crate) fn multi_index(mut flat: usize, base: usize, dim: usize) -> Vec<usize> {
    let mut idx = vec![0; dim];
    for slot in idx.iter_mut().rev() {
        *slot = flat % base;
        flat /= base;
    }
    idx
}

fn tensor_coeffs(
    f: &dyn Fn(&[f64]) -> f64,
    order: usize,
    dim: usize,
    nodes: &[f64],
    weights: &[f64],
    polys: &[Vec<f64>],
) -> Result<HermiteCoeffs> {
    if dim == 0 {
        return Err(Error::Parameter("dimension must be at least 1".into()));
    }
    let mut out = HermiteCoeffs::zeros(order, dim);
    let m = nodes.len();
    let total = m.pow(dim as u32);
    let mut x = vec![0.0; dim];
    for q in 0..total {
        let qi = multi_index(q, m, dim);
        let mut w = 1.0;
        for (k, &i) in qi.iter().enumerate() {
            x[k] = nodes[i];
            w *= weights[i];
        }
        let fv = f(&x);
        if fv == 0.0 {
            continue;
        }
        if !fv.is_finite() {
            return Err(Error::Integrability(format!("f is not finite at {x:?}")));
        }
        let fw = fv * w;
        for flat in 0..out.d.len() {
            let idx = out.multi_index(flat);
            let p: f64 = idx.iter().zip(&qi).map(|(&n, &i)| polys[i][n]).product();
            out.d[flat] += fw * p;
        }
    }
    if out.d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integrability(
            "Hermite coefficient quadrature diverged; f e^{|x|²/2} is not integrable".into(),
        ));
    }
    Ok(out)
}

/// `dₙ = ∫ f e^{|x|²/2} hₙ` by tensor Gauss–Hermite quadrature with
/// `max(2N + 16, 64)` nodes per coordinate.
pub fn hermite_coeffs(f: &dyn Fn(&[f64]) -> f64, order: usize, dim: usize) -> Result<HermiteCoeffs> {
    let rule = GaussHermite::new((2 * order + 16).max(64));
    // The rule integrates g directly; put e^{x²/2}hₙ = polynomial in the integrand.
    let polys: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| hermite_polys(order, x)).collect();
    tensor_coeffs(f, order, dim, &rule.nodes, &rule.scaled_weights, &polys)
}

/// Same coefficients by the composite trapezoid rule on a uniform grid over
/// `[-half_width, half_width]^dim`; meant for discontinuous data where
/// Gauss–Hermite converges slowly.
pub fn hermite_coeffs_uniform(
    f: &dyn Fn(&[f64]) -> f64,
    order: usize,
    dim: usize,
    half_width: f64,
    points: usize,
) -> Result<HermiteCoeffs> {
    if points < 2 || !(half_width > 0.0) {
        return Err(Error::Parameter("uniform quadrature needs ≥ 2 points and a positive width".into()));
    }
    let h = 2.0 * half_width / (points - 1) as f64;
    let nodes: Vec<f64> = (0..points).map(|i| -half_width + h * i as f64).collect();
    let weights: Vec<f64> = (0..points)
        .map(|i| if i == 0 || i == points - 1 { 0.5 * h } else { h })
        .collect();
    let polys: Vec<Vec<f64>> = nodes.iter().map(|&x| hermite_polys(order, x)).collect();
    tensor_coeffs(f, order, dim, &nodes, &weights, &polys)
}

/// `bₙ = dₙ(-1)ⁿ/√(2ⁿ n! √π)`, a product over coordinates for multi-indices.
pub fn b_from_d(d: &HermiteCoeffs) -> Vec<f64> {
    let factor: Vec<f64> = (0..=d.order)
        .map(|n| {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            s / (2f64.powi(n as i32) * factorial(n) * PI.sqrt()).sqrt()
        })
        .collect();
    d.d.iter()
        .enumerate()
        .map(|(flat, &v)| v * d.multi_index(flat).iter().map(|&n| factor[n]).product::<f64>())
        .collect()
}

/// `Σ_{n>N} (2(n+1))^{-3/2}`: 2000 terms summed directly, the rest by
/// Euler–Maclaurin.
pub fn tail_sum(order: usize) -> f64 {
    const DIRECT: usize = 2000;
    let first = order + 2;
    let direct: f64 = (first..first + DIRECT).map(|m| (2.0 * m as f64).powf(-1.5)).sum();
    let a = (first + DIRECT) as f64;
    let s = 1.5;
    let em = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s) + s * a.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * a.powf(-s - 3.0) / 720.0;
    direct + 2f64.powf(-1.5) * em
}

/// `p₃(M)` for data supported in `[-M, M]^d`: per coordinate `10·√(2M)` times
/// the sup over `[-M, M]` of the coefficients of `(x + d/dx)³`, expanded as
/// `x³ + 3x²D + 3xD² + D³ + 3x + 3D`.
pub fn p3(m: f64, dim: usize) -> f64 {
    let per = 10.0 * (2.0 * m).sqrt() * ((m + 1.0).powi(3) + 3.0 * (m + 1.0));
    per.powi(dim as i32)
}

/// Analytic bound on `E_N` for compactly supported data:
/// `p₃(M) ‖f e^{|x|²/2}‖_{H³} / N^{d/4}`.
pub fn tail_bound(f_h3_norm: f64, m: f64, order: usize, dim: usize) -> Result<f64> {
    if order <= 2 {
        return Err(Error::Domain(format!("tail bound needs N > 2, got {order}")));
    }
    if !(m >= 1.0) {
        return Err(Error::Domain(format!("tail bound needs M ≥ 1, got {m}")));
    }
    if !(f_h3_norm >= 0.0) {
        return Err(Error::Domain("H³ norm must be nonnegative".into()));
    }
    Ok(p3(m, dim) * f_h3_norm / (order as f64).powf(dim as f64 / 4.0))
}
