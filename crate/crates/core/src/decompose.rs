//! Finite real Gaussian mixtures `Σ cₙ e^{-|x+aₙ|²}` approximating initial data.
//!
//! Two constructions are provided. [`gaussian_coeffs`] replaces the
//! derivatives in `Hₖ(x)e^{-x²} = (-1)ᵏ ∂ᵏ e^{-x²}` by forward differences of
//! step `ε₀`, which yields centers `aₙ = nε₀` and alternating coefficients.
//! [`step_extension`] approximates a box indicator by a Riemann sum of
//! Gaussians, which yields positive coefficients.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{b_from_d, hermite_coeffs, multi_index, HermiteCoeffs};
use crate::special::{binomial, erfc};

/// Beyond this squared distance `e^{-r²}` underflows to zero anyway.
const CUTOFF_R2: f64 = 745.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianMixture {
    pub dim: usize,
    #[serde(rename = "N")]
    pub order: usize,
    pub eps0: f64,
    pub centers: Vec<Vec<f64>>,
    pub coeffs: Vec<f64>,
    /// Certified L² residual against the source function.
    pub eta: f64,
    /// Hermite truncation tail `E_N`.
    pub tail: f64,
}

impl GaussianMixture {
    pub fn empty(dim: usize) -> Self {
        GaussianMixture {
            dim,
            order: 0,
            eps0: 0.5,
            centers: Vec::new(),
            coeffs: Vec::new(),
            eta: 0.0,
            tail: 0.0,
        }
    }

    /// Mixture with the given centers and coefficients and no residual data.
    pub fn from_parts(dim: usize, centers: Vec<Vec<f64>>, coeffs: Vec<f64>) -> Result<Self> {
        let mix = GaussianMixture {
            dim,
            order: centers.len().saturating_sub(1),
            eps0: 0.5,
            centers,
            coeffs,
            eta: 0.0,
            tail: 0.0,
        };
        mix.validate()?;
        Ok(mix)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Parameter("mixture dimension must be at least 1".into()));
        }
        if self.centers.len() != self.coeffs.len() {
            return Err(Error::Parameter(format!(
                "{} centers but {} coefficients",
                self.centers.len(),
                self.coeffs.len()
            )));
        }
        if let Some(c) = self.centers.iter().find(|c| c.len() != self.dim) {
            return Err(Error::Parameter(format!(
                "center of length {} in a {}-dimensional mixture",
                c.len(),
                self.dim
            )));
        }
        let finite = self.coeffs.iter().chain(self.centers.iter().flatten()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::Parameter("mixture contains non-finite values".into()));
        }
        if !(self.eps0 > 0.0 && self.eps0 < 1.0) {
            return Err(Error::Parameter(format!("eps0 = {} is outside (0, 1)", self.eps0)));
        }
        if !(self.eta >= 0.0) || !(self.tail >= 0.0) {
            return Err(Error::Parameter("eta and tail must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (a, &c) in self.centers.iter().zip(&self.coeffs) {
            let r2: f64 = x.iter().zip(a).map(|(xi, ai)| (xi + ai) * (xi + ai)).sum();
            if r2 < CUTOFF_R2 {
                s += c * (-r2).exp();
            }
        }
        s
    }

    /// Values at many points in parallel.
    pub fn eval_many(&self, points: &[Vec<f64>]) -> Vec<f64> {
        points.par_iter().map(|x| self.eval(x)).collect()
    }

    /// All coefficients strictly positive (and at least one term).
    pub fn is_class_a(&self) -> bool {
        !self.coeffs.is_empty() && self.coeffs.iter().all(|&c| c > 0.0)
    }

    /// `α_N = maxₙ |aₙ|`.
    pub fn max_center_norm(&self) -> f64 {
        self.centers
            .iter()
            .map(|a| a.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// `max_{n,m} |aₙ - aₘ|`.
    pub fn center_spread(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (i, a) in self.centers.iter().enumerate() {
            for b in &self.centers[i + 1..] {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                best = best.max(d2.sqrt());
            }
        }
        best
    }

    pub fn coeff_abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// `‖Σ cₙ e^{-|x+aₙ|²}‖_{L²}` from the closed-form Gram matrix
    /// `∫ e^{-|x+a|²-|x+b|²} = (π/2)^{d/2} e^{-|a-b|²/2}`.
    pub fn l2_norm(&self) -> f64 {
        let n = self.len();
        let g0 = (std::f64::consts::FRAC_PI_2).powf(self.dim as f64 / 2.0);
        let s: f64 = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = 0.0;
                for j in 0..n {
                    let d2: f64 = self.centers[i]
                        .iter()
                        .zip(&self.centers[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    row += self.coeffs[j] * (-0.5 * d2).exp();
                }
                self.coeffs[i] * row
            })
            .sum();
        (g0 * s.max(0.0)).sqrt()
    }

    /// Rigid translation: the mixture of `x ↦ f(x - s)`.
    pub fn shifted(&self, s: &[f64]) -> Self {
        let mut out = self.clone();
        for a in out.centers.iter_mut() {
            for (ai, si) in a.iter_mut().zip(s) {
                *ai -= si;
            }
        }
        out
    }

    /// Concatenation of two mixtures of equal dimension.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Parameter("cannot add mixtures of different dimension".into()));
        }
        let mut out = self.clone();
        out.centers.extend(other.centers.iter().cloned());
        out.coeffs.extend(other.coeffs.iter().copied());
        out.eta = self.eta + other.eta;
        out.tail = self.tail + other.tail;
        out.order = self.order.max(other.order);
        Ok(out)
    }

    pub fn scaled(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= k);
        out.eta *= k.abs();
        out.tail *= k.abs();
        out
    }

    /// CSV with columns `a1,…,ad,c`.
    pub fn to_csv(&self) -> String {
        let cols: Vec<String> = (1..=self.dim).map(|i| format!("a{i}")).collect();
        let mut out = format!("{},c\n", cols.join(","));
        for (a, c) in self.centers.iter().zip(&self.coeffs) {
            let row: Vec<String> = a.iter().map(|v| format!("{v:.17e}")).collect();
            out.push_str(&format!("{},{c:.17e}\n", row.join(",")));
        }
        out
    }
}

/// Per-coordinate matrix `T[n][k] = C(k,n)(-1)ⁿ ε₀^{-k}/√(2ᵏk!√π)`, so that
/// `cₙ = Σₖ T[n][k] dₖ` is the forward-difference coefficient of the Gaussian
/// centred at `-nε₀`.
fn difference_matrix(order: usize, eps0: f64) -> Vec<Vec<f64>> {
    let norm = b_from_d(&HermiteCoeffs::from_list(vec![1.0; order + 1]).expect("nonempty"));
    (0..=order)
        .map(|n| {
            (0..=order)
                .map(|k| {
                    if k < n {
                        0.0
                    } else {
                        // norm[k] carries (-1)ᵏ; the difference stencil adds (-1)^{k-n}.
                        let s = if (k - n) % 2 == 0 { 1.0 } else { -1.0 };
                        binomial(k, n) * s * norm[k] * eps0.powi(-(k as i32))
                    }
                })
                .collect()
        })
        .collect()
}

/// Coefficients `cₙ` over the tensor index set, in the same layout as `d`.
pub fn gaussian_coeffs(d: &HermiteCoeffs, eps0: f64, order: usize) -> Result<Vec<f64>> {
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(Error::Domain(format!("eps0 = {eps0} is outside (0, 1)")));
    }
    if order <= 2 {
        return Err(Error::Domain(format!("N must exceed 2, got {order}")));
    }
    let d = d.truncate(order);
    let mut padded = HermiteCoeffs::zeros(order, d.dim);
    for flat in 0..d.len() {
        let idx = d.multi_index(flat);
        let target = padded.flat_index(&idx);
        padded.d[target] = d.d[flat];
    }
    let t = difference_matrix(order, eps0);
    // Apply T along each axis in turn.
    let base = order + 1;
    let mut cur = padded.d;
    for axis in 0..padded.dim {
        let stride = base.pow((padded.dim - 1 - axis) as u32);
        let mut next = vec![0.0; cur.len()];
        for (flat, out) in next.iter_mut().enumerate() {
            let n = (flat / stride) % base;
            let root = flat - n * stride;
            *out = (n..base).map(|k| t[n][k] * cur[root + k * stride]).sum();
        }
        cur = next;
    }
    Ok(cur)
}

/// Tunables for [`decompose_with`].
#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    /// Order `N′ > N` at which the tail `E_N` is truncated.
    pub tail_order: Option<usize>,
    /// Points per coordinate of the residual grid; `None` picks 2¹² in 1-d
    /// and 2⁹ otherwise.
    pub residual_points: Option<usize>,
    /// Fail with a consistency error when the residual exceeds the bound.
    pub enforce_bound: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            tail_order: None,
            residual_points: None,
            enforce_bound: true,
        }
    }
}

/// Result of [`decompose_with`]: the mixture plus the numbers behind its `eta`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub mixture: GaussianMixture,
    pub hermite: HermiteCoeffs,
    pub residual: f64,
    pub f_norm: f64,
    /// `(e^N N ε₀)^d ‖f‖ + E_N`.
    pub bound: f64,
}

pub fn decompose<F>(f: &F, order: usize, eps0: f64, dim: usize) -> Result<GaussianMixture>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    Ok(decompose_with(f, order, eps0, dim, &DecomposeOptions::default())?.mixture)
}

pub fn decompose_with<F>(
    f: &F,
    order: usize,
    eps0: f64,
    dim: usize,
    opts: &DecomposeOptions,
) -> Result<Decomposition>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if dim == 0 {
        return Err(Error::Parameter("dimension must be at least 1".into()));
    }
    let tail_order = opts.tail_order.unwrap_or((2 * order).max(order + 16)).max(order + 1);
    let full = hermite_coeffs(f, tail_order, dim)?;
    let tail = full.tail_beyond(order);
    let d = full.truncate(order);
    let c = gaussian_coeffs(&d, eps0, order)?;
    let (mut centers, mut coeffs) = (Vec::new(), Vec::new());
    for (flat, &cn) in c.iter().enumerate() {
        if cn != 0.0 {
            let idx = multi_index(flat, order + 1, dim);
            centers.push(idx.iter().map(|&n| n as f64 * eps0).collect());
            coeffs.push(cn);
        }
    }
    let mut mixture = GaussianMixture {
        dim,
        order,
        eps0,
        centers,
        coeffs,
        eta: 0.0,
        tail,
    };
    let half = order as f64 * eps0 + 8.0;
    let points = opts
        .residual_points
        .unwrap_or(if dim == 1 { 1 << 12 } else { 1 << 9 });
    let residual = l2_residual(&mixture, f, -half, half, points)?;
    let f_norm = l2_residual(&GaussianMixture::empty(dim), f, -half, half, points)?;
    let bound = ((order as f64).exp() * order as f64 * eps0).powi(dim as i32) * f_norm + tail;
    let slack = 1e-8 + 1e-8 * f_norm;
    if opts.enforce_bound && residual > bound + slack {
        return Err(Error::Consistency(format!(
            "decomposition residual {residual:e} exceeds the bound {bound:e}"
        )));
    }
    mixture.eta = residual;
    Ok(Decomposition {
        mixture,
        hermite: d,
        residual,
        f_norm,
        bound,
    })
}

/// `‖f - mix‖_{L²}` by the trapezoid rule on `[lo, hi]^d` with `points` nodes
/// per coordinate.
pub fn l2_residual<F>(mix: &GaussianMixture, f: &F, lo: f64, hi: f64, points: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if points < 2 || !(hi > lo) {
        return Err(Error::Parameter("residual grid needs ≥ 2 points and hi > lo".into()));
    }
    let dim = mix.dim;
    let h = (hi - lo) / (points - 1) as f64;
    let total = points.checked_pow(dim as u32).ok_or_else(|| Error::Grid("residual grid too large".into()))?;
    let sum: f64 = (0..total)
        .into_par_iter()
        .map(|q| {
            let idx = multi_index(q, points, dim);
            let mut w = 1.0;
            let x: Vec<f64> = idx
                .iter()
                .map(|&i| {
                    if i == 0 || i == points - 1 {
                        w *= 0.5;
                    }
                    lo + h * i as f64
                })
                .collect();
            let r = f(&x) - mix.eval(&x);
            w * r * r
        })
        .sum();
    let v = sum * h.powi(dim as i32);
    if !v.is_finite() {
        return Err(Error::Integrability("residual integral is not finite".into()));
    }
    Ok(v.sqrt())
}

/// Smooth ramp equal to 1 below `9M`, 0 above `10M`, built from
/// `ψ(s) = e^{-1/s}` so that every derivative vanishes at both ends.
pub fn smooth_cutoff(r: f64, m: f64) -> f64 {
    let s = (r - 9.0 * m) / m;
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let psi = |u: f64| if u <= 0.0 { 0.0 } else { (-1.0 / u).exp() };
    let (p, q) = (psi(1.0 - s), psi(s));
    p / (p + q)
}

/// `G(x) = (1/√π)∫_{-M}^{M} e^{-(x-y)²} dy = ½(erfc(x - M) - erfc(x + M))`.
fn box_profile(x: f64, m: f64) -> f64 {
    0.5 * (erfc(x - m) - erfc(x + m))
}

/// Step-function extension and its positive Gaussian mixture.
#[derive(Debug, Clone)]
pub struct StepExtension {
    pub m: f64,
    pub dx: f64,
    pub shift: Vec<f64>,
    pub mixture: GaussianMixture,
    /// `2e^{-M²/4} + 2·dx·M`.
    pub sup_bound_per_coord: f64,
    /// `(1 + b)^d - 1` for the tensor product with per-coordinate bound `b`.
    pub sup_bound: f64,
}

impl StepExtension {
    /// One-dimensional profile: 1 on `|x| ≤ M/2`, erf shoulders outside,
    /// cut off smoothly on `[9M, 10M]`.
    pub fn phi_1d(&self, x: f64) -> f64 {
        let r = x.abs();
        if r <= 0.5 * self.m {
            1.0
        } else {
            smooth_cutoff(r, self.m) * box_profile(r, self.m) / box_profile(0.5 * self.m, self.m)
        }
    }

    /// `φ(x) = Πᵢ φ₁(xᵢ - sᵢ)`.
    pub fn phi(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.shift).map(|(&xi, &si)| self.phi_1d(xi - si)).product()
    }

    /// Half-width of a box that contains the support of `φ`.
    pub fn support_radius(&self) -> f64 {
        10.0 * self.m + self.shift.iter().map(|s| s.abs()).fold(0.0, f64::max)
    }
}

/// Riemann-sum mixture `Σⱼ (Δ/√π) e^{-(x - yⱼ - s)²}` with midpoints `yⱼ` of a
/// uniform partition of `[-M, M]` into `⌈2M/dx⌉` cells, tensorised over `dim`
/// coordinates.
pub fn step_extension(m: f64, dx: f64, shift: &[f64], dim: usize) -> Result<StepExtension> {
    if !(m >= 2.0) || !m.is_finite() {
        return Err(Error::Domain(format!("step extension needs M ≥ 2, got {m}")));
    }
    if !(dx > 0.0 && dx < 1.0) {
        return Err(Error::Domain(format!("step extension needs 0 < dx < 1, got {dx}")));
    }
    if dim == 0 || shift.len() != dim {
        return Err(Error::Parameter(format!(
            "shift has length {} but dimension is {dim}",
            shift.len()
        )));
    }
    let k = (2.0 * m / dx).ceil() as usize;
    let delta = 2.0 * m / k as f64;
    let nodes: Vec<f64> = (0..k).map(|j| -m + (j as f64 + 0.5) * delta).collect();
    let c1 = delta / std::f64::consts::PI.sqrt();
    let total = k
        .checked_pow(dim as u32)
        .filter(|&n| n <= 50_000_000)
        .ok_or_else(|| Error::Parameter("step extension mixture too large".into()))?;
    let mut centers = Vec::with_capacity(total);
    for q in 0..total {
        let idx = multi_index(q, k, dim);
        centers.push(idx.iter().zip(shift).map(|(&j, &s)| -(nodes[j] + s)).collect());
    }
    let b = 2.0 * (-m * m / 4.0).exp() + 2.0 * dx * m;
    let sup_bound = (1.0 + b).powi(dim as i32) - 1.0;
    let mixture = GaussianMixture {
        dim,
        order: k - 1,
        eps0: delta,
        centers,
        coeffs: vec![c1.powi(dim as i32); total],
        // L² over the 20M-wide box carrying φ; the mixture outside it is below e^{-(9M)²}.
        eta: sup_bound * (20.0 * m).powf(dim as f64 / 2.0),
        tail: 0.0,
    };
    Ok(StepExtension {
        m,
        dx,
        shift: shift.to_vec(),
        mixture,
        sup_bound_per_coord: b,
        sup_bound,
    })
}

/// Integration box for [`class_a_check`].
#[derive(Debug, Clone, Copy)]
pub struct Region {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

/// True iff every coefficient is positive and `‖f - mix‖_{L²} ≤ eta` on the
/// default region (centers' bounding radius plus 8, 2¹² points in 1-d, 2⁹
/// otherwise).
pub fn class_a_check<F>(mix: &GaussianMixture, f: &F, eta: f64) -> bool
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let r = mix.max_center_norm() + 8.0;
    let points = if mix.dim == 1 { 1 << 12 } else { 1 << 9 };
    class_a_check_on(mix, f, eta, Region { lo: -r, hi: r, points })
}

pub fn class_a_check_on<F>(mix: &GaussianMixture, f: &F, eta: f64, region: Region) -> bool
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    mix.is_class_a()
        && l2_residual(mix, f, region.lo, region.hi, region.points).is_ok_and(|r| r <= eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::hermite_fn;

    #[test]
    fn zero_coefficients_give_zero() {
        let d = HermiteCoeffs::zeros(4, 1);
        assert!(gaussian_coeffs(&d, 0.05, 4).unwrap().iter().all(|&c| c == 0.0));
        let mix = decompose(&|_: &[f64]| 0.0, 4, 0.05, 1).unwrap();
        assert!(mix.is_empty());
        assert_eq!(mix.eta, 0.0);
    }

    #[test]
    fn domain_errors() {
        let d = HermiteCoeffs::zeros(4, 1);
        assert!(matches!(gaussian_coeffs(&d, 1.0, 4), Err(Error::Domain(_))));
        assert!(matches!(gaussian_coeffs(&d, 0.05, 2), Err(Error::Domain(_))));
        assert!(matches!(step_extension(1.5, 0.01, &[0.0], 1), Err(Error::Domain(_))));
    }

    #[test]
    fn single_gaussian_target() {
        let f = |x: &[f64]| (-x[0] * x[0]).exp();
        let dec = decompose_with(&f, 3, 0.05, 1, &DecomposeOptions::default()).unwrap();
        let bound = 3f64.exp() * 3.0 * 0.05 * dec.f_norm + dec.mixture.tail;
        assert!(dec.residual <= bound);
    }

    #[test]
    fn h0_example() {
        let f = |x: &[f64]| hermite_fn(0, x[0]) * (-0.5 * x[0] * x[0]).exp();
        let dec = decompose_with(&f, 4, 0.02, 1, &DecomposeOptions::default()).unwrap();
        assert!(dec.mixture.tail < 1e-12);
        assert!(dec.residual <= 4f64.exp() * 4.0 * 0.02 * dec.f_norm);
        // ‖f‖ = ‖π^{-1/4} e^{-x²}‖ = (1/2)^{1/4}
        assert!((dec.f_norm - 0.5f64.powf(0.25)).abs() < 1e-10);
    }

    #[test]
    fn product_function_factorises() {
        let g1 = |x: f64| (hermite_fn(0, x) + 0.3 * hermite_fn(3, x)) * (-0.5 * x * x).exp();
        let g2 = |x: f64| (0.5 * hermite_fn(1, x) - hermite_fn(2, x)) * (-0.5 * x * x).exp();
        let f2 = |x: &[f64]| g1(x[0]) * g2(x[1]);
        let d2 = crate::hermite::hermite_coeffs(&f2, 4, 2).unwrap();
        let c2 = gaussian_coeffs(&d2, 0.05, 4).unwrap();
        let c_a = gaussian_coeffs(&crate::hermite::hermite_coeffs(&|x: &[f64]| g1(x[0]), 4, 1).unwrap(), 0.05, 4).unwrap();
        let c_b = gaussian_coeffs(&crate::hermite::hermite_coeffs(&|x: &[f64]| g2(x[0]), 4, 1).unwrap(), 0.05, 4).unwrap();
        let scale = c2.iter().map(|c| c.abs()).fold(0.0, f64::max);
        for i in 0..5 {
            for j in 0..5 {
                assert!((c2[i * 5 + j] - c_a[i] * c_b[j]).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn alternating_signs_are_not_class_a() {
        let f = |x: &[f64]| (hermite_fn(0, x[0]) + hermite_fn(1, x[0])) * (-0.5 * x[0] * x[0]).exp();
        let mix = decompose(&f, 3, 0.05, 1).unwrap();
        assert!(mix.coeffs.iter().any(|&c| c < 0.0));
        assert!(!class_a_check(&mix, &f, 1.0));
    }

    #[test]
    fn single_positive_gaussian_is_class_a() {
        let mix = GaussianMixture::from_parts(1, vec![vec![0.3]], vec![2.0]).unwrap();
        let f = |x: &[f64]| 2.0 * (-(x[0] + 0.3) * (x[0] + 0.3)).exp();
        assert!(class_a_check(&mix, &f, 0.0));
    }

    #[test]
    fn step_extension_bound_value() {
        let st = step_extension(4.0, 0.01, &[0.0], 1).unwrap();
        assert!((st.sup_bound_per_coord - 0.11664).abs() < 1e-5);
        assert!(st.mixture.is_class_a());
        for i in 0..2000 {
            let x = -50.0 + 100.0 * i as f64 / 1999.0;
            assert!((st.phi(&[x]) - st.mixture.eval(&[x])).abs() <= st.sup_bound);
        }
    }

    #[test]
    fn step_extension_l2_certificate() {
        let st = step_extension(2.0, 0.05, &[1.0], 1).unwrap();
        let region = Region { lo: -25.0, hi: 25.0, points: 1 << 13 };
        assert!(class_a_check_on(&st.mixture, &|x: &[f64]| st.phi(x), st.mixture.eta, region));
    }

    #[test]
    fn cutoff_is_monotone_ramp() {
        let v: Vec<f64> = (0..=100).map(|i| smooth_cutoff(9.0 + i as f64 / 100.0, 1.0)).collect();
        assert_eq!(v[0], 1.0);
        assert_eq!(v[100], 0.0);
        assert!(v.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn gram_norm_matches_quadrature() {
        let mix = GaussianMixture::from_parts(1, vec![vec![0.0], vec![-1.0], vec![0.7]], vec![1.0, -0.5, 2.0]).unwrap();
        let q = l2_residual(&mix, &|_: &[f64]| 0.0, -12.0, 12.0, 1 << 13).unwrap();
        assert!((mix.l2_norm() - q).abs() < 1e-10);
    }

    #[test]
    fn center_spread_is_the_diameter() {
        let mix = GaussianMixture::from_parts(2, vec![vec![0.0, 0.0], vec![3.0, 0.0], vec![0.0, -4.0]], vec![1.0; 3]).unwrap();
        assert_eq!(mix.center_spread(), 5.0);
        assert_eq!(mix.max_center_norm(), 4.0);
        let st = step_extension(2.0, 0.5, &[1.0], 1).unwrap();
        assert!((st.mixture.center_spread() - 3.5).abs() < 1e-12);
    }
}
