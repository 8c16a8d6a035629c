//! Constants and admissibility conditions of the observability estimate
//! `‖u₀‖ - η ≤ C_T (‖u‖_{L²((0,T)×ω)} + Tη)` for `ω = ℝᵈ \ Ω̄`.
//!
//! Everything is driven by the packet spread `A(t) = 2y₂²/(1 + 16y₃²)`.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::decompose::GaussianMixture;
use crate::error::{Error, Result};
use crate::quadrature::trapezoid_uniform;
use crate::riccati::{PhaseValues, RiccatiSolution};
use crate::special::erfc;

/// `Ω` is the ball of diameter `diam_omega` at the origin, `Ω ⊂ B(R₀)` and
/// `B(R₀) ⊂ [-R, R]ᵈ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(alias = "diam_Omega")]
    pub diam_omega: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(default = "one")]
    pub dim: usize,
}

fn one() -> usize {
    1
}

impl DomainSpec {
    pub fn new(diam_omega: f64, r0: f64, r: f64, dim: usize) -> Result<Self> {
        let d = DomainSpec {
            diam_omega,
            r0,
            r,
            dim,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Parameter("domain dimension must be at least 1".into()));
        }
        if !(self.diam_omega >= 0.0) || !(0.5 * self.diam_omega <= self.r0) || !(self.r0 <= self.r) {
            return Err(Error::Parameter(format!(
                "need diam/2 ≤ R0 ≤ R, got diam = {}, R0 = {}, R = {}",
                self.diam_omega, self.r0, self.r
            )));
        }
        if !self.r.is_finite() {
            return Err(Error::Parameter("R must be finite".into()));
        }
        Ok(())
    }
}

pub fn spread_a(ric: &RiccatiSolution, t: f64) -> Result<f64> {
    ric.spread(t)
}

/// `√(2e/π) √((β-1)/β) e^{-βx²}`, a lower bound for `erfc(x)`.
pub fn erfc_lb(x: f64, beta: f64) -> Result<f64> {
    if !(x >= 0.0) || !(beta > 1.0) {
        return Err(Error::Domain(format!("erfc_lb needs x ≥ 0 and β > 1, got x = {x}, β = {beta}")));
    }
    Ok((2.0 * E / PI).sqrt() * ((beta - 1.0) / beta).sqrt() * (-beta * x * x).exp())
}

/// `ε(A, R) = min{π^{(d-1)/4} e^{1/4} 2^{-3d/4} e^{-AR²}, (π/8)^{d/4}}`.
pub fn epsilon_from_spread(a: f64, r: f64, dim: usize) -> f64 {
    let d = dim as f64;
    let first = PI.powf((d - 1.0) / 4.0) * 0.25f64.exp() * 2f64.powf(-0.75 * d) * (-a * r * r).exp();
    first.min((PI / 8.0).powf(d / 4.0))
}

/// `δ(A, R₀) = e^{1/4} A^{(d-1)/4} R₀^{(d-1)/2} 2^{-(d/4+1)} (4π)^{-1/4} e^{-AR₀²}`.
pub fn delta_from_spread(a: f64, r0: f64, dim: usize) -> f64 {
    let d = dim as f64;
    0.25f64.exp() * a.powf((d - 1.0) / 4.0) * r0.powf((d - 1.0) / 2.0)
        * 2f64.powf(-(d / 4.0 + 1.0))
        * (4.0 * PI).powf(-0.25)
        * (-a * r0 * r0).exp()
}

pub fn epsilon_lower(ric: &RiccatiSolution, t: f64, r: f64, dim: usize) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("R must be positive, got {r}")));
    }
    Ok(epsilon_from_spread(ric.spread(t)?, r, dim))
}

pub fn delta_lower(ric: &RiccatiSolution, t: f64, r0: f64, dim: usize) -> Result<f64> {
    if !(r0 >= 1.0) {
        return Err(Error::Domain(format!("R0 must be at least 1, got {r0}")));
    }
    Ok(delta_from_spread(ric.spread(t)?, r0, dim))
}

/// Default number of trapezoid panels for `∫₀ᵀ εδ dt`.
pub const CT_PANELS: usize = 2048;

/// `∫₀ᵀ ε(t,R)δ(t,R₀) dt` by the composite trapezoid rule on `panels` panels.
pub fn eps_delta_integral(ric: &RiccatiSolution, dom: &DomainSpec, t_max: f64, panels: usize) -> Result<f64> {
    dom.validate()?;
    if panels == 0 {
        return Err(Error::Parameter("need at least one panel".into()));
    }
    let h = t_max / panels as f64;
    let mut vals = Vec::with_capacity(panels + 1);
    for i in 0..=panels {
        let t = (h * i as f64).min(t_max);
        let e = epsilon_lower(ric, t, dom.r, dom.dim)?;
        let d = delta_lower(ric, t, dom.r0, dom.dim)?;
        vals.push(e * d);
    }
    Ok(trapezoid_uniform(&vals, h))
}

/// `C_T = (π/2)^{d/2} √T / ∫₀ᵀ εδ dt`.
pub fn observability_constant(ric: &RiccatiSolution, dom: &DomainSpec, t_max: f64) -> Result<f64> {
    observability_constant_with(ric, dom, t_max, CT_PANELS)
}

pub fn observability_constant_with(
    ric: &RiccatiSolution,
    dom: &DomainSpec,
    t_max: f64,
    panels: usize,
) -> Result<f64> {
    if !(t_max > 0.0) {
        return Err(Error::Domain(format!("T must be positive, got {t_max}")));
    }
    let integral = eps_delta_integral(ric, dom, t_max, panels)?;
    if !(integral > 0.0) || !integral.is_finite() {
        return Err(Error::Certificate(format!(
            "∫εδ dt = {integral:e} vanishes; no observability constant"
        )));
    }
    Ok((PI / 2.0).powf(dom.dim as f64 / 2.0) * t_max.sqrt() / integral)
}

/// `(I_P - I_{2P}) / (I_{2P} - I_{4P})` for the `∫εδ` quadrature; close to 4
/// for a second-order rule on a smooth integrand.
pub fn ct_richardson_ratio(ric: &RiccatiSolution, dom: &DomainSpec, t_max: f64, panels: usize) -> Result<f64> {
    let i1 = eps_delta_integral(ric, dom, t_max, panels)?;
    let i2 = eps_delta_integral(ric, dom, t_max, 2 * panels)?;
    let i4 = eps_delta_integral(ric, dom, t_max, 4 * panels)?;
    Ok((i1 - i2) / (i2 - i4))
}

/// Constant `e/((e-1)T)` of the positive-mixture estimate.
pub fn main3_constant(t_max: f64) -> f64 {
    E / ((E - 1.0) * t_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReqCheck {
    pub ok: bool,
    /// `min_t (RHS - εN·LHS)`.
    pub margin: f64,
    /// `min_t RHS/(N·LHS)`.
    pub eps_max: f64,
    /// `LHS ≤ RHS` for all sampled `t`, without the `εN` factor.
    pub raw_ok: bool,
}

fn req_sides(pv: &PhaseValues, order: usize, r0: f64) -> (f64, f64) {
    let n = order as f64;
    let y2 = pv.y2.abs();
    let q = 1.0 + 16.0 * pv.y3 * pv.y3;
    let lhs = q.sqrt() / (2.0 * y2) * ((2.0 * y2 * y2 * r0 * r0 + 2.0 * y2 * n * r0) / q).exp()
        + (2.0 * PI).sqrt() * (n + 1.0) / y2 * (2.0 * n * n / q).exp();
    let a = pv.spread();
    // ½∫_{R₀}^∞ e^{-Ar²} dr
    let rhs = 0.25 * (PI / a).sqrt() * erfc(a.sqrt() * r0);
    (lhs, rhs)
}

/// Admissibility condition on the mixture spacing `ε` at every sample of
/// `[0, T]`: `ε·N·LHS(t) ≤ RHS(t)`.
pub fn check_req(order: usize, eps: f64, ric: &RiccatiSolution, dom: &DomainSpec, t_max: f64) -> Result<ReqCheck> {
    if order <= 2 {
        return Err(Error::Domain(format!("N must exceed 2, got {order}")));
    }
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!("ε must be nonnegative, got {eps}")));
    }
    let n = order as f64;
    let mut margin = f64::INFINITY;
    let mut eps_max = f64::INFINITY;
    let mut raw_ok = true;
    for t in ric.times_up_to(t_max) {
        let (lhs, rhs) = req_sides(&ric.eval(t)?, order, dom.r0);
        margin = margin.min(rhs - eps * n * lhs);
        eps_max = eps_max.min(rhs / (n * lhs));
        raw_ok &= lhs <= rhs;
    }
    Ok(ReqCheck {
        ok: margin >= 0.0,
        margin,
        eps_max,
        raw_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct R1Check {
    pub ok: bool,
    pub rhs_max: f64,
}

/// Right side of the radius condition at one instant.
pub fn r1_rhs(pv: &PhaseValues, alpha_n: f64, diam_omega: f64) -> Result<f64> {
    let q = 1.0 + 16.0 * pv.y3 * pv.y3;
    let ratio = pv.y2.abs() / q;
    if !(ratio > 0.0) {
        return Err(Error::Certificate("log argument in the radius condition is not positive".into()));
    }
    let num = alpha_n * alpha_n + 2.0 - 2.0 * ratio.sqrt().ln();
    let den = 4.0 * pv.y2 * pv.y2 / q;
    if !(num >= 0.0) {
        return Err(Error::Certificate(format!("negative radicand {num} in the radius condition")));
    }
    Ok((num / den).sqrt() + alpha_n / pv.y2 + 0.5 * diam_omega)
}

/// `R₁ > max_t RHS(t)` over the samples in `[0, T]`.
pub fn check_r1(alpha_n: f64, r1: f64, diam_omega: f64, ric: &RiccatiSolution, t_max: f64) -> Result<R1Check> {
    if !(alpha_n >= 0.0) {
        return Err(Error::Domain(format!("α_N must be nonnegative, got {alpha_n}")));
    }
    let mut rhs_max: f64 = 0.0;
    for t in ric.times_up_to(t_max) {
        rhs_max = rhs_max.max(r1_rhs(&ric.eval(t)?, alpha_n, diam_omega)?);
    }
    Ok(R1Check {
        ok: r1 > rhs_max,
        rhs_max,
    })
}

/// Mass in `[R, ∞)ᵈ` at time `t` of the packet started from
/// `e^{-|x + δ·1|²}`: `(π/(4A))^{d/2} |γ|² erfc(√A(δ/y₂ + R))ᵈ`.
pub fn counterexample_mass(delta_shift: f64, ric: &RiccatiSolution, t: f64, r: f64, dim: usize) -> Result<f64> {
    if !(delta_shift >= 0.0) {
        return Err(Error::Domain(format!("shift must be nonnegative, got {delta_shift}")));
    }
    let pv = ric.eval(t)?;
    if !(pv.y2 > 0.0) {
        return Err(Error::Domain("y₂ must be positive".into()));
    }
    let a = pv.spread();
    let d = dim as i32;
    Ok((PI / (4.0 * a)).powf(dim as f64 / 2.0)
        * pv.gamma(dim).norm_sqr()
        * erfc(a.sqrt() * (delta_shift / pv.y2 + r)).powi(d))
}

/// Points per coordinate in the `[-R, R]` quadrature of [`lower_inner_check`].
const INNER_POINTS: usize = 4097;

/// `ε(t,R) Σ|cₙ| ≤ Σ |cₙ| ‖φₙ(t)‖_{L²([-R,R]ᵈ)}`, with the right side by the
/// trapezoid rule (the integrand factorises over coordinates).
///
/// The lower bound is only meaningful while every propagated center
/// `-aₙ/y₂(t)` lies in `[-R, R]ᵈ`; packets outside contribute less.
pub fn lower_inner_check(mix: &GaussianMixture, ric: &RiccatiSolution, t: f64, r: f64) -> Result<bool> {
    let pv = ric.eval(t)?;
    let a = pv.spread();
    let g2 = pv.gamma(mix.dim).norm_sqr();
    let h = 2.0 * r / (INNER_POINTS - 1) as f64;
    let axis_mass = |c: f64| {
        let v: Vec<f64> = (0..INNER_POINTS)
            .map(|j| {
                let x = -r + h * j as f64;
                (-a * (x + c) * (x + c)).exp()
            })
            .collect();
        trapezoid_uniform(&v, h)
    };
    let mut rhs = 0.0;
    for (center, &c) in mix.centers.iter().zip(&mix.coeffs) {
        let mass: f64 = center.iter().map(|&ai| axis_mass(ai / pv.y2)).product::<f64>() * g2;
        rhs += c.abs() * mass.sqrt();
    }
    let lhs = epsilon_from_spread(a, r, mix.dim) * mix.coeff_abs_sum();
    Ok(lhs <= rhs)
}

/// `(2e^{-M²/4} + M·dx)ᵈ < ((e-1)/(4e)) ‖φ‖`.
pub fn linfty_check(m: f64, dx: f64, dim: usize, phi_l2: f64) -> Result<bool> {
    if !(m >= 2.0) {
        return Err(Error::Domain(format!("M must be at least 2, got {m}")));
    }
    let lhs = (2.0 * (-m * m / 4.0).exp() + m * dx).powi(dim as i32);
    Ok(lhs < (E - 1.0) / (4.0 * E) * phi_l2)
}

/// Inputs to [`certify`] beyond the phase solution and domain.
#[derive(Debug, Clone, Copy)]
pub struct CertificateRequest {
    /// Mixture order `N` (> 2).
    pub order: usize,
    /// Mixture spacing `ε` tested against the admissibility condition.
    pub eps: f64,
    /// `α_N = max |aₙ|`.
    pub alpha_n: f64,
    /// Radius tested in the radius condition.
    pub r1: f64,
}

/// One row of the certificate time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateSample {
    pub t: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub eps: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservabilityCertificate {
    #[serde(rename = "T")]
    pub t_max: f64,
    #[serde(rename = "C_T")]
    pub c_t: f64,
    pub req: ReqCheck,
    #[serde(rename = "R1")]
    pub r1: R1Check,
    #[serde(rename = "A_min")]
    pub a_min: f64,
    #[serde(rename = "A_max")]
    pub a_max: f64,
    #[serde(skip)]
    pub samples: Vec<CertificateSample>,
}

impl ObservabilityCertificate {
    /// CSV with columns `t,A,eps,delta`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,A,eps,delta\n");
        for s in &self.samples {
            out.push_str(&format!("{:.17e},{:.17e},{:.17e},{:.17e}\n", s.t, s.a, s.eps, s.delta));
        }
        out
    }
}

pub fn certify(
    ric: &RiccatiSolution,
    dom: &DomainSpec,
    t_max: f64,
    request: &CertificateRequest,
) -> Result<ObservabilityCertificate> {
    dom.validate()?;
    let mut samples = Vec::new();
    for t in ric.times_up_to(t_max) {
        let a = ric.spread(t)?;
        let eps = epsilon_lower(ric, t, dom.r, dom.dim)?;
        let delta = delta_lower(ric, t, dom.r0, dom.dim)?;
        if !(eps > 0.0 && delta > 0.0) {
            return Err(Error::Certificate(format!("ε or δ vanishes at t = {t}")));
        }
        samples.push(CertificateSample { t, a, eps, delta });
    }
    let c_t = observability_constant(ric, dom, t_max)?;
    let req = check_req(request.order, request.eps, ric, dom, t_max)?;
    let r1 = check_r1(request.alpha_n, request.r1, dom.diam_omega, ric, t_max)?;
    let a_min = samples.iter().map(|s| s.a).fold(f64::INFINITY, f64::min);
    let a_max = samples.iter().map(|s| s.a).fold(0.0, f64::max);
    Ok(ObservabilityCertificate {
        t_max,
        c_t,
        req,
        r1,
        a_min,
        a_max,
        samples,
    })
}
