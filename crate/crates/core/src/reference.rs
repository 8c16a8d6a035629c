//! Strang split-step Fourier solver for `∂ₜu + i(-κ₁Δ + κ₂|x|²)u = 0`.
//!
//! Each step applies `e^{-iκ₂|x|²Δt/2}`, then `e^{-iκ₁|ξ|²Δt}` in Fourier
//! space, then `e^{-iκ₂|x|²Δt/2}` again, with κ₁, κ₂ frozen at the step
//! midpoint. Every factor is a pointwise phase, so the discrete mass is
//! conserved up to rounding.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::decompose::GaussianMixture;
use crate::error::{Error, Result};
use crate::grid::{boundary_fraction_masked, Fft, GridSpec};
use crate::observability::DomainSpec;
use crate::oscillator::OscillatorSpec;
use crate::propagate::parametrix_values;
use crate::quadrature::trapezoid;
use crate::riccati::RiccatiSolution;

/// Largest admissible boundary-strip mass fraction.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Default number of steps per unit time.
pub const DEFAULT_STEPS_PER_UNIT: usize = 1024;

#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub grid: GridSpec,
    pub t_samples: Vec<f64>,
    pub fields: Vec<Vec<Complex64>>,
    /// `max_t |‖u(t)‖/‖u₀‖ - 1|` over every step.
    pub mass_drift: f64,
}

/// Runs the scheme and hands `(step, t, u)` to `visit` after every step
/// (and once for the initial datum with step 0). Returns the mass drift.
pub fn split_step_run<V>(
    osc: &OscillatorSpec,
    u0: &[Complex64],
    grid: &GridSpec,
    t_max: f64,
    steps: usize,
    mut visit: V,
) -> Result<f64>
where
    V: FnMut(usize, f64, &[Complex64]) -> Result<()>,
{
    if u0.len() != grid.len() {
        return Err(Error::Grid("initial field does not match the grid".into()));
    }
    if steps == 0 || !(t_max > 0.0) {
        return Err(Error::Parameter("need a positive time and at least one step".into()));
    }
    let mask = grid.boundary_mask();
    let guard = |u: &[Complex64], t: f64| {
        let frac = boundary_fraction_masked(u, &mask);
        if frac > BOUNDARY_TOL {
            Err(Error::Grid(format!(
                "boundary mass fraction {frac:e} at t = {t}; enlarge the grid"
            )))
        } else {
            Ok(())
        }
    };
    guard(u0, 0.0)?;
    let r2 = grid.radius_squared();
    let k2 = grid.wavenumber_squared();
    let fft = Fft::new(grid);
    let dt = t_max / steps as f64;
    let norm0 = grid.l2_norm(u0);
    let mut u = u0.to_vec();
    let mut drift: f64 = 0.0;
    visit(0, 0.0, &u)?;
    let mut half = vec![Complex64::new(0.0, 0.0); u.len()];
    let mut kin = vec![Complex64::new(0.0, 0.0); u.len()];
    let mut last_k = (f64::NAN, f64::NAN);
    for s in 1..=steps {
        let tm = (s as f64 - 0.5) * dt;
        let (k1, k2v) = (osc.kappa1(tm), osc.kappa2(tm));
        if k2v != last_k.1 {
            half.par_iter_mut()
                .zip(&r2)
                .for_each(|(h, &r)| *h = Complex64::from_polar(1.0, -0.5 * k2v * r * dt));
        }
        if k1 != last_k.0 {
            kin.par_iter_mut()
                .zip(&k2)
                .for_each(|(h, &k)| *h = Complex64::from_polar(1.0, -k1 * k * dt));
        }
        last_k = (k1, k2v);
        u.par_iter_mut().zip(&half).for_each(|(z, h)| *z *= h);
        fft.forward(&mut u);
        u.par_iter_mut().zip(&kin).for_each(|(z, h)| *z *= h);
        fft.inverse(&mut u);
        u.par_iter_mut().zip(&half).for_each(|(z, h)| *z *= h);
        let t = s as f64 * dt;
        guard(&u, t)?;
        if norm0 > 0.0 {
            drift = drift.max((grid.l2_norm(&u) / norm0 - 1.0).abs());
        }
        visit(s, t, &u)?;
    }
    Ok(drift)
}

/// Stores every step.
pub fn split_step_solve(
    osc: &OscillatorSpec,
    u0: &[Complex64],
    grid: &GridSpec,
    t_max: f64,
    steps: usize,
) -> Result<ReferenceSolution> {
    split_step_solve_every(osc, u0, grid, t_max, steps, 1)
}

/// Stores every `store_every`-th step plus the final one.
pub fn split_step_solve_every(
    osc: &OscillatorSpec,
    u0: &[Complex64],
    grid: &GridSpec,
    t_max: f64,
    steps: usize,
    store_every: usize,
) -> Result<ReferenceSolution> {
    let every = store_every.max(1);
    let mut t_samples = Vec::new();
    let mut fields = Vec::new();
    let mass_drift = split_step_run(osc, u0, grid, t_max, steps, |s, t, u| {
        if s % every == 0 || s == steps {
            t_samples.push(t);
            fields.push(u.to_vec());
        }
        Ok(())
    })?;
    Ok(ReferenceSolution {
        grid: *grid,
        t_samples,
        fields,
        mass_drift,
    })
}

impl ReferenceSolution {
    pub fn final_field(&self) -> &[Complex64] {
        self.fields.last().expect("a solution always stores the final step")
    }

    pub fn t_end(&self) -> f64 {
        *self.t_samples.last().expect("nonempty")
    }
}

/// `∫_{|x| > diam/2} |u|²` for one slice.
pub fn exterior_mass(grid: &GridSpec, u: &[Complex64], diam_omega: f64) -> f64 {
    let r0 = 0.25 * diam_omega * diam_omega;
    let r2 = grid.radius_squared();
    u.iter()
        .zip(&r2)
        .filter(|(_, &r)| r >= r0)
        .map(|(z, _)| z.norm_sqr())
        .sum::<f64>()
        * grid.cell_volume()
}

/// `‖u‖_{L²((0,T)×ω)}` with `ω` the complement of the ball of diameter
/// `diam_Ω`, by the trapezoid rule over the stored samples.
pub fn l2_norm_spacetime(sol: &ReferenceSolution, dom: &DomainSpec) -> f64 {
    let r0 = 0.25 * dom.diam_omega * dom.diam_omega;
    let r2 = sol.grid.radius_squared();
    let vol = sol.grid.cell_volume();
    let masses: Vec<f64> = sol
        .fields
        .par_iter()
        .map(|u| {
            u.iter()
                .zip(&r2)
                .filter(|(_, &r)| r >= r0)
                .map(|(z, _)| z.norm_sqr())
                .sum::<f64>()
                * vol
        })
        .collect();
    trapezoid(&sol.t_samples, &masses).max(0.0).sqrt()
}

#[derive(Debug, Clone)]
pub struct ParametrixComparison {
    /// `(∫₀ᵀ ‖u - Σcₙφₙ‖² dt)^{1/2}`.
    pub error: f64,
    /// `(η + (eᴺNε₀)ᵈ) T` with `η` the Hermite tail of the mixture.
    pub bound: f64,
    pub ok: bool,
    /// `max_t ‖u(t) - Σcₙφₙ(t)‖`.
    pub sup_error: f64,
    pub errors: Vec<f64>,
}

/// Slack for the quadratures on both sides of the comparison.
pub const COMPARISON_SLACK: f64 = 1e-4;

pub fn compare_parametrix(
    sol: &ReferenceSolution,
    mix: &GaussianMixture,
    ric: &RiccatiSolution,
) -> Result<ParametrixComparison> {
    if mix.dim != sol.grid.dim {
        return Err(Error::Parameter("mixture and solution dimensions differ".into()));
    }
    let mut errors = Vec::with_capacity(sol.fields.len());
    for (&t, u) in sol.t_samples.iter().zip(&sol.fields) {
        let pv = ric.eval(t)?;
        let v = parametrix_values(mix, &pv, &sol.grid);
        errors.push(sol.grid.l2_distance(u, &v));
    }
    let sq: Vec<f64> = errors.iter().map(|e| e * e).collect();
    let error = trapezoid(&sol.t_samples, &sq).max(0.0).sqrt();
    let (n, d) = (mix.order as f64, mix.dim as i32);
    let t_end = sol.t_end();
    let bound = (mix.tail + (n.exp() * n * mix.eps0).powi(d)) * t_end;
    Ok(ParametrixComparison {
        error,
        bound,
        ok: error <= bound + COMPARISON_SLACK,
        sup_error: errors.iter().copied().fold(0.0, f64::max),
        errors,
    })
}
