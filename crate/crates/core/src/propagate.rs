//! Closed-form propagation of Gaussian packets and the assembled parametrix.
//!
//! The solution with initial datum `e^{-|x+aₙ|²}` is
//!
//! ```text
//! φₙ(t,x) = γ(t) e^{iy₁|x|² - |y₂x + aₙ|²/(1 - 4iy₃)},   γ = (a²/(1 - 4iy₃))^{d/2}
//! ```
//!
//! so `|φₙ|² = |γ|² e^{-A|x + aₙ/y₂|²}` with `A = 2y₂²/(1 + 16y₃²)`: the packet
//! travels along `-aₙ/y₂(t)` and spreads at rate `A`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::decompose::GaussianMixture;
use crate::error::{Error, Result};
use crate::grid::{Fft, GridSpec};
use crate::oscillator::OscillatorSpec;
use crate::riccati::{PhaseValues, RiccatiSolution};

/// Relative boundary mass above which [`fio_apply`] reports aliasing.
pub const ALIAS_THRESHOLD: f64 = 1e-10;

/// Single packet `e^{-|x+a|²}` carried by a phase solution.
#[derive(Debug, Clone, Copy)]
pub struct PropagatedPacket<'a> {
    pub center: &'a [f64],
    pub riccati: &'a RiccatiSolution,
}

/// `e^{iy₁s² - (y₂s + a)²/(1 - 4iy₃)}` for one coordinate.
fn axis_factor(pv: &PhaseValues, inv: Complex64, s: f64, a: f64) -> Complex64 {
    let u = pv.y2 * s + a;
    (Complex64::new(0.0, pv.y1 * s * s) - inv * (u * u)).exp()
}

/// `φ(t,x)` from phase values at `t`.
pub fn packet_value(pv: &PhaseValues, center: &[f64], x: &[f64]) -> Complex64 {
    let inv = Complex64::new(1.0, -4.0 * pv.y3).inv();
    let mut z = pv.gamma(x.len());
    for (&s, &a) in x.iter().zip(center) {
        z *= axis_factor(pv, inv, s, a);
    }
    z
}

pub fn propagate_packet(p: &PropagatedPacket<'_>, t: f64, x: &[f64]) -> Result<Complex64> {
    if p.center.len() != x.len() {
        return Err(Error::Parameter("center and point dimensions differ".into()));
    }
    let pv = p.riccati.eval(t)?;
    Ok(packet_value(&pv, p.center, x))
}

/// `Σ cₙ φₙ(t,x)` at a single point.
pub fn mixture_value(mix: &GaussianMixture, pv: &PhaseValues, x: &[f64]) -> Complex64 {
    let inv = Complex64::new(1.0, -4.0 * pv.y3).inv();
    let a_spread = pv.spread();
    let gamma = pv.gamma(mix.dim);
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, &c) in mix.centers.iter().zip(&mix.coeffs) {
        let r2: f64 = x.iter().zip(a).map(|(&s, &ai)| (s + ai / pv.y2).powi(2)).sum();
        if 0.5 * a_spread * r2 > 745.0 {
            continue;
        }
        let mut z = Complex64::new(c, 0.0);
        for (&s, &ai) in x.iter().zip(a) {
            z *= axis_factor(pv, inv, s, ai);
        }
        acc += z;
    }
    acc * gamma
}

/// The parametrix sampled on a grid at one time.
#[derive(Debug, Clone)]
pub struct ParametrixField {
    pub mixture: GaussianMixture,
    pub phase: PhaseValues,
    pub t: f64,
    pub grid: GridSpec,
    pub values: Vec<Complex64>,
}

/// Above this many cached per-axis factors the field is evaluated point by point.
const FACTOR_CACHE_LIMIT: usize = 1 << 22;

pub fn parametrix(
    mix: &GaussianMixture,
    ric: &RiccatiSolution,
    t: f64,
    grid: &GridSpec,
) -> Result<ParametrixField> {
    if mix.dim != grid.dim {
        return Err(Error::Parameter(format!(
            "mixture dimension {} differs from grid dimension {}",
            mix.dim, grid.dim
        )));
    }
    let pv = ric.eval(t)?;
    let values = parametrix_values(mix, &pv, grid);
    Ok(ParametrixField {
        mixture: mix.clone(),
        phase: pv,
        t,
        grid: *grid,
        values,
    })
}

/// `Σ cₙ φₙ` on every grid point for given phase values.
pub fn parametrix_values(mix: &GaussianMixture, pv: &PhaseValues, grid: &GridSpec) -> Vec<Complex64> {
    let n = grid.points_per_dim;
    let k = mix.len();
    if k == 0 {
        return vec![Complex64::new(0.0, 0.0); grid.len()];
    }
    if grid.dim == 1 || k * grid.dim * n > FACTOR_CACHE_LIMIT {
        return (0..grid.len())
            .into_par_iter()
            .map(|q| mixture_value(mix, pv, &grid.point(q)))
            .collect();
    }
    let coords = grid.coords();
    let inv = Complex64::new(1.0, -4.0 * pv.y3).inv();
    let factors: Vec<Vec<Vec<Complex64>>> = mix
        .centers
        .par_iter()
        .map(|a| {
            a.iter()
                .map(|&ai| coords.iter().map(|&s| axis_factor(pv, inv, s, ai)).collect())
                .collect()
        })
        .collect();
    let gamma = pv.gamma(grid.dim);
    (0..grid.len())
        .into_par_iter()
        .map(|q| {
            let idx = grid.index(q);
            let mut acc = Complex64::new(0.0, 0.0);
            for (f, &c) in factors.iter().zip(&mix.coeffs) {
                let mut z = Complex64::new(c, 0.0);
                for (axis, &j) in idx.iter().enumerate() {
                    z *= f[axis][j];
                }
                acc += z;
            }
            acc * gamma
        })
        .collect()
}

/// Evaluates the trigonometric interpolant of one spectral axis at the
/// points `z_j`, returning zero outside `[-L, L)`.
fn evaluate_axis(grid: &GridSpec, data: &[Complex64], axis: usize, z: &[f64]) -> Vec<Complex64> {
    let n = grid.points_per_dim;
    let l = grid.half_width;
    let k = grid.wavenumbers();
    let stride = n.pow((grid.dim - 1 - axis) as u32);
    let block = stride * n;
    let scale = 1.0 / n as f64;
    // Kernel rows: e^{iξₖ(z_j + L)}/n, with the Nyquist mode split symmetrically.
    let rows: Vec<Option<Vec<Complex64>>> = z
        .par_iter()
        .map(|&zj| {
            if zj < -l || zj >= l {
                return None;
            }
            let theta = zj + l;
            Some(
                (0..n)
                    .map(|m| {
                        if m == n / 2 {
                            Complex64::new((k[m] * theta).cos() * scale, 0.0)
                        } else {
                            Complex64::from_polar(scale, k[m] * theta)
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    out.par_chunks_mut(block).zip(data.par_chunks(block)).for_each(|(o, d)| {
        for offset in 0..stride {
            for (j, row) in rows.iter().enumerate() {
                if let Some(row) = row {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (m, w) in row.iter().enumerate() {
                        acc += w * d[offset + m * stride];
                    }
                    o[offset + j * stride] = acc;
                }
            }
        }
    });
    out
}

/// `u(t,x) = aᵈ e^{iy₁|x|²} (F⁻¹[e^{iy₃|ξ|²} û₀])(y₂x)` for a field on `grid`.
pub fn fio_apply(u0: &[Complex64], grid: &GridSpec, ric: &RiccatiSolution, t: f64) -> Result<Vec<Complex64>> {
    if u0.len() != grid.len() {
        return Err(Error::Grid("initial field does not match the grid".into()));
    }
    let pv = ric.eval(t)?;
    let frac = grid.boundary_mass_fraction(u0);
    if frac > ALIAS_THRESHOLD {
        return Err(Error::Grid(format!(
            "initial field has boundary mass fraction {frac:e}; enlarge the grid"
        )));
    }
    let fft = Fft::new(grid);
    let mut w = u0.to_vec();
    fft.forward(&mut w);
    for (z, k2) in w.iter_mut().zip(grid.wavenumber_squared()) {
        *z *= Complex64::from_polar(1.0, pv.y3 * k2);
    }
    // The free-evolved field on the grid itself must stay clear of the edges.
    let mut check = w.clone();
    fft.inverse(&mut check);
    let frac = grid.boundary_mass_fraction(&check);
    if frac > ALIAS_THRESHOLD {
        return Err(Error::Grid(format!(
            "intermediate field reaches the boundary (mass fraction {frac:e}) at t = {t}"
        )));
    }
    let z: Vec<f64> = grid.coords().iter().map(|&x| pv.y2 * x).collect();
    for axis in 0..grid.dim {
        w = evaluate_axis(grid, &w, axis, &z);
    }
    let amp = pv.a.powi(grid.dim as i32);
    let r2 = grid.radius_squared();
    for (v, &r) in w.iter_mut().zip(&r2) {
        *v *= Complex64::from_polar(amp, pv.y1 * r);
    }
    Ok(w)
}

/// `‖∂ₜu + i(-κ₁Δ + κ₂|x|²)u‖/‖u‖` at the middle of three slices spaced by
/// `h`, with a centered difference in time and a spectral Laplacian.
pub fn pde_residual(
    prev: &[Complex64],
    cur: &[Complex64],
    next: &[Complex64],
    h: f64,
    t: f64,
    osc: &OscillatorSpec,
    grid: &GridSpec,
) -> f64 {
    let norm = grid.l2_norm(cur);
    if norm == 0.0 {
        return 0.0;
    }
    let fft = Fft::new(grid);
    let mut lap = cur.to_vec();
    fft.forward(&mut lap);
    for (z, k2) in lap.iter_mut().zip(grid.wavenumber_squared()) {
        *z *= -k2;
    }
    fft.inverse(&mut lap);
    let (k1, k2) = (osc.kappa1(t), osc.kappa2(t));
    let r2 = grid.radius_squared();
    let i = Complex64::new(0.0, 1.0);
    let res: Vec<Complex64> = (0..cur.len())
        .map(|q| (next[q] - prev[q]) / (2.0 * h) + i * (-k1 * lap[q] + k2 * r2[q] * cur[q]))
        .collect();
    grid.l2_norm(&res) / norm
}

/// Smallest `L` keeping every packet's mass within `e^{-16}` of the edge:
/// `L = maxₙ|aₙ|/min y₂ + 8/√(min A)` over the samples in `[0, t_max]`.
pub fn required_half_width(mix: &GaussianMixture, ric: &RiccatiSolution, t_max: f64) -> Result<f64> {
    let times = ric.times_up_to(t_max);
    let mut y2_min = f64::INFINITY;
    let mut a_min = f64::INFINITY;
    for &t in &times {
        let pv = ric.eval(t)?;
        y2_min = y2_min.min(pv.y2);
        a_min = a_min.min(pv.spread());
    }
    Ok(mix.max_center_norm() / y2_min + 8.0 / a_min.sqrt())
}

/// Grid sized by [`required_half_width`] with the given resolution.
pub fn grid_for(mix: &GaussianMixture, ric: &RiccatiSolution, t_max: f64, points_per_dim: usize) -> Result<GridSpec> {
    GridSpec::new(mix.dim, required_half_width(mix, ric, t_max)?, points_per_dim)
}
