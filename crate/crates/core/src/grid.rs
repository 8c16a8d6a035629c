//! Periodic tensor grids on `[-L, L)^d` and the FFT helpers used by the
//! reference solver and [`crate::propagate::fio_apply`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::multi_index;

/// Points with some coordinate beyond this fraction of `L` form the boundary
/// strip watched by the aliasing guards.
pub const BOUNDARY_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    #[serde(rename = "L", alias = "half_width")]
    pub half_width: f64,
    #[serde(rename = "n", alias = "points_per_dim")]
    pub points_per_dim: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, points_per_dim: usize) -> Result<Self> {
        let g = GridSpec {
            dim,
            half_width,
            points_per_dim,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::Grid(format!("grid dimension {} not in 1..=3", self.dim)));
        }
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(Error::Grid(format!("half width {} must be positive", self.half_width)));
        }
        if self.points_per_dim < 4 || !self.points_per_dim.is_power_of_two() {
            return Err(Error::Grid(format!(
                "points per dimension {} must be a power of two ≥ 4",
                self.points_per_dim
            )));
        }
        if self.points_per_dim.checked_pow(self.dim as u32).is_none_or(|n| n > 1 << 26) {
            return Err(Error::Grid("grid has too many points".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_dim as f64
    }

    /// Volume element `hᵈ`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// One-dimensional coordinates `-L + jh`, `j = 0..n`.
    pub fn coords(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points_per_dim).map(|j| -self.half_width + h * j as f64).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.points_per_dim;
        let dk = PI / self.half_width;
        (0..n)
            .map(|j| if j < n / 2 { j as f64 } else { j as f64 - n as f64 } * dk)
            .collect()
    }

    pub fn index(&self, flat: usize) -> Vec<usize> {
        multi_index(flat, self.points_per_dim, self.dim)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let h = self.spacing();
        self.index(flat).iter().map(|&j| -self.half_width + h * j as f64).collect()
    }

    /// `|x|²` at every grid point.
    pub fn radius_squared(&self) -> Vec<f64> {
        let c = self.coords();
        (0..self.len())
            .map(|flat| self.index(flat).iter().map(|&j| c[j] * c[j]).sum())
            .collect()
    }

    /// `|ξ|²` at every grid point in FFT order.
    pub fn wavenumber_squared(&self) -> Vec<f64> {
        let k = self.wavenumbers();
        (0..self.len())
            .map(|flat| self.index(flat).iter().map(|&j| k[j] * k[j]).sum())
            .collect()
    }

    pub fn sample<F>(&self, f: F) -> Vec<Complex64>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        (0..self.len()).into_par_iter().map(|q| f(&self.point(q))).collect()
    }

    pub fn sample_real<F>(&self, f: F) -> Vec<Complex64>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        self.sample(|x| Complex64::new(f(x), 0.0))
    }

    /// `∫|u|²` by the rectangle rule (exact for band-limited periodic data).
    pub fn mass(&self, u: &[Complex64]) -> f64 {
        u.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_volume()
    }

    pub fn l2_norm(&self, u: &[Complex64]) -> f64 {
        self.mass(u).sqrt()
    }

    pub fn l2_distance(&self, u: &[Complex64], v: &[Complex64]) -> f64 {
        (u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() * self.cell_volume()).sqrt()
    }

    /// `true` at points with some coordinate in the boundary strip.
    pub fn boundary_mask(&self) -> Vec<bool> {
        let c = self.coords();
        let edge = BOUNDARY_FRACTION * self.half_width;
        (0..self.len())
            .map(|q| self.index(q).iter().any(|&j| c[j].abs() >= edge))
            .collect()
    }

    /// Fraction of the mass of `u` in the boundary strip; 0 for a zero field.
    pub fn boundary_mass_fraction(&self, u: &[Complex64]) -> f64 {
        boundary_fraction_masked(u, &self.boundary_mask())
    }
}

pub(crate) fn boundary_fraction_masked(u: &[Complex64], mask: &[bool]) -> f64 {
    let (mut total, mut strip) = (0.0, 0.0);
    for (z, &m) in u.iter().zip(mask) {
        let v = z.norm_sqr();
        total += v;
        if m {
            strip += v;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        strip / total
    }
}

/// Reusable forward and inverse transforms for one grid.
pub struct Fft {
    grid: GridSpec,
    forward: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inverse: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl Fft {
    pub fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        Fft {
            grid: *grid,
            forward: planner.plan_fft_forward(grid.points_per_dim),
            inverse: planner.plan_fft_inverse(grid.points_per_dim),
        }
    }

    /// Unnormalised forward DFT over every axis.
    pub fn forward(&self, u: &mut [Complex64]) {
        self.apply(u, &*self.forward);
    }

    /// Inverse DFT over every axis, normalised so `inverse ∘ forward = id`.
    pub fn inverse(&self, u: &mut [Complex64]) {
        self.apply(u, &*self.inverse);
        let s = 1.0 / self.grid.len() as f64;
        u.iter_mut().for_each(|z| *z *= s);
    }

    fn apply(&self, u: &mut [Complex64], fft: &dyn rustfft::Fft<f64>) {
        assert_eq!(u.len(), self.grid.len(), "field does not match the grid");
        let n = self.grid.points_per_dim;
        let dim = self.grid.dim;
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            if stride == 1 {
                fft.process(u);
                continue;
            }
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let block = stride * n;
            for start in (0..u.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = u[base + j * stride];
                    }
                    fft.process(&mut line);
                    for (j, v) in line.iter().enumerate() {
                        u[base + j * stride] = *v;
                    }
                }
            }
        }
    }
}
