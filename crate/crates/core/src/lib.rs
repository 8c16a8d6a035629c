//! Explicit Gaussian-wavepacket parametrices for time-dependent quadratic
//! Schrödinger equations `∂ₜu + i(-κ₁(t)Δ + κ₂(t)|x|²)u = 0`, observability
//! certificates built from them, and a split-step spectral reference solver.
//!
//! The pipeline is:
//!
//! 1. [`oscillator`]: coefficients κ₁, κ₂ and the classical trajectory whose
//!    first zero bounds the time window.
//! 2. [`riccati`]: phase coefficients `y₁, y₂, y₃` and the amplitude `a`.
//! 3. [`hermite`] and [`decompose`]: turn initial data into a finite sum of
//!    real Gaussians `Σ cₙ e^{-|x+aₙ|²}`.
//! 4. [`propagate`]: closed-form propagation of each Gaussian and the sum.
//! 5. [`observability`]: lower-bound constants and admissibility conditions.
//! 6. [`reference`]: brute-force Strang splitting used as the oracle.

pub mod config;
pub mod decompose;
pub mod error;
pub mod grid;
pub mod hermite;
pub mod io;
pub mod observability;
pub mod ode;
pub mod oscillator;
pub mod propagate;
pub mod quadrature;
pub mod reference;
pub mod riccati;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;
