//! Phase coefficients of the Fourier integral operator solving the quadratic
//! Schrödinger equation.
//!
//! With phase `y₁(t)|x|² + y₂(t)x·η + y₃(t)|η|²` the eikonal equation reduces to
//!
//! ```text
//! y₁' = -4κ₁y₁² - κ₂     y₁(0) = 0
//! y₂' = -4κ₁y₁y₂         y₂(0) = 1
//! y₃' = -κ₁y₂²           y₃(0) = 0
//! a'  = -2κ₁y₁a          a(0)  = 1
//! ```
//!
//! `y₂` and `a²` solve the same linear equation, so `y₂ = a²`; both are
//! integrated so that identity is a genuine check. The Riccati equation for
//! `y₁` linearises through `y₁ = v'/(4κ₁v)` with `v'' - (ln κ₁)'v' + 4κ₁κ₂v = 0`;
//! `v` coincides with the classical trajectory `x(t)`, which is why the
//! solution only exists up to the first zero of the flow.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{self, Control, Status, Tolerances, Trajectory};
use crate::oscillator::{hamiltonian_flow, Horizon, OscillatorSpec, Preset};

/// `y₁, y₂, y₃, a` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseValues {
    pub y1: f64,
    pub y2: f64,
    pub y3: f64,
    pub a: f64,
}

impl PhaseValues {
    pub const INITIAL: PhaseValues = PhaseValues {
        y1: 0.0,
        y2: 1.0,
        y3: 0.0,
        a: 1.0,
    };

    fn from_array(v: [f64; 4]) -> Self {
        PhaseValues {
            y1: v[0],
            y2: v[1],
            y3: v[2],
            a: v[3],
        }
    }

    /// Packet spread `A = 2y₂²/(1 + 16y₃²)`.
    pub fn spread(&self) -> f64 {
        2.0 * self.y2 * self.y2 / (1.0 + 16.0 * self.y3 * self.y3)
    }

    /// `a²/(1 - 4iy₃)`, the base of the packet prefactor.
    pub fn prefactor_base(&self) -> Complex64 {
        Complex64::new(self.a * self.a, 0.0) / Complex64::new(1.0, -4.0 * self.y3)
    }

    /// `γ = (a²/(1 - 4iy₃))^{d/2}` on the principal branch.
    ///
    /// `Re(1 - 4iy₃) = 1 > 0`, so the base never leaves the right half-plane and
    /// the principal branch is continuous in `t`.
    pub fn gamma(&self, dim: usize) -> Complex64 {
        let z = self.prefactor_base();
        Complex64::from_polar(z.norm().powf(0.5 * dim as f64), 0.5 * dim as f64 * z.arg())
    }
}

/// Tunables for [`solve_riccati_with`].
#[derive(Debug, Clone, Copy)]
pub struct RiccatiOptions {
    /// Relative integration tolerance (absolute is `tol * 1e-3`).
    pub tol: f64,
    /// Distance kept from the first zero of the flow.
    pub margin: f64,
    /// `|y₁|` above this counts as blow-up.
    pub blowup: f64,
    /// Minimum number of samples over the horizon.
    pub min_samples: usize,
}

impl Default for RiccatiOptions {
    fn default() -> Self {
        RiccatiOptions {
            tol: 1e-10,
            margin: 1e-3,
            blowup: 1e8,
            min_samples: 4096,
        }
    }
}

/// Sampled phase coefficients on `[0, horizon]`.
#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    pub t: Vec<f64>,
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    pub y3: Vec<f64>,
    pub a: Vec<f64>,
    /// Last time at which the solution is valid.
    pub horizon: f64,
    /// First zero of the classical flow, if it occurred in the requested window.
    pub flow_horizon: Horizon,
    traj: Trajectory<4>,
}

fn rhs(osc: &OscillatorSpec, t: f64, y: &[f64; 4]) -> [f64; 4] {
    let k1 = osc.kappa1(t);
    let k2 = osc.kappa2(t);
    [
        -4.0 * k1 * y[0] * y[0] - k2,
        -4.0 * k1 * y[0] * y[1],
        -k1 * y[1] * y[1],
        -2.0 * k1 * y[0] * y[3],
    ]
}

pub fn solve_riccati(osc: &OscillatorSpec, t_max: f64, tol: f64) -> Result<RiccatiSolution> {
    solve_riccati_with(
        osc,
        t_max,
        &RiccatiOptions {
            tol,
            ..Default::default()
        },
    )
}

/// Solves the phase system on `[0, min(t_max, T_D - margin)]`, where `T_D` is
/// the first zero of the Hamiltonian flow.
pub fn solve_riccati_with(
    osc: &OscillatorSpec,
    t_max: f64,
    opts: &RiccatiOptions,
) -> Result<RiccatiSolution> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!("time window must be positive, got {t_max}")));
    }
    let flow = hamiltonian_flow(osc, t_max, 1e-9)?;
    let horizon = match flow.horizon {
        Horizon::Finite(td) => (td - opts.margin).min(t_max),
        Horizon::Infinite => t_max,
    };
    if !(horizon > 0.0) {
        return Err(Error::horizon(t_max, 0.0, "flow vanishes before the margin"));
    }
    let tols = Tolerances {
        rtol: opts.tol,
        atol: opts.tol * 1e-3,
        max_step: horizon / opts.min_samples.max(2048) as f64,
        ..Default::default()
    };
    let mut blown = None;
    let (traj, status) = ode::integrate(
        |t, y: &[f64; 4]| rhs(osc, t, y),
        0.0,
        [0.0, 1.0, 0.0, 1.0],
        horizon,
        &tols,
        |t, y| {
            if y[0].abs() > opts.blowup {
                blown = Some(t);
                Control::Stop
            } else {
                Control::Continue
            }
        },
    );
    if let Some(t) = blown {
        let last = traj.t[traj.len().saturating_sub(2)];
        return Err(Error::horizon(t, last, "y₁ exceeded the blow-up threshold"));
    }
    if matches!(status, Status::Underflow | Status::NonFinite) {
        return Err(Error::horizon(
            horizon,
            traj.t_end(),
            "step size underflow in the phase equations",
        ));
    }
    let sol = RiccatiSolution {
        t: traj.t.clone(),
        y1: traj.y.iter().map(|v| v[0]).collect(),
        y2: traj.y.iter().map(|v| v[1]).collect(),
        y3: traj.y.iter().map(|v| v[2]).collect(),
        a: traj.y.iter().map(|v| v[3]).collect(),
        horizon,
        flow_horizon: flow.horizon,
        traj,
    };
    sol.check_invariants()?;
    Ok(sol)
}

impl RiccatiSolution {
    fn check_invariants(&self) -> Result<()> {
        if let Some(i) = self.y2.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::Consistency(format!(
                "y₂ = {} is not positive at t = {}",
                self.y2[i], self.t[i]
            )));
        }
        if self.y3.windows(2).any(|w| w[1] > w[0] + 1e-15) {
            return Err(Error::Consistency("y₃ is not nonincreasing".into()));
        }
        let mut prev = 0.0_f64;
        for (i, &t) in self.t.iter().enumerate() {
            let arg = self.value_at(i).prefactor_base().arg();
            if (arg - prev).abs() > 0.5 * std::f64::consts::PI {
                return Err(Error::Consistency(format!(
                    "prefactor phase jumps at t = {t}; branch tracking lost"
                )));
            }
            prev = arg;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn value_at(&self, i: usize) -> PhaseValues {
        PhaseValues::from_array(self.traj.y[i])
    }

    /// Phase coefficients at `t` by cubic Hermite interpolation between samples.
    pub fn eval(&self, t: f64) -> Result<PhaseValues> {
        if !(t >= 0.0) || t > self.horizon * (1.0 + 1e-12) {
            return Err(Error::horizon(t, self.horizon, "outside the phase solution"));
        }
        Ok(PhaseValues::from_array(self.traj.eval(t.min(self.horizon))))
    }

    /// Packet spread `A(t)`.
    pub fn spread(&self, t: f64) -> Result<f64> {
        Ok(self.eval(t)?.spread())
    }

    /// Sample times in `[0, t_max]`, with `t_max` itself appended if it falls
    /// between samples.
    pub fn times_up_to(&self, t_max: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self.t.iter().copied().filter(|&t| t <= t_max).collect();
        if out.last().is_some_and(|&t| t < t_max) {
            out.push(t_max);
        }
        out
    }

    /// Largest relative deviation between `y₂` and `a²` over the samples.
    pub fn amplitude_identity_deviation(&self) -> f64 {
        self.y2
            .iter()
            .zip(&self.a)
            .map(|(&y2, &a)| (y2 - a * a).abs() / y2.abs())
            .fold(0.0, f64::max)
    }

    /// A copy with `y₂` shifted by `delta`; only useful for sensitivity studies.
    pub fn with_y2_offset(&self, delta: f64) -> Self {
        let mut out = self.clone();
        for (v, y) in out.y2.iter_mut().zip(out.traj.y.iter_mut()) {
            *v += delta;
            y[1] += delta;
        }
        out
    }

    /// CSV with columns `t,y1,y2,y3,a`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,y1,y2,y3,a\n");
        for i in 0..self.t.len() {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.t[i], self.y1[i], self.y2[i], self.y3[i], self.a[i]
            ));
        }
        out
    }
}

/// Integrates `v'' - (ln κ₁)'v' + 4κ₁κ₂v = 0`, `v(0) = 1`, `v'(0) = 0` across the
/// samples of `sol` and returns `max |y₁ - v'/(4κ₁v)|`.
pub fn linear_reduction_check(osc: &OscillatorSpec, sol: &RiccatiSolution) -> Result<f64> {
    let f = |t: f64, y: &[f64; 2]| {
        [
            y[1],
            osc.log_kappa1_rate(t) * y[1] - 4.0 * osc.kappa1(t) * osc.kappa2(t) * y[0],
        ]
    };
    let tols = Tolerances {
        rtol: 1e-12,
        atol: 1e-15,
        ..Default::default()
    };
    let mut state = [1.0, 0.0];
    let mut worst: f64 = 0.0;
    for i in 0..sol.t.len() {
        if i > 0 {
            state = ode::advance(&f, sol.t[i - 1], state, sol.t[i], &tols).ok_or_else(|| {
                Error::horizon(sol.t[i], sol.t[i - 1], "linear reduction integration failed")
            })?;
            if state[0] <= 0.0 {
                return Err(Error::Contradiction(format!(
                    "v crosses zero at t = {} before the horizon {}",
                    sol.t[i], sol.horizon
                )));
            }
        }
        let y1 = state[1] / (4.0 * osc.kappa1(sol.t[i]) * state[0]);
        worst = worst.max((sol.y1[i] - y1).abs());
    }
    Ok(worst)
}

/// Checks `e^{-4K₀Kt} ≤ y₂(t) ≤ e^{4K₀Kt}` and `y₃(t) ≤ 0` at every sample.
pub fn gronwall_bounds_check(sol: &RiccatiSolution, k0: f64, k: f64) -> bool {
    const SLACK: f64 = 1e-12;
    sol.t.iter().zip(sol.y2.iter().zip(&sol.y3)).all(|(&t, (&y2, &y3))| {
        let g = (4.0 * k0 * k * t).exp();
        y2 >= (1.0 / g) * (1.0 - SLACK) && y2 <= g * (1.0 + SLACK) && y3 <= 0.0
    })
}

/// Known closed-form phase coefficients, used as golden references.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// `(0, 1, -t)`.
    Free,
    /// `(-tan t / 2, sec t, -tan t / 2)`.
    Harmonic,
    /// Caldirola–Kanai with `a > σ`, `λ = √(a² - σ²)`.
    CkHyperbolic { a: f64, sigma: f64 },
    /// Caldirola–Kanai with `σ > a`, `Λ = √(σ² - a²)`.
    CkOscillatory { a: f64, sigma: f64 },
}

impl ClosedForm {
    pub fn by_name(name: &str, a: f64, sigma: f64) -> Option<Self> {
        match name {
            "free" => Some(ClosedForm::Free),
            "harmonic" => Some(ClosedForm::Harmonic),
            "ck" | "caldirola_kanai" if a > sigma => Some(ClosedForm::CkHyperbolic { a, sigma }),
            "ck" | "caldirola_kanai" if sigma > a => Some(ClosedForm::CkOscillatory { a, sigma }),
            _ => None,
        }
    }

    pub fn for_oscillator(osc: &OscillatorSpec) -> Option<Self> {
        match osc.preset {
            Preset::Free => Some(ClosedForm::Free),
            Preset::Harmonic => Some(ClosedForm::Harmonic),
            Preset::CaldirolaKanai => {
                let a = *osc.params.get("a")?;
                let sigma = *osc.params.get("sigma").or_else(|| osc.params.get("σ"))?;
                ClosedForm::by_name("ck", a, sigma)
            }
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> PhaseValues {
        let (y1, y2, y3) = match *self {
            ClosedForm::Free => (0.0, 1.0, -t),
            ClosedForm::Harmonic => (-0.5 * t.tan(), 1.0 / t.cos(), -0.5 * t.tan()),
            ClosedForm::CkHyperbolic { a, sigma } => {
                let l = (a * a - sigma * sigma).sqrt();
                let (c, s) = ((l * t).cosh(), (l * t).sinh());
                let d = l * c + a * s;
                (
                    0.5 * (2.0 * a * t).exp() * (l - a * a / l) * s / (c + a / l * s),
                    l * (a * t).exp() / d,
                    -s / (2.0 * d),
                )
            }
            ClosedForm::CkOscillatory { a, sigma } => {
                let l = (sigma * sigma - a * a).sqrt();
                let (c, s) = ((l * t).cos(), (l * t).sin());
                let d = l * c + a * s;
                (
                    -0.5 * (2.0 * a * t).exp() * (l + a * a / l) * s / (c + a / l * s),
                    l * (a * t).exp() / d,
                    -s / (2.0 * d),
                )
            }
        };
        PhaseValues {
            y1,
            y2,
            y3,
            a: y2.sqrt(),
        }
    }
}
