//! Time-dependent quadratic operators `-κ₁(t)Δ + κ₂(t)|x|²` and their
//! classical trajectories.
//!
//! Presets:
//!
//! | name        | κ₁(t)                | κ₂(t)                 |
//! |-------------|----------------------|-----------------------|
//! | `free`      | 1                    | 0                     |
//! | `harmonic`  | 1/2                  | 1/2                   |
//! | `ck`        | e^{-2at}/2           | σ² e^{2at}/2          |
//! | `power_law` | 1/(2(t+d)^a)         | σ²(t+d)^b/2           |
//! | `tabulated` | piecewise linear     | piecewise linear      |
//!
//! The Caldirola–Kanai preset uses the pair with a decaying κ₁ and growing κ₂,
//! for which closed-form trajectories are known. The mirrored pair
//! (κ₁ = e^{2at}/2, κ₂ = e^{-2at}/2) is also sometimes quoted under the same
//! name; it can be reproduced with a `tabulated` oscillator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, Control, Status, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Free,
    Harmonic,
    #[serde(rename = "ck", alias = "caldirola_kanai")]
    CaldirolaKanai,
    PowerLaw,
    Tabulated,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Free => "free",
            Preset::Harmonic => "harmonic",
            Preset::CaldirolaKanai => "ck",
            Preset::PowerLaw => "power_law",
            Preset::Tabulated => "tabulated",
        }
    }
}

/// Sampled coefficients for the `tabulated` preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientTable {
    pub t: Vec<f64>,
    pub kappa1: Vec<f64>,
    pub kappa2: Vec<f64>,
}

impl CoefficientTable {
    fn validate(&self) -> Result<()> {
        let n = self.t.len();
        if n < 2 || self.kappa1.len() != n || self.kappa2.len() != n {
            return Err(Error::Parameter(
                "table needs at least two rows and equal column lengths".into(),
            ));
        }
        if !self.t.windows(2).all(|w| w[1] > w[0]) || self.t[0] != 0.0 {
            return Err(Error::Parameter(
                "table times must start at 0 and increase strictly".into(),
            ));
        }
        if !self
            .t
            .iter()
            .chain(&self.kappa1)
            .chain(&self.kappa2)
            .all(|v| v.is_finite())
        {
            return Err(Error::Parameter("table entries must be finite".into()));
        }
        Ok(())
    }

    fn segment(&self, t: f64) -> (usize, f64) {
        let n = self.t.len();
        let i = self.t.partition_point(|&s| s <= t).clamp(1, n - 1) - 1;
        let s = (t - self.t[i]) / (self.t[i + 1] - self.t[i]);
        (i, s)
    }

    fn interp(&self, col: &[f64], t: f64) -> f64 {
        let (i, s) = self.segment(t);
        col[i] + s * (col[i + 1] - col[i])
    }

    fn slope(&self, col: &[f64], t: f64) -> f64 {
        let (i, _) = self.segment(t);
        (col[i + 1] - col[i]) / (self.t[i + 1] - self.t[i])
    }
}

/// Coefficient pair of a quadratic Hamiltonian `κ₁(t)|p|² + κ₂(t)|x|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSpec {
    pub preset: Preset,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<CoefficientTable>,
}

fn param(params: &BTreeMap<String, f64>, keys: &[&str]) -> Result<f64> {
    for k in keys {
        if let Some(&v) = params.get(*k) {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("parameter `{k}` is not finite")));
            }
            return Ok(v);
        }
    }
    Err(Error::Parameter(format!("missing parameter `{}`", keys[0])))
}

fn positive(params: &BTreeMap<String, f64>, keys: &[&str]) -> Result<f64> {
    let v = param(params, keys)?;
    if v <= 0.0 {
        return Err(Error::Parameter(format!(
            "parameter `{}` must be positive, got {v}",
            keys[0]
        )));
    }
    Ok(v)
}

/// Builds an oscillator from a preset name and its parameters.
///
/// `ck` takes `a` and `sigma`; `power_law` takes `a`, `b`, `d` and `sigma`.
pub fn make_oscillator(preset: Preset, params: BTreeMap<String, f64>) -> Result<OscillatorSpec> {
    let spec = OscillatorSpec {
        preset,
        params,
        table: None,
    };
    spec.validate()?;
    Ok(spec)
}

impl OscillatorSpec {
    pub fn free() -> Self {
        OscillatorSpec {
            preset: Preset::Free,
            params: BTreeMap::new(),
            table: None,
        }
    }

    pub fn harmonic() -> Self {
        OscillatorSpec {
            preset: Preset::Harmonic,
            params: BTreeMap::new(),
            table: None,
        }
    }

    pub fn caldirola_kanai(a: f64, sigma: f64) -> Result<Self> {
        make_oscillator(
            Preset::CaldirolaKanai,
            BTreeMap::from([("a".to_string(), a), ("sigma".to_string(), sigma)]),
        )
    }

    pub fn power_law(a: f64, b: f64, d: f64, sigma: f64) -> Result<Self> {
        make_oscillator(
            Preset::PowerLaw,
            BTreeMap::from([
                ("a".to_string(), a),
                ("b".to_string(), b),
                ("d".to_string(), d),
                ("sigma".to_string(), sigma),
            ]),
        )
    }

    pub fn tabulated(table: CoefficientTable) -> Result<Self> {
        let spec = OscillatorSpec {
            preset: Preset::Tabulated,
            params: BTreeMap::new(),
            table: Some(table),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks that every parameter the preset needs is present and admissible.
    pub fn validate(&self) -> Result<()> {
        match self.preset {
            Preset::Free | Preset::Harmonic => Ok(()),
            Preset::CaldirolaKanai => {
                positive(&self.params, &["a"])?;
                positive(&self.params, &["sigma", "σ"])?;
                Ok(())
            }
            Preset::PowerLaw => {
                positive(&self.params, &["a"])?;
                positive(&self.params, &["b"])?;
                positive(&self.params, &["d", "d_offset"])?;
                positive(&self.params, &["sigma", "σ"])?;
                Ok(())
            }
            Preset::Tabulated => {
                let table = self
                    .table
                    .as_ref()
                    .ok_or_else(|| Error::Parameter("tabulated preset needs a table".into()))?;
                table.validate()?;
                if table.kappa1.iter().any(|&k| k <= 0.0) {
                    return Err(Error::Parameter("tabulated κ₁ must be positive".into()));
                }
                if table.kappa2.iter().any(|&k| k < 0.0) {
                    return Err(Error::Parameter("tabulated κ₂ must be nonnegative".into()));
                }
                Ok(())
            }
        }
    }

    fn p(&self, keys: &[&str]) -> f64 {
        // Parameters are checked by `validate`; a missing one here is a logic error.
        param(&self.params, keys).expect("oscillator parameters validated at construction")
    }

    pub fn kappa1(&self, t: f64) -> f64 {
        match self.preset {
            Preset::Free => 1.0,
            Preset::Harmonic => 0.5,
            Preset::CaldirolaKanai => 0.5 * (-2.0 * self.p(&["a"]) * t).exp(),
            Preset::PowerLaw => {
                0.5 / (t + self.p(&["d", "d_offset"])).powf(self.p(&["a"]))
            }
            Preset::Tabulated => {
                let tab = self.table.as_ref().expect("validated");
                tab.interp(&tab.kappa1, t)
            }
        }
    }

    pub fn kappa2(&self, t: f64) -> f64 {
        match self.preset {
            Preset::Free => 0.0,
            Preset::Harmonic => 0.5,
            Preset::CaldirolaKanai => {
                let s = self.p(&["sigma", "σ"]);
                0.5 * s * s * (2.0 * self.p(&["a"]) * t).exp()
            }
            Preset::PowerLaw => {
                let s = self.p(&["sigma", "σ"]);
                0.5 * s * s * (t + self.p(&["d", "d_offset"])).powf(self.p(&["b"]))
            }
            Preset::Tabulated => {
                let tab = self.table.as_ref().expect("validated");
                tab.interp(&tab.kappa2, t)
            }
        }
    }

    /// Logarithmic derivative `(ln κ₁)'(t)`.
    pub fn log_kappa1_rate(&self, t: f64) -> f64 {
        match self.preset {
            Preset::Free | Preset::Harmonic => 0.0,
            Preset::CaldirolaKanai => -2.0 * self.p(&["a"]),
            Preset::PowerLaw => -self.p(&["a"]) / (t + self.p(&["d", "d_offset"])),
            Preset::Tabulated => {
                let tab = self.table.as_ref().expect("validated");
                tab.slope(&tab.kappa1, t) / tab.interp(&tab.kappa1, t)
            }
        }
    }

    /// Samples κ₁ > 0 and κ₂ ≥ 0 on `[0, t_max]`; returns the minimum of κ₁.
    pub fn check_on(&self, t_max: f64, samples: usize) -> Result<f64> {
        let samples = samples.max(2);
        let mut k1_min = f64::INFINITY;
        for i in 0..=samples {
            let t = t_max * i as f64 / samples as f64;
            let (k1, k2) = (self.kappa1(t), self.kappa2(t));
            if !(k1 > 0.0) || !k1.is_finite() {
                return Err(Error::Parameter(format!("κ₁({t}) = {k1} is not positive")));
            }
            if !(k2 >= 0.0) || !k2.is_finite() {
                return Err(Error::Parameter(format!("κ₂({t}) = {k2} is negative")));
            }
            k1_min = k1_min.min(k1);
        }
        Ok(k1_min)
    }

    /// Largest κ₁ over `[0, t_max]` by sampling.
    pub fn kappa1_max(&self, t_max: f64, samples: usize) -> f64 {
        (0..=samples.max(2))
            .map(|i| self.kappa1(t_max * i as f64 / samples.max(2) as f64))
            .fold(0.0, f64::max)
    }
}

/// First time the trajectory `x(t)` vanishes, if it does so in the integrated window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Horizon {
    Finite(f64),
    /// No zero of `x` before the end of the integration window.
    Infinite,
}

impl Horizon {
    pub fn finite(self) -> Option<f64> {
        match self {
            Horizon::Finite(t) => Some(t),
            Horizon::Infinite => None,
        }
    }
}

/// Trajectory of `x' = 2κ₁p, p' = -2κ₂x` from `(1, 0)`.
///
/// All coordinates share the same initial data, so one scalar trajectory
/// describes the flow in any dimension.
#[derive(Debug, Clone)]
pub struct HamiltonianFlow {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub horizon: Horizon,
    traj: ode::Trajectory<2>,
}

/// Below this |x| a sample counts as touching zero even without a sign change.
pub const ZERO_CROSSING_TOL: f64 = 1e-6;

impl HamiltonianFlow {
    pub fn t_end(&self) -> f64 {
        *self.t.last().expect("non-empty flow")
    }

    /// Dense evaluation `(x, p)` at `t`, clamped to the sampled window.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let v = self.traj.eval(t);
        (v[0], v[1])
    }

    /// Largest mismatch between the dense interpolant's derivative and the
    /// right-hand side, measured at interval midpoints and scaled by `1 + |rhs|`.
    pub fn max_ode_residual(&self, osc: &OscillatorSpec) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.t.len().saturating_sub(1) {
            let (t0, t1) = (self.t[i], self.t[i + 1]);
            let h = t1 - t0;
            if h <= 0.0 {
                continue;
            }
            let tm = 0.5 * (t0 + t1);
            let y0 = [self.x[i], self.p[i]];
            let y1 = [self.x[i + 1], self.p[i + 1]];
            let d0 = self.traj.dy[i];
            let d1 = self.traj.dy[i + 1];
            // Derivative of the cubic Hermite interpolant at s = 1/2.
            let mut dmid = [0.0; 2];
            let ym = ode::hermite_cubic(t0, t1, &y0, &y1, &d0, &d1, tm);
            for k in 0..2 {
                dmid[k] = 1.5 * (y1[k] - y0[k]) / h - 0.25 * (d0[k] + d1[k]);
            }
            let rhs = flow_rhs(osc, tm, &ym);
            for k in 0..2 {
                worst = worst.max((dmid[k] - rhs[k]).abs() / (1.0 + rhs[k].abs()));
            }
        }
        worst
    }

    /// CSV with columns `t,x,p`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,p\n");
        for i in 0..self.t.len() {
            out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", self.t[i], self.x[i], self.p[i]));
        }
        out
    }
}

fn flow_rhs(osc: &OscillatorSpec, t: f64, y: &[f64; 2]) -> [f64; 2] {
    [2.0 * osc.kappa1(t) * y[1], -2.0 * osc.kappa2(t) * y[0]]
}

/// Integrates the Hamiltonian trajectory on `[0, t_max]` and locates the first
/// zero of `x`. Integration stops at that zero.
///
/// `tol` is the relative tolerance; the absolute tolerance is `tol * 1e-3`.
pub fn hamiltonian_flow(osc: &OscillatorSpec, t_max: f64, tol: f64) -> Result<HamiltonianFlow> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!("flow window must be positive, got {t_max}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    osc.check_on(t_max, 1024)?;
    let tols = Tolerances {
        rtol: tol,
        atol: tol * 1e-3,
        max_step: t_max / 2048.0,
        ..Default::default()
    };
    let rhs = |t: f64, y: &[f64; 2]| flow_rhs(osc, t, y);
    let mut prev_x = 1.0_f64;
    let (mut traj, status) = ode::integrate(rhs, 0.0, [1.0, 0.0], t_max, &tols, |_, y| {
        let crossed = y[0] == 0.0 || y[0].signum() != prev_x.signum();
        prev_x = y[0];
        if crossed {
            Control::Stop
        } else {
            Control::Continue
        }
    });
    match status {
        Status::Completed | Status::Stopped => {}
        Status::Underflow | Status::NonFinite => {
            let last = traj.t_end();
            return Err(Error::horizon(
                t_max,
                last,
                "step size underflow integrating the Hamiltonian flow",
            ));
        }
    }

    let mut horizon = Horizon::Infinite;
    if status == Status::Stopped {
        // The last step brackets the sign change; refine by bisection with
        // re-integration from the previous accepted sample.
        let n = traj.len();
        let (t0, y0) = (traj.t[n - 2], traj.y[n - 2]);
        let mut lo = t0;
        let mut hi = traj.t[n - 1];
        let fine = Tolerances {
            rtol: tol * 1e-2,
            atol: tol * 1e-5,
            ..Default::default()
        };
        while hi - lo > 1e-14 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            let ym = ode::advance(&rhs, t0, y0, mid, &fine).ok_or_else(|| {
                Error::horizon(mid, t0, "step size underflow refining the zero crossing")
            })?;
            if ym[0].signum() == y0[0].signum() && ym[0] != 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        let yr = ode::advance(&rhs, t0, y0, root, &fine).unwrap_or([0.0, traj.y[n - 1][1]]);
        traj.t[n - 1] = root;
        traj.y[n - 1] = yr;
        traj.dy[n - 1] = rhs(root, &yr);
        horizon = Horizon::Finite(root);
    }

    // A tangential touch of zero (no sign change) also ends the valid window,
    // unless it is just the sample next to the refined crossing.
    let last = traj.len() - 1;
    if let Some(i) = (1..traj.len()).find(|&i| {
        traj.y[i][0].abs() < ZERO_CROSSING_TOL && !(horizon.finite().is_some() && i + 1 >= last)
    }) {
        if i < last {
            horizon = Horizon::Finite(traj.t[i]);
            traj.t.truncate(i + 1);
            traj.y.truncate(i + 1);
            traj.dy.truncate(i + 1);
        }
    }

    Ok(HamiltonianFlow {
        x: traj.y.iter().map(|v| v[0]).collect(),
        p: traj.y.iter().map(|v| v[1]).collect(),
        t: traj.t.clone(),
        horizon,
        traj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn preset_values() {
        let h = OscillatorSpec::harmonic();
        assert_eq!(h.kappa1(0.7), 0.5);
        assert_eq!(h.kappa2(0.7), 0.5);
        let f = OscillatorSpec::free();
        for t in [0.0, 1.3, 100.0] {
            assert_eq!(f.kappa1(t), 1.0);
            assert_eq!(f.kappa2(t), 0.0);
        }
        let ck = OscillatorSpec::caldirola_kanai(1.0, 2.0).unwrap();
        assert_eq!(ck.kappa1(0.0), 0.5);
        assert_eq!(ck.kappa2(0.0), 2.0);
    }

    #[test]
    fn missing_or_bad_parameters_are_rejected() {
        let err = make_oscillator(Preset::CaldirolaKanai, BTreeMap::from([("a".into(), 1.0)]));
        assert!(matches!(err, Err(Error::Parameter(_))));
        let err = OscillatorSpec::caldirola_kanai(-1.0, 2.0);
        assert!(matches!(err, Err(Error::Parameter(_))));
        let err = OscillatorSpec::power_law(1.0, 1.0, 0.0, 1.0);
        assert!(matches!(err, Err(Error::Parameter(_))));
    }

    #[test]
    fn harmonic_flow_is_cosine_with_quarter_period_horizon() {
        let osc = OscillatorSpec::harmonic();
        let flow = hamiltonian_flow(&osc, 3.0, 1e-9).unwrap();
        let td = flow.horizon.finite().unwrap();
        assert!((td - FRAC_PI_2).abs() < 1e-8, "T_D = {td}");
        for i in 0..flow.t.len() {
            let t = flow.t[i];
            assert!((flow.x[i] - t.cos()).abs() < 1e-8);
            assert!((flow.x[i].powi(2) + flow.p[i].powi(2) - 1.0).abs() < 1e-8);
        }
        assert!(flow.max_ode_residual(&osc) < 1e-8);
    }

    #[test]
    fn truncated_window_reports_no_crossing() {
        let flow = hamiltonian_flow(&OscillatorSpec::harmonic(), 1.5, 1e-9).unwrap();
        assert_eq!(flow.horizon, Horizon::Infinite);
        assert!((flow.t_end() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn free_flow_is_constant() {
        let flow = hamiltonian_flow(&OscillatorSpec::free(), 10.0, 1e-9).unwrap();
        assert_eq!(flow.horizon, Horizon::Infinite);
        assert!(flow.x.iter().all(|&x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn tabulated_matches_harmonic() {
        let t: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let table = CoefficientTable {
            kappa1: vec![0.5; t.len()],
            kappa2: vec![0.5; t.len()],
            t,
        };
        let osc = OscillatorSpec::tabulated(table).unwrap();
        let flow = hamiltonian_flow(&osc, 1.9, 1e-9).unwrap();
        let td = flow.horizon.finite().unwrap();
        assert!((td - FRAC_PI_2).abs() < 1e-8);
    }

    #[test]
    fn serde_names() {
        let osc: OscillatorSpec =
            serde_json::from_str(r#"{"preset":"ck","params":{"a":1.0,"sigma":2.0}}"#).unwrap();
        assert_eq!(osc.preset, Preset::CaldirolaKanai);
        let json = serde_json::to_string(&OscillatorSpec::harmonic()).unwrap();
        assert!(json.contains("\"harmonic\""));
    }
}
