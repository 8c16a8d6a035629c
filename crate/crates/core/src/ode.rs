//! Dormand–Prince 5(4) integrator with step recording.
//!
//! Every accepted step is stored together with the right-hand side at that
//! point, so the recorded trajectory can be evaluated anywhere by cubic
//! Hermite interpolation.

/// Step-size controls for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on an accepted step.
    pub max_step: f64,
    /// Steps smaller than this (relative to `max(1, |t|)`) count as underflow.
    pub min_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-9,
            atol: 1e-12,
            max_step: f64::INFINITY,
            min_step: 1e-14,
        }
    }
}

/// What the step observer wants the integrator to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Reached the requested end time.
    Completed,
    /// The observer asked to stop.
    Stopped,
    /// The step size collapsed; the trajectory ends at the last accepted time.
    Underflow,
    /// The state became non-finite.
    NonFinite,
}

/// Recorded samples of an ODE solution.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dy: Vec<[f64; N]>,
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        *self.t.last().expect("trajectory has at least its initial point")
    }

    /// Cubic Hermite interpolation; `t` is clamped to the recorded span.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let n = self.t.len();
        if n == 1 || t <= self.t[0] {
            return self.y[0];
        }
        if t >= self.t[n - 1] {
            return self.y[n - 1];
        }
        let i = match self.t.partition_point(|&s| s <= t) {
            0 => 0,
            k => k - 1,
        };
        let i = i.min(n - 2);
        hermite_cubic(
            self.t[i],
            self.t[i + 1],
            &self.y[i],
            &self.y[i + 1],
            &self.dy[i],
            &self.dy[i + 1],
            t,
        )
    }
}

pub(crate) fn hermite_cubic<const N: usize>(
    t0: f64,
    t1: f64,
    y0: &[f64; N],
    y1: &[f64; N],
    d0: &[f64; N],
    d1: &[f64; N],
    t: f64,
) -> [f64; N] {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let mut out = [0.0; N];
    for k in 0..N {
        out[k] = h00 * y0[k] + h10 * h * d0[k] + h01 * y1[k] + h11 * h * d1[k];
    }
    out
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One Dormand–Prince step. Returns the fifth-order solution, the right-hand
/// side there (FSAL), and the embedded error vector.
pub fn dopri_step<const N: usize, F>(
    f: &F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let comb = |coef: &[(f64, &[f64; N])]| {
        let mut out = *y;
        for (c, k) in coef {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
        out
    };
    let k2 = f(t + C2 * h, &comb(&[(A21, k1)]));
    let k3 = f(t + C3 * h, &comb(&[(A31, k1), (A32, &k2)]));
    let k4 = f(t + C4 * h, &comb(&[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(
        t + C5 * h,
        &comb(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    );
    let k6 = f(
        t + h,
        &comb(&[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
    );
    let y_new = comb(&[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = f(t + h, &y_new);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h
            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    (y_new, k7, err)
}

fn error_norm<const N: usize>(
    err: &[f64; N],
    y0: &[f64; N],
    y1: &[f64; N],
    tol: &Tolerances,
) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, recording every accepted step.
///
/// `observe` is called after each accepted step with the new sample and may stop
/// the integration early; the stopping step is kept in the trajectory.
pub fn integrate<const N: usize, F, O>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    tol: &Tolerances,
    mut observe: O,
) -> (Trajectory<N>, Status)
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]) -> Control,
{
    let mut traj = Trajectory {
        t: vec![t0],
        y: vec![y0],
        dy: vec![f(t0, &y0)],
    };
    let span = t_end - t0;
    if span <= 0.0 {
        return (traj, Status::Completed);
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = traj.dy[0];
    let mut h = (span * 1e-3).min(tol.max_step);
    loop {
        let remaining = t_end - t;
        if remaining <= 1e-15 * t_end.abs().max(1.0) {
            return (traj, Status::Completed);
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let (y_new, k_new, err) = dopri_step(&f, t, &y, &k1, step);
        if !y_new.iter().all(|v| v.is_finite()) {
            h = step * 0.25;
            if h < tol.min_step * t.abs().max(1.0) {
                return (traj, Status::NonFinite);
            }
            continue;
        }
        let en = error_norm(&err, &y, &y_new, tol);
        if en <= 1.0 {
            t = if last { t_end } else { t + step };
            y = y_new;
            k1 = k_new;
            traj.t.push(t);
            traj.y.push(y);
            traj.dy.push(k1);
            let factor = if en == 0.0 {
                5.0
            } else {
                (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (step * factor).min(tol.max_step);
            if observe(t, &y) == Control::Stop {
                return (traj, Status::Stopped);
            }
        } else {
            h = step * (0.9 * en.powf(-0.2)).clamp(0.1, 1.0);
            if h < tol.min_step * t.abs().max(1.0) {
                return (traj, Status::Underflow);
            }
        }
    }
}

/// Advances from `(t, y)` to `t_target` with adaptive sub-steps, without recording.
pub fn advance<const N: usize, F>(
    f: &F,
    t: f64,
    y: [f64; N],
    t_target: f64,
    tol: &Tolerances,
) -> Option<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let (traj, status) = integrate(f, t, y, t_target, tol, |_, _| Control::Continue);
    match status {
        Status::Completed => traj.y.last().copied(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_one_period() {
        let tol = Tolerances::default();
        let (traj, status) = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            2.0 * std::f64::consts::PI,
            &tol,
            |_, _| Control::Continue,
        );
        assert_eq!(status, Status::Completed);
        let end = traj.y.last().unwrap();
        assert!((end[0] - 1.0).abs() < 1e-8);
        assert!(end[1].abs() < 1e-8);
        let mid = traj.eval(1.0);
        assert!((mid[0] - 1f64.cos()).abs() < 1e-7);
    }

    #[test]
    fn exponential_growth_high_accuracy() {
        let tol = Tolerances {
            rtol: 1e-11,
            atol: 1e-14,
            ..Default::default()
        };
        let y = advance(&|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 3.0, &tol).unwrap();
        assert!((y[0] / 3f64.exp() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn observer_stops_early() {
        let tol = Tolerances {
            max_step: 0.01,
            ..Default::default()
        };
        let (traj, status) = integrate(
            |_, _: &[f64; 1]| [1.0],
            0.0,
            [0.0],
            10.0,
            &tol,
            |t, _| if t > 1.0 { Control::Stop } else { Control::Continue },
        );
        assert_eq!(status, Status::Stopped);
        assert!(traj.t_end() > 1.0 && traj.t_end() < 1.02);
    }

    #[test]
    fn blow_up_underflows() {
        // y' = y^2 from y(0) = 1 blows up at t = 1.
        let (traj, status) = integrate(
            |_, y: &[f64; 1]| [y[0] * y[0]],
            0.0,
            [1.0],
            2.0,
            &Tolerances::default(),
            |_, _| Control::Continue,
        );
        assert!(matches!(status, Status::Underflow | Status::NonFinite));
        assert!(traj.t_end() < 1.0 && traj.t_end() > 0.99);
    }
}
