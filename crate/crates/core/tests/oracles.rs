//! Cross-checks against oracles that share no code with the library solvers.

use wavepax::grid::GridSpec;
use wavepax::observability::counterexample_mass;
use wavepax::oscillator::{hamiltonian_flow, OscillatorSpec};
use wavepax::propagate::{fio_apply, packet_value};
use wavepax::reference::split_step_solve_every;
use wavepax::riccati::solve_riccati;

/// `J_μ(z)` and `J_μ'(z)` from the power series.
fn bessel_j(mu: f64, z: f64) -> (f64, f64) {
    let half = 0.5 * z;
    let (mut j, mut dj) = (0.0, 0.0);
    for k in 0..60 {
        let kf = k as f64;
        let denom = libm::tgamma(kf + 1.0) * libm::tgamma(kf + mu + 1.0);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let p = 2.0 * kf + mu;
        j += sign * half.powf(p) / denom;
        dj += sign * 0.5 * p * half.powf(p - 1.0) / denom;
    }
    (j, dj)
}

// κ₁ = s^{-a}/2, κ₂ = σ²s^b/2 with s = t + d. For a = b = 1/2 the position
// solves x'' + x'/(2s) + σ²x = 0, i.e. x = s^{1/4}(C₁J_{1/4}(σs) + C₂J_{-1/4}(σs)).
#[test]
fn power_law_matches_bessel_form() {
    let (a, b, d, sigma) = (0.5, 0.5, 1.0, 1.0);
    let alpha = 0.25;
    let nu = 0.25;
    let basis = |s: f64| {
        let mut out = [(0.0, 0.0); 2];
        for (slot, mu) in out.iter_mut().zip([nu, -nu]) {
            let (j, dj) = bessel_j(mu, sigma * s);
            *slot = (s.powf(alpha) * j, alpha * s.powf(alpha - 1.0) * j + s.powf(alpha) * sigma * dj);
        }
        out
    };
    // x(0) = 1, x'(0) = 0.
    let [(u0, du0), (v0, dv0)] = basis(d);
    let det = u0 * dv0 - v0 * du0;
    let (c1, c2) = (dv0 / det, -du0 / det);
    let osc = OscillatorSpec::power_law(a, b, d, sigma).unwrap();
    let ric = solve_riccati(&osc, 1.5, 1e-12).unwrap();
    let mut worst: f64 = 0.0;
    for i in (0..ric.len()).step_by(97) {
        let t = ric.t[i];
        let s = t + d;
        let [(u, du), (v, dv)] = basis(s);
        let x = c1 * u + c2 * v;
        let dx = c1 * du + c2 * dv;
        let kappa1 = 0.5 * s.powf(-a);
        let y1 = dx / (4.0 * kappa1 * x);
        worst = worst.max((ric.y1[i] - y1).abs() / y1.abs().max(1.0));
    }
    assert!(worst < 1e-8, "y1 deviates from the Bessel form by {worst:e}");
}

#[test]
fn power_law_horizon_is_first_bessel_zero() {
    let osc = OscillatorSpec::power_law(0.5, 0.5, 1.0, 1.0).unwrap();
    let flow = hamiltonian_flow(&osc, 10.0, 1e-12).unwrap();
    let td = flow.horizon.finite().expect("flow reaches a zero");
    let (nu, alpha) = (0.25, 0.25);
    let x = |s: f64| {
        let (jp, djp) = bessel_j(nu, s);
        let (jm, djm) = bessel_j(-nu, s);
        let u = (s.powf(alpha) * jp, alpha * s.powf(alpha - 1.0) * jp + s.powf(alpha) * djp);
        let v = (s.powf(alpha) * jm, alpha * s.powf(alpha - 1.0) * jm + s.powf(alpha) * djm);
        (u, v)
    };
    let ((u0, du0), (v0, dv0)) = x(1.0);
    let det = u0 * dv0 - v0 * du0;
    let pos = |t: f64| {
        let ((u, _), (v, _)) = x(1.0 + t);
        (dv0 * u - du0 * v) / det
    };
    // Bisection on the oracle's first sign change.
    let (mut lo, mut hi) = (0.0, 0.0);
    let mut t = 0.0;
    while pos(t) > 0.0 {
        lo = t;
        t += 0.01;
        hi = t;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if pos(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((td - lo).abs() < 1e-8, "T_D = {td}, oracle {lo}");
}

#[test]
fn fio_agrees_with_split_step() {
    let osc = OscillatorSpec::harmonic();
    let ric = solve_riccati(&osc, 1.0, 1e-12).unwrap();
    let grid = GridSpec::new(1, 16.0, 1 << 11).unwrap();
    let u0 = grid.sample_real(|x| (-(x[0] - 1.0).powi(2)).exp() * (1.0 + 0.3 * x[0]));
    let fio = fio_apply(&u0, &grid, &ric, 1.0).unwrap();
    let sol = split_step_solve_every(&osc, &u0, &grid, 1.0, 2048, 2048).unwrap();
    let err = grid.l2_distance(&fio, sol.final_field()) / grid.l2_norm(&u0);
    assert!(err < 1e-5, "relative L² distance {err:e}");
}

#[test]
fn split_step_transports_packets_exactly() {
    let osc = OscillatorSpec::caldirola_kanai(0.5, 0.25).unwrap();
    let ric = solve_riccati(&osc, 1.0, 1e-12).unwrap();
    let grid = GridSpec::new(1, 20.0, 1 << 12).unwrap();
    let u0 = grid.sample(|x| packet_value(&ric.eval(0.0).unwrap(), &[1.5], x));
    let sol = split_step_solve_every(&osc, &u0, &grid, 1.0, 2048, 2048).unwrap();
    let exact = grid.sample(|x| packet_value(&ric.eval(1.0).unwrap(), &[1.5], x));
    let err = grid.l2_distance(sol.final_field(), &exact);
    assert!(err < 1e-5, "L² error {err:e}");
}

#[test]
fn counterexample_mass_in_two_dimensions_factorises() {
    let ric = solve_riccati(&OscillatorSpec::free(), 1.0, 1e-10).unwrap();
    let one = counterexample_mass(2.0, &ric, 0.5, 1.0, 1).unwrap();
    let two = counterexample_mass(2.0, &ric, 0.5, 1.0, 2).unwrap();
    // Both the packet and the quadrant factorise over coordinates.
    assert!((two - one * one).abs() < 1e-12 * one * one, "{two} vs {}", one * one);
}
