//! Checks against independent reference computations: a dense angular scan
//! for the pole, a scalar bisection for the modulus, and the L1 integrator
//! for the time-domain solution.

use std::f64::consts::{FRAC_PI_2, PI};

use fracdamp::analytic::{residue_coefficients, Solution};
use fracdamp::oracle::{integrate, StepperConfig};
use fracdamp::polefinder::{find_pole, r_from_theta};
use fracdamp::{DecayQuadratureConfig, OscillatorParams};

// Pole for lambda = omega = 1, nu = 1/2 from a 40-digit continuation in nu.
const R_HALF: f64 = 1.401_268_367_939_855;
const THETA_HALF: f64 = 1.818_686_904_626_393;
const BETA_HALF: f64 = -0.343_814_597_201_477;
const SIGMA_HALF: f64 = 1.358_434_599_728_676_9;
// Residue coefficients for x0 = 1, x1 = 0 at that pole.
const A_HALF: f64 = 0.536_782_321_285_040_8;
const B_HALF: f64 = 0.243_346_482_393_668_9;

/// Plain (non-log) angular equation minus its right-hand side.
fn angular_gap(theta: f64, nu: f64, lambda: f64, omega: f64) -> f64 {
    let lhs = ((nu * theta).sin().powf(nu) / (2.0 * theta).sin().powi(2)).powf(1.0 / (2.0 - nu))
        * ((2.0 - nu) * theta).sin();
    lhs - (omega / lambda.powf(1.0 / (2.0 - nu))).powi(2)
}

/// Scans 10^6 angles for the sign change, then bisects it to 1e-14.
fn dense_scan_pole(nu: f64, lambda: f64, omega: f64) -> (f64, f64) {
    let lo = FRAC_PI_2;
    let hi = PI / (2.0 - nu);
    let n = 1_000_000;
    let theta_at = |k: usize| lo + (hi - lo) * k as f64 / n as f64;
    let mut changes = Vec::new();
    let mut prev = angular_gap(theta_at(1), nu, lambda, omega);
    for k in 2..n {
        let g = angular_gap(theta_at(k), nu, lambda, omega);
        if (g > 0.0) != (prev > 0.0) {
            changes.push(k);
        }
        prev = g;
    }
    assert_eq!(changes.len(), 1, "expected one sign change");
    let (mut a, mut b) = (theta_at(changes[0] - 1), theta_at(changes[0]));
    while b - a > 1e-14 {
        let m = 0.5 * (a + b);
        if angular_gap(m, nu, lambda, omega) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let theta = 0.5 * (a + b);
    let r = (-lambda * (nu * theta).sin() / (2.0 * theta).sin()).powf(1.0 / (2.0 - nu));
    (r, theta)
}

#[test]
fn pole_matches_dense_scan() {
    let (r, theta) = dense_scan_pole(0.5, 1.0, 1.0);
    assert!((r - R_HALF).abs() < 1e-12, "{r}");
    assert!((theta - THETA_HALF).abs() < 1e-12, "{theta}");

    let p = OscillatorParams::new(1.0, 1.0, 0.5, 1.0, 0.0).unwrap();
    let pole = find_pole(&p).unwrap();
    assert!((pole.r - R_HALF).abs() < 1e-14);
    assert!((pole.theta - THETA_HALF).abs() < 1e-14);
    assert!((pole.beta - BETA_HALF).abs() < 1e-14);
    assert!((pole.sigma - SIGMA_HALF).abs() < 1e-14);

    for (nu, l, w) in [(0.2, 3.0, 0.25), (0.8, 0.25, 2.0), (0.95, 2.0, 1.0)] {
        let (r, theta) = dense_scan_pole(nu, l, w);
        let pole = find_pole(&OscillatorParams::new(l, w, nu, 1.0, 0.0).unwrap()).unwrap();
        assert!((pole.r - r).abs() < 1e-10 * r, "{nu} {l} {w}");
        assert!((pole.theta - theta).abs() < 1e-10, "{nu} {l} {w}");
    }
}

#[test]
fn modulus_matches_scalar_bisection() {
    // imaginary part r^2 sin(2 theta) + lambda r^nu sin(nu theta) = 0, solved for r
    let (nu, lambda, theta) = (0.5, 1.0, 0.6 * PI);
    let im = |r: f64| r * r * (2.0 * theta).sin() + lambda * r.powf(nu) * (nu * theta).sin();
    let (mut a, mut b) = (1e-6, 100.0);
    assert!(im(a) > 0.0 && im(b) < 0.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if im(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let r = r_from_theta(theta, nu, lambda).unwrap();
    assert!((r - 0.5 * (a + b)).abs() < 1e-13, "{r}");
}

#[test]
fn residues_at_reference_pole() {
    let p = OscillatorParams::new(1.0, 1.0, 0.5, 1.0, 0.0).unwrap();
    let pole = find_pole(&p).unwrap();
    let (a, b) = residue_coefficients(&p, &pole).unwrap();
    assert!((a - A_HALF).abs() < 1e-13, "{a}");
    assert!((b - B_HALF).abs() < 1e-13, "{b}");
}

#[test]
fn analytic_matches_oracle_at_sample_times() {
    let p = OscillatorParams::new(1.0, 1.0, 0.5, 1.0, 0.0).unwrap();
    let sol = Solution::new(p, DecayQuadratureConfig::default()).unwrap();
    let traj = integrate(&p, &StepperConfig::new(1e-3, 10.0).unwrap()).unwrap();
    for t in [1.0, 5.0, 10.0] {
        let oracle = traj.samples()[(t / 1e-3f64).round() as usize].x;
        let analytic = sol.evaluate(t).unwrap();
        assert!((analytic - oracle).abs() <= 5e-3, "t={t}: {analytic} vs {oracle}");
    }
}

#[test]
fn offset_at_small_order_is_physical() {
    // Near nu = 0 the solution oscillates about lambda x0 / (lambda + omega^2);
    // the oracle, which knows nothing of poles or cuts, agrees.
    let p = OscillatorParams::new(1.0, 1.0, 0.02, 1.0, 0.0).unwrap();
    let sol = Solution::new(p, DecayQuadratureConfig::default()).unwrap();
    let traj = integrate(&p, &StepperConfig::new(1e-3, 8.0).unwrap()).unwrap();
    let mut worst: f64 = 0.0;
    for s in traj.samples().iter().step_by(100) {
        worst = worst.max((sol.evaluate(s.t).unwrap() - s.x).abs());
    }
    assert!(worst < 5e-3, "{worst}");
    let mean: f64 = traj.samples().iter().map(|s| s.x).sum::<f64>() / traj.len() as f64;
    assert!((mean - 0.5).abs() < 0.1, "{mean}");
}

#[test]
fn solution_parts_recombine() {
    let p = OscillatorParams::new(2.0, 1.0, 0.3, 0.5, 1.0).unwrap();
    let sol = Solution::new(p, DecayQuadratureConfig::default()).unwrap();
    let times: Vec<f64> = (0..20).map(|k| 0.5 * k as f64).collect();
    let parts = sol.parts(&times).unwrap();
    assert!(parts.a_coef.is_finite() && parts.b_coef.is_finite());
    for (t, osc, decay, total) in parts.rows() {
        assert!((osc - decay - total).abs() < 1e-15);
        assert!((total - sol.evaluate(t).unwrap()).abs() < 1e-14);
    }
    let over = Solution::new(p.with_nu(1.0).unwrap().with_initial(1.0, 0.0).unwrap(), DecayQuadratureConfig::default()).unwrap();
    assert!(over.parts(&times).is_err());
}
