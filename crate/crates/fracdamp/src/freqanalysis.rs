//! How the oscillation frequency `sigma = Im(s)` depends on the damping order.
//!
//! At `nu = 0` the oscillator is undamped with `sigma = sqrt(lambda + omega^2)`;
//! at `nu = 1` it reduces to the classical damped oscillator. In between,
//! the initial slope `d sigma / d nu` at `nu = 0` has the sign of
//! `ln(lambda + omega^2)`, so for `lambda + omega^2 > 1` the frequency first
//! rises above the undamped value before falling to its classical limit.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::analytic::{classical_poles, undamped_frequency, DEGENERATE_DENOMINATOR};
use crate::error::{Error, Result};
use crate::model::{NineCase, OscillatorParams, Pole};
use crate::polefinder::{find_pole, find_pole_near};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub nu: f64,
    pub sigma: f64,
    pub beta: f64,
    pub r: f64,
    pub theta: f64,
}

impl SweepRow {
    fn from_pole(nu: f64, pole: &Pole) -> Self {
        Self {
            nu,
            sigma: pole.sigma,
            beta: pole.beta,
            r: pole.r,
            theta: pole.theta,
        }
    }
}

/// `ds/dnu = -lambda s^nu ln(s) s / (2 s^2 + lambda nu s^nu)` along the root
/// curve at fixed `(lambda, omega)`. Its imaginary part is `d sigma / d nu`.
pub fn ds_dnu(pole: &Pole, params: &OscillatorParams) -> Result<Complex64> {
    let (lambda, nu) = (params.lambda(), params.nu());
    let s = pole.as_complex();
    let s_nu = s.powf(nu);
    let denominator = 2.0 * s * s + lambda * nu * s_nu;
    if denominator.norm() < DEGENERATE_DENOMINATOR {
        return Err(Error::DegenerateDenominator {
            magnitude: denominator.norm(),
        });
    }
    Ok(-lambda * s_nu * s.ln() * s / denominator)
}

/// `d sigma / d nu` at `nu = 0`: `lambda ln(lambda + omega^2) / (4 sqrt(lambda + omega^2))`.
pub fn initial_slope(lambda: f64, omega: f64) -> f64 {
    let q = lambda + omega * omega;
    lambda * q.ln() / (4.0 * q.sqrt())
}

pub fn classify(lambda: f64, omega: f64) -> NineCase {
    NineCase::of(lambda, omega)
}

fn probe(lambda: f64, omega: f64, nu: f64) -> Result<OscillatorParams> {
    OscillatorParams::new(lambda, omega, nu, 1.0, 0.0)
}

/// Pole data at any `nu` in `[0, 1]`; the two ends come from the closed
/// forms instead of the root finder.
pub fn row_at(lambda: f64, omega: f64, nu: f64) -> Result<SweepRow> {
    let params = probe(lambda, omega, nu)?;
    if nu == 0.0 {
        let sigma = undamped_frequency(lambda, omega);
        return Ok(SweepRow {
            nu,
            sigma,
            beta: 0.0,
            r: sigma,
            theta: FRAC_PI_2,
        });
    }
    if nu == 1.0 {
        let (beta, sigma) = classical_poles(lambda, omega).dominant();
        return Ok(SweepRow {
            nu,
            sigma,
            beta,
            r: beta.hypot(sigma),
            theta: sigma.atan2(beta),
        });
    }
    Ok(SweepRow::from_pole(nu, &find_pole(&params)?))
}

pub fn sigma_at(lambda: f64, omega: f64, nu: f64) -> Result<f64> {
    row_at(lambda, omega, nu).map(|r| r.sigma)
}

/// One row per interior grid point, with the `nu = 0` and `nu = 1` rows
/// added from the closed forms. The grid must be strictly increasing and
/// strictly inside `(0, 1)`.
pub fn sigma_sweep(lambda: f64, omega: f64, nu_grid: &[f64]) -> Result<Vec<SweepRow>> {
    if let Some(&bad) = nu_grid.iter().find(|&&nu| !(nu > 0.0 && nu < 1.0)) {
        return Err(Error::Domain {
            what: "sigma_sweep grid",
            value: bad,
            domain: "0 < nu < 1".into(),
        });
    }
    if let Some(w) = nu_grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Domain {
            what: "sigma_sweep grid",
            value: w[1],
            domain: "strictly increasing".into(),
        });
    }
    let mut rows = Vec::with_capacity(nu_grid.len() + 2);
    rows.push(row_at(lambda, omega, 0.0)?);
    let mut previous: Option<Pole> = None;
    for &nu in nu_grid {
        let params = probe(lambda, omega, nu)?;
        let pole = match &previous {
            Some(prev) => find_pole_near(&params, prev)?,
            None => find_pole(&params)?,
        };
        rows.push(SweepRow::from_pole(nu, &pole));
        previous = Some(pole);
    }
    rows.push(row_at(lambda, omega, 1.0)?);
    Ok(rows)
}

/// `steps` evenly spaced orders from `nu_min` to `nu_max` inclusive.
pub fn uniform_grid(nu_min: f64, nu_max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![nu_min],
        _ => (0..steps)
            .map(|k| nu_min + (nu_max - nu_min) * k as f64 / (steps - 1) as f64)
            .collect(),
    }
}

pub const SWEEP_CSV_HEADER: &str = "nu,sigma,beta,r,theta";

/// Sweep rows as CSV. `comment`, if non-empty, becomes a leading `#` line.
pub fn sweep_csv(rows: &[SweepRow], comment: &str) -> String {
    let mut out = String::new();
    if !comment.is_empty() {
        out.push_str("# ");
        out.push_str(comment);
        out.push('\n');
    }
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.nu, r.sigma, r.beta, r.r, r.theta));
    }
    out
}

/// Representative `(lambda, omega)` pairs, three per initial-slope regime,
/// each triple covering under-, critically- and over-damped terminals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub lambda: f64,
    pub omega: f64,
}

pub fn presets() -> [Preset; 9] {
    let sqrt2 = std::f64::consts::SQRT_2;
    [
        Preset { name: "increasing-under", lambda: 1.0, omega: 1.0 },
        Preset { name: "increasing-critical", lambda: 2.0, omega: 1.0 },
        Preset { name: "increasing-over", lambda: 3.0, omega: 1.0 },
        Preset { name: "flat-critical", lambda: 2.0 * (sqrt2 - 1.0), omega: sqrt2 - 1.0 },
        Preset { name: "flat-under", lambda: 0.5, omega: 1.0 / sqrt2 },
        Preset { name: "flat-over", lambda: 15.0 / 16.0, omega: 0.25 },
        Preset { name: "decreasing-over", lambda: 0.5, omega: 0.125 },
        Preset { name: "decreasing-critical", lambda: 0.5, omega: 0.25 },
        Preset { name: "decreasing-under", lambda: 0.5, omega: 0.5 },
    ]
}

pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{InitialSlope, TerminalDamping};

    fn pole_params(lambda: f64, omega: f64, nu: f64) -> (Pole, OscillatorParams) {
        let p = probe(lambda, omega, nu).unwrap();
        (find_pole(&p).unwrap(), p)
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for (l, w) in [(1.0, 1.0), (2.0, 1.0)] {
            let (pole, p) = pole_params(l, w, 0.5);
            let analytic = ds_dnu(&pole, &p).unwrap().im;
            let h = 1e-4;
            let fd = (sigma_at(l, w, 0.5 + h).unwrap() - sigma_at(l, w, 0.5 - h).unwrap()) / (2.0 * h);
            assert!((analytic - fd).abs() <= 1e-5 * analytic.abs(), "{l}: {analytic} vs {fd}");
        }
    }

    #[test]
    fn derivative_vanishes_without_damping() {
        let (pole, p) = pole_params(1e-10, 1.0, 0.5);
        assert!(ds_dnu(&pole, &p).unwrap().norm() < 1e-9);
    }

    #[test]
    fn initial_slope_values() {
        assert_eq!(initial_slope(0.5, 0.5f64.sqrt()).abs() < 1e-16, true);
        let expect = 2f64.ln() / (4.0 * 2f64.sqrt());
        assert!((initial_slope(1.0, 1.0) - expect).abs() < 1e-16);
        assert!((initial_slope(1.0, 1.0) - 0.12254).abs() < 1e-5);
        assert!(initial_slope(0.5, 0.125) < 0.0);
    }

    #[test]
    fn initial_slope_is_derivative_limit() {
        // Im(ds/dnu) at a tiny order approaches the closed form
        for (l, w) in [(1.0, 1.0), (3.0, 1.0), (0.5, 0.125)] {
            let (pole, p) = pole_params(l, w, 1e-9);
            let d = ds_dnu(&pole, &p).unwrap().im;
            assert!((d - initial_slope(l, w)).abs() < 1e-7, "{l} {w}: {d}");
        }
    }

    #[test]
    fn caption_classes() {
        use InitialSlope::*;
        use TerminalDamping::*;
        let expect = [
            (Increasing, UnderDamped),
            (Increasing, CriticallyDamped),
            (Increasing, OverDamped),
            (Flat, CriticallyDamped),
            (Flat, UnderDamped),
            (Flat, OverDamped),
            (Decreasing, OverDamped),
            (Decreasing, CriticallyDamped),
            (Decreasing, UnderDamped),
        ];
        for (p, (slope, terminal)) in presets().iter().zip(expect) {
            let c = classify(p.lambda, p.omega);
            assert_eq!((c.initial_slope, c.terminal), (slope, terminal), "{}", p.name);
        }
    }

    #[test]
    fn sweep_shapes() {
        let grid = uniform_grid(0.005, 0.995, 199);
        let rows = sigma_sweep(1.0, 1.0, &grid).unwrap();
        assert_eq!(rows.len(), 201);
        assert_eq!(rows[0].sigma, 2f64.sqrt());
        let (imax, _) = rows
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.sigma.total_cmp(&b.1.sigma))
            .unwrap();
        assert!(imax > 0 && imax < rows.len() - 1);
        assert!(rows[imax].sigma > 2f64.sqrt());

        let rows = sigma_sweep(0.5, 0.125, &grid).unwrap();
        assert!(rows.windows(2).all(|w| w[1].sigma < w[0].sigma));

        let rows = sigma_sweep(3.0, 1.0, &uniform_grid(0.9, 0.999999, 50)).unwrap();
        assert!(rows[rows.len() - 2].sigma < 0.05);
        assert_eq!(rows[rows.len() - 1].sigma, 0.0);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        assert!(sigma_sweep(1.0, 1.0, &[0.0, 0.5]).is_err());
        assert!(sigma_sweep(1.0, 1.0, &[0.5, 1.0]).is_err());
        assert!(sigma_sweep(1.0, 1.0, &[0.5, 0.4]).is_err());
    }

    #[test]
    fn frequency_ordering_at_ends() {
        for p in presets() {
            let top = undamped_frequency(p.lambda, p.omega);
            let classical = row_at(p.lambda, p.omega, 1.0).unwrap().sigma;
            assert!(0.0 <= classical && classical < top, "{}", p.name);
        }
    }

    #[test]
    fn csv_layout() {
        let rows = sigma_sweep(1.0, 1.0, &[0.5]).unwrap();
        let text = sweep_csv(&rows, "test");
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "# test");
        assert_eq!(lines[1], SWEEP_CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("0,1.4142135623730951,0,"));
    }
}
