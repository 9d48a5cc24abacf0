//! Closed-form solution of the fractionally damped oscillator.
//!
//! For `0 < nu < 1` the Laplace transform
//!
//! ```text
//! X(s) = (s x0 + x1 + lambda s^(nu-1) x0) / (s^2 + lambda s^nu + omega^2)
//! ```
//!
//! has one conjugate pole pair `beta +/- i sigma` and a branch cut along the
//! negative real axis. Inverting it gives
//!
//! ```text
//! x(t) = e^(beta t) (A cos sigma t + B sin sigma t) - decay(t)
//! ```
//!
//! where the first term is the residue sum and `decay(t)` is the integral
//! along both sides of the cut,
//!
//! ```text
//! decay(t) = (lambda/pi) * int_0^inf N(R) e^(-R t) R^nu / D(R) dR
//! N(R) = (R x0 - x1) sin(nu pi) + (x0/R)(R^2 + omega^2) sin(pi (nu - 1))
//! D(R) = (R^2 + omega^2)^2 + 2 lambda R^nu (R^2 + omega^2) cos(nu pi) + (lambda R^nu)^2
//! ```
//!
//! At `nu = 1` the classical damped oscillator is solved directly; at `nu = 0`
//! an undamped oscillation of frequency `sqrt(lambda + omega^2)` is returned.
//!
//! Note on `nu = 0`: the Caputo transform at `nu -> 0` still carries the term
//! `lambda x0 / s`, i.e. a pole at `s = 0` and a constant offset
//! `lambda x0 / (lambda + omega^2)`. As `nu -> 0+` that offset is carried by
//! `decay(t)`, which tends to `-lambda x0 / (lambda + omega^2)` rather than to
//! zero. The `nu = 0` branch reports the pure oscillation without the offset.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{OscillatorParams, Pole, SolutionParts, CLASSIFY_TOL};
use crate::polefinder::find_pole;
use crate::quadrature::{self, QuadResult};

/// Below this magnitude the residue denominator counts as vanished.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayQuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for DecayQuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl DecayQuadratureConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        for (name, v) in [("rel_tol", rel_tol), ("abs_tol", abs_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain {
                    what: name,
                    value: v,
                    domain: "finite and > 0".into(),
                });
            }
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Result<Self> {
        Self::new(rel_tol, self.abs_tol, self.max_subdivisions)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalCase {
    Over,
    Critical,
    Under,
}

/// Roots of `s^2 + lambda s + omega^2 = 0` in the form each case needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassicalSolution {
    /// Two distinct negative real roots, `s1 > s2`.
    Over { s1: f64, s2: f64, lambda: f64 },
    /// Double root `-omega`.
    Critical { root: f64 },
    /// `-alpha +/- i rho` with `alpha = lambda/2`, `rho = sqrt(omega^2 - lambda^2/4)`.
    Under { alpha: f64, rho: f64, lambda: f64 },
}

impl ClassicalSolution {
    pub fn case(&self) -> ClassicalCase {
        match self {
            ClassicalSolution::Over { .. } => ClassicalCase::Over,
            ClassicalSolution::Critical { .. } => ClassicalCase::Critical,
            ClassicalSolution::Under { .. } => ClassicalCase::Under,
        }
    }

    pub fn evaluate(&self, t: f64, x0: f64, x1: f64) -> f64 {
        match *self {
            ClassicalSolution::Over { s1, s2, lambda } => {
                let term = |s: f64| (s * t).exp() / (2.0 * s + lambda) * (s * x0 + x1 + lambda * x0);
                term(s1) + term(s2)
            }
            ClassicalSolution::Critical { root } => {
                let omega = -root;
                (root * t).exp() * (t * (omega * x0 + x1) + x0)
            }
            ClassicalSolution::Under { alpha, rho, lambda } => {
                let (s, c) = (rho * t).sin_cos();
                (-alpha * t).exp() * (x0 * c + (2.0 * x1 + lambda * x0) / (2.0 * rho) * s)
            }
        }
    }

    /// Rightmost root as `(beta, sigma)`: the slowest decay rate and the
    /// oscillation frequency (zero unless under-damped).
    pub fn dominant(&self) -> (f64, f64) {
        match *self {
            ClassicalSolution::Over { s1, .. } => (s1, 0.0),
            ClassicalSolution::Critical { root } => (root, 0.0),
            ClassicalSolution::Under { alpha, rho, .. } => (-alpha, rho),
        }
    }
}

/// Classifies and solves the quadratic `s^2 + lambda s + omega^2 = 0`.
/// `|lambda - 2 omega| <= CLASSIFY_TOL` counts as critical.
pub fn classical_poles(lambda: f64, omega: f64) -> ClassicalSolution {
    let gap = lambda - 2.0 * omega;
    if gap.abs() <= CLASSIFY_TOL {
        ClassicalSolution::Critical { root: -omega }
    } else if gap > 0.0 {
        let disc = ((lambda - 2.0 * omega) * (lambda + 2.0 * omega)).sqrt();
        // s1 from the product of the roots avoids cancellation
        let s2 = -0.5 * (lambda + disc);
        let s1 = omega * omega / s2;
        ClassicalSolution::Over { s1, s2, lambda }
    } else {
        let rho = ((2.0 * omega - lambda) * (2.0 * omega + lambda)).sqrt() / 2.0;
        ClassicalSolution::Under {
            alpha: lambda / 2.0,
            rho,
            lambda,
        }
    }
}

/// Classical solution at `nu = 1`.
pub fn classical_solve(t: f64, params: &OscillatorParams) -> Result<f64> {
    if params.nu() != 1.0 {
        return Err(Error::Domain {
            what: "classical_solve",
            value: params.nu(),
            domain: "nu = 1".into(),
        });
    }
    check_time(t)?;
    Ok(classical_poles(params.lambda(), params.omega()).evaluate(t, params.x0(), params.x1()))
}

/// Undamped oscillation at `nu = 0`: `x0 cos(W t) + (x1/W) sin(W t)`,
/// `W = sqrt(lambda + omega^2)`.
pub fn undamped_solve(t: f64, params: &OscillatorParams) -> f64 {
    let w = undamped_frequency(params.lambda(), params.omega());
    let (s, c) = (w * t).sin_cos();
    params.x0() * c + params.x1() / w * s
}

pub fn undamped_frequency(lambda: f64, omega: f64) -> f64 {
    (lambda + omega * omega).sqrt()
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "time",
            value: t,
            domain: "t >= 0".into(),
        })
    }
}

fn require_interior(params: &OscillatorParams, what: &'static str) -> Result<()> {
    if params.is_interior() {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: params.nu(),
            domain: "0 < nu < 1".into(),
        })
    }
}

/// Residue of `e^(st) X(s)` at the upper pole, divided by `e^(st)`.
fn residue_factor(params: &OscillatorParams, s: Complex64) -> Result<Complex64> {
    let (lambda, nu, x0, x1) = (params.lambda(), params.nu(), params.x0(), params.x1());
    let s_nu_m1 = s.powf(nu - 1.0);
    let numerator = s * x0 + x1 + x0 * lambda * s_nu_m1;
    let denominator = 2.0 * s + nu * lambda * s_nu_m1;
    if denominator.norm() < DEGENERATE_DENOMINATOR {
        return Err(Error::DegenerateDenominator {
            magnitude: denominator.norm(),
        });
    }
    Ok(numerator / denominator)
}

/// Coefficients `(A, B)` of `e^(beta t) (A cos sigma t + B sin sigma t)`,
/// the sum of the residues at the pole and its conjugate.
pub fn residue_coefficients(params: &OscillatorParams, pole: &Pole) -> Result<(f64, f64)> {
    require_interior(params, "residue_coefficients")?;
    let c = residue_factor(params, pole.as_complex())?;
    Ok((2.0 * c.re, -2.0 * c.im))
}

/// The same coefficients from the expanded real-variable form, written in
/// terms of `(r, theta)`. Kept as an independent algebraic route for
/// cross-checking [`residue_coefficients`].
pub fn residue_coefficients_real_form(params: &OscillatorParams, pole: &Pole) -> (f64, f64) {
    let (l, v, x0, x1) = (params.lambda(), params.nu(), params.x0(), params.x1());
    let (r, th) = (pole.r, pole.theta);
    let rv = r.powf(v);
    let den = 4.0 * r * r
        + 4.0 * v * l * rv * ((2.0 - v) * th).cos()
        + v * v * l * l * r.powf(2.0 * v - 2.0);
    let a_num = x0
        * (2.0 * r * r + v * l * l * r.powf(2.0 * v - 2.0) + l * rv * (v + 2.0) * (th * (v - 2.0)).cos())
        + x1 * (2.0 * r * th.cos() + v * l * r.powf(v - 1.0) * (th * (v - 1.0)).cos());
    let b_num = x0 * (l * rv * (v - 2.0) * ((v - 2.0) * th).sin())
        + x1 * (2.0 * r * th.sin() + v * l * r.powf(v - 1.0) * (th * (v - 1.0)).sin());
    (2.0 * a_num / den, 2.0 * b_num / den)
}

/// Integrand of the branch-cut contribution at radius `R` on the negative
/// real axis, in the unsimplified form.
pub fn decay_integrand(radius: f64, t: f64, params: &OscillatorParams) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain {
            what: "decay_integrand",
            value: radius,
            domain: "R > 0".into(),
        });
    }
    let (lambda, omega, nu, x0, x1) = (
        params.lambda(),
        params.omega(),
        params.nu(),
        params.x0(),
        params.x1(),
    );
    let q = radius * radius + omega * omega;
    let r_nu = radius.powf(nu);
    let numerator =
        (radius * x0 - x1) * (nu * PI).sin() + x0 / radius * q * (PI * (nu - 1.0)).sin();
    let denominator = q * q + 2.0 * lambda * r_nu * q * (nu * PI).cos() + (lambda * r_nu).powi(2);
    Ok(lambda / PI * numerator * (-radius * t).exp() * r_nu / denominator)
}

/// Same integrand with the numerator reduced to
/// `-sin(nu pi) (x1 + x0 omega^2 / R)`.
pub fn decay_integrand_simplified(radius: f64, t: f64, params: &OscillatorParams) -> f64 {
    let (lambda, omega, nu) = (params.lambda(), params.omega(), params.nu());
    let r_nu = radius.powf(nu);
    let numerator = -(nu * PI).sin() * (params.x1() + params.x0() * omega * omega / radius);
    lambda / PI * numerator * (-radius * t).exp() * r_nu / cut_denominator(radius, r_nu, params)
}

/// `|s^2 + lambda s^nu + omega^2|^2` at `s = -R` (upper side of the cut),
/// written as a sum of squares.
fn cut_denominator(radius: f64, r_nu: f64, params: &OscillatorParams) -> f64 {
    let (lambda, omega, nu) = (params.lambda(), params.omega(), params.nu());
    let (sn, cn) = (nu * PI).sin_cos();
    let re = radius * radius + omega * omega + lambda * r_nu * cn;
    let im = lambda * r_nu * sn;
    re * re + im * im
}

/// Decay function with its quadrature error estimate.
///
/// The integral is split at `R_s = max(1, omega)`. On `[0, R_s]` the
/// substitution `R = u^(1/nu)` absorbs the `R^(nu-1)` singularity at the
/// origin; the tail `[R_s, inf)` is mapped to `v in (0, 1]` by `R = R_s / v`.
pub fn decay_estimate(
    t: f64,
    params: &OscillatorParams,
    cfg: &DecayQuadratureConfig,
) -> Result<QuadResult> {
    require_interior(params, "decay_function")?;
    check_time(t)?;
    let (lambda, omega, nu, x0, x1) = (
        params.lambda(),
        params.omega(),
        params.nu(),
        params.x0(),
        params.x1(),
    );
    let split = omega.max(1.0);
    let sin_nu_pi = (nu * PI).sin();
    let p = 1.0 / nu;

    // R^(nu-1) dR = p du, R^nu = u
    let inner = |u: f64| {
        let radius = u.powf(p);
        let (sn, cn) = (nu * PI).sin_cos();
        let re = radius * radius + omega * omega + lambda * u * cn;
        let im = lambda * u * sn;
        -lambda / PI * sin_nu_pi * p * (x1 * radius + x0 * omega * omega) * (-radius * t).exp()
            / (re * re + im * im)
    };
    let mut inner_points: Vec<f64> = (1..=4)
        .rev()
        .map(|k| (split * 10f64.powi(-2 * k)).powf(nu))
        .collect();
    inner_points.insert(0, 0.0);
    inner_points.push(split.powf(nu));

    let outer = |v: f64| {
        let radius = split / v;
        if !radius.is_finite() {
            return 0.0;
        }
        decay_integrand_simplified(radius, t, params) * split / (v * v)
    };
    let outer_points = [0.0, 1e-3, 1e-2, 1e-1, 1.0];

    let half_abs = 0.5 * cfg.abs_tol;
    let a = quadrature::integrate(inner, &inner_points, half_abs, cfg.rel_tol, cfg.max_subdivisions);
    let b = quadrature::integrate(outer, &outer_points, half_abs, cfg.rel_tol, cfg.max_subdivisions);
    let value = a.value + b.value;
    let error = a.error + b.error;
    let tolerance = cfg.abs_tol.max(cfg.rel_tol * value.abs());
    let subdivisions = a.subdivisions + b.subdivisions;
    if !(a.converged && b.converged) && error > tolerance {
        return Err(Error::QuadratureNonConvergence {
            estimate: error,
            tolerance,
            subdivisions,
        });
    }
    Ok(QuadResult {
        value,
        error,
        subdivisions,
        converged: true,
    })
}

/// Branch-cut (non-oscillatory) part of the solution at time `t`.
pub fn decay_function(t: f64, params: &OscillatorParams, cfg: &DecayQuadratureConfig) -> Result<f64> {
    decay_estimate(t, params, cfg).map(|r| r.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Branch {
    Undamped { frequency: f64 },
    Classical(ClassicalSolution),
    Fractional { pole: Pole, a: f64, b: f64 },
}

/// Precomputed solution for one parameter set; the pole and residue
/// coefficients are found once and reused for every time.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    params: OscillatorParams,
    cfg: DecayQuadratureConfig,
    branch: Branch,
}

impl Solution {
    pub fn new(params: OscillatorParams, cfg: DecayQuadratureConfig) -> Result<Self> {
        let branch = if params.nu() == 0.0 {
            Branch::Undamped {
                frequency: undamped_frequency(params.lambda(), params.omega()),
            }
        } else if params.nu() == 1.0 {
            Branch::Classical(classical_poles(params.lambda(), params.omega()))
        } else {
            let pole = find_pole(&params)?;
            let (a, b) = residue_coefficients(&params, &pole)?;
            Branch::Fractional { pole, a, b }
        };
        Ok(Self {
            params,
            cfg,
            branch,
        })
    }

    pub fn params(&self) -> &OscillatorParams {
        &self.params
    }

    /// The pole pair, for `0 < nu < 1` only.
    pub fn pole(&self) -> Option<Pole> {
        match self.branch {
            Branch::Fractional { pole, .. } => Some(pole),
            _ => None,
        }
    }

    /// `(A, B, beta, sigma)` when the oscillatory part has that form, which
    /// holds everywhere except the over- and critically-damped `nu = 1` cases.
    pub fn coefficients(&self) -> Option<(f64, f64, f64, f64)> {
        let (x0, x1) = (self.params.x0(), self.params.x1());
        match self.branch {
            Branch::Undamped { frequency } => Some((x0, x1 / frequency, 0.0, frequency)),
            Branch::Classical(ClassicalSolution::Under { alpha, rho, lambda }) => {
                Some((x0, (2.0 * x1 + lambda * x0) / (2.0 * rho), -alpha, rho))
            }
            Branch::Classical(_) => None,
            Branch::Fractional { pole, a, b } => Some((a, b, pole.beta, pole.sigma)),
        }
    }

    /// Residue (pole) contribution; the whole solution at the end branches.
    pub fn oscillatory(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(match self.branch {
            Branch::Undamped { .. } => undamped_solve(t, &self.params),
            Branch::Classical(c) => c.evaluate(t, self.params.x0(), self.params.x1()),
            Branch::Fractional { pole, a, b } => {
                let (s, c) = (pole.sigma * t).sin_cos();
                (pole.beta * t).exp() * (a * c + b * s)
            }
        })
    }

    /// Branch-cut contribution; identically zero at the end branches.
    pub fn decay(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        match self.branch {
            Branch::Fractional { .. } => decay_function(t, &self.params, &self.cfg),
            _ => Ok(0.0),
        }
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        Ok(self.oscillatory(t)? - self.decay(t)?)
    }

    pub fn parts(&self, times: &[f64]) -> Result<SolutionParts> {
        let (a_coef, b_coef, beta, sigma) = self.coefficients().ok_or(Error::Domain {
            what: "solution_parts",
            value: self.params.nu(),
            domain: "oscillatory form (not over/critically damped at nu = 1)".into(),
        })?;
        let decay = times
            .iter()
            .map(|&t| self.decay(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(SolutionParts {
            a_coef,
            b_coef,
            beta,
            sigma,
            times: times.to_vec(),
            decay,
        })
    }
}

/// `x(t)` for any `nu` in `[0, 1]`.
pub fn evaluate(t: f64, params: &OscillatorParams, cfg: &DecayQuadratureConfig) -> Result<f64> {
    Solution::new(*params, *cfg)?.evaluate(t)
}
