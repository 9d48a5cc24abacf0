//! Locates the upper-half-plane root of `s^2 + lambda s^nu + omega^2 = 0`.
//!
//! Writing `s = r e^(i theta)` splits the equation into a real and an
//! imaginary part. The imaginary part gives
//! `r^(2-nu) = -lambda sin(nu theta) / sin(2 theta)`; substituting it into the
//! real part leaves a single equation in the angle,
//!
//! ```text
//! ((sin nu theta)^nu / (sin 2 theta)^2)^(1/(2-nu)) sin((2-nu) theta) = omega^2 / lambda^(2/(2-nu))
//! ```
//!
//! whose left side decreases strictly from `+inf` to `0` on
//! `pi/2 < theta < pi/(2-nu)`. The root is therefore unique; it is bracketed,
//! bisected, and finally polished by Newton's method on the complex equation.
//!
//! Angles are handled internally as the offset `phi = theta - pi/2` and the
//! complementary offset `psi = pi/(2-nu) - theta`, so that the trigonometric
//! factors that vanish at either end of the interval keep full relative
//! precision.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{OscillatorParams, Pole};

/// Initial distance of the bracket ends from the singular interval ends.
pub const EDGE_OFFSET: f64 = 1e-9;
/// Number of 10x shrinks of [`EDGE_OFFSET`] tried before giving up.
pub const EDGE_SHRINKS: usize = 6;
/// Bisection stops once the bracket is narrower than this (in radians).
pub const BISECTION_WIDTH: f64 = 1e-14;
pub const NEWTON_ITERATIONS: usize = 5;

/// A sign-changing bracket of the angular residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularBracket {
    pub lo: f64,
    pub hi: f64,
    pub g_lo: f64,
    pub g_hi: f64,
    phi_lo: f64,
    phi_hi: f64,
}

/// Width `pi/(2-nu) - pi/2` of the admissible angle interval.
pub fn domain_width(nu: f64) -> f64 {
    nu * PI / (2.0 * (2.0 - nu))
}

/// Upper end `pi/(2-nu)` of the admissible angle interval.
pub fn domain_upper(nu: f64) -> f64 {
    PI / (2.0 - nu)
}

/// Trigonometric factors at `theta = pi/2 + phi`.
struct AngleFactors {
    /// `sin(nu theta)`
    sin_nu: f64,
    /// `-sin(2 theta)`
    neg_sin_2: f64,
    /// `sin((2-nu) theta)`
    sin_rest: f64,
}

fn angle_factors(phi: f64, nu: f64) -> AngleFactors {
    let w = domain_width(nu);
    let psi = w - phi;
    // pi - nu*theta and pi - 2*phi both equal c + (multiple of psi)
    let c = 2.0 * PI * (1.0 - nu) / (2.0 - nu);
    let nu_theta = nu * (FRAC_PI_2 + phi);
    let sin_nu = if nu_theta <= FRAC_PI_2 {
        nu_theta.sin()
    } else {
        (c + nu * psi).sin()
    };
    let neg_sin_2 = if 2.0 * phi <= FRAC_PI_2 {
        (2.0 * phi).sin()
    } else {
        (c + 2.0 * psi).sin()
    };
    AngleFactors {
        sin_nu,
        neg_sin_2,
        sin_rest: ((2.0 - nu) * psi).sin(),
    }
}

/// Log of the angular left-hand side at `theta = pi/2 + phi`.
fn log_lhs_at(phi: f64, nu: f64) -> f64 {
    let f = angle_factors(phi, nu);
    (nu * f.sin_nu.ln() - 2.0 * f.neg_sin_2.ln()) / (2.0 - nu) + f.sin_rest.ln()
}

/// Log of `(omega / lambda^(1/(2-nu)))^2`.
fn log_rhs(lambda: f64, omega: f64, nu: f64) -> f64 {
    2.0 * omega.ln() - 2.0 * lambda.ln() / (2.0 - nu)
}

fn check_order(nu: f64, what: &'static str) -> Result<()> {
    if nu > 0.0 && nu <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: nu,
            domain: "0 < nu <= 1".into(),
        })
    }
}

fn check_angle(theta: f64, nu: f64, what: &'static str) -> Result<f64> {
    check_order(nu, what)?;
    let upper = domain_upper(nu);
    if theta > FRAC_PI_2 && theta < upper {
        Ok(theta - FRAC_PI_2)
    } else {
        Err(Error::Domain {
            what,
            value: theta,
            domain: format!("(pi/2, {upper})"),
        })
    }
}

/// `((sin nu theta)^nu / (sin 2 theta)^2)^(1/(2-nu)) sin((2-nu) theta)`,
/// evaluated in log space.
///
/// `nu = 1` is admitted as the continuous extension, where the expression
/// reduces to `1 / (4 cos^2 theta)`.
pub fn eq24_lhs(theta: f64, nu: f64) -> Result<f64> {
    let phi = check_angle(theta, nu, "eq24_lhs")?;
    Ok(log_lhs_at(phi, nu).exp())
}

/// Right-hand side `(omega / lambda^(1/(2-nu)))^2` of the angular equation.
pub fn eq24_rhs(lambda: f64, omega: f64, nu: f64) -> f64 {
    log_rhs(lambda, omega, nu).exp()
}

/// `ln(lhs) - ln(rhs)`: positive below the root, negative above it.
pub fn angular_residual(theta: f64, params: &OscillatorParams) -> Result<f64> {
    let phi = check_angle(theta, params.nu(), "angular_residual")?;
    Ok(log_lhs_at(phi, params.nu()) - log_rhs(params.lambda(), params.omega(), params.nu()))
}

/// Modulus `(-lambda sin(nu theta) / sin(2 theta))^(1/(2-nu))` that solves the
/// imaginary part of the pole equation for a given angle.
pub fn r_from_theta(theta: f64, nu: f64, lambda: f64) -> Result<f64> {
    let phi = check_angle(theta, nu, "r_from_theta")?;
    Ok(r_at(phi, nu, lambda))
}

fn r_at(phi: f64, nu: f64, lambda: f64) -> f64 {
    let f = angle_factors(phi, nu);
    ((lambda.ln() + f.sin_nu.ln() - f.neg_sin_2.ln()) / (2.0 - nu)).exp()
}

/// `nu^2 sin^2(2 theta) - 4 nu sin(2 theta) sin(nu theta) cos((2-nu) theta) + 4 sin^2(nu theta)`.
///
/// Up to positive factors this is minus the derivative of the angular
/// left-hand side, so it is positive wherever that side decreases.
pub fn monotonicity_factor(theta: f64, nu: f64) -> f64 {
    let s2 = (2.0 * theta).sin();
    let sn = (nu * theta).sin();
    nu * nu * s2 * s2 - 4.0 * nu * s2 * sn * ((2.0 - nu) * theta).cos() + 4.0 * sn * sn
}

fn residual_at(phi: f64, params: &OscillatorParams) -> f64 {
    log_lhs_at(phi, params.nu()) - log_rhs(params.lambda(), params.omega(), params.nu())
}

fn require_interior(params: &OscillatorParams) -> Result<()> {
    if params.is_interior() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "find_pole",
            value: params.nu(),
            domain: "0 < nu < 1 (use the limit branches at the ends)".into(),
        })
    }
}

/// Brackets the root between the two singular ends of the angle interval.
pub fn bracket(params: &OscillatorParams) -> Result<AngularBracket> {
    require_interior(params)?;
    let nu = params.nu();
    let w = domain_width(nu);
    let mut off_lo = EDGE_OFFSET.min(0.25 * w);
    let mut off_hi = off_lo;
    let mut g_lo = residual_at(off_lo, params);
    let mut g_hi = residual_at(w - off_hi, params);
    for _ in 0..EDGE_SHRINKS {
        if g_lo > 0.0 && g_hi < 0.0 {
            break;
        }
        if g_lo.is_nan() || g_lo <= 0.0 {
            off_lo *= 0.1;
            g_lo = residual_at(off_lo, params);
        }
        if g_hi.is_nan() || g_hi >= 0.0 {
            off_hi *= 0.1;
            g_hi = residual_at(w - off_hi, params);
        }
    }
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(Error::BracketFailure { nu, g_lo, g_hi });
    }
    Ok(make_bracket(off_lo, w - off_hi, g_lo, g_hi))
}

fn make_bracket(phi_lo: f64, phi_hi: f64, g_lo: f64, g_hi: f64) -> AngularBracket {
    AngularBracket {
        lo: FRAC_PI_2 + phi_lo,
        hi: FRAC_PI_2 + phi_hi,
        g_lo,
        g_hi,
        phi_lo,
        phi_hi,
    }
}

fn bisect(mut b: AngularBracket, params: &OscillatorParams) -> f64 {
    while b.phi_hi - b.phi_lo > BISECTION_WIDTH {
        let mid = 0.5 * (b.phi_lo + b.phi_hi);
        if mid <= b.phi_lo || mid >= b.phi_hi {
            break;
        }
        let g = residual_at(mid, params);
        if g > 0.0 {
            b.phi_lo = mid;
        } else {
            b.phi_hi = mid;
        }
    }
    0.5 * (b.phi_lo + b.phi_hi)
}

/// Newton's method on `f(s) = s^2 + lambda s^nu + omega^2` with principal
/// branch powers.
fn polish(mut s: Complex64, params: &OscillatorParams) -> Complex64 {
    let (lambda, omega, nu) = (params.lambda(), params.omega(), params.nu());
    for _ in 0..NEWTON_ITERATIONS {
        let s_nu = s.powf(nu);
        let f = s * s + lambda * s_nu + omega * omega;
        let df = 2.0 * s + nu * lambda * s_nu / s;
        let step = f / df;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        let next = s - step;
        // never cross onto the branch cut or into the lower half plane
        if next.im <= 0.0 {
            break;
        }
        s = next;
        if step.norm() <= 4.0 * f64::EPSILON * s.norm() {
            break;
        }
    }
    s
}

fn pole_from_offset(phi: f64, params: &OscillatorParams) -> Pole {
    let r = r_at(phi, params.nu(), params.lambda());
    let (sin_phi, cos_phi) = phi.sin_cos();
    let s = polish(Complex64::new(-r * sin_phi, r * cos_phi), params);
    Pole::from_complex(s)
}

/// The unique pole in the second quadrant. Requires `0 < nu < 1`.
pub fn find_pole(params: &OscillatorParams) -> Result<Pole> {
    let b = bracket(params)?;
    Ok(pole_from_offset(bisect(b, params), params))
}

/// Like [`find_pole`], but first tries a narrow bracket around the angle of a
/// nearby pole (e.g. the previous point of a sweep in `nu`).
pub fn find_pole_near(params: &OscillatorParams, guess: &Pole) -> Result<Pole> {
    require_interior(params)?;
    let w = domain_width(params.nu());
    let centre = guess.theta - FRAC_PI_2;
    let half = 0.05 * w;
    let lo = (centre - half).max(0.5 * EDGE_OFFSET.min(0.25 * w));
    let hi = (centre + half).min(w - 0.5 * EDGE_OFFSET.min(0.25 * w));
    if lo < hi {
        let (g_lo, g_hi) = (residual_at(lo, params), residual_at(hi, params));
        if g_lo > 0.0 && g_hi < 0.0 {
            let b = make_bracket(lo, hi, g_lo, g_hi);
            return Ok(pole_from_offset(bisect(b, params), params));
        }
    }
    find_pole(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(lambda: f64, omega: f64, nu: f64) -> OscillatorParams {
        OscillatorParams::new(lambda, omega, nu, 1.0, 0.0).unwrap()
    }

    #[test]
    fn lhs_at_nu_one_matches_closed_form() {
        let theta = 2.0 * PI / 3.0;
        assert!((eq24_lhs(theta, 1.0).unwrap() - 1.0).abs() < 1e-14);
        for k in 1..50 {
            let theta = FRAC_PI_2 + k as f64 * (PI / 2.0) / 50.0;
            let closed = 1.0 / (4.0 * theta.cos().powi(2));
            let got = eq24_lhs(theta, 1.0).unwrap();
            assert!((got - closed).abs() <= 1e-12 * closed, "{theta}: {got} vs {closed}");
        }
    }

    #[test]
    fn lhs_limits_at_domain_ends() {
        let nu = 0.5;
        let upper = domain_upper(nu);
        assert!(eq24_lhs(FRAC_PI_2 + 1e-12, nu).unwrap() > 1e10);
        assert!(eq24_lhs(upper - 1e-12, nu).unwrap() < 1e-10);
    }

    #[test]
    fn lhs_rejects_outside_domain() {
        assert!(matches!(eq24_lhs(FRAC_PI_2, 0.5), Err(Error::Domain { .. })));
        assert!(matches!(eq24_lhs(domain_upper(0.5), 0.5), Err(Error::Domain { .. })));
        assert!(matches!(eq24_lhs(2.0, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(r_from_theta(1.0, 0.5, 1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn r_from_theta_values() {
        // -sin(theta)/sin(2 theta) = 1 at theta = 2 pi / 3
        let r = r_from_theta(2.0 * PI / 3.0, 1.0, 1.0).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
        let tiny = r_from_theta(0.6 * PI, 0.5, 1e-12).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-7);
    }

    #[test]
    fn r_from_theta_solves_imaginary_part() {
        let (nu, lambda, theta) = (0.5, 1.0, 0.6 * PI);
        let r = r_from_theta(theta, nu, lambda).unwrap();
        let im = r * r * (2.0 * theta).sin() + lambda * r.powf(nu) * (nu * theta).sin();
        assert!(im.abs() < 1e-14, "{im}");
    }

    #[test]
    fn interior_only() {
        assert!(find_pole(&params(1.0, 1.0, 0.0)).is_err());
        assert!(find_pole(&params(1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn bracket_straddles() {
        let p = params(1.0, 1.0, 0.5);
        let b = bracket(&p).unwrap();
        assert!(FRAC_PI_2 < b.lo && b.lo < b.hi && b.hi < domain_upper(0.5));
        assert!(b.g_lo > 0.0 && b.g_hi < 0.0);
    }

    #[test]
    fn near_classical_limit() {
        let pole = find_pole(&params(1.0, 1.0, 1.0 - 1e-8)).unwrap();
        assert!((pole.beta + 0.5).abs() < 1e-4);
        assert!((pole.sigma - 3f64.sqrt() / 2.0).abs() < 1e-4);
    }

    #[test]
    fn near_undamped_limit() {
        let pole = find_pole(&params(1.0, 1.0, 1e-9)).unwrap();
        assert!((pole.sigma - 2f64.sqrt()).abs() < 1e-8);
        assert!(pole.beta < 0.0 && pole.beta > -1e-8);
    }

    #[test]
    fn warm_start_agrees_with_cold_start() {
        let cold = find_pole(&params(2.0, 1.0, 0.4)).unwrap();
        let warm = find_pole_near(&params(2.0, 1.0, 0.41), &cold).unwrap();
        let direct = find_pole(&params(2.0, 1.0, 0.41)).unwrap();
        assert!((warm.as_complex() - direct.as_complex()).norm() < 1e-13);
    }

    proptest! {
        #[test]
        fn pole_satisfies_both_real_equations(
            lambda in 0.05f64..5.0, omega in 0.05f64..5.0, nu in 0.01f64..0.99
        ) {
            let p = params(lambda, omega, nu);
            let pole = find_pole(&p).unwrap();
            let (r, th) = (pole.r, pole.theta);
            let scale = (omega * omega).max(r * r);
            let re = r * r * (2.0 * th).cos() + lambda * r.powf(nu) * (nu * th).cos() + omega * omega;
            let im = r * r * (2.0 * th).sin() + lambda * r.powf(nu) * (nu * th).sin();
            prop_assert!(re.abs() <= 1e-10 * scale, "re {re}");
            prop_assert!(im.abs() <= 1e-10 * scale, "im {im}");
            prop_assert!(pole.beta < 0.0 && pole.sigma > 0.0);
            prop_assert!(th > FRAC_PI_2 && th < domain_upper(nu));
            prop_assert!((pole.beta - r * th.cos()).abs() <= 1e-12 * r);
            prop_assert!((pole.sigma - r * th.sin()).abs() <= 1e-12 * r);
            // the conjugate is the other root
            let sc = pole.as_complex().conj();
            let f = sc * sc + lambda * sc.powf(nu) + omega * omega;
            prop_assert!(f.norm() <= 1e-10 * scale);
        }

        #[test]
        fn lhs_strictly_decreasing(nu in 0.02f64..0.98) {
            let w = domain_width(nu);
            let n = 10_000;
            let mut prev = f64::INFINITY;
            for k in 1..n {
                let theta = FRAC_PI_2 + w * k as f64 / n as f64;
                let v = eq24_lhs(theta, nu).unwrap();
                prop_assert!(v < prev, "nu={nu} theta={theta}");
                prev = v;
            }
        }

        #[test]
        fn monotonicity_factor_positive(nu in 0.01f64..0.99, frac in 0.001f64..0.999) {
            let theta = FRAC_PI_2 + frac * domain_width(nu);
            prop_assert!(monotonicity_factor(theta, nu) > 0.0);
            let s2 = (2.0 * theta).sin();
            let sn = (nu * theta).sin();
            let bound = nu * nu * s2 * s2 - 4.0 * nu * s2 * sn + 4.0 * sn * sn;
            prop_assert!(bound >= 0.0);
            prop_assert!((bound - (nu * s2 - 2.0 * sn).powi(2)).abs() <= 1e-12);
        }

        #[test]
        fn pole_moves_continuously(lambda in 0.1f64..4.0, omega in 0.1f64..4.0, nu in 0.01f64..0.98) {
            let step = 1e-3;
            let a = find_pole(&params(lambda, omega, nu)).unwrap();
            let b = find_pole(&params(lambda, omega, nu + step)).unwrap();
            // local |ds/dnu| from implicit differentiation of the pole equation
            let s = a.as_complex();
            let s_nu = s.powf(nu);
            let slope = (lambda * s_nu * s.ln() * s / (2.0 * s * s + lambda * nu * s_nu)).norm();
            let jump = (b.as_complex() - s).norm();
            prop_assert!(jump <= 100.0 * step * slope, "jump {jump} slope {slope}");
        }
    }
}
