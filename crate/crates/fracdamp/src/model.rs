//! Domain types shared by the solver modules.
//!
//! The equation being solved is
//!
//! ```text
//! x''(t) + lambda * D^nu x(t) + omega^2 * x(t) = 0,   x(0) = x0,  x'(0) = x1
//! ```
//!
//! where `D^nu` is the Caputo derivative of order `0 <= nu <= 1`. Only the
//! Caputo convention is implemented: its Laplace transform is
//! `s^nu X(s) - x(0)`, so the initial data enter the transformed equation as
//! plain initial values. (The Riemann-Liouville transform would instead
//! subtract the fractional integral `D^(nu-1) x` at 0, which has no direct
//! physical reading.)

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance for the case boundaries `lambda + omega^2 = 1` and
/// `lambda = 2 omega`. Values within it are labelled `Flat` and
/// `CriticallyDamped` respectively.
pub const CLASSIFY_TOL: f64 = 1e-12;

/// Validated physical inputs.
///
/// `lambda` carries units of `time^(nu - 2)` so that the damping term has the
/// same units as `x''`; no unit conversion is attempted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    lambda: f64,
    omega: f64,
    nu: f64,
    x0: f64,
    x1: f64,
}

impl OscillatorParams {
    /// Validates and builds a parameter set.
    pub fn new(lambda: f64, omega: f64, nu: f64, x0: f64, x1: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::NonPositiveLambda(lambda));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::NonPositiveOmega(omega));
        }
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::NuOutOfRange(nu));
        }
        if !x0.is_finite() {
            return Err(Error::NonFinite { field: "x0", value: x0 });
        }
        if !x1.is_finite() {
            return Err(Error::NonFinite { field: "x1", value: x1 });
        }
        Ok(Self {
            lambda,
            omega,
            nu,
            x0,
            x1,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    /// Same physics and initial data, different derivative order.
    pub fn with_nu(&self, nu: f64) -> Result<Self> {
        Self::new(self.lambda, self.omega, nu, self.x0, self.x1)
    }

    /// Same physics, different initial data.
    pub fn with_initial(&self, x0: f64, x1: f64) -> Result<Self> {
        Self::new(self.lambda, self.omega, self.nu, x0, x1)
    }

    /// True when `nu` is strictly inside `(0, 1)`, where the pole/branch-cut
    /// machinery applies.
    pub fn is_interior(&self) -> bool {
        self.nu > 0.0 && self.nu < 1.0
    }

    pub fn nine_case(&self) -> NineCase {
        NineCase::of(self.lambda, self.omega)
    }

    /// Plain-text `key=value` form, one key per line.
    pub fn to_key_value(&self) -> String {
        format!(
            "lambda={}\nomega={}\nnu={}\nx0={}\nx1={}\n",
            self.lambda, self.omega, self.nu, self.x0, self.x1
        )
    }

    /// Parses the `key=value` form. Blank lines and `#` comments are skipped;
    /// every key must appear exactly once.
    pub fn from_key_value(text: &str) -> Result<Self> {
        let mut slots: [Option<f64>; 5] = [None; 5];
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {line:?}")))?;
            let idx = match key.trim() {
                "lambda" => 0,
                "omega" => 1,
                "nu" => 2,
                "x0" => 3,
                "x1" => 4,
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            };
            if slots[idx].is_some() {
                return Err(Error::Parse(format!("duplicate key {:?}", key.trim())));
            }
            slots[idx] = Some(parse_real(value)?);
        }
        let get = |i: usize, name: &str| {
            slots[i].ok_or_else(|| Error::Parse(format!("missing key {name:?}")))
        };
        Self::new(
            get(0, "lambda")?,
            get(1, "omega")?,
            get(2, "nu")?,
            get(3, "x0")?,
            get(4, "x1")?,
        )
    }

    pub const CSV_HEADER: &'static str = "lambda,omega,nu,x0,x1";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.lambda, self.omega, self.nu, self.x0, self.x1
        )
    }

    pub fn from_csv_row(row: &str) -> Result<Self> {
        let fields: Vec<&str> = row.trim_end_matches(['\r', '\n']).split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Parse(format!(
                "expected 5 comma-separated fields, got {}",
                fields.len()
            )));
        }
        let v = fields
            .iter()
            .map(|f| parse_real(f))
            .collect::<Result<Vec<_>>>()?;
        Self::new(v[0], v[1], v[2], v[3], v[4])
    }
}

impl fmt::Display for OscillatorParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lambda={} omega={} nu={} x0={} x1={}",
            self.lambda, self.omega, self.nu, self.x0, self.x1
        )
    }
}

/// Parses a decimal literal or a simple rational `p/q`.
pub fn parse_real(text: &str) -> Result<f64> {
    let text = text.trim();
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    };
    match text.split_once('/') {
        Some((num, den)) => {
            let den = parse(den)?;
            if den == 0.0 {
                return Err(Error::Parse(format!("{text:?}: zero denominator")));
            }
            Ok(parse(num)? / den)
        }
        None => parse(text),
    }
}

/// The upper-half-plane root `s = beta + i sigma = r e^(i theta)` of
/// `s^2 + lambda s^nu + omega^2 = 0`. Its conjugate is the other pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub r: f64,
    pub theta: f64,
    pub beta: f64,
    pub sigma: f64,
}

impl Pole {
    pub fn from_complex(s: Complex64) -> Self {
        Self {
            r: s.norm(),
            theta: s.arg(),
            beta: s.re,
            sigma: s.im,
        }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.beta, self.sigma)
    }

    /// `|s^2 + lambda s^nu + omega^2|` with the principal branch of `s^nu`.
    pub fn residual(&self, lambda: f64, omega: f64, nu: f64) -> f64 {
        let s = self.as_complex();
        (s * s + lambda * s.powf(nu) + omega * omega).norm()
    }
}

/// Sign of the initial slope `d sigma / d nu` at `nu = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialSlope {
    Increasing,
    Flat,
    Decreasing,
}

/// Classical regime reached at `nu = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminalDamping {
    UnderDamped,
    CriticallyDamped,
    OverDamped,
}

/// One of the nine qualitative behaviours of `sigma(nu)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NineCase {
    pub initial_slope: InitialSlope,
    pub terminal: TerminalDamping,
}

impl NineCase {
    /// Depends on `(lambda, omega)` only: the slope regime is the sign of
    /// `lambda + omega^2 - 1`, the terminal regime the sign of
    /// `lambda - 2 omega`.
    pub fn of(lambda: f64, omega: f64) -> Self {
        let slope = lambda + omega * omega - 1.0;
        let initial_slope = if slope.abs() <= CLASSIFY_TOL {
            InitialSlope::Flat
        } else if slope > 0.0 {
            InitialSlope::Increasing
        } else {
            InitialSlope::Decreasing
        };
        Self {
            initial_slope,
            terminal: TerminalDamping::of(lambda, omega),
        }
    }
}

impl TerminalDamping {
    pub fn of(lambda: f64, omega: f64) -> Self {
        let gap = lambda - 2.0 * omega;
        if gap.abs() <= CLASSIFY_TOL {
            TerminalDamping::CriticallyDamped
        } else if gap > 0.0 {
            TerminalDamping::OverDamped
        } else {
            TerminalDamping::UnderDamped
        }
    }
}

impl fmt::Display for InitialSlope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitialSlope::Increasing => "increasing",
            InitialSlope::Flat => "flat",
            InitialSlope::Decreasing => "decreasing",
        })
    }
}

impl fmt::Display for TerminalDamping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerminalDamping::UnderDamped => "under-damped",
            TerminalDamping::CriticallyDamped => "critically-damped",
            TerminalDamping::OverDamped => "over-damped",
        })
    }
}

impl fmt::Display for NineCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} start, {} at nu=1", self.initial_slope, self.terminal)
    }
}

/// The closed-form solution split into its parts:
/// `x(t) = e^(beta t) (A cos sigma t + B sin sigma t) - decay(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionParts {
    pub a_coef: f64,
    pub b_coef: f64,
    pub beta: f64,
    pub sigma: f64,
    pub times: Vec<f64>,
    pub decay: Vec<f64>,
}

impl SolutionParts {
    pub fn oscillatory(&self, t: f64) -> f64 {
        let (s, c) = (self.sigma * t).sin_cos();
        (self.beta * t).exp() * (self.a_coef * c + self.b_coef * s)
    }

    /// `(t, oscillatory, decay, total)` for every evaluated time.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.times.iter().zip(&self.decay).map(|(&t, &d)| {
            let osc = self.oscillatory(t);
            (t, osc, d, osc - d)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectorySource {
    Analytic,
    Oracle,
    Classical,
}

impl fmt::Display for TrajectorySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrajectorySource::Analytic => "analytic",
            TrajectorySource::Oracle => "oracle",
            TrajectorySource::Classical => "classical",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub source: TrajectorySource,
    pub params: OscillatorParams,
    /// Free-form generation settings, e.g. `h=0.001 t_max=20`.
    pub settings: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
}

/// A sampled time series starting at `t = 0` with strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
    meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(samples: Vec<Sample>, meta: TrajectoryMeta) -> Result<Self> {
        match samples.first() {
            Some(first) if first.t == 0.0 => {}
            _ => {
                return Err(Error::Domain {
                    what: "trajectory",
                    value: samples.first().map_or(f64::NAN, |s| s.t),
                    domain: "first sample at t = 0".into(),
                })
            }
        }
        if let Some(w) = samples.windows(2).find(|w| w[1].t <= w[0].t) {
            return Err(Error::Domain {
                what: "trajectory",
                value: w[1].t,
                domain: "strictly increasing times".into(),
            });
        }
        Ok(Self { samples, meta })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// CSV with a `#` metadata line and a `t,x` header.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# fracdamp {} source={} {} {}\nt,x\n",
            crate::VERSION,
            self.meta.source,
            self.meta.params,
            self.meta.settings
        );
        for s in &self.samples {
            out.push_str(&format!("{},{}\n", s.t, s.x));
        }
        out
    }
}
