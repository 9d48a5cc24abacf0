//! Time-stepping reference integrator, independent of the pole/branch-cut
//! solution.
//!
//! The Caputo derivative is discretised with the L1 scheme
//!
//! ```text
//! D^nu x(t_n) ~ h^(-nu) / Gamma(2 - nu) * sum_{k=0}^{n-1} b_k (x_{n-k} - x_{n-k-1}),
//! b_k = (k+1)^(1-nu) - k^(1-nu)
//! ```
//!
//! and `x''` by the central difference, which yields an explicit recurrence
//! for `x_{n+1}`. The full history is kept, so a run of `n` steps costs
//! `O(n^2)` work. The first step is a second-order Taylor start using
//! `x''(0) = -omega^2 x0` (the Caputo derivative of a smooth function
//! vanishes at the origin).

use crate::error::{Error, Result};
use crate::model::{OscillatorParams, Sample, Trajectory, TrajectoryMeta, TrajectorySource};

pub const DEFAULT_MEMORY_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub h: f64,
    pub t_max: f64,
    pub memory_cap: usize,
}

impl StepperConfig {
    pub fn new(h: f64, t_max: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Domain {
                what: "step",
                value: h,
                domain: "h > 0".into(),
            });
        }
        if !(t_max.is_finite() && t_max >= h) {
            return Err(Error::Domain {
                what: "horizon",
                value: t_max,
                domain: format!("t_max >= h = {h}"),
            });
        }
        Ok(Self {
            h,
            t_max,
            memory_cap: DEFAULT_MEMORY_CAP,
        })
    }

    pub fn with_memory_cap(mut self, cap: usize) -> Self {
        self.memory_cap = cap;
        self
    }

    pub fn steps(&self) -> usize {
        (self.t_max / self.h).round() as usize
    }
}

/// `b_k = (k+1)^(1-nu) - k^(1-nu)` for `k = 0..n`.
pub fn caputo_l1_weights(nu: f64, n: usize) -> Vec<f64> {
    let a = 1.0 - nu;
    let mut prev = 0.0;
    (0..n)
        .map(|k| {
            let next = ((k + 1) as f64).powf(a);
            let b = next - prev;
            prev = next;
            b
        })
        .collect()
}

/// Integrates the oscillator on `[0, t_max]` with step `h`.
pub fn integrate(params: &OscillatorParams, cfg: &StepperConfig) -> Result<Trajectory> {
    if !params.is_interior() {
        return Err(Error::Domain {
            what: "oracle",
            value: params.nu(),
            domain: "0 < nu < 1".into(),
        });
    }
    let n = cfg.steps();
    if n > cfg.memory_cap {
        return Err(Error::MemoryCapExceeded {
            steps: n,
            cap: cfg.memory_cap,
        });
    }
    let (lambda, omega, nu) = (params.lambda(), params.omega(), params.nu());
    let h = cfg.h;
    let w2 = omega * omega;
    let scale = h.powf(-nu) / libm::tgamma(2.0 - nu);
    let weights = caputo_l1_weights(nu, n);

    let mut x = Vec::with_capacity(n + 1);
    // increments[j] = x_{j+1} - x_j
    let mut increments = Vec::with_capacity(n);
    x.push(params.x0());
    if n >= 1 {
        let x1 = params.x0() + h * params.x1() - 0.5 * h * h * w2 * params.x0();
        increments.push(x1 - params.x0());
        x.push(x1);
    }
    for step in 1..n {
        let history: f64 = weights[..step]
            .iter()
            .zip(increments[..step].iter().rev())
            .map(|(b, d)| b * d)
            .sum();
        let caputo = scale * history;
        let next = 2.0 * x[step] - x[step - 1] - h * h * (lambda * caputo + w2 * x[step]);
        increments.push(next - x[step]);
        x.push(next);
    }

    let samples = x
        .into_iter()
        .enumerate()
        .map(|(k, x)| Sample { t: k as f64 * h, x })
        .collect();
    Trajectory::new(
        samples,
        TrajectoryMeta {
            source: TrajectorySource::Oracle,
            params: *params,
            settings: format!("h={} t_max={}", h, cfg.t_max),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::classical_solve;

    fn params(lambda: f64, omega: f64, nu: f64, x0: f64, x1: f64) -> OscillatorParams {
        OscillatorParams::new(lambda, omega, nu, x0, x1).unwrap()
    }

    #[test]
    fn weights() {
        let b = caputo_l1_weights(0.5, 3);
        assert_eq!(b[0], 1.0);
        assert!((b[1] - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((b[2] - (3f64.sqrt() - 2f64.sqrt())).abs() < 1e-15);

        let b = caputo_l1_weights(0.3, 1000);
        assert!(b.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
        assert!((b.iter().sum::<f64>() - 1000f64.powf(0.7)).abs() < 1e-10);

        let b = caputo_l1_weights(1.0 - 1e-12, 4);
        assert!((b[0] - 1.0).abs() < 1e-15);
        assert!(b[1..].iter().all(|&w| w.abs() < 1e-11));
    }

    #[test]
    fn config_validation() {
        assert!(StepperConfig::new(0.0, 1.0).is_err());
        assert!(StepperConfig::new(0.1, 0.01).is_err());
        let cfg = StepperConfig::new(1e-3, 10.0).unwrap().with_memory_cap(100);
        let p = params(1.0, 1.0, 0.5, 1.0, 0.0);
        assert_eq!(
            integrate(&p, &cfg),
            Err(Error::MemoryCapExceeded { steps: 10_000, cap: 100 })
        );
        assert!(integrate(&p.with_nu(1.0).unwrap(), &StepperConfig::new(0.1, 1.0).unwrap()).is_err());
    }

    #[test]
    fn classical_limit() {
        let p = params(1.0, 1.0, 1.0 - 1e-9, 1.0, 0.0);
        let classical = p.with_nu(1.0).unwrap();
        let traj = integrate(&p, &StepperConfig::new(1e-3, 10.0).unwrap()).unwrap();
        let err = traj
            .samples()
            .iter()
            .map(|s| (s.x - classical_solve(s.t, &classical).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "{err}");
    }

    #[test]
    fn undamped_limit() {
        let (w, x0, x1) = (1.3, 0.7, -0.4);
        let p = params(1e-12, w, 0.5, x0, x1);
        let traj = integrate(&p, &StepperConfig::new(1e-3, 10.0).unwrap()).unwrap();
        let err = traj
            .samples()
            .iter()
            .map(|s| (s.x - (x0 * (w * s.t).cos() + x1 / w * (w * s.t).sin())).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-4, "{err}");
    }

    fn value_at(traj: &Trajectory, t: f64) -> f64 {
        let h = traj.samples()[1].t;
        traj.samples()[(t / h).round() as usize].x
    }

    #[test]
    fn self_convergence() {
        let p = params(1.0, 1.0, 0.5, 1.0, 0.0);
        let runs: Vec<Trajectory> = [4e-3, 2e-3, 1e-3]
            .iter()
            .map(|&h| integrate(&p, &StepperConfig::new(h, 8.0).unwrap()).unwrap())
            .collect();
        let times: Vec<f64> = (1..=80).map(|k| 0.1 * k as f64).collect();
        let diff = |a: &Trajectory, b: &Trajectory| {
            times
                .iter()
                .map(|&t| (value_at(a, t) - value_at(b, t)).abs())
                .fold(0.0, f64::max)
        };
        let coarse = diff(&runs[0], &runs[1]);
        let fine = diff(&runs[1], &runs[2]);
        let ratio = coarse / fine;
        assert!(ratio >= 2f64.powf(1.5) * 0.8, "ratio {ratio}");
    }

    #[test]
    fn envelope_non_increasing() {
        for (l, w, nu) in [(1.0, 1.0, 0.5), (0.5, 2.0, 0.3), (3.0, 1.0, 0.8), (0.25, 0.5, 0.1)] {
            let p = params(l, w, nu, 1.0, 0.0);
            let traj = integrate(&p, &StepperConfig::new(2e-3, 30.0).unwrap()).unwrap();
            let period = 2.0 * std::f64::consts::PI / (l + w * w).sqrt();
            let per = (period / 2e-3).ceil() as usize;
            let peaks: Vec<f64> = traj
                .samples()
                .chunks(per)
                .filter(|c| c.len() == per)
                .map(|c| c.iter().map(|s| s.x.abs()).fold(0.0, f64::max))
                .collect();
            for pair in peaks.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-9, "{l} {w} {nu}: {peaks:?}");
            }
        }
    }
}
