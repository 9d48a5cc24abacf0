use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fracdamp::acceptance::{self, Suite};
use fracdamp::freqanalysis::{self, initial_slope, sigma_sweep, uniform_grid};
use fracdamp::model::parse_real;
use fracdamp::oracle::{integrate, StepperConfig};
use fracdamp::{find_pole, DecayQuadratureConfig, Error, NineCase, OscillatorParams, Solution};

/// Finest oracle step used by `solve --with-oracle`.
const ORACLE_MAX_STEP: f64 = 1e-3;

#[derive(Parser)]
#[command(name = "fracdamp", version, about = "Fractionally damped oscillator solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn real(text: &str) -> Result<f64, String> {
    parse_real(text).map_err(|e| e.to_string())
}

#[derive(clap::Args)]
struct Coeffs {
    /// Damping coefficient (> 0); decimals or p/q
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    lambda: f64,
    /// Natural frequency (> 0)
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    omega: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Locate the complex pole pair
    Poles {
        #[command(flatten)]
        coeffs: Coeffs,
        #[arg(long, value_parser = real)]
        nu: f64,
    },
    /// Evaluate x(t) on a uniform grid and write CSV
    Solve {
        #[command(flatten)]
        coeffs: Coeffs,
        #[arg(long, value_parser = real)]
        nu: f64,
        #[arg(long, value_parser = real, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, value_parser = real, allow_hyphen_values = true)]
        x1: f64,
        #[arg(long, value_parser = real, default_value = "10")]
        t_max: f64,
        #[arg(long, value_parser = real, default_value = "0.01")]
        dt: f64,
        /// Add an L1 time-stepping column for comparison
        #[arg(long)]
        with_oracle: bool,
    },
    /// Oscillation frequency as a function of nu, as CSV
    Sweep {
        #[command(flatten)]
        coeffs: Option<Coeffs>,
        /// Named (lambda, omega) pair instead of explicit coefficients
        #[arg(long, conflicts_with_all = ["lambda", "omega"])]
        preset: Option<String>,
        #[arg(long, value_parser = real, default_value = "0.01")]
        nu_min: f64,
        #[arg(long, value_parser = real, default_value = "0.99")]
        nu_max: f64,
        #[arg(long, default_value_t = 99)]
        nu_steps: usize,
    },
    /// Initial-slope and terminal-damping class of (lambda, omega)
    Classify {
        #[command(flatten)]
        coeffs: Coeffs,
    },
    /// Run the acceptance criteria
    Validate {
        #[arg(long, value_enum, default_value_t = SuiteArg::Quick)]
        suite: SuiteArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Quick,
    Full,
}

fn quadrature_config() -> fracdamp::Result<DecayQuadratureConfig> {
    let cfg = DecayQuadratureConfig::default();
    match std::env::var("FRACDAMP_TOL") {
        Ok(text) => cfg.with_rel_tol(parse_real(&text)?),
        Err(_) => Ok(cfg),
    }
}

fn header(fields: &str) -> String {
    format!("# fracdamp {} {fields}\n", fracdamp::VERSION)
}

fn poles(c: &Coeffs, nu: f64) -> fracdamp::Result<String> {
    let p = OscillatorParams::new(c.lambda, c.omega, nu, 1.0, 0.0)?;
    if !p.is_interior() {
        return Err(Error::Domain {
            what: "poles",
            value: nu,
            domain: "0 < nu < 1 (end points have closed forms)".into(),
        });
    }
    let pole = find_pole(&p)?;
    Ok(format!(
        "{}r,theta,beta,sigma,residual\n{},{},{},{},{:e}\n",
        header(&format!("lambda={} omega={} nu={}", c.lambda, c.omega, nu)),
        pole.r,
        pole.theta,
        pole.beta,
        pole.sigma,
        pole.residual(c.lambda, c.omega, nu)
    ))
}

#[allow(clippy::too_many_arguments)]
fn solve(c: &Coeffs, nu: f64, x0: f64, x1: f64, t_max: f64, dt: f64, with_oracle: bool) -> fracdamp::Result<String> {
    let p = OscillatorParams::new(c.lambda, c.omega, nu, x0, x1)?;
    if !(dt.is_finite() && dt > 0.0 && t_max.is_finite() && t_max >= dt) {
        return Err(Error::Domain {
            what: "solve grid",
            value: dt,
            domain: "0 < dt <= t_max".into(),
        });
    }
    let cfg = quadrature_config()?;
    let sol = Solution::new(p, cfg)?;
    let n = (t_max / dt).round() as usize;

    let oracle = if with_oracle {
        let k = (dt / ORACLE_MAX_STEP).ceil().max(1.0) as usize;
        let traj = integrate(&p, &StepperConfig::new(dt / k as f64, n as f64 * dt)?)?;
        Some((k, traj))
    } else {
        None
    };

    let mut out = header(&format!("{p} t_max={t_max} dt={dt} rel_tol={:e}", cfg.rel_tol));
    out.push_str("t,x_analytic,x_oscillatory,x_decay");
    out.push_str(if oracle.is_some() { ",x_oracle\n" } else { "\n" });
    for i in 0..=n {
        let t = i as f64 * dt;
        let osc = sol.oscillatory(t)?;
        let decay = sol.decay(t)?;
        write!(out, "{t},{},{osc},{decay}", osc - decay).unwrap();
        if let Some((k, traj)) = &oracle {
            write!(out, ",{}", traj.samples()[i * k].x).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

fn sweep(
    coeffs: Option<&Coeffs>,
    preset: Option<&str>,
    nu_min: f64,
    nu_max: f64,
    nu_steps: usize,
) -> fracdamp::Result<String> {
    let (name, lambda, omega) = match (preset, coeffs) {
        (Some(name), _) => {
            let p = freqanalysis::preset(name).ok_or_else(|| {
                let known: Vec<_> = freqanalysis::presets().iter().map(|p| p.name).collect();
                Error::Parse(format!("unknown preset {name:?}; expected one of {}", known.join(", ")))
            })?;
            (name, p.lambda, p.omega)
        }
        (None, Some(c)) => ("custom", c.lambda, c.omega),
        (None, None) => return Err(Error::Parse("give --lambda and --omega, or --preset".into())),
    };
    // validates lambda and omega
    OscillatorParams::new(lambda, omega, 0.5, 1.0, 0.0)?;
    let rows = sigma_sweep(lambda, omega, &uniform_grid(nu_min, nu_max, nu_steps))?;
    let comment = format!(
        "fracdamp {} preset={name} lambda={lambda} omega={omega} nu_min={nu_min} nu_max={nu_max} nu_steps={nu_steps} class=\"{}\" initial_slope={}",
        fracdamp::VERSION,
        NineCase::of(lambda, omega),
        initial_slope(lambda, omega)
    );
    Ok(freqanalysis::sweep_csv(&rows, &comment))
}

fn classify(c: &Coeffs) -> fracdamp::Result<String> {
    OscillatorParams::new(c.lambda, c.omega, 0.5, 1.0, 0.0)?;
    let case = NineCase::of(c.lambda, c.omega);
    Ok(format!(
        "initial_slope={}\nterminal={}\nslope={}\n",
        case.initial_slope,
        case.terminal,
        initial_slope(c.lambda, c.omega)
    ))
}

fn exit_status(e: &Error) -> u8 {
    if e.is_validation() {
        2
    } else {
        3
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Poles { coeffs, nu } => poles(coeffs, *nu),
        Command::Solve { coeffs, nu, x0, x1, t_max, dt, with_oracle } => {
            solve(coeffs, *nu, *x0, *x1, *t_max, *dt, *with_oracle)
        }
        Command::Sweep { coeffs, preset, nu_min, nu_max, nu_steps } => {
            sweep(coeffs.as_ref(), preset.as_deref(), *nu_min, *nu_max, *nu_steps)
        }
        Command::Classify { coeffs } => classify(coeffs),
        Command::Validate { suite } => {
            let suite = match suite {
                SuiteArg::Quick => Suite::Quick,
                SuiteArg::Full => Suite::Full,
            };
            let mut failed = 0;
            for r in acceptance::run(suite) {
                println!("{r}");
                failed += usize::from(!r.passed);
            }
            println!("{failed} failed");
            return if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match result {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_status(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerical_failures_exit_3() {
        let e = Error::QuadratureNonConvergence { estimate: 1.0, tolerance: 1e-10, subdivisions: 2000 };
        assert_eq!(exit_status(&e), 3);
        assert_eq!(exit_status(&Error::BracketFailure { nu: 0.5, g_lo: 1.0, g_hi: 1.0 }), 3);
        assert_eq!(exit_status(&Error::NuOutOfRange(2.0)), 2);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
