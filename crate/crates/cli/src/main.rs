//! `thzcav`: batch front-end for the corridor outage / flow-optimization
//! library.
//!
//! Commands:
//!   outage-sweep  analytic (and optional Monte-Carlo) outage vs mu or velocity
//!   freq-sweep    optimal density and data-limited speed vs carrier frequency
//!   optimize      solve the flow-maximization problem, optionally swept
//!   validate      run the self-check suite, one JSON verdict per line
//!   absorption    dump the molecular absorption coefficient k(f)
//!
//! Sweeps are CSV with fixed headers; `validate` emits JSON lines. All output
//! is byte-reproducible for a fixed seed. Exit codes: 0 success, 1 usage or
//! config error (or failed validation), 2 infeasible problem.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{error::ErrorKind, Parser, Subcommand};

use thzcav::absorption::{absorption_coefficient, load_line_catalog, GasMixture};
use thzcav::montecarlo::{simulate_outage, McConfig};
use thzcav::optimizer::{optimize_density, solve_p1, ActiveConstraint};
use thzcav::scenario::{load_config_with_gas, reference_scenario};
use thzcav::validation::run_validation;
use thzcav::{link, stats, CorridorScenario, Error};

/// Sweep specification VAR:START:STOP:POINTS[:log].
#[derive(Debug, Clone)]
struct SweepSpec {
    var: String,
    start: f64,
    stop: f64,
    points: usize,
    log: bool,
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 && parts.len() != 5 {
            return Err(format!(
                "expected VAR:START:STOP:POINTS[:log], got \"{s}\""
            ));
        }
        let log = match parts.get(4) {
            None => false,
            Some(&"log") => true,
            Some(other) => return Err(format!("unknown sweep modifier \"{other}\"")),
        };
        let num = |t: &str, name: &str| {
            t.parse::<f64>()
                .map_err(|_| format!("{name} must be a number, got \"{t}\""))
        };
        let start = num(parts[1], "START")?;
        let stop = num(parts[2], "STOP")?;
        let points: usize = parts[3]
            .parse()
            .map_err(|_| format!("POINTS must be an integer, got \"{}\"", parts[3]))?;
        if points == 0 {
            return Err("POINTS must be >= 1".into());
        }
        if points > 1 && !(start < stop) {
            return Err(format!("need START < STOP, got {start} >= {stop}"));
        }
        if log && !(start > 0.0) {
            return Err("log spacing needs START > 0".into());
        }
        Ok(Self {
            var: parts[0].to_string(),
            start,
            stop,
            points,
            log,
        })
    }
}

impl SweepSpec {
    fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / n;
                if self.log {
                    (self.start.ln() + t * (self.stop / self.start).ln()).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }

    fn expect_var(&self, allowed: &[&str]) -> Result<(), Error> {
        if allowed.contains(&self.var.as_str()) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "sweep variable \"{}\" not supported here; choose one of {}",
                self.var,
                allowed.join(", ")
            )))
        }
    }
}

#[derive(Parser)]
#[command(
    name = "thzcav",
    version,
    about = "Outage analysis and flow optimization for a THz base-station corridor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Worst-case rate-outage probability swept over mu or velocity.
    OutageSweep {
        /// Scenario config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Sweep VAR:START:STOP:POINTS[:log] with VAR in {mu, velocity}.
        #[arg(long)]
        sweep: SweepSpec,
        /// CAV velocity [m/s] when sweeping mu.
        #[arg(long, default_value_t = 20.0)]
        velocity: f64,
        /// Also run a Monte-Carlo estimate with this many trials per point.
        #[arg(long)]
        mc: Option<u64>,
        /// Base RNG seed; point i uses seed + i.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal density and data-limited speed swept over carrier frequency.
    FreqSweep {
        #[arg(long)]
        config: PathBuf,
        /// Spectral line catalog (CSV).
        #[arg(long)]
        catalog: PathBuf,
        /// Sweep frequency:START:STOP:POINTS[:log], frequencies in Hz.
        #[arg(long)]
        sweep: SweepSpec,
        /// Accepted for interface uniformity; this command is deterministic.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the flow-maximization problem; optionally sweep a constraint.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        /// Optional sweep over o_th, epsilon, r_th, q_min, or v_max.
        #[arg(long)]
        sweep: Option<SweepSpec>,
        /// Accepted for interface uniformity; this command is deterministic.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the self-check suite; one JSON verdict per line.
    Validate {
        /// Scenario config (built-in reference scenario when absent).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Monte-Carlo trials for the sampling-based checks.
        #[arg(long, default_value_t = 1_000_000)]
        mc: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Molecular absorption coefficient k(f) over a frequency sweep.
    Absorption {
        #[arg(long)]
        catalog: PathBuf,
        /// Optional config supplying the [absorption] gas conditions.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Sweep frequency:START:STOP:POINTS[:log], frequencies in Hz.
        #[arg(long)]
        sweep: SweepSpec,
        /// Accepted for interface uniformity; this command is deterministic.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Shortest round-trip float formatting: deterministic and locale-independent.
fn num(x: f64) -> String {
    format!("{x}")
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_outage_sweep(
    scenario: &CorridorScenario,
    sweep: &SweepSpec,
    velocity: f64,
    mc: Option<u64>,
    seed: u64,
    out: Option<&Path>,
) -> Result<u8, Error> {
    sweep.expect_var(&["mu", "velocity"])?;
    let mut text = String::from("variable,value,velocity,p_out,p_hat,std_err\n");
    for (i, x) in sweep.values().into_iter().enumerate() {
        let (sc, v) = if sweep.var == "mu" {
            (scenario.with_mu(x), velocity)
        } else {
            (scenario.clone(), x)
        };
        sc.validate()?;
        let position = link::worst_case_position(&sc)?;
        let analytic = stats::outage_probability(&sc, position, v)?.p_out;
        let (p_hat, std_err) = match mc {
            Some(trials) => {
                let cfg = McConfig::new(trials, seed.wrapping_add(i as u64));
                let est = simulate_outage(&sc, position, v, &cfg)?;
                (num(est.p_hat), num(est.std_err))
            }
            None => (String::new(), String::new()),
        };
        writeln!(
            text,
            "{},{},{},{},{p_hat},{std_err}",
            sweep.var,
            num(x),
            num(v),
            num(analytic)
        )
        .expect("string write");
    }
    emit(out, &text)?;
    Ok(0)
}

fn cmd_freq_sweep(
    scenario: &CorridorScenario,
    gas: &GasMixture,
    catalog: &Path,
    sweep: &SweepSpec,
    out: Option<&Path>,
) -> Result<u8, Error> {
    sweep.expect_var(&["frequency"])?;
    let lines = load_line_catalog(catalog)?;
    let mut text = String::from("frequency,k_abs,mu_star,v_data\n");
    for f in sweep.values() {
        let (k, _) = absorption_coefficient(&lines, gas, f)?;
        let mut sc = scenario.clone();
        sc.frequency = f;
        sc.k_abs = k;
        let (mu_star, v_data) = match optimize_density(&sc) {
            Ok((mu, vd, _)) => (num(mu), num(vd)),
            Err(Error::Infeasible(_)) => (String::new(), String::new()),
            Err(e) => return Err(e),
        };
        writeln!(text, "{},{},{mu_star},{v_data}", num(f), num(k)).expect("string write");
    }
    emit(out, &text)?;
    Ok(0)
}

fn optimize_report(r: &thzcav::optimizer::OptimizationResult) -> String {
    let mut text = String::new();
    let status = if r.active_constraint == ActiveConstraint::Infeasible {
        "infeasible"
    } else {
        "optimal"
    };
    writeln!(text, "status = {status}").unwrap();
    writeln!(text, "mu_star = {}", num(r.mu_star)).unwrap();
    writeln!(text, "v_star = {}", num(r.v_star)).unwrap();
    writeln!(text, "q_star = {}", num(r.q_star)).unwrap();
    match r.v_data {
        Some(vd) => writeln!(text, "v_data = {}", num(vd)).unwrap(),
        None => writeln!(text, "v_data =").unwrap(),
    }
    writeln!(text, "v_safe = {}", num(r.v_safe)).unwrap();
    writeln!(text, "v_flow = {}", num(r.v_flow)).unwrap();
    writeln!(text, "v_max = {}", num(r.v_max)).unwrap();
    writeln!(text, "active_constraint = {}", r.active_constraint).unwrap();
    if let Some(reason) = &r.reason {
        writeln!(text, "reason = {reason}").unwrap();
    }
    text
}

fn cmd_optimize(
    scenario: &CorridorScenario,
    sweep: Option<&SweepSpec>,
    out: Option<&Path>,
) -> Result<u8, Error> {
    let Some(sweep) = sweep else {
        let r = solve_p1(scenario)?;
        emit(out, &optimize_report(&r))?;
        return Ok(if r.active_constraint == ActiveConstraint::Infeasible {
            2
        } else {
            0
        });
    };
    sweep.expect_var(&["o_th", "epsilon", "r_th", "q_min", "v_max"])?;
    let mut text =
        String::from("variable,value,mu_star,v_star,q_star,active_constraint\n");
    for x in sweep.values() {
        let mut sc = scenario.clone();
        match sweep.var.as_str() {
            "o_th" => sc.traffic.o_th = x,
            "epsilon" => sc.traffic.epsilon = x,
            "r_th" => sc.traffic.r_th = x,
            "q_min" => sc.traffic.q_min = x,
            "v_max" => sc.traffic.v_max = x,
            _ => unreachable!(),
        }
        let r = solve_p1(&sc)?;
        if r.active_constraint == ActiveConstraint::Infeasible {
            writeln!(text, "{},{},,,,infeasible", sweep.var, num(x)).expect("string write");
        } else {
            writeln!(
                text,
                "{},{},{},{},{},{}",
                sweep.var,
                num(x),
                num(r.mu_star),
                num(r.v_star),
                num(r.q_star),
                r.active_constraint
            )
            .expect("string write");
        }
    }
    emit(out, &text)?;
    Ok(0)
}

fn cmd_validate(
    scenario: &CorridorScenario,
    trials: u64,
    seed: u64,
    out: Option<&Path>,
) -> Result<u8, Error> {
    let results = run_validation(scenario, trials, seed)?;
    let mut text = String::new();
    let mut all_pass = true;
    for r in &results {
        all_pass &= r.passed();
        let line = serde_json::to_string(r)
            .map_err(|e| Error::Config(format!("serialization failed: {e}")))?;
        writeln!(text, "{line}").expect("string write");
    }
    emit(out, &text)?;
    Ok(if all_pass { 0 } else { 1 })
}

fn cmd_absorption(
    catalog: &Path,
    gas: &GasMixture,
    sweep: &SweepSpec,
    out: Option<&Path>,
) -> Result<u8, Error> {
    sweep.expect_var(&["frequency"])?;
    let lines = load_line_catalog(catalog)?;
    let mut text = String::from("frequency,k\n");
    for f in sweep.values() {
        let (k, _) = absorption_coefficient(&lines, gas, f)?;
        writeln!(text, "{},{}", num(f), num(k)).expect("string write");
    }
    emit(out, &text)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::OutageSweep {
            config,
            sweep,
            velocity,
            mc,
            seed,
            out,
        } => {
            let (scenario, _) = load_config_with_gas(config)?;
            cmd_outage_sweep(&scenario, sweep, *velocity, *mc, *seed, out.as_deref())
        }
        Command::FreqSweep {
            config,
            catalog,
            sweep,
            seed: _,
            out,
        } => {
            let (scenario, gas) = load_config_with_gas(config)?;
            cmd_freq_sweep(&scenario, &gas, catalog, sweep, out.as_deref())
        }
        Command::Optimize {
            config,
            sweep,
            seed: _,
            out,
        } => {
            let (scenario, _) = load_config_with_gas(config)?;
            cmd_optimize(&scenario, sweep.as_ref(), out.as_deref())
        }
        Command::Validate {
            config,
            mc,
            seed,
            out,
        } => {
            let scenario = match config {
                Some(path) => load_config_with_gas(path)?.0,
                None => reference_scenario(),
            };
            cmd_validate(&scenario, *mc, *seed, out.as_deref())
        }
        Command::Absorption {
            catalog,
            config,
            sweep,
            seed: _,
            out,
        } => {
            let gas = match config {
                Some(path) => load_config_with_gas(path)?.1,
                None => GasMixture::default(),
            };
            cmd_absorption(catalog, &gas, sweep, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Infeasible(_) => 2,
                _ => 1,
            })
        }
    }
}
