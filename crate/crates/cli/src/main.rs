//! `nemev`: solve, query and simulate the procrastination-threshold EV policy.
//!
//! Exit status is 0 on success, 1 for invalid input (including usage errors)
//! and 2 when a numerical invariant is breached.

mod manifest;
mod output;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser, Subcommand, ValueEnum};
use serde_json::json;

use nemev::config::{Config, DEFAULT_CONFIG};
use nemev::oracle::{oracle_solve, oracle_thresholds, OracleConfig};
use nemev::sim::{run_trials, sweep_horizon, sweep_price_gap, SreqDist};
use nemev::solver::solve;
use nemev::{decide, DpState, Error, Execution, Result};

use manifest::RunManifest;
use output::{decision_json, num, nums, summary_json, to_line, write_file};

/// Environment variable naming the output directory when `--out` is absent.
const OUT_DIR_ENV: &str = "NEMEV_OUT_DIR";

#[derive(Parser)]
#[command(name = "nemev", version, about = "NEM time-of-use EV charging and flexible load co-optimization")]
struct Cli {
    /// TOML config file; the bundled synthetic household when omitted.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $NEMEV_OUT_DIR, then ./out).
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured horizon; writes thresholds.csv and value_table.csv.
    Solve,
    /// Print the optimal decision at one state as JSON.
    Decide {
        #[arg(long)]
        t: usize,
        /// Remaining charging demand (kWh).
        #[arg(long)]
        y: f64,
        /// Realized generation (kWh).
        #[arg(long)]
        r: f64,
    },
    /// Brute-force the configured horizon and report empirical thresholds.
    Oracle {
        #[arg(long, default_value_t = 0.01)]
        action_step: f64,
        #[arg(long, default_value_t = 5)]
        r_nodes: usize,
        /// Demand lattice spacing (default: the action step).
        #[arg(long)]
        y_step: Option<f64>,
        /// Initial demand for the reported expected surplus (default: the
        /// configured mean demand, capped at what the horizon can deliver).
        #[arg(long)]
        s_req: Option<f64>,
    },
    /// Monte Carlo comparison against the open-loop baseline; writes results.csv.
    Simulate {
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        horizon_hours: Option<f64>,
    },
    /// One simulation per parameter value; writes sweep.csv.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepKind,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Horizon,
    PriceGap,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            return ExitCode::from(if ok { 0 } else { 1 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn out_dir(cli_out: Option<PathBuf>) -> Result<PathBuf> {
    let dir = cli_out
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn stdout(line: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        None => DEFAULT_CONFIG.to_string(),
    };
    let mut config = Config::from_toml_str(&text)?;
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    config.solver.execution = exec;
    let dir = out_dir(cli.out)?;

    match cli.command {
        Command::Solve => cmd_solve(&config, &text, &dir),
        Command::Decide { t, y, r } => cmd_decide(&config, &text, &dir, DpState { t, y, r }),
        Command::Oracle {
            action_step,
            r_nodes,
            y_step,
            s_req,
        } => {
            let oc = OracleConfig {
                action_step,
                r_nodes,
                y_step: y_step.unwrap_or(action_step),
            };
            cmd_oracle(&config, &text, &dir, &oc, s_req)
        }
        Command::Simulate {
            trials,
            seed: seed_arg,
            horizon_hours,
        } => {
            apply_overrides(&mut config, trials, seed_arg);
            if let Some(h) = horizon_hours {
                let horizon = config.intervals(h)?;
                config = config.with_horizon(horizon);
            }
            let sim = run_trials(&config, 0, exec, false)?;
            let mut files = vec![write_file(&dir, "results.csv", &sim.results_csv())?];
            let summary = to_line(&summary_json(&sim.summary));
            files.push(write_file(&dir, "summary.json", &summary)?);
            RunManifest::new("simulate", &text, config.sim.seed, files)?.write(&dir)?;
            stdout(&summary)
        }
        Command::Sweep {
            param,
            values,
            trials,
            seed: seed_arg,
        } => {
            apply_overrides(&mut config, trials, seed_arg);
            let sweep = match param {
                SweepKind::Horizon => sweep_horizon(&config, &values, exec)?,
                SweepKind::PriceGap => sweep_price_gap(&config, &values, exec)?,
            };
            for (value, reason) in &sweep.skipped {
                eprintln!("warning: skipped {value}: {reason}");
            }
            let csv = sweep.to_csv();
            let files = vec![write_file(&dir, "sweep.csv", &csv)?];
            RunManifest::new("sweep", &text, config.sim.seed, files)?.write(&dir)?;
            stdout(&csv)
        }
    }
}

fn apply_overrides(config: &mut Config, trials: Option<usize>, seed: Option<u64>) {
    if let Some(n) = trials {
        config.sim.n_trials = n;
    }
    if let Some(s) = seed {
        config.sim.seed = s;
    }
}

fn cmd_solve(config: &Config, text: &str, dir: &Path) -> Result<()> {
    let scenario = config.default_scenario()?;
    let (table, thresholds) = solve(&scenario, &config.solver)?;
    let files = vec![
        write_file(dir, "thresholds.csv", &thresholds.to_csv())?,
        write_file(dir, "value_table.csv", &table.to_csv())?,
    ];
    RunManifest::new("solve", text, config.sim.seed, files)?.write(dir)?;
    let report = json!({
        "horizon": scenario.horizon(),
        "periods": thresholds.periods.iter().map(|p| p.label()).collect::<Vec<_>>(),
        "tau_kwh": nums(&thresholds.tau),
        "delta_kwh": nums(&thresholds.delta),
        "tau_recursion_residual": num(thresholds.tau_recursion_residual),
        "delta_recursion_residual": num(thresholds.delta_recursion_residual),
        "closed_form_residual": num(thresholds.closed_form_residual),
    });
    stdout(&to_line(&report))
}

fn cmd_decide(config: &Config, text: &str, dir: &Path, state: DpState) -> Result<()> {
    let scenario = config.default_scenario()?;
    scenario.check_state(&state, scenario.max_deliverable())?;
    let (table, thresholds) = solve(&scenario, &config.solver)?;
    let decision = decide(&state, &thresholds, &table, &scenario)?;
    let line = to_line(&decision_json(&state, &decision));
    let files = vec![write_file(dir, "decision.json", &line)?];
    RunManifest::new("decide", text, config.sim.seed, files)?.write(dir)?;
    stdout(&line)
}

fn cmd_oracle(
    config: &Config,
    text: &str,
    dir: &Path,
    oc: &OracleConfig,
    s_req: Option<f64>,
) -> Result<()> {
    let scenario = config.default_scenario()?;
    let cap = scenario.max_deliverable();
    let s_req = match s_req {
        Some(s) => s,
        None => {
            let battery = match &config.sim.s_req {
                SreqDist::TruncatedNormal { mean, .. } => *mean,
                SreqDist::Empirical(list) => list[0],
            };
            let s = scenario.grid_demand(battery).clamp(0.0, cap);
            (s / oc.y_step).floor() * oc.y_step
        }
    };
    if !(0.0..=cap + 1e-9).contains(&s_req) {
        return Err(Error::Validation(format!("s_req = {s_req} outside [0, {cap}]")));
    }
    let sol = oracle_solve(&scenario, oc)?;
    let (tau, delta) = oracle_thresholds(&sol, &scenario);
    let report = json!({
        "expected_surplus": num(sol.expected_surplus(s_req)),
        "empirical_tau": nums(&tau),
        "empirical_delta": nums(&delta),
    });
    let line = to_line(&report);
    let files = vec![write_file(dir, "oracle.json", &line)?];
    RunManifest::new("oracle", text, config.sim.seed, files)?.write(dir)?;
    stdout(&line)
}
