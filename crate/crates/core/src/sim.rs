//! Monte Carlo comparison of the threshold policy against the open-loop baseline.
//!
//! Each trial draws a plug-in offset, an initial charging demand and one
//! generation trajectory, then plays both policies on that same trajectory.
//! Trial `i` of sweep point `k` uses a ChaCha8 generator seeded with the
//! configured seed on stream `(k << 32) | i`, so results do not depend on
//! how trials are scheduled across threads. Draw order within a trial:
//! plug-in (uniform integer), demand (one uniform), then one standard normal
//! per interval.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::format::sig9;
use crate::model::{DpState, Scenario};
use crate::policy::{baseline_decide, decide, Decision};
use crate::solver::{solve, SolverOptions, ThresholdTable, ValueTable};

/// Largest unmet demand still counted as complete.
pub const COMPLETION_TOL: f64 = 1e-9;

const Z_95: f64 = 1.959_963_984_540_054;

/// Distribution of the battery-side charging demand at plug-in.
#[derive(Clone, Debug, PartialEq)]
pub enum SreqDist {
    /// Normal truncated to `(0, eta * T * v_bar]`.
    TruncatedNormal { mean: f64, sd: f64 },
    /// Uniform draw from a list of observed demands, capped at `eta * T * v_bar`.
    Empirical(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub n_trials: usize,
    pub seed: u64,
    pub s_req: SreqDist,
    /// Horizon length in intervals.
    pub horizon: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub r: Vec<f64>,
    pub opt: Vec<Decision>,
    pub base: Vec<Decision>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub plugin: usize,
    /// Demand at plug-in, on the charger-input side.
    pub s_req: f64,
    pub surplus_opt: f64,
    pub surplus_base: f64,
    pub y_t_opt: f64,
    pub y_t_base: f64,
    pub trace: Option<Trace>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean_opt: f64,
    pub mean_base: f64,
    /// `100 (mean_opt - mean_base) / |mean_base|`.
    pub gap_pct: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimOutcome {
    pub trials: Vec<TrialResult>,
    pub summary: Summary,
}

impl SimOutcome {
    /// CSV with header `trial,policy,surplus_usd,y_T_kwh`, two rows per trial.
    pub fn results_csv(&self) -> String {
        let mut out = String::from("trial,policy,surplus_usd,y_T_kwh\n");
        for tr in &self.trials {
            let _ = writeln!(out, "{},threshold,{},{}", tr.trial, sig9(tr.surplus_opt), sig9(tr.y_t_opt));
            let _ = writeln!(out, "{},baseline,{},{}", tr.trial, sig9(tr.surplus_base), sig9(tr.y_t_base));
        }
        out
    }
}

/// Solved policy for one plug-in offset.
#[derive(Clone, Debug)]
pub struct PlannedHorizon {
    pub scenario: Scenario,
    pub table: ValueTable,
    pub thresholds: ThresholdTable,
}

/// Solves every admissible plug-in offset for the configured horizon.
pub fn plan_horizons(config: &Config, exec: Execution) -> Result<Vec<PlannedHorizon>> {
    let horizon = config.sim.horizon;
    let opts = SolverOptions {
        execution: exec,
        ..config.solver.clone()
    };
    exec.try_map(config.plugin_count(horizon), |plugin| {
        let scenario = config.scenario(plugin, horizon)?;
        let (table, thresholds) = solve(&scenario, &opts)?;
        Ok(PlannedHorizon {
            scenario,
            table,
            thresholds,
        })
    })
}

/// Runs `config.sim.n_trials` trials as sweep point `point`.
pub fn run_trials(config: &Config, point: u32, exec: Execution, keep_traces: bool) -> Result<SimOutcome> {
    let plans = plan_horizons(config, exec)?;
    run_planned(config, &plans, point, exec, keep_traces)
}

/// Like [`run_trials`] with the solves already done.
pub fn run_planned(
    config: &Config,
    plans: &[PlannedHorizon],
    point: u32,
    exec: Execution,
    keep_traces: bool,
) -> Result<SimOutcome> {
    let sim = &config.sim;
    if plans.is_empty() {
        return Err(Error::validation("no admissible plug-in time for this horizon"));
    }
    let trials = exec.try_map(sim.n_trials, |i| {
        let mut rng = trial_rng(sim.seed, point, i);
        play_trial(i, &mut rng, plans, &sim.s_req, keep_traces)
    })?;
    let summary = summarize(&trials);
    Ok(SimOutcome { trials, summary })
}

pub fn trial_rng(seed: u64, point: u32, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 32) | trial as u64);
    rng
}

fn sample_s_req(rng: &mut ChaCha8Rng, dist: &SreqDist, cap: f64) -> f64 {
    match dist {
        SreqDist::TruncatedNormal { mean, sd } => {
            if *sd == 0.0 {
                let _: f64 = rng.random();
                return mean.clamp(0.0, cap);
            }
            let n = Normal::new(*mean, *sd).expect("positive sd");
            let lo = n.cdf(0.0);
            let hi = n.cdf(cap);
            let u: f64 = rng.random();
            if hi - lo <= 0.0 {
                // all mass beyond the window; fall back to its nearer end
                return if *mean > cap { cap } else { 0.0 };
            }
            n.inverse_cdf(lo + u * (hi - lo)).clamp(0.0, cap)
        }
        SreqDist::Empirical(list) => {
            let u: f64 = rng.random();
            let k = ((u * list.len() as f64) as usize).min(list.len() - 1);
            list[k].clamp(0.0, cap)
        }
    }
}

fn play_trial(
    trial: usize,
    rng: &mut ChaCha8Rng,
    plans: &[PlannedHorizon],
    s_req_dist: &SreqDist,
    keep_traces: bool,
) -> Result<TrialResult> {
    let plugin = rng.random_range(0..plans.len());
    let plan = &plans[plugin];
    let sc = &plan.scenario;
    let horizon = sc.horizon();
    let eta = sc.charger.eta;
    let cap = sc.max_deliverable();
    let battery = sample_s_req(rng, s_req_dist, eta * cap);
    let s_req = sc.grid_demand(battery).min(cap);
    let r: Vec<f64> = (0..horizon)
        .map(|t| {
            let z: f64 = rng.sample(StandardNormal);
            (sc.der.mu[t] + sc.der.sigma[t] * z).max(0.0)
        })
        .collect();

    let gamma = sc.tariff.gamma;
    let (mut y_opt, mut y_base) = (s_req, s_req);
    let (mut surplus_opt, mut surplus_base) = (0.0, 0.0);
    let mut trace = keep_traces.then(|| Trace {
        r: r.clone(),
        opt: Vec::with_capacity(horizon),
        base: Vec::with_capacity(horizon),
    });
    for (t, &rt) in r.iter().enumerate() {
        let opt = decide(&DpState { t, y: y_opt, r: rt }, &plan.thresholds, &plan.table, sc)?;
        let base = baseline_decide(&DpState { t, y: y_base, r: rt }, sc);
        surplus_opt += opt.stage_reward(sc, t);
        surplus_base += base.stage_reward(sc, t);
        y_opt = (y_opt - opt.v).max(0.0);
        y_base = (y_base - base.v).max(0.0);
        if let Some(tr) = trace.as_mut() {
            tr.opt.push(opt);
            tr.base.push(base);
        }
    }
    surplus_opt -= gamma * y_opt;
    surplus_base -= gamma * y_base;
    if y_opt > COMPLETION_TOL {
        return Err(Error::numerical(format!(
            "trial {trial}: threshold policy left {y_opt:.3e} kWh of a {s_req:.6} kWh demand unmet"
        )));
    }
    Ok(TrialResult {
        trial,
        plugin,
        s_req,
        surplus_opt,
        surplus_base,
        y_t_opt: y_opt,
        y_t_base: y_base,
        trace,
    })
}

/// Means, gap and a 95% normal-approximation interval from paired differences.
pub fn summarize(trials: &[TrialResult]) -> Summary {
    let n = trials.len();
    let nf = n as f64;
    let mean_opt = trials.iter().map(|t| t.surplus_opt).sum::<f64>() / nf;
    let mean_base = trials.iter().map(|t| t.surplus_base).sum::<f64>() / nf;
    let mean_diff = mean_opt - mean_base;
    let var = if n > 1 {
        trials
            .iter()
            .map(|t| (t.surplus_opt - t.surplus_base - mean_diff).powi(2))
            .sum::<f64>()
            / (nf - 1.0)
    } else {
        0.0
    };
    let half = Z_95 * (var / nf).sqrt();
    let scale = if mean_base != 0.0 { 100.0 / mean_base.abs() } else { 0.0 };
    let (gap_pct, ci95_lo, ci95_hi) = if mean_base == 0.0 && mean_diff != 0.0 {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        (mean_diff * scale, (mean_diff - half) * scale, (mean_diff + half) * scale)
    };
    Summary {
        n,
        mean_opt,
        mean_base,
        gap_pct,
        ci95_lo,
        ci95_hi,
    }
}

/// Swept parameter of a [`SweepRow`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    /// Horizon length in hours.
    Horizon,
    /// Retail minus sell rate, $/kWh.
    PriceGap,
}

impl SweepParam {
    pub fn label(self) -> &'static str {
        match self {
            SweepParam::Horizon => "horizon",
            SweepParam::PriceGap => "price_gap",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: f64,
    pub summary: Summary,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// Points rejected by validation, with the reason.
    pub skipped: Vec<(f64, String)>,
}

impl SweepOutcome {
    /// CSV with header `param,value,mean_opt,mean_base,gap_pct,ci95_lo,ci95_hi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,value,mean_opt,mean_base,gap_pct,ci95_lo,ci95_hi\n");
        for row in &self.rows {
            let s = &row.summary;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                row.param.label(),
                sig9(row.value),
                sig9(s.mean_opt),
                sig9(s.mean_base),
                sig9(s.gap_pct),
                sig9(s.ci95_lo),
                sig9(s.ci95_hi)
            );
        }
        out
    }
}

/// One run of trials per horizon length (hours), sweep point `k` on stream block `k`.
pub fn sweep_horizon(config: &Config, hours: &[f64], exec: Execution) -> Result<SweepOutcome> {
    let mut out = SweepOutcome::default();
    for (k, &h) in hours.iter().enumerate() {
        let horizon = config.intervals(h)?;
        if horizon == 0 || horizon > config.intervals_per_day() {
            return Err(Error::validation(format!("horizon {h} h does not fit in one day")));
        }
        let cfg = config.with_horizon(horizon);
        let sim = run_trials(&cfg, k as u32, exec, false)?;
        out.rows.push(SweepRow {
            param: SweepParam::Horizon,
            value: h,
            summary: sim.summary,
        });
    }
    Ok(out)
}

/// One run of trials per price gap; gaps that break the price chain are skipped.
pub fn sweep_price_gap(config: &Config, gaps: &[f64], exec: Execution) -> Result<SweepOutcome> {
    let mut out = SweepOutcome::default();
    for (k, &gap) in gaps.iter().enumerate() {
        let cfg = config.with_price_gap(gap);
        if let Err(e) = cfg.default_scenario() {
            match e {
                Error::Validation(msg) => {
                    out.skipped.push((gap, msg));
                    continue;
                }
                other => return Err(other),
            }
        }
        let sim = run_trials(&cfg, k as u32, exec, false)?;
        out.rows.push(SweepRow {
            param: SweepParam::PriceGap,
            value: gap,
            summary: sim.summary,
        });
    }
    Ok(out)
}
