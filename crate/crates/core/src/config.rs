//! Configuration files.
//!
//! A config describes one household over a 24-hour TOU day: prices, charger,
//! devices and a per-interval generation profile. A charging horizon is a
//! window of that day starting at a plug-in time; [`Config::scenario`] cuts
//! the window out and labels its intervals off1/on/off2.
//!
//! ```toml
//! [tariff]
//! pi_on_plus = 0.49
//! pi_off_plus = 0.39
//! pi_on_minus = 0.31
//! pi_off_minus = 0.21
//! gamma = 1.0
//! on_peak = "16:00-21:00"   # default
//! interval_hours = 1.0      # default
//!
//! [[devices]]
//! alpha = 0.6
//! beta = 0.5
//! d_bar = 2.0
//! ```
//!
//! See `configs/default.toml` for every section.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{validate, ChargerModel, DerModel, DeviceModel, Period, Scenario, TariffSchedule};
use crate::sim::{SimConfig, SreqDist};
use crate::solver::SolverOptions;

/// The synthetic household shipped with the crate.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

const HOURS_PER_DAY: f64 = 24.0;
const MIN_INTERVAL_HOURS: f64 = 0.25;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    tariff: RawTariff,
    #[serde(default)]
    charger: RawCharger,
    #[serde(default)]
    devices: Vec<DeviceModel>,
    #[serde(default)]
    der: RawDer,
    #[serde(default)]
    sim: RawSim,
    #[serde(default)]
    solver: RawSolver,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTariff {
    pi_on_plus: f64,
    pi_on_minus: f64,
    pi_off_plus: f64,
    pi_off_minus: f64,
    gamma: f64,
    #[serde(default)]
    pi_zero: f64,
    #[serde(default = "default_on_peak")]
    on_peak: String,
    #[serde(default = "default_interval_hours")]
    interval_hours: f64,
    #[serde(default)]
    relaxed_a1: bool,
}

fn default_on_peak() -> String {
    "16:00-21:00".into()
}

fn default_interval_hours() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawCharger {
    v_bar_kw: f64,
    eta: f64,
}

impl Default for RawCharger {
    fn default() -> Self {
        RawCharger { v_bar_kw: 3.6, eta: 1.0 }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawDer {
    /// Explicit per-interval means over the day, starting at 00:00.
    mu: Option<Vec<f64>>,
    sigma: Option<Vec<f64>>,
    solar_peak_kw: f64,
    sunrise: String,
    sunset: String,
    sigma_ratio: f64,
}

impl Default for RawDer {
    fn default() -> Self {
        RawDer {
            mu: None,
            sigma: None,
            solar_peak_kw: 0.0,
            sunrise: "06:00".into(),
            sunset: "18:00".into(),
            sigma_ratio: 0.0,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSim {
    day_start: String,
    plugin: String,
    horizon_hours: f64,
    n_trials: usize,
    seed: u64,
    s_req_mean: f64,
    s_req_sd: f64,
    s_req: Option<Vec<f64>>,
}

impl Default for RawSim {
    fn default() -> Self {
        RawSim {
            day_start: "08:00".into(),
            plugin: "14:00".into(),
            horizon_hours: 10.0,
            n_trials: 20_000,
            seed: 0,
            s_req_mean: 10.0,
            s_req_sd: 6.0,
            s_req: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSolver {
    grid_points_per_vbar: usize,
    quadrature_nodes: usize,
}

impl Default for RawSolver {
    fn default() -> Self {
        let d = SolverOptions::default();
        RawSolver {
            grid_points_per_vbar: d.grid_points_per_vbar,
            quadrature_nodes: d.quadrature_nodes,
        }
    }
}

/// Prices and the on-peak window on the day clock.
#[derive(Clone, Debug, PartialEq)]
pub struct DayTariff {
    pub pi_on_plus: f64,
    pub pi_on_minus: f64,
    pub pi_off_plus: f64,
    pub pi_off_minus: f64,
    pub pi_zero: f64,
    pub gamma: f64,
    pub interval_hours: f64,
    pub relaxed_a1: bool,
    /// On-peak intervals `[start, end)` counted from midnight.
    pub on_peak: (usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub tariff: DayTariff,
    pub charger: ChargerModel,
    pub devices: Vec<DeviceModel>,
    /// Generation profile, one entry per interval from midnight.
    pub day_der: DerModel,
    /// First interval of the plug-in window (from midnight).
    pub day_start: usize,
    /// Plug-in used by single-horizon commands, as an offset from `day_start`.
    pub plugin: usize,
    pub sim: SimConfig,
    pub solver: SolverOptions,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Config::from_toml_str(&text)
    }

    pub fn paper_default() -> Config {
        Config::from_toml_str(DEFAULT_CONFIG).expect("bundled default config is valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Config> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(0);
            Error::Parse {
                line,
                message: e.message().trim().to_string(),
            }
        })?;
        build(raw)
    }

    pub fn intervals_per_day(&self) -> usize {
        (HOURS_PER_DAY / self.tariff.interval_hours).round() as usize
    }

    /// Number of admissible plug-in offsets for a horizon of `horizon` intervals.
    pub fn plugin_count(&self, horizon: usize) -> usize {
        self.intervals_per_day().saturating_sub(horizon) + 1
    }

    /// Converts a horizon length in hours to intervals.
    pub fn intervals(&self, hours: f64) -> Result<usize> {
        to_intervals(hours, self.tariff.interval_hours, "horizon_hours")
    }

    /// Validated scenario for a horizon of `horizon` intervals starting
    /// `plugin` intervals after `day_start`.
    pub fn scenario(&self, plugin: usize, horizon: usize) -> Result<Scenario> {
        let per_day = self.intervals_per_day();
        if horizon == 0 {
            return Err(Error::validation("horizon must contain at least one interval"));
        }
        if plugin + horizon > per_day {
            return Err(Error::validation(format!(
                "horizon of {horizon} intervals starting at offset {plugin} leaves the {per_day}-interval day"
            )));
        }
        let (on_start, on_end) = self.tariff.on_peak;
        let mut periods = Vec::with_capacity(horizon);
        let mut mu = Vec::with_capacity(horizon);
        let mut sigma = Vec::with_capacity(horizon);
        let mut seen_on = false;
        for k in 0..horizon {
            let clock = (self.day_start + plugin + k) % per_day;
            let period = if clock >= on_start && clock < on_end {
                seen_on = true;
                Period::On
            } else if seen_on {
                Period::Off2
            } else {
                Period::Off1
            };
            periods.push(period);
            mu.push(self.day_der.mu[clock]);
            sigma.push(self.day_der.sigma[clock]);
        }
        let t = &self.tariff;
        let mut tariff = TariffSchedule::from_counts(
            0,
            0,
            0,
            t.pi_off_minus,
            t.pi_on_minus,
            t.pi_off_plus,
            t.pi_on_plus,
            t.gamma,
        )
        .with_periods(periods);
        tariff.pi_zero = t.pi_zero;
        tariff.interval_hours = t.interval_hours;
        tariff.relaxed_a1 = t.relaxed_a1;
        validate(tariff, self.charger, self.devices.clone(), DerModel { mu, sigma })
    }

    /// Scenario at the configured plug-in and horizon.
    pub fn default_scenario(&self) -> Result<Scenario> {
        self.scenario(self.plugin, self.sim.horizon)
    }

    /// Same config with both sell rates set `gap` below the retail rates.
    pub fn with_price_gap(&self, gap: f64) -> Config {
        let mut out = self.clone();
        out.tariff.pi_on_minus = self.tariff.pi_on_plus - gap;
        out.tariff.pi_off_minus = self.tariff.pi_off_plus - gap;
        out
    }

    /// Same config with a different simulation horizon (in intervals).
    pub fn with_horizon(&self, horizon: usize) -> Config {
        let mut out = self.clone();
        out.sim.horizon = horizon;
        out
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn to_intervals(hours: f64, interval_hours: f64, what: &str) -> Result<usize> {
    let n = hours / interval_hours;
    if !(n >= 0.0) || (n - n.round()).abs() > 1e-9 {
        return Err(Error::validation(format!(
            "{what} = {hours} is not a multiple of interval_hours = {interval_hours}"
        )));
    }
    Ok(n.round() as usize)
}

/// Parses `HH:MM` into hours after midnight.
fn parse_clock(s: &str, what: &str) -> Result<f64> {
    let bad = || Error::validation(format!("{what}: expected HH:MM, got {s:?}"));
    let (h, m) = s.trim().split_once(':').ok_or_else(bad)?;
    let h: u32 = h.parse().map_err(|_| bad())?;
    let m: u32 = m.parse().map_err(|_| bad())?;
    if m >= 60 || h * 60 + m > 24 * 60 {
        return Err(bad());
    }
    Ok(h as f64 + m as f64 / 60.0)
}

fn clock_interval(s: &str, interval_hours: f64, what: &str) -> Result<usize> {
    to_intervals(parse_clock(s, what)?, interval_hours, what)
}

/// Clear-sky half-sine between sunrise and sunset, sampled at interval midpoints.
fn solar_profile(der: &RawDer, interval_hours: f64, per_day: usize) -> Result<DerModel> {
    let rise = parse_clock(&der.sunrise, "sunrise")?;
    let set = parse_clock(&der.sunset, "sunset")?;
    if !(set > rise) {
        return Err(Error::validation("sunset must be later than sunrise"));
    }
    if !(der.solar_peak_kw >= 0.0) || !(der.sigma_ratio >= 0.0) {
        return Err(Error::validation("solar_peak_kw and sigma_ratio must be nonnegative"));
    }
    let mu: Vec<f64> = (0..per_day)
        .map(|k| {
            let h = (k as f64 + 0.5) * interval_hours;
            if h <= rise || h >= set {
                0.0
            } else {
                der.solar_peak_kw * interval_hours * (std::f64::consts::PI * (h - rise) / (set - rise)).sin()
            }
        })
        .collect();
    let sigma = mu.iter().map(|m| der.sigma_ratio * m).collect();
    Ok(DerModel { mu, sigma })
}

fn build(raw: RawConfig) -> Result<Config> {
    let ih = raw.tariff.interval_hours;
    if !(MIN_INTERVAL_HOURS..=HOURS_PER_DAY).contains(&ih) {
        return Err(Error::validation(format!(
            "interval_hours must lie in [{MIN_INTERVAL_HOURS}, {HOURS_PER_DAY}]"
        )));
    }
    let per_day = to_intervals(HOURS_PER_DAY, ih, "24 hours")?;

    let (start, end) = raw
        .tariff
        .on_peak
        .split_once('-')
        .ok_or_else(|| Error::validation("on_peak: expected HH:MM-HH:MM"))?;
    let on_peak = (
        clock_interval(start, ih, "on_peak start")?,
        clock_interval(end, ih, "on_peak end")?,
    );
    if on_peak.0 > on_peak.1 {
        return Err(Error::validation("on_peak must not wrap past midnight"));
    }

    let day_der = match (raw.der.mu.clone(), raw.der.sigma.clone()) {
        (Some(mu), Some(sigma)) => {
            if mu.len() != per_day || sigma.len() != per_day {
                return Err(Error::validation(format!(
                    "der mu/sigma must have {per_day} entries, one per interval from 00:00"
                )));
            }
            DerModel { mu, sigma }
        }
        (None, None) => solar_profile(&raw.der, ih, per_day)?,
        _ => return Err(Error::validation("der mu and sigma must be given together")),
    };
    if day_der.sigma.iter().any(|s| !(*s >= 0.0)) {
        return Err(Error::validation("sigma must be nonnegative"));
    }

    let s = &raw.sim;
    let day_start = clock_interval(&s.day_start, ih, "day_start")? % per_day;
    let plugin_clock = clock_interval(&s.plugin, ih, "plugin")? % per_day;
    let plugin = (plugin_clock + per_day - day_start) % per_day;
    let horizon = to_intervals(s.horizon_hours, ih, "horizon_hours")?;
    if horizon == 0 || horizon > per_day {
        return Err(Error::validation(format!(
            "horizon_hours must give between 1 and {per_day} intervals"
        )));
    }
    if s.n_trials == 0 {
        return Err(Error::validation("n_trials must be at least 1"));
    }
    let s_req = match &s.s_req {
        Some(list) => {
            if list.is_empty() || list.iter().any(|x| !(*x >= 0.0)) {
                return Err(Error::validation("s_req list must be nonempty and nonnegative"));
            }
            SreqDist::Empirical(list.clone())
        }
        None => {
            if !(s.s_req_sd >= 0.0) {
                return Err(Error::validation("s_req_sd must be nonnegative"));
            }
            SreqDist::TruncatedNormal {
                mean: s.s_req_mean,
                sd: s.s_req_sd,
            }
        }
    };

    let solver = SolverOptions {
        grid_points_per_vbar: raw.solver.grid_points_per_vbar,
        quadrature_nodes: raw.solver.quadrature_nodes,
        ..SolverOptions::default()
    };
    if solver.grid_points_per_vbar < 4 {
        return Err(Error::validation("grid_points_per_vbar must be at least 4"));
    }
    if solver.quadrature_nodes == 0 {
        return Err(Error::validation("quadrature_nodes must be positive"));
    }

    let config = Config {
        tariff: DayTariff {
            pi_on_plus: raw.tariff.pi_on_plus,
            pi_on_minus: raw.tariff.pi_on_minus,
            pi_off_plus: raw.tariff.pi_off_plus,
            pi_off_minus: raw.tariff.pi_off_minus,
            pi_zero: raw.tariff.pi_zero,
            gamma: raw.tariff.gamma,
            interval_hours: ih,
            relaxed_a1: raw.tariff.relaxed_a1,
            on_peak,
        },
        charger: ChargerModel {
            v_bar: raw.charger.v_bar_kw * ih,
            eta: raw.charger.eta,
        },
        devices: raw.devices,
        day_der,
        day_start,
        plugin,
        sim: SimConfig {
            n_trials: s.n_trials,
            seed: s.seed,
            s_req,
            horizon,
        },
        solver,
    };
    // Price chain, charger and devices are checked on the configured horizon.
    config.default_scenario()?;
    Ok(config)
}
