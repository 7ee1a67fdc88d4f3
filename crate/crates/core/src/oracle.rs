//! Exhaustive discretized dynamic program, used to check the solver and the
//! closed-form policy. Shares nothing with them beyond the model's utility
//! and billing functions.
//!
//! Charge and consumption are restricted to multiples of `action_step`,
//! remaining demand to multiples of `y_step`, and generation to a discrete
//! support. Every stage maximizes by enumeration. Device consumptions enter
//! the stage reward only through their total, so the best split of each
//! total is tabulated once (a max-plus convolution of the device utilities).

use crate::der::DerSupport;
use crate::error::{Error, Result};
use crate::model::{nem_payment, Scenario};

pub const MAX_HORIZON: usize = 8;
pub const MAX_DEVICES: usize = 2;
/// Actions whose value is within this of the best are reported as ties.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    /// Lattice spacing of `v` and `d` (kWh).
    pub action_step: f64,
    /// Generation support points per interval: an atom at zero plus
    /// equal-probability quantiles.
    pub r_nodes: usize,
    /// Lattice spacing of remaining demand (kWh).
    pub y_step: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            action_step: 0.01,
            r_nodes: 5,
            y_step: 0.01,
        }
    }
}

/// Best action at one `(t, y, r)` with the ranges of tied optima.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleAction {
    /// Smallest optimal charge.
    pub v: f64,
    pub d: Vec<f64>,
    /// Smallest and largest optimal charge.
    pub v_range: (f64, f64),
    /// Smallest and largest optimal total consumption over all optimal charges.
    pub consumption_range: (f64, f64),
}

#[derive(Clone, Debug)]
pub struct OracleSolution {
    pub config: OracleConfig,
    pub support: DerSupport,
    /// `values[t][j]` is the optimal expected surplus-to-go at `y = j * y_step`;
    /// `values[T]` is the terminal penalty.
    values: Vec<Vec<f64>>,
    /// `actions[t][j][k]` is the optimum at support point `k`.
    actions: Vec<Vec<Vec<OracleAction>>>,
    consumption: Consumption,
    step_ratio: usize,
}

impl OracleSolution {
    pub fn horizon(&self) -> usize {
        self.actions.len()
    }

    pub fn y_len(&self) -> usize {
        self.values[0].len()
    }

    pub fn y_at(&self, j: usize) -> f64 {
        j as f64 * self.config.y_step
    }

    pub fn values(&self, t: usize) -> &[f64] {
        &self.values[t]
    }

    /// Value at `y`, linearly interpolated between lattice points.
    pub fn value(&self, t: usize, y: f64) -> f64 {
        let row = &self.values[t];
        let x = (y / self.config.y_step).clamp(0.0, (row.len() - 1) as f64);
        let j = (x.floor() as usize).min(row.len() - 2);
        let f = x - j as f64;
        row[j] * (1.0 - f) + row[j + 1] * f
    }

    /// Optimal expected total surplus from plug-in with demand `s_req`.
    pub fn expected_surplus(&self, s_req: f64) -> f64 {
        self.value(0, s_req)
    }

    pub fn action(&self, t: usize, j: usize, k: usize) -> &OracleAction {
        &self.actions[t][j][k]
    }

    /// Lattice index of `y`, if `y` lies on the lattice.
    pub fn index_of(&self, y: f64) -> Option<usize> {
        let x = y / self.config.y_step;
        let j = x.round();
        ((x - j).abs() < 1e-6 && j >= 0.0 && (j as usize) < self.y_len()).then_some(j as usize)
    }
}

/// Best split of each total consumption across the devices.
#[derive(Clone, Debug)]
struct Consumption {
    step: f64,
    /// `utility[s]`: largest total utility with total consumption `s * step`.
    utility: Vec<f64>,
    /// Per-device lattice indices attaining `utility[s]`.
    split: Vec<Vec<usize>>,
}

impl Consumption {
    fn build(scenario: &Scenario, step: f64) -> Consumption {
        let mut utility = vec![0.0];
        let mut split: Vec<Vec<usize>> = vec![Vec::new()];
        for dev in &scenario.devices {
            let n = (dev.d_bar / step + 1e-9).floor() as usize;
            let own: Vec<f64> = (0..=n).map(|i| dev.utility(i as f64 * step)).collect();
            let len = utility.len() + n;
            let mut next_u = vec![f64::NEG_INFINITY; len];
            let mut next_s = vec![Vec::new(); len];
            for (s, &u) in utility.iter().enumerate() {
                for (i, &ui) in own.iter().enumerate() {
                    if u + ui > next_u[s + i] {
                        next_u[s + i] = u + ui;
                        let mut parts = split[s].clone();
                        parts.push(i);
                        next_s[s + i] = parts;
                    }
                }
            }
            utility = next_u;
            split = next_s;
        }
        Consumption { step, utility, split }
    }

    /// Best `U(d) - P(c + sum d)` for net offset `c = v - r`, with the range of
    /// optimal totals.
    fn best(&self, c: f64, plus: f64, minus: f64, zero: f64) -> (f64, usize, usize, usize) {
        let value = |s: usize| self.utility[s] - nem_payment(c + s as f64 * self.step, plus, minus, zero);
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for s in 0..self.utility.len() {
            let q = value(s);
            if q > best {
                best = q;
                arg = s;
            }
        }
        let mut lo = arg;
        let mut hi = arg;
        for s in 0..self.utility.len() {
            if value(s) >= best - TIE_TOL {
                lo = lo.min(s);
                hi = hi.max(s);
            }
        }
        (best, arg, lo, hi)
    }
}

fn check_size(scenario: &Scenario, oc: &OracleConfig) -> Result<usize> {
    let horizon = scenario.horizon();
    if horizon > MAX_HORIZON || scenario.devices.len() > MAX_DEVICES {
        return Err(Error::OracleTooLarge(format!(
            "oracle handles at most {MAX_HORIZON} intervals and {MAX_DEVICES} devices (got {horizon} and {})",
            scenario.devices.len()
        )));
    }
    if !(oc.action_step > 0.0) || !(oc.y_step > 0.0) {
        return Err(Error::validation("oracle steps must be positive"));
    }
    if oc.r_nodes < 3 {
        return Err(Error::validation("oracle needs at least 3 generation support points"));
    }
    if oc.y_step > oc.action_step {
        return Err(Error::validation("y_step must not exceed action_step"));
    }
    let ratio = oc.action_step / oc.y_step;
    if (ratio - ratio.round()).abs() > 1e-9 {
        return Err(Error::validation("action_step must be a multiple of y_step"));
    }
    let per_vbar = scenario.v_bar() / oc.action_step;
    if (per_vbar - per_vbar.round()).abs() > 1e-6 {
        return Err(Error::validation("v_bar must be a multiple of action_step"));
    }
    Ok(ratio.round() as usize)
}

/// Solves on the scenario's generation model discretized to `r_nodes`
/// quantile points rounded to the action lattice.
pub fn oracle_solve(scenario: &Scenario, oc: &OracleConfig) -> Result<OracleSolution> {
    let support = DerSupport::quantile(&scenario.der, oc.r_nodes, Some(oc.action_step));
    oracle_solve_with_support(scenario, &support, oc)
}

/// Solves with an explicit generation support.
pub fn oracle_solve_with_support(
    scenario: &Scenario,
    support: &DerSupport,
    oc: &OracleConfig,
) -> Result<OracleSolution> {
    let step_ratio = check_size(scenario, oc)?;
    let horizon = scenario.horizon();
    if support.horizon() != horizon {
        return Err(Error::validation("generation support does not match the horizon"));
    }
    let step = oc.action_step;
    let v_steps = (scenario.v_bar() / step).round() as usize;
    let y_len = v_steps * horizon * step_ratio + 1;
    let consumption = Consumption::build(scenario, step);
    let gamma = scenario.tariff.gamma;

    let mut values = vec![Vec::new(); horizon + 1];
    values[horizon] = (0..y_len).map(|j| -gamma * j as f64 * oc.y_step).collect();
    let mut actions = vec![Vec::new(); horizon];

    for t in (0..horizon).rev() {
        let p = scenario.tariff.prices(t);
        let nodes = support.at(t);
        // stage[k][a]: best consumption given charge a * step at node k
        let stage: Vec<Vec<(f64, usize, usize, usize)>> = nodes
            .iter()
            .map(|&(r, _)| {
                (0..=v_steps)
                    .map(|a| consumption.best(a as f64 * step - r, p.plus, p.minus, scenario.tariff.pi_zero))
                    .collect()
            })
            .collect();
        let next = &values[t + 1];
        let mut row = Vec::with_capacity(y_len);
        let mut row_actions = Vec::with_capacity(y_len);
        for j in 0..y_len {
            let a_max = v_steps.min(j / step_ratio);
            let mut expected = 0.0;
            let mut per_node = Vec::with_capacity(nodes.len());
            for (k, &(_, w)) in nodes.iter().enumerate() {
                let q = |a: usize| stage[k][a].0 + next[j - a * step_ratio];
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0;
                for a in 0..=a_max {
                    let v = q(a);
                    if v > best {
                        best = v;
                        arg = a;
                    }
                }
                let (mut a_lo, mut a_hi) = (arg, arg);
                let (mut s_lo, mut s_hi) = (stage[k][arg].2, stage[k][arg].3);
                for (a, cell) in stage[k].iter().enumerate().take(a_max + 1) {
                    if q(a) >= best - TIE_TOL {
                        a_lo = a_lo.min(a);
                        a_hi = a_hi.max(a);
                        s_lo = s_lo.min(cell.2);
                        s_hi = s_hi.max(cell.3);
                    }
                }
                expected += w * best;
                let s = stage[k][arg].1;
                per_node.push(OracleAction {
                    v: arg as f64 * step,
                    d: consumption.split[s].iter().map(|&i| i as f64 * step).collect(),
                    v_range: (a_lo as f64 * step, a_hi as f64 * step),
                    consumption_range: (s_lo as f64 * step, s_hi as f64 * step),
                });
            }
            row.push(expected);
            row_actions.push(per_node);
        }
        values[t] = row;
        actions[t] = row_actions;
    }

    Ok(OracleSolution {
        config: *oc,
        support: support.clone(),
        values,
        actions,
        consumption,
        step_ratio,
    })
}

/// Empirical procrastination thresholds from the solved oracle.
///
/// At `r = 0` every interval is net consumption; `tau_t` is read off as
/// `y - v` at the smallest demand where the optimal charge leaves zero.
/// `delta_t` is the same scan at a generation level that exceeds any
/// possible load, so every interval is net production.
pub fn oracle_thresholds(sol: &OracleSolution, scenario: &Scenario) -> (Vec<f64>, Vec<f64>) {
    let horizon = sol.horizon();
    let step = sol.config.action_step;
    let v_steps = (scenario.v_bar() / step).round() as usize;
    let max_load = scenario.devices.iter().map(|d| d.d_bar).sum::<f64>() + scenario.v_bar();
    let r_high = ((max_load + 1.0) / step).ceil() * step;
    let mut tau = Vec::with_capacity(horizon);
    let mut delta = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let p = scenario.tariff.prices(t);
        let next = &sol.values[t + 1];
        let onset = |r: f64| {
            let stage: Vec<f64> = (0..=v_steps)
                .map(|a| sol.consumption.best(a as f64 * step - r, p.plus, p.minus, scenario.tariff.pi_zero).0)
                .collect();
            for j in 0..sol.y_len() {
                let a_max = v_steps.min(j / sol.step_ratio);
                let q = |a: usize| stage[a] + next[j - a * sol.step_ratio];
                let best = (0..=a_max).map(q).fold(f64::NEG_INFINITY, f64::max);
                let a_lo = (0..=a_max).find(|&a| q(a) >= best - TIE_TOL).unwrap_or(0);
                if a_lo > 0 {
                    return sol.y_at(j) - a_lo as f64 * step;
                }
            }
            sol.y_at(sol.y_len() - 1)
        };
        tau.push(onset(0.0));
        delta.push(onset(r_high));
    }
    (tau, delta)
}
