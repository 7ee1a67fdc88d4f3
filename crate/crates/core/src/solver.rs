//! Backward induction for the expected value function `V_t(y) = E_r[V_t(y, r)]`
//! and extraction of the procrastination thresholds.
//!
//! Each stage is sampled on a uniform demand grid whose spacing divides
//! `v_bar`, so every multiple of `v_bar` (where the value function kinks) is a
//! grid point. Between grid points the function is linear. The terminal stage
//! `-gamma y` is kept analytic.

use std::fmt::Write as _;

use crate::der::{DerSupport, DEFAULT_QUADRATURE_NODES};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::format::sig9;
use crate::model::{Period, Scenario};
use crate::policy::stage_decision;
use crate::pwl::{forward_slopes, UniformGrid, ValueRow};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Grid points per `v_bar` of demand; at least 4.
    pub grid_points_per_vbar: usize,
    /// Upper end of the demand grid. Defaults to `T * v_bar`; rounded up to a
    /// multiple of `v_bar`.
    pub s_req_max: Option<f64>,
    pub quadrature_nodes: usize,
    /// Allowed positive second difference, relative to the row's largest |value|.
    pub concavity_tol: f64,
    pub execution: Execution,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_points_per_vbar: 40,
            s_req_max: None,
            quadrature_nodes: DEFAULT_QUADRATURE_NODES,
            concavity_tol: 1e-8,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValueTable {
    grid: UniformGrid,
    gamma: f64,
    /// `values[t][j]` is `V_t(y_j)` for `t < T`.
    values: Vec<Vec<f64>>,
    slopes: Vec<Vec<f64>>,
}

impl ValueTable {
    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Stage `t` as a function; `t == T` is the terminal penalty.
    pub fn row(&self, t: usize) -> ValueRow<'_> {
        if t >= self.values.len() {
            ValueRow::Terminal {
                grid: self.grid,
                gamma: self.gamma,
            }
        } else {
            ValueRow::Sampled {
                grid: self.grid,
                values: &self.values[t],
                slopes: &self.slopes[t],
            }
        }
    }

    pub fn values(&self, t: usize) -> &[f64] {
        &self.values[t]
    }

    pub fn slopes(&self, t: usize) -> &[f64] {
        &self.slopes[t]
    }

    pub fn value_at(&self, t: usize, y: f64) -> f64 {
        self.row(t).eval(y)
    }

    /// CSV with header `t,y_kwh,value_usd,slope_usd_per_kwh`. The slope column
    /// is the right-segment slope; the last grid point repeats its left slope.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,y_kwh,value_usd,slope_usd_per_kwh\n");
        for (t, (vals, slopes)) in self.values.iter().zip(&self.slopes).enumerate() {
            for (j, v) in vals.iter().enumerate() {
                let s = slopes[j.min(slopes.len() - 1)];
                let _ = writeln!(out, "{t},{},{},{}", sig9(self.grid.point(j)), sig9(*v), sig9(s));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdTable {
    /// Grid-purchase procrastination threshold per interval.
    pub tau: Vec<f64>,
    /// Generation-use procrastination threshold per interval.
    pub delta: Vec<f64>,
    pub periods: Vec<Period>,
    /// Largest `|tau_t - (tau_{t+1} + v_bar)|` over consecutive off1 intervals.
    pub tau_recursion_residual: f64,
    /// Largest `|delta_t - delta_{t+1}|` over consecutive on-peak intervals.
    pub delta_recursion_residual: f64,
    /// Largest gap between the closed-form on/off2 `tau` and direct inversion.
    pub closed_form_residual: f64,
}

impl ThresholdTable {
    pub fn zeros(horizon: usize) -> Self {
        ThresholdTable {
            tau: vec![0.0; horizon],
            delta: vec![0.0; horizon],
            periods: vec![Period::Off1; horizon],
            tau_recursion_residual: 0.0,
            delta_recursion_residual: 0.0,
            closed_form_residual: 0.0,
        }
    }

    /// CSV with header `t,period,tau_kwh,delta_kwh`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,period,tau_kwh,delta_kwh\n");
        for (t, ((tau, delta), p)) in self.tau.iter().zip(&self.delta).zip(&self.periods).enumerate() {
            let _ = writeln!(out, "{t},{},{},{}", p.label(), sig9(*tau), sig9(*delta));
        }
        out
    }
}

/// Demand grid used for `scenario` under `opts`.
pub fn demand_grid(scenario: &Scenario, opts: &SolverOptions) -> Result<UniformGrid> {
    if opts.grid_points_per_vbar < 4 {
        return Err(Error::validation("grid_points_per_vbar must be at least 4"));
    }
    let vb = scenario.v_bar();
    let span = opts.s_req_max.unwrap_or_else(|| scenario.max_deliverable());
    if !(span > 0.0) {
        return Err(Error::validation("s_req_max must be positive"));
    }
    let blocks = ((span / vb) - 1e-9).ceil().max(1.0) as usize;
    Ok(UniformGrid {
        step: vb / opts.grid_points_per_vbar as f64,
        len: blocks * opts.grid_points_per_vbar + 1,
    })
}

/// `E_r[ max_{v,d} g_t + V_{t+1}(y - v) ]` at one demand level, with the
/// inner maximum taken in closed form.
pub fn expected_stage_value(
    scenario: &Scenario,
    support: &DerSupport,
    t: usize,
    y: f64,
    next: &ValueRow<'_>,
) -> Result<f64> {
    let p = scenario.tariff.prices(t);
    let tau = next.invert_slope(-p.plus);
    let delta = next.invert_slope(-p.minus);
    let mut acc = 0.0;
    for &(r, w) in support.at(t) {
        let dec = stage_decision(scenario, t, y, r, tau, delta, next)?;
        acc += w * (dec.stage_reward(scenario, t) + next.eval(y - dec.v));
    }
    Ok(acc)
}

/// Fills `V_t` for `t = T-1, ..., 0` on the demand grid.
pub fn backward_induction(
    scenario: &Scenario,
    support: &DerSupport,
    opts: &SolverOptions,
) -> Result<ValueTable> {
    let horizon = scenario.horizon();
    if support.horizon() != horizon {
        return Err(Error::validation(format!(
            "DER support covers {} intervals, horizon has {horizon}",
            support.horizon()
        )));
    }
    let grid = demand_grid(scenario, opts)?;
    let mut table = ValueTable {
        grid,
        gamma: scenario.tariff.gamma,
        values: vec![Vec::new(); horizon],
        slopes: vec![Vec::new(); horizon],
    };
    for t in (0..horizon).rev() {
        let next = table.row(t + 1);
        let vals = opts.execution.try_map(grid.len, |j| {
            expected_stage_value(scenario, support, t, grid.point(j), &next)
        })?;
        check_concavity(t, &vals, opts.concavity_tol)?;
        table.slopes[t] = forward_slopes(&vals, grid.step);
        table.values[t] = vals;
    }
    Ok(table)
}

/// Solves with the default quadrature of the scenario's DER model.
pub fn solve(scenario: &Scenario, opts: &SolverOptions) -> Result<(ValueTable, ThresholdTable)> {
    let support = DerSupport::quadrature(&scenario.der, opts.quadrature_nodes);
    let table = backward_induction(scenario, &support, opts)?;
    let thresholds = extract_thresholds(&table, scenario)?;
    Ok((table, thresholds))
}

fn check_concavity(t: usize, vals: &[f64], tol: f64) -> Result<()> {
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let limit = tol * scale + 1e-12;
    for (j, w) in vals.windows(3).enumerate() {
        let second = w[2] - 2.0 * w[1] + w[0];
        if second > limit {
            return Err(Error::numerical(format!(
                "value function not concave at t = {t}, grid index {}: second difference {second:.3e}",
                j + 1
            )));
        }
    }
    Ok(())
}

/// Largest grid demand whose left segments all have slope at least `p`
/// (`h_t^{-1}(p)` with the least-charging tie break). Slopes below every
/// segment give the grid maximum, slopes above every segment give 0.
pub fn invert_slope(table: &ValueTable, t: usize, p: f64) -> f64 {
    table.row(t).invert_slope(p)
}

/// Procrastination thresholds for every interval.
///
/// Under the strict price chain the on-peak and second off-peak `tau` and the
/// zero `delta` values are closed forms; the remaining entries come from
/// inverting the next stage's slope. In relaxed mode every entry is inverted.
pub fn extract_thresholds(table: &ValueTable, scenario: &Scenario) -> Result<ThresholdTable> {
    let tariff = &scenario.tariff;
    let horizon = tariff.horizon();
    let vb = scenario.v_bar();
    let has_off2 = tariff.has_off2();
    let mut out = ThresholdTable::zeros(horizon);
    out.periods = tariff.periods().to_vec();

    for t in 0..horizon {
        let p = tariff.prices(t);
        let remaining = (horizon - t - 1) as f64 * vb;
        let period = tariff.period(t);
        if tariff.relaxed_a1 {
            out.tau[t] = invert_slope(table, t + 1, -p.plus);
            out.delta[t] = invert_slope(table, t + 1, -p.minus);
            continue;
        }
        out.tau[t] = match period {
            Period::Off1 => invert_slope(table, t + 1, -p.plus),
            Period::On | Period::Off2 => {
                let inverted = invert_slope(table, t + 1, -p.plus);
                out.closed_form_residual = out.closed_form_residual.max((inverted - remaining).abs());
                remaining
            }
        };
        out.delta[t] = match period {
            Period::On if has_off2 => invert_slope(table, t + 1, -p.minus),
            _ => 0.0,
        };
    }

    for t in 0..horizon.saturating_sub(1) {
        match (tariff.period(t), tariff.period(t + 1)) {
            (Period::Off1, Period::Off1) => {
                let r = (out.tau[t] - (out.tau[t + 1] + vb)).abs();
                out.tau_recursion_residual = out.tau_recursion_residual.max(r);
            }
            (Period::On, Period::On) => {
                let r = (out.delta[t] - out.delta[t + 1]).abs();
                out.delta_recursion_residual = out.delta_recursion_residual.max(r);
            }
            _ => {}
        }
    }
    if !tariff.relaxed_a1 && out.tau_recursion_residual > table.grid().step + 1e-9 {
        return Err(Error::numerical(format!(
            "off-peak threshold recursion residual {:.6} exceeds one grid step {:.6}",
            out.tau_recursion_residual,
            table.grid().step
        )));
    }
    Ok(out)
}
