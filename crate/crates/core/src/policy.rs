//! Per-interval decisions.
//!
//! Given the remaining demand `y` and realized generation `r`, the optimal
//! net consumption falls into one of three zones bounded by
//! `Delta+(y) = sum_i l_i(pi+) + v+(y)` and `Delta-(y) = sum_i l_i(pi-) + v-(y)`:
//!
//! * `r < Delta+`: buy from the grid, charge `v+(y) = min(v_bar, (y - tau)+)`
//!   and consume `l_i(pi+)`;
//! * `r > Delta-`: export, charge `v-(y) = min(v_bar, (y - delta)+)` and
//!   consume `l_i(pi-)`;
//! * otherwise match load to generation exactly, with a shadow price
//!   `nu` in `[pi-, pi+]` found by bisection.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{nem_payment, DpState, Period, Scenario};
use crate::pwl::ValueRow;
use crate::solver::{ThresholdTable, ValueTable};

/// Largest accepted `|v + sum d - r|` in the net-zero zone.
pub const NET_ZERO_TOL: f64 = 1e-9;
pub const MAX_BISECTION_ITERS: usize = 200;
const BRACKET_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Zone {
    NetConsumption,
    NetZero,
    NetProduction,
}

impl Zone {
    pub fn label(self) -> &'static str {
        match self {
            Zone::NetConsumption => "net_consumption",
            Zone::NetZero => "net_zero",
            Zone::NetProduction => "net_production",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decision {
    /// EV charge (kWh).
    pub v: f64,
    /// Per-device consumption (kWh).
    pub d: Vec<f64>,
    /// Net consumption `v + sum d - r`.
    pub z: f64,
    pub zone: Zone,
    /// Marginal price in force: `pi+` or `pi-` outside the net-zero zone,
    /// the bisected shadow price inside it.
    pub nu: f64,
}

impl Decision {
    pub fn total_consumption(&self) -> f64 {
        self.d.iter().sum()
    }

    /// Surplus earned in interval `t`: utility minus the NEM bill.
    pub fn stage_reward(&self, scenario: &Scenario, t: usize) -> f64 {
        let p = scenario.tariff.prices(t);
        scenario.utility(&self.d) - nem_payment(self.z, p.plus, p.minus, scenario.tariff.pi_zero)
    }
}

/// Zone boundaries `(Delta+, Delta-)` at interval `t` for remaining demand `y`.
pub fn zone_thresholds(
    t: usize,
    y: f64,
    thresholds: &ThresholdTable,
    scenario: &Scenario,
) -> (f64, f64) {
    boundaries(scenario, t, y, thresholds.tau[t], thresholds.delta[t])
}

fn boundaries(scenario: &Scenario, t: usize, y: f64, tau: f64, delta: f64) -> (f64, f64) {
    let p = scenario.tariff.prices(t);
    let vb = scenario.v_bar();
    let v_plus = vb.min((y - tau).max(0.0));
    let v_minus = vb.min((y - delta).max(0.0));
    (
        scenario.consumption_at(p.plus) + v_plus,
        scenario.consumption_at(p.minus) + v_minus,
    )
}

/// Optimal decision at `state` using precomputed thresholds and the value table.
pub fn decide(
    state: &DpState,
    thresholds: &ThresholdTable,
    table: &ValueTable,
    scenario: &Scenario,
) -> Result<Decision> {
    let t = state.t;
    stage_decision(
        scenario,
        t,
        state.y,
        state.r,
        thresholds.tau[t],
        thresholds.delta[t],
        &table.row(t + 1),
    )
}

/// Closed-form stage optimum given thresholds `tau`, `delta` and the
/// next-stage expected value `next` (only consulted in the net-zero zone).
pub(crate) fn stage_decision(
    scenario: &Scenario,
    t: usize,
    y: f64,
    r: f64,
    tau: f64,
    delta: f64,
    next: &ValueRow<'_>,
) -> Result<Decision> {
    let p = scenario.tariff.prices(t);
    let vb = scenario.v_bar();
    let v_plus = vb.min((y - tau).max(0.0));
    let v_minus = vb.min((y - delta).max(0.0));
    let (delta_plus, delta_minus) = boundaries(scenario, t, y, tau, delta);

    let at_price = |nu: f64, v: f64, zone: Zone| {
        let d: Vec<f64> = scenario.devices.iter().map(|dev| dev.demand_at(nu)).collect();
        let z = v + d.iter().sum::<f64>() - r;
        Decision { v, d, z, zone, nu }
    };

    if r < delta_plus {
        return Ok(at_price(p.plus, v_plus, Zone::NetConsumption));
    }
    if r > delta_minus {
        return Ok(at_price(p.minus, v_minus, Zone::NetProduction));
    }

    let cap = vb.min(y);
    // Range of optimal charges when the marginal price is `nu`.
    let admissible = |nu: f64| {
        let lo = vb.min((y - next.invert_slope(-nu)).max(0.0));
        let hi = vb.min((y - next.invert_slope_strict(-nu)).max(0.0));
        (lo.min(cap), hi.min(cap))
    };
    let residual_charge = |nu: f64| r - scenario.consumption_at(nu);

    let (nu, v) = {
        let hi_range = admissible(p.plus).1.max(v_plus);
        let lo_range = admissible(p.minus).0.min(v_minus);
        let at_plus = residual_charge(p.plus);
        let at_minus = residual_charge(p.minus);
        if at_plus <= hi_range + BRACKET_EPS {
            (p.plus, at_plus.clamp(v_plus.min(hi_range), hi_range))
        } else if at_minus >= lo_range - BRACKET_EPS {
            (p.minus, at_minus.clamp(lo_range, v_minus.max(lo_range)))
        } else {
            bisect_shadow_price(p.minus, p.plus, admissible, residual_charge)
        }
    };
    let decision = at_price(nu, v, Zone::NetZero);
    if decision.z.abs() > NET_ZERO_TOL {
        return Err(Error::numerical(format!(
            "net-zero bisection failed at t = {t}, y = {y}, r = {r}: residual {:.3e}",
            decision.z
        )));
    }
    Ok(decision)
}

/// Finds `nu` in `(lo, hi)` with `r - sum l(nu)` inside the admissible charge range.
fn bisect_shadow_price(
    mut lo: f64,
    mut hi: f64,
    admissible: impl Fn(f64) -> (f64, f64),
    residual_charge: impl Fn(f64) -> f64,
) -> (f64, f64) {
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECTION_ITERS {
        mid = 0.5 * (lo + hi);
        let (vmin, vmax) = admissible(mid);
        let want = residual_charge(mid);
        if want < vmin - BRACKET_EPS {
            lo = mid;
        } else if want > vmax + BRACKET_EPS {
            hi = mid;
        } else {
            return (mid, want.clamp(vmin, vmax));
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let (vmin, vmax) = admissible(mid);
    (mid, residual_charge(mid).clamp(vmin, vmax))
}

/// Renewable-independent open-loop schedule: fill off-peak intervals at full
/// rate in plug-in order, and buy on-peak only what the remaining intervals
/// could not deliver, so spilled energy lands in the latest on-peak slots.
/// Devices consume at the retail-rate optimum.
pub fn baseline_decide(state: &DpState, scenario: &Scenario) -> Decision {
    let t = state.t;
    let y = state.y;
    let vb = scenario.v_bar();
    let horizon = scenario.horizon();
    let v = match scenario.tariff.period(t) {
        Period::Off1 | Period::Off2 => vb.min(y),
        Period::On => vb.min((y - vb * (horizon - t - 1) as f64).max(0.0)),
    };
    let p = scenario.tariff.prices(t);
    let d: Vec<f64> = scenario.devices.iter().map(|dev| dev.demand_at(p.plus)).collect();
    let z = v + d.iter().sum::<f64>() - state.r;
    let (zone, nu) = if z > NET_ZERO_TOL {
        (Zone::NetConsumption, p.plus)
    } else if z < -NET_ZERO_TOL {
        (Zone::NetProduction, p.minus)
    } else {
        (Zone::NetZero, p.plus)
    };
    Decision { v, d, z, zone, nu }
}
