//! Domain types: the NEM time-of-use tariff over a charging horizon, the
//! household's flexible devices, the EV charger and the per-interval
//! distribution of behind-the-meter generation.
//!
//! Energies are kWh per interval and prices $/kWh throughout. The charger
//! efficiency is folded into the demand at load time (see
//! [`Scenario::grid_demand`]) so nothing downstream of this module sees it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// TOU pricing period of an interval inside a charging horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Period {
    /// Off-peak intervals before the on-peak block.
    Off1,
    On,
    /// Off-peak intervals after the on-peak block.
    Off2,
}

impl Period {
    pub fn is_on_peak(self) -> bool {
        self == Period::On
    }

    pub fn label(self) -> &'static str {
        match self {
            Period::Off1 => "off1",
            Period::On => "on",
            Period::Off2 => "off2",
        }
    }
}

/// Retail and sell rates in force during one interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NemPrices {
    pub plus: f64,
    pub minus: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TariffSchedule {
    period_of: Vec<Period>,
    pub pi_on_plus: f64,
    pub pi_on_minus: f64,
    pub pi_off_plus: f64,
    pub pi_off_minus: f64,
    /// Fixed charge per interval.
    pub pi_zero: f64,
    /// Terminal penalty per kWh of unmet charging demand.
    pub gamma: f64,
    pub interval_hours: f64,
    /// Accept `pi_minus == pi_plus` within a period. Off by default.
    pub relaxed_a1: bool,
}

impl TariffSchedule {
    /// Builds a horizon of `off1` + `on` + `off2` intervals with the given prices.
    #[allow(clippy::too_many_arguments)]
    pub fn from_counts(
        off1: usize,
        on: usize,
        off2: usize,
        pi_off_minus: f64,
        pi_on_minus: f64,
        pi_off_plus: f64,
        pi_on_plus: f64,
        gamma: f64,
    ) -> Self {
        let mut period_of = Vec::with_capacity(off1 + on + off2);
        period_of.extend(std::iter::repeat_n(Period::Off1, off1));
        period_of.extend(std::iter::repeat_n(Period::On, on));
        period_of.extend(std::iter::repeat_n(Period::Off2, off2));
        TariffSchedule {
            period_of,
            pi_on_plus,
            pi_on_minus,
            pi_off_plus,
            pi_off_minus,
            pi_zero: 0.0,
            gamma,
            interval_hours: 1.0,
            relaxed_a1: false,
        }
    }

    pub fn with_periods(mut self, period_of: Vec<Period>) -> Self {
        self.period_of = period_of;
        self
    }

    pub fn horizon(&self) -> usize {
        self.period_of.len()
    }

    pub fn period(&self, t: usize) -> Period {
        self.period_of[t]
    }

    pub fn periods(&self) -> &[Period] {
        &self.period_of
    }

    pub fn prices(&self, t: usize) -> NemPrices {
        match self.period_of[t] {
            Period::On => NemPrices {
                plus: self.pi_on_plus,
                minus: self.pi_on_minus,
            },
            Period::Off1 | Period::Off2 => NemPrices {
                plus: self.pi_off_plus,
                minus: self.pi_off_minus,
            },
        }
    }

    pub fn count(&self, period: Period) -> usize {
        self.period_of.iter().filter(|&&p| p == period).count()
    }

    pub fn has_off2(&self) -> bool {
        self.period_of.contains(&Period::Off2)
    }

    /// Same tariff with the sell rates set to `retail - gap` in both periods.
    pub fn with_price_gap(&self, gap: f64) -> Self {
        let mut out = self.clone();
        out.pi_on_minus = self.pi_on_plus - gap;
        out.pi_off_minus = self.pi_off_plus - gap;
        out
    }

    fn check(&self) -> Result<()> {
        if self.period_of.is_empty() {
            return Err(Error::validation("horizon must contain at least one interval"));
        }
        if self.period_of.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::validation(
                "periods must be ordered off1, on, off2 as contiguous blocks",
            ));
        }
        if !(self.interval_hours > 0.0) {
            return Err(Error::validation("interval_hours must be positive"));
        }
        for (name, value) in [
            ("pi_on_plus", self.pi_on_plus),
            ("pi_on_minus", self.pi_on_minus),
            ("pi_off_plus", self.pi_off_plus),
            ("pi_off_minus", self.pi_off_minus),
            ("gamma", self.gamma),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::validation(format!("price must be positive: {name}")));
            }
        }
        if !(self.pi_zero >= 0.0) {
            return Err(Error::validation("pi_zero must be nonnegative"));
        }
        if self.relaxed_a1 {
            return self.check_relaxed();
        }
        let chain = [
            ("pi_off_minus", self.pi_off_minus),
            ("pi_on_minus", self.pi_on_minus),
            ("pi_off_plus", self.pi_off_plus),
            ("pi_on_plus", self.pi_on_plus),
        ];
        for w in chain.windows(2) {
            let ((lo_name, lo), (hi_name, hi)) = (w[0], w[1]);
            if lo >= hi {
                return Err(Error::validation(format!(
                    "A1 violated: {lo_name} ≥ {hi_name}"
                )));
            }
        }
        if self.gamma <= self.pi_on_plus {
            return Err(Error::validation("A1 violated: gamma ≤ pi_on_plus"));
        }
        Ok(())
    }

    fn check_relaxed(&self) -> Result<()> {
        if self.pi_on_minus > self.pi_on_plus {
            return Err(Error::validation("relaxed A1 violated: pi_on_minus > pi_on_plus"));
        }
        if self.pi_off_minus > self.pi_off_plus {
            return Err(Error::validation("relaxed A1 violated: pi_off_minus > pi_off_plus"));
        }
        if self.pi_off_minus > self.pi_on_minus {
            return Err(Error::validation("relaxed A1 violated: pi_off_minus > pi_on_minus"));
        }
        if self.pi_off_plus >= self.pi_on_plus {
            return Err(Error::validation("relaxed A1 violated: pi_off_plus ≥ pi_on_plus"));
        }
        if self.gamma <= self.pi_on_plus {
            return Err(Error::validation("A1 violated: gamma ≤ pi_on_plus"));
        }
        Ok(())
    }
}

/// Flexible load with quadratic utility `alpha d - beta d^2 / 2` on `[0, d_bar]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceModel {
    pub alpha: f64,
    pub beta: f64,
    pub d_bar: f64,
}

impl DeviceModel {
    pub fn utility(&self, d: f64) -> f64 {
        self.alpha * d - 0.5 * self.beta * d * d
    }

    /// Consumption at which marginal utility meets `pi`, clamped to `[0, d_bar]`.
    pub fn demand_at(&self, pi: f64) -> f64 {
        marginal_inverse(self, pi)
    }

    fn check(&self, i: usize) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::validation(format!("device {i}: alpha must be positive")));
        }
        if !(self.beta > 0.0) {
            return Err(Error::validation(format!("device {i}: beta must be positive")));
        }
        if !(self.d_bar >= 0.0) || !self.d_bar.is_finite() {
            return Err(Error::validation(format!("device {i}: d_bar must be nonnegative")));
        }
        Ok(())
    }
}

/// EV charger. `v_bar` is energy per interval (kW rating times interval hours).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargerModel {
    pub v_bar: f64,
    pub eta: f64,
}

impl ChargerModel {
    fn check(&self) -> Result<()> {
        if !(self.v_bar > 0.0) || !self.v_bar.is_finite() {
            return Err(Error::validation("v_bar must be positive"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::validation("eta must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Independent rectified-normal generation `max(0, N(mu_t, sigma_t^2))` per interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerModel {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl DerModel {
    pub fn none(horizon: usize) -> Self {
        DerModel {
            mu: vec![0.0; horizon],
            sigma: vec![0.0; horizon],
        }
    }

    fn check(&self, horizon: usize) -> Result<()> {
        if self.mu.len() != horizon || self.sigma.len() != horizon {
            return Err(Error::validation(format!(
                "der mu/sigma must have {horizon} entries (got {}/{})",
                self.mu.len(),
                self.sigma.len()
            )));
        }
        if self.mu.iter().any(|m| !m.is_finite()) {
            return Err(Error::validation("der mu must be finite"));
        }
        if self.sigma.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(Error::validation("sigma must be nonnegative"));
        }
        Ok(())
    }
}

/// Decision-time state: interval, remaining demand, realized generation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpState {
    pub t: usize,
    pub y: f64,
    pub r: f64,
}

/// A validated household configuration over one charging horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub tariff: TariffSchedule,
    pub charger: ChargerModel,
    pub devices: Vec<DeviceModel>,
    pub der: DerModel,
}

impl Scenario {
    pub fn horizon(&self) -> usize {
        self.tariff.horizon()
    }

    pub fn v_bar(&self) -> f64 {
        self.charger.v_bar
    }

    /// Largest demand that can still be completed: `T * v_bar`.
    pub fn max_deliverable(&self) -> f64 {
        self.horizon() as f64 * self.charger.v_bar
    }

    /// Converts battery-side demand to charger-input energy (divides by eta).
    pub fn grid_demand(&self, battery_kwh: f64) -> f64 {
        battery_kwh / self.charger.eta
    }

    /// Total flexible consumption when every device faces price `pi`.
    pub fn consumption_at(&self, pi: f64) -> f64 {
        self.devices.iter().map(|d| marginal_inverse(d, pi)).sum()
    }

    pub fn utility(&self, d: &[f64]) -> f64 {
        self.devices
            .iter()
            .zip(d)
            .map(|(dev, &di)| dev.utility(di))
            .sum()
    }

    pub fn check_state(&self, state: &DpState, s_req: f64) -> Result<()> {
        if state.t >= self.horizon() {
            return Err(Error::validation(format!(
                "t = {} outside horizon of {} intervals",
                state.t,
                self.horizon()
            )));
        }
        if !(state.y >= 0.0) || state.y > s_req + 1e-9 {
            return Err(Error::validation(format!(
                "y = {} outside [0, {s_req}]",
                state.y
            )));
        }
        if !(state.r >= 0.0) || !state.r.is_finite() {
            return Err(Error::validation("r must be nonnegative"));
        }
        Ok(())
    }
}

/// Checks every standing assumption and bundles the inputs into a [`Scenario`].
pub fn validate(
    tariff: TariffSchedule,
    charger: ChargerModel,
    devices: Vec<DeviceModel>,
    der: DerModel,
) -> Result<Scenario> {
    tariff.check()?;
    charger.check()?;
    for (i, d) in devices.iter().enumerate() {
        d.check(i)?;
    }
    der.check(tariff.horizon())?;
    Ok(Scenario {
        tariff,
        charger,
        devices,
        der,
    })
}

/// NEM bill for net consumption `z` in one interval.
pub fn nem_payment(z: f64, pi_plus: f64, pi_minus: f64, pi_zero: f64) -> f64 {
    if z >= 0.0 {
        z * pi_plus + pi_zero
    } else {
        z * pi_minus + pi_zero
    }
}

/// Inverse marginal utility of a quadratic device, clamped to `[0, d_bar]`.
pub fn marginal_inverse(device: &DeviceModel, pi: f64) -> f64 {
    ((device.alpha - pi) / device.beta).clamp(0.0, device.d_bar)
}
