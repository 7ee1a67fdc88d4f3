//! Co-optimization of household flexible consumption and deadline-constrained
//! EV charging under net energy metering time-of-use tariffs.
//!
//! The optimal policy charges from the grid only once the remaining demand
//! exceeds a per-interval procrastination threshold `tau_t`, and from surplus
//! generation only beyond a second threshold `delta_t`. The thresholds are
//! computed offline by [`solver::backward_induction`] and
//! [`solver::extract_thresholds`]; [`policy::decide`] applies them online.
//! [`oracle`] is an independent brute-force dynamic program used for
//! validation and [`sim`] is the Monte Carlo comparison harness.

// `!(x >= 0.0)` is used throughout so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod der;
pub mod error;
pub mod exec;
pub mod format;
pub mod model;
pub mod oracle;
pub mod policy;
pub mod pwl;
pub mod sim;
pub mod solver;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{
    marginal_inverse, nem_payment, validate, ChargerModel, DerModel, DeviceModel, DpState, Period,
    Scenario, TariffSchedule,
};
pub use policy::{baseline_decide, decide, zone_thresholds, Decision, Zone};
pub use solver::{
    backward_induction, extract_thresholds, invert_slope, SolverOptions, ThresholdTable, ValueTable,
};
