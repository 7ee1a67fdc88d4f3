//! JSON and file emission with 9-significant-digit floats.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use nemev::format::round9;
use nemev::sim::Summary;
use nemev::{Decision, DpState, Result};

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round9(x)).map_or(Value::Null, Value::Number)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn decision_json(state: &DpState, d: &Decision) -> Value {
    json!({
        "t": state.t,
        "y_kwh": num(state.y),
        "r_kwh": num(state.r),
        "zone": d.zone.label(),
        "v_kwh": num(d.v),
        "d_kwh": nums(&d.d),
        "z_kwh": num(d.z),
        "nu_usd_per_kwh": num(d.nu),
    })
}

pub fn summary_json(s: &Summary) -> Value {
    json!({
        "n_trials": s.n,
        "mean_opt": num(s.mean_opt),
        "mean_base": num(s.mean_base),
        "gap_pct": num(s.gap_pct),
        "ci95_lo": num(s.ci95_lo),
        "ci95_hi": num(s.ci95_hi),
    })
}

/// Writes `contents` to `dir/name` and returns the file name for the manifest.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<String> {
    let path: PathBuf = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(name.to_string())
}

pub fn to_line(v: &Value) -> String {
    let mut s = v.to_string();
    s.push('\n');
    s
}
