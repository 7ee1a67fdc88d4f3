//! Discrete representations of the per-interval generation distribution.
//!
//! The solver integrates over a [`DerSupport`]: a list of `(r, weight)`
//! points per interval. Two constructions are provided. Quadrature places an
//! explicit atom at `r = 0` with mass `Phi(-mu/sigma)` and a Gauss-Legendre
//! rule over the continuous part; quantile support uses equal-probability
//! nodes, which is what the brute-force oracle consumes.

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::model::DerModel;

/// Half-width of the integration window in standard deviations.
const TAIL_SIGMAS: f64 = 6.0;

pub const DEFAULT_QUADRATURE_NODES: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct DerSupport {
    points: Vec<Vec<(f64, f64)>>,
}

impl DerSupport {
    /// Validates and wraps explicit support points. Weights are renormalized.
    pub fn from_points(points: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        let mut out = Vec::with_capacity(points.len());
        for (t, row) in points.into_iter().enumerate() {
            if row.is_empty() {
                return Err(Error::validation(format!("empty DER support at t = {t}")));
            }
            if row.iter().any(|&(r, w)| !(r >= 0.0) || !(w >= 0.0) || !r.is_finite()) {
                return Err(Error::validation(format!(
                    "DER support at t = {t} must have nonnegative points and weights"
                )));
            }
            let total: f64 = row.iter().map(|p| p.1).sum();
            if !(total > 0.0) {
                return Err(Error::validation(format!("DER weights at t = {t} sum to zero")));
            }
            out.push(row.into_iter().map(|(r, w)| (r, w / total)).collect());
        }
        Ok(DerSupport { points: out })
    }

    /// One certain generation value per interval.
    pub fn deterministic(values: &[f64]) -> Self {
        DerSupport {
            points: values.iter().map(|&r| vec![(r.max(0.0), 1.0)]).collect(),
        }
    }

    /// Atom at zero plus an `n_nodes`-point Gauss-Legendre rule on the density.
    pub fn quadrature(der: &DerModel, n_nodes: usize) -> Self {
        let (x, w) = gauss_legendre(n_nodes.max(1));
        let points = der
            .mu
            .iter()
            .zip(&der.sigma)
            .map(|(&mu, &sigma)| rectified_normal_quadrature(mu, sigma, &x, &w))
            .collect();
        DerSupport { points }
    }

    /// Atom at zero plus `n_points - 1` equal-mass quantile nodes, optionally
    /// rounded to a multiple of `round_to`.
    pub fn quantile(der: &DerModel, n_points: usize, round_to: Option<f64>) -> Self {
        let points = der
            .mu
            .iter()
            .zip(&der.sigma)
            .map(|(&mu, &sigma)| rectified_normal_quantiles(mu, sigma, n_points.max(2), round_to))
            .collect();
        DerSupport { points }
    }

    pub fn horizon(&self) -> usize {
        self.points.len()
    }

    pub fn at(&self, t: usize) -> &[(f64, f64)] {
        &self.points[t]
    }

    pub fn mean(&self, t: usize) -> f64 {
        self.points[t].iter().map(|(r, w)| r * w).sum()
    }

    /// Support restricted to intervals `start..start + len`.
    pub fn window(&self, start: usize, len: usize) -> Self {
        DerSupport {
            points: self.points[start..start + len].to_vec(),
        }
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

fn rectified_normal_quadrature(mu: f64, sigma: f64, x: &[f64], w: &[f64]) -> Vec<(f64, f64)> {
    if sigma == 0.0 || mu + TAIL_SIGMAS * sigma <= 0.0 {
        return vec![(mu.max(0.0), 1.0)];
    }
    let n = std_normal();
    let atom = n.cdf(-mu / sigma);
    let lo = (mu - TAIL_SIGMAS * sigma).max(0.0);
    let hi = mu + TAIL_SIGMAS * sigma;
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut pts = Vec::with_capacity(x.len() + 1);
    if atom > 0.0 {
        pts.push((0.0, atom));
    }
    for (&xi, &wi) in x.iter().zip(w) {
        let r = mid + half * xi;
        pts.push((r, half * wi * n.pdf((r - mu) / sigma) / sigma));
    }
    let total: f64 = pts.iter().map(|p| p.1).sum();
    pts.iter_mut().for_each(|p| p.1 /= total);
    pts
}

fn rectified_normal_quantiles(
    mu: f64,
    sigma: f64,
    n_points: usize,
    round_to: Option<f64>,
) -> Vec<(f64, f64)> {
    let snap = |r: f64| match round_to {
        Some(step) if step > 0.0 => ((r / step).round() * step).max(0.0),
        _ => r.max(0.0),
    };
    if sigma == 0.0 {
        return vec![(snap(mu), 1.0)];
    }
    let n = std_normal();
    let atom = n.cdf(-mu / sigma);
    let bins = n_points - 1;
    let mass = (1.0 - atom) / bins as f64;
    let mut pts = Vec::with_capacity(n_points);
    pts.push((0.0, atom));
    for k in 0..bins {
        let q = atom + (k as f64 + 0.5) * mass;
        let r = if q >= 1.0 { mu + TAIL_SIGMAS * sigma } else { mu + sigma * n.inverse_cdf(q) };
        pts.push((snap(r), mass));
    }
    pts
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n(z)
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}
