//! Concave piecewise-linear functions of remaining demand on a uniform grid.

/// Slopes within this distance of a target price are treated as ties.
pub const SLOPE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformGrid {
    pub step: f64,
    /// Number of grid points, including `y = 0`.
    pub len: usize,
}

impl UniformGrid {
    pub fn point(&self, j: usize) -> f64 {
        j as f64 * self.step
    }

    pub fn max(&self) -> f64 {
        self.point(self.len - 1)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|j| self.point(j))
    }

    /// Index of the grid point nearest to `y`.
    pub fn nearest(&self, y: f64) -> usize {
        ((y / self.step).round().max(0.0) as usize).min(self.len - 1)
    }
}

/// One stage of the expected value function, either sampled on the grid or
/// the analytic terminal penalty `-gamma y`.
#[derive(Clone, Copy, Debug)]
pub enum ValueRow<'a> {
    Sampled {
        grid: UniformGrid,
        values: &'a [f64],
        /// `slopes[j]` is the slope on `[y_j, y_{j+1}]`.
        slopes: &'a [f64],
    },
    Terminal {
        grid: UniformGrid,
        gamma: f64,
    },
}

impl ValueRow<'_> {
    pub fn grid(&self) -> UniformGrid {
        match *self {
            ValueRow::Sampled { grid, .. } | ValueRow::Terminal { grid, .. } => grid,
        }
    }

    /// Linear interpolation; linear extrapolation with the end slopes outside the grid.
    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            ValueRow::Terminal { gamma, .. } => -gamma * y,
            ValueRow::Sampled { grid, values, slopes } => {
                if y <= 0.0 {
                    return values[0] + slopes[0] * y;
                }
                let j = ((y / grid.step) as usize).min(grid.len - 2);
                values[j] + slopes[j] * (y - grid.point(j))
            }
        }
    }

    /// Slope of segment `j`.
    pub fn slope(&self, j: usize) -> f64 {
        match *self {
            ValueRow::Terminal { gamma, .. } => -gamma,
            ValueRow::Sampled { slopes, .. } => slopes[j],
        }
    }

    /// Largest grid point `y` such that every segment left of `y` has slope
    /// at least `p` (ties within [`SLOPE_TOL`] included). This is the largest
    /// maximizer of `V(u) - p u`, so charging down to it buys the least energy.
    pub fn invert_slope(&self, p: f64) -> f64 {
        self.prefix_point(|s| s >= p - SLOPE_TOL)
    }

    /// Smallest maximizer of `V(u) - p u`: counts only segments strictly steeper than `p`.
    pub fn invert_slope_strict(&self, p: f64) -> f64 {
        self.prefix_point(|s| s > p + SLOPE_TOL)
    }

    fn prefix_point(&self, keep: impl Fn(f64) -> bool) -> f64 {
        match *self {
            ValueRow::Terminal { grid, gamma } => {
                if keep(-gamma) {
                    grid.max()
                } else {
                    0.0
                }
            }
            ValueRow::Sampled { grid, slopes, .. } => {
                let k = slopes.partition_point(|&s| keep(s));
                grid.point(k)
            }
        }
    }
}

/// Forward differences of `values` on a grid of spacing `step`.
pub fn forward_slopes(values: &[f64], step: f64) -> Vec<f64> {
    values.windows(2).map(|w| (w[1] - w[0]) / step).collect()
}
