//! Derivative-free 1-D maximization: coarse grid scan, then golden-section refinement.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Objectives varying less than this over the grid are treated as flat.
pub const FLAT_OBJECTIVE: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub grid_points: usize,
    pub tolerance: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            grid_points: 128,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub theta: f64,
    pub value: f64,
}

/// Maximizes `objective` on `[lo, hi]`.
///
/// The best grid point (the smallest `θ` on ties) seeds a golden-section
/// search over its two neighbouring cells. Ties inside the search also move
/// left, so a plateau resolves to its left edge. The result is deterministic:
/// grid evaluations run in parallel but are reduced in grid order.
pub fn maximize<F>(objective: F, bounds: (f64, f64), options: SearchOptions) -> Result<Optimum>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let (lo, hi) = bounds;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Parameter(format!(
            "search interval [{lo}, {hi}] is empty"
        )));
    }
    if options.grid_points < 3 {
        return Err(Error::Parameter("grid scan needs at least 3 points".into()));
    }
    let n = options.grid_points;
    let step = (hi - lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + i as f64 * step })
        .collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&x| objective(x))
        .collect::<Result<_>>()?;

    let (mut best, mut low) = (0, values[0]);
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
        low = low.min(v);
    }
    let variation = values[best] - low;
    if variation < FLAT_OBJECTIVE {
        return Err(Error::DegenerateObjective { variation });
    }

    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(n - 1)];
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (objective(c)?, objective(d)?);
    while b - a > options.tolerance / 4.0 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(d)?;
        }
    }
    let theta = 0.5 * (a + b);
    let value = objective(theta)?;
    if value < values[best] {
        return Ok(Optimum {
            theta: grid[best],
            value: values[best],
        });
    }
    Ok(Optimum { theta, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic_calibration() {
        let opt = maximize(
            |t| Ok(-(t - 0.7).powi(2)),
            (0.01, 1.56),
            SearchOptions::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(opt.theta, 0.7, epsilon = 1e-6);
    }

    #[test]
    fn optimum_at_boundary() {
        let opt = maximize(Ok, (0.0, 1.0), SearchOptions::default()).unwrap();
        assert_abs_diff_eq!(opt.theta, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn plateau_resolves_to_left_edge() {
        let opt = maximize(
            |t| Ok((3.0 * t).min(1.0)),
            (0.1, 1.5),
            SearchOptions::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(opt.value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(opt.theta, 1.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn flat_objective_is_rejected() {
        let err = maximize(|_| Ok(0.5), (0.1, 1.0), SearchOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateObjective { .. }));
    }

    #[test]
    fn bad_interval() {
        assert!(maximize(Ok, (1.0, 1.0), SearchOptions::default()).is_err());
    }

    #[test]
    fn objective_errors_propagate() {
        let err = maximize(
            |_| Err(Error::UndefinedState),
            (0.0, 1.0),
            SearchOptions::default(),
        );
        assert_eq!(err, Err(Error::UndefinedState));
    }
}
