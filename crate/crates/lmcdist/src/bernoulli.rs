//! Fixed-point solver for the Bernoulli-convolution functional equation.
//!
//! For `theta > 1`, the distance between the two marked states of the
//! `BernoulliChain` gadget is `d_theta(x) = 1/2 + 1/2 f_theta(x)`, where
//! `f_theta` is the unique fixed point of the operator
//!
//! ```text
//! S(f)(x) = 2|x|                                                  |x| >= 1/2
//! S(f)(x) = (f(theta x - (theta-1)/2) + f(theta x + (theta-1)/2)) / (2 theta)
//!                                                                 |x| <= 1/2
//! ```
//!
//! `S` contracts the sup norm by `1/theta`, so iterating from the boundary
//! extension `f(x) = 2|x|` converges geometrically. This module works in
//! `f64` on a uniform grid with linear interpolation, unlike the exact
//! modules: the fixed point can be non-smooth (for Pisot `theta` its
//! derivative is singular), so exactness is unattainable and the
//! discretization error is not rigorously bounded for such `theta`. The
//! cross-check against the exact rational brackets on the generated chain
//! lives in the test suite.

use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BernoulliError {
    #[error("theta must be > 1, got {0}")]
    ThetaOutOfRange(f64),
    #[error("grid must have an odd number of points >= 3, got {0}")]
    BadGrid(usize),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("x must lie in [-1/2, 1/2], got {0}")]
    XOutOfRange(f64),
}

/// A sampled function on the uniform grid `x_j = -1/2 + j h`, `h = 1/(n-1)`,
/// with `n` odd so the grid contains 0 and both endpoints. Outside the grid
/// the function is the boundary rule `2|x|`; endpoint values are exactly 1
/// and the values are mirror symmetric.
#[derive(Debug, Clone)]
pub struct GridFunction {
    theta: f64,
    values: Vec<f64>,
}

impl GridFunction {
    /// The boundary extension `2|x|` sampled on the grid, the starting point
    /// of the fixed-point iteration.
    pub fn initial(theta: f64, grid_points: usize) -> Result<Self, BernoulliError> {
        if theta.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater) {
            return Err(BernoulliError::ThetaOutOfRange(theta));
        }
        if grid_points < 3 || grid_points.is_multiple_of(2) {
            return Err(BernoulliError::BadGrid(grid_points));
        }
        let values = (0..grid_points)
            .map(|j| 2.0 * grid_x(j, grid_points).abs())
            .collect();
        Ok(GridFunction { theta, values })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The grid point `x_j`.
    pub fn x(&self, j: usize) -> f64 {
        grid_x(j, self.values.len())
    }

    /// Evaluates with linear interpolation inside `[-1/2, 1/2]` and the
    /// boundary rule `2|x|` outside.
    pub fn eval(&self, x: f64) -> f64 {
        if !(-0.5..=0.5).contains(&x) {
            return 2.0 * x.abs();
        }
        let n = self.values.len();
        let t = (x + 0.5) * (n - 1) as f64;
        let j = (t.floor() as usize).min(n - 2);
        let frac = t - j as f64;
        self.values[j] + frac * (self.values[j + 1] - self.values[j])
    }

    /// Sup-norm distance to another grid function on the same grid.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "grids must match");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn grid_x(j: usize, n: usize) -> f64 {
    j as f64 / (n - 1) as f64 - 0.5
}

/// One application of the contraction operator, pointwise on the grid.
///
/// Endpoints take the boundary branch (exactly 1) and the left half is
/// mirrored onto the right half, so the endpoint and symmetry invariants hold
/// exactly in floating point.
pub fn apply_operator(g: &GridFunction) -> GridFunction {
    let n = g.values.len();
    let theta = g.theta;
    let shift = (theta - 1.0) / 2.0;
    let scale = 1.0 / (2.0 * theta);
    let mut values = vec![0.0; n];
    values[0] = 1.0;
    values[n - 1] = 1.0;
    for j in 1..=(n - 1) / 2 {
        let x = grid_x(j, n);
        values[j] = scale * (g.eval(theta * x - shift) + g.eval(theta * x + shift));
        values[n - 1 - j] = values[j];
    }
    GridFunction { theta, values }
}

/// The fixed point and the iteration trace that produced it.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub f: GridFunction,
    pub iterations: usize,
    /// Sup-norm change at each iteration; contracts by about `1/theta`.
    pub sup_changes: Vec<f64>,
}

/// Iterates the operator from the boundary extension until the sup-norm
/// change drops to `tol`, capped at `ceil(log(2/tol) / log(theta))`
/// iterations (the contraction bound for the cap).
pub fn solve_f(theta: f64, grid_points: usize, tol: f64) -> Result<SolveReport, BernoulliError> {
    if tol.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(BernoulliError::BadTolerance(tol));
    }
    let mut current = GridFunction::initial(theta, grid_points)?;
    let cap = ((2.0 / tol).ln() / theta.ln()).ceil().max(1.0) as usize;
    let mut sup_changes = Vec::new();
    for _ in 0..cap {
        let next = apply_operator(&current);
        let change = current.sup_distance(&next);
        sup_changes.push(change);
        current = next;
        if change <= tol {
            break;
        }
    }
    Ok(SolveReport {
        f: current,
        iterations: sup_changes.len(),
        sup_changes,
    })
}

/// The distance `1/2 + 1/2 f_theta(x)` for `x` in `[-1/2, 1/2]`.
pub fn d_theta(theta: f64, x: f64, grid_points: usize, tol: f64) -> Result<f64, BernoulliError> {
    if !(-0.5..=0.5).contains(&x) {
        return Err(BernoulliError::XOutOfRange(x));
    }
    let report = solve_f(theta, grid_points, tol)?;
    Ok(0.5 + 0.5 * report.f.eval(x))
}

/// Writes `x,f,d` rows for plotting.
pub fn write_grid_csv<W: Write>(f: &GridFunction, mut out: W) -> io::Result<()> {
    writeln!(out, "x,f,d")?;
    for (j, v) in f.values().iter().enumerate() {
        writeln!(out, "{},{},{}", f.x(j), v, 0.5 + 0.5 * v)?;
    }
    Ok(())
}
