//! Uniform radial meshes and functions sampled on them.
//!
//! A grid of `n` points with outer radius `r_max` samples
//! `r_i = i·dr` and `k_j = j·dk` for `i, j = 1..=n`, with `dr = r_max/n` and
//! `dk = π/r_max`, so that `dr·dk = π/n`. The origin is never stored.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    n_points: usize,
    r_max: f64,
}

impl RadialGrid {
    pub fn new(n_points: usize, r_max: f64) -> Result<Self> {
        if n_points < MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::invalid(format!(
                "grid size must be a power of two >= {MIN_POINTS}, got {n_points}"
            )));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::invalid(format!("r_max must be positive, got {r_max}")));
        }
        Ok(Self { n_points, r_max })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn dr(&self) -> f64 {
        self.r_max / self.n_points as f64
    }

    pub fn dk(&self) -> f64 {
        std::f64::consts::PI / self.r_max
    }

    pub fn k_max(&self) -> f64 {
        self.n_points as f64 * self.dk()
    }

    /// Radius of sample `i` (zero-based, so `r(0) = dr`).
    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.dr()
    }

    #[inline]
    pub fn k(&self, j: usize) -> f64 {
        (j + 1) as f64 * self.dk()
    }

    pub fn r_values(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.r(i)).collect()
    }

    pub fn k_values(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.k(j)).collect()
    }

    /// Same number of points, outer radius multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.n_points, self.r_max * factor)
    }

    pub(crate) fn ensure_same(&self, other: &RadialGrid, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: ({}, {}) vs ({}, {})",
                self.n_points, self.r_max, other.n_points, other.r_max
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Space {
    R,
    K,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::R => f.write_str("r-space"),
            Space::K => f.write_str("k-space"),
        }
    }
}

/// A real function sampled on the r- or k-mesh of a [`RadialGrid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialFn {
    grid: RadialGrid,
    space: Space,
    values: Vec<f64>,
}

impl RadialFn {
    pub fn new(grid: RadialGrid, space: Space, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.n_points()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite value {} at index {i}", values[i])));
        }
        Ok(Self { grid, space, values })
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_vec(grid: RadialGrid, space: Space, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { grid, space, values }
    }

    /// Samples `f` at the mesh points of `space`.
    pub fn from_fn(grid: RadialGrid, space: Space, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.n_points())
            .map(|i| match space {
                Space::R => f(grid.r(i)),
                Space::K => f(grid.k(i)),
            })
            .collect();
        Self::new(grid, space, values)
    }

    pub fn constant(grid: RadialGrid, space: Space, value: f64) -> Self {
        Self::from_vec(grid, space, vec![value; grid.n_points()])
    }

    pub fn zeros(grid: RadialGrid, space: Space) -> Self {
        Self::constant(grid, space, 0.0)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mesh coordinate of sample `i` (r or k depending on the space tag).
    pub fn coord(&self, i: usize) -> f64 {
        match self.space {
            Space::R => self.grid.r(i),
            Space::K => self.grid.k(i),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.space, self.values.iter().map(|&v| f(v)).collect())
    }

    pub(crate) fn require(&self, space: Space, op: &'static str) -> Result<()> {
        if self.space == space {
            Ok(())
        } else {
            Err(Error::WrongSpace {
                op,
                expected: space,
                found: self.space,
            })
        }
    }

    pub(crate) fn require_compatible(&self, other: &RadialFn, what: &str) -> Result<()> {
        self.grid.ensure_same(&other.grid, what)?;
        if self.space != other.space {
            return Err(Error::GridMismatch(format!(
                "{what}: {} vs {}",
                self.space, other.space
            )));
        }
        Ok(())
    }

    /// Value at the origin (or k = 0) by quadratic extrapolation through the
    /// first three samples.
    pub fn value_at_origin(&self) -> f64 {
        let v = &self.values;
        3.0 * v[0] - 3.0 * v[1] + v[2]
    }

    /// `∫ 4π x² f(x) dx` by the trapezoid rule, the integrand vanishing at 0.
    pub fn volume_integral(&self) -> f64 {
        let n = self.len();
        let step = match self.space {
            Space::R => self.grid.dr(),
            Space::K => self.grid.dk(),
        };
        let mut sum = 0.0;
        for i in 0..n {
            let x = self.coord(i);
            let w = if i + 1 == n { 0.5 } else { 1.0 };
            sum += w * x * x * self.values[i];
        }
        4.0 * std::f64::consts::PI * step * sum
    }

    /// Root-mean-square difference against another function on the same mesh.
    pub fn rms_diff(&self, other: &RadialFn) -> Result<f64> {
        self.require_compatible(other, "rms_diff")?;
        let sum: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok((sum / self.len() as f64).sqrt())
    }

    pub fn max_abs_diff(&self, other: &RadialFn) -> Result<f64> {
        self.require_compatible(other, "max_abs_diff")?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Largest `|f - target|` over the outer `fraction` of the mesh.
    pub fn tail_deviation(&self, target: f64, fraction: f64) -> f64 {
        let n = self.len();
        let start = n - ((n as f64 * fraction).ceil() as usize).clamp(1, n);
        self.values[start..]
            .iter()
            .map(|v| (v - target).abs())
            .fold(0.0, f64::max)
    }
}
