//! Bohm's quantum potential for 1-D densities.
//!
//! With `ψ = R e^{iS}`, `R = √n`, the Schrödinger equation splits into a
//! continuity equation for `n` and a Hamilton–Jacobi equation carrying the
//! extra term `Q = -(ħ²/2m) R''/R`. Units are atomic (ħ = 1); mass is in
//! electron masses.
//!
//! `R''` uses the centered three-point stencil. Points with `n` at or below
//! [`DENSITY_THRESHOLD`] (nodes, walls) are masked out of `Q`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DENSITY_THRESHOLD: f64 = 1e-10;

/// Grid used by [`box_eigenstate`]. 15360 cells divide evenly by 1..=6, so
/// the nodes of the low levels sit on grid points; `R = |ψ|` has a kink at
/// each node and a node between two points costs O(dx) in the kinetic
/// energy. The spacing balances stencil error against rounding in `R''`.
pub const DEFAULT_BOX_POINTS: usize = 15 * 1024 + 1;

/// Uniform grid on `[x_min, x_max]`, both ends included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineGrid {
    n_points: usize,
    x_min: f64,
    x_max: f64,
}

impl LineGrid {
    pub fn new(n_points: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n_points < 16 {
            return Err(Error::invalid(format!(
                "line grid needs at least 16 points, got {n_points}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::invalid(format!("bad interval [{x_min}, {x_max}]")));
        }
        Ok(Self { n_points, x_min, x_max })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn x_values(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Trapezoid rule.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let n = f.len();
        let inner: f64 = f[1..n - 1].iter().sum();
        self.dx() * (inner + 0.5 * (f[0] + f[n - 1]))
    }

    fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len != self.n_points {
            return Err(Error::GridMismatch(format!(
                "{what} has {len} samples, grid has {}",
                self.n_points
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BohmFields {
    pub grid: LineGrid,
    pub mass: f64,
    pub density: Vec<f64>,
    pub amplitude: Vec<f64>,
    /// `None` for real stationary states.
    pub phase: Option<Vec<f64>>,
    /// `None` where the density is below threshold or at the grid ends.
    pub q: Vec<Option<f64>>,
    pub current: Vec<f64>,
}

impl BohmFields {
    /// Fields of a sampled density with optional phase `S(x)`.
    pub fn from_density(grid: LineGrid, density: Vec<f64>, phase: Option<Vec<f64>>, mass: f64) -> Result<Self> {
        let q = quantum_potential(&density, mass, &grid)?;
        let current = match &phase {
            Some(s) => {
                grid.check_len(s.len(), "phase")?;
                current(&density, s, mass, &grid)
            }
            None => vec![0.0; density.len()],
        };
        Ok(Self {
            grid,
            mass,
            amplitude: density.iter().map(|n| n.sqrt()).collect(),
            density,
            phase,
            q,
            current,
        })
    }

    /// Indices excluded from `Q`.
    pub fn masked(&self) -> Vec<usize> {
        self.q
            .iter()
            .enumerate()
            .filter_map(|(i, q)| q.is_none().then_some(i))
            .collect()
    }
}

/// `Q = -(1/2m) R''/R` with `R = √n`.
pub fn quantum_potential(density: &[f64], mass: f64, grid: &LineGrid) -> Result<Vec<Option<f64>>> {
    grid.check_len(density.len(), "density")?;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid(format!("mass must be positive, got {mass}")));
    }
    if let Some(i) = density.iter().position(|&n| !(n >= 0.0 && n.is_finite())) {
        return Err(Error::invalid(format!(
            "density must be finite and non-negative, got {} at x = {}",
            density[i],
            grid.x(i)
        )));
    }
    if density.iter().all(|&n| n <= DENSITY_THRESHOLD) {
        return Err(Error::invalid("density vanishes everywhere"));
    }
    let r: Vec<f64> = density.iter().map(|n| n.sqrt()).collect();
    let scale = -1.0 / (2.0 * mass * grid.dx().powi(2));
    let last = r.len() - 1;
    Ok((0..r.len())
        .map(|i| {
            (i > 0 && i < last && density[i] > DENSITY_THRESHOLD)
                .then(|| scale * (r[i + 1] - 2.0 * r[i] + r[i - 1]) / r[i])
        })
        .collect())
}

/// `j = n S'/m`, centered differences, one-sided at the ends.
fn current(density: &[f64], phase: &[f64], mass: f64, grid: &LineGrid) -> Vec<f64> {
    let dx = grid.dx();
    let last = density.len() - 1;
    (0..=last)
        .map(|i| {
            let ds = match i {
                0 => (phase[1] - phase[0]) / dx,
                i if i == last => (phase[last] - phase[last - 1]) / dx,
                i => (phase[i + 1] - phase[i - 1]) / (2.0 * dx),
            };
            density[i] * ds / mass
        })
        .collect()
}

/// Particle in a box `[0, a]`, level `n ≥ 1`, on [`DEFAULT_BOX_POINTS`].
pub fn box_eigenstate(level: usize, width: f64) -> Result<BohmFields> {
    box_eigenstate_on(level, width, DEFAULT_BOX_POINTS)
}

pub fn box_eigenstate_on(level: usize, width: f64, n_points: usize) -> Result<BohmFields> {
    if level == 0 {
        return Err(Error::invalid("box level starts at 1"));
    }
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::invalid(format!("box width must be positive, got {width}")));
    }
    let grid = LineGrid::new(n_points, 0.0, width)?;
    let cells = n_points - 1;
    let density = (0..n_points)
        .map(|i| 2.0 / width * sin_pi_ratio(level * i, cells).powi(2))
        .collect();
    BohmFields::from_density(grid, density, None, 1.0)
}

/// `sin(π p/q)` with the argument reduced in integers, so that values near
/// the nodes keep full relative precision.
fn sin_pi_ratio(p: usize, q: usize) -> f64 {
    let m = p % (2 * q);
    let (m, sign) = if m >= q { (m - q, -1.0) } else { (m, 1.0) };
    sign * (PI * m.min(q - m) as f64 / q as f64).sin()
}

/// `E_n = n²π²/(2 m a²)`.
pub fn box_energy(level: usize, width: f64, mass: f64) -> f64 {
    (level as f64 * PI / width).powi(2) / (2.0 * mass)
}

/// Harmonic-oscillator ground state, `n ∝ exp(-mωx²)`, on `[-L, L]` with
/// `L = 10/√(mω)`.
pub fn oscillator_ground_state(omega: f64, mass: f64, n_points: usize) -> Result<BohmFields> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid(format!("omega must be positive, got {omega}")));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid(format!("mass must be positive, got {mass}")));
    }
    let a = mass * omega;
    let half = 10.0 / a.sqrt();
    let grid = LineGrid::new(n_points, -half, half)?;
    let norm = (a / PI).sqrt();
    let density = grid.x_values().iter().map(|x| norm * (-a * x * x).exp()).collect();
    BohmFields::from_density(grid, density, None, mass)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KineticCheck {
    pub integral_nq: f64,
    pub kinetic_energy: f64,
    /// `|∫nQ - KE| / KE`.
    pub residual: f64,
}

/// Compares `∫ n Q dx` with `(1/2m) ∫ (R')² dx` for a real stationary state.
///
/// `n Q = -R R''/(2m)` stays finite at nodes, so it is summed over every
/// interior point; masked points therefore enter with their regular limit.
/// `R'` uses forward differences on the cell edges.
pub fn kinetic_in_q(fields: &BohmFields) -> Result<KineticCheck> {
    if let Some(s) = &fields.phase {
        let (lo, hi) = s
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if hi - lo > 1e-12 {
            return Err(Error::invalid(
                "kinetic_in_q needs a stationary state with constant phase",
            ));
        }
    }
    let grid = &fields.grid;
    let norm = grid.integrate(&fields.density);
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "density must be normalized to 1, integrates to {norm}"
        )));
    }
    let r = &fields.amplitude;
    let dx = grid.dx();
    let m2 = 2.0 * fields.mass;
    let last = r.len() - 1;
    let integral_nq: f64 = (1..last)
        .map(|i| -r[i] * (r[i + 1] - 2.0 * r[i] + r[i - 1]))
        .sum::<f64>()
        / (m2 * dx);
    // boundary terms of the summation by parts, zero when R vanishes at the ends
    let edges = (r[0] * (r[1] - r[0]) - r[last] * (r[last] - r[last - 1])) / (m2 * dx);
    let kinetic_energy: f64 = r.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / (m2 * dx);
    let integral_nq = integral_nq - edges;
    Ok(KineticCheck {
        integral_nq,
        kinetic_energy,
        residual: (integral_nq - kinetic_energy).abs() / kinetic_energy.abs(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSlice {
    pub t: f64,
    pub density: Vec<f64>,
    pub phase: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityResidual {
    /// Midpoints of consecutive slice times.
    pub times: Vec<f64>,
    /// `∂n/∂t + ∂(n S'/m)/∂x` per time interval. Entries within two points of
    /// either end lack a full stencil and are left at zero.
    pub values: Vec<Vec<f64>>,
}

impl ContinuityResidual {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Continuity-equation residual, centered in space and at the midpoint in time.
pub fn continuity_residual(slices: &[TimeSlice], mass: f64, grid: &LineGrid) -> Result<ContinuityResidual> {
    if slices.len() < 2 {
        return Err(Error::invalid("continuity residual needs at least two time slices"));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid(format!("mass must be positive, got {mass}")));
    }
    for s in slices {
        grid.check_len(s.density.len(), "density slice")?;
        grid.check_len(s.phase.len(), "phase slice")?;
    }
    let n = grid.n_points();
    let dx = grid.dx();
    let divergence = |s: &TimeSlice| -> Vec<f64> {
        let j = current(&s.density, &s.phase, mass, grid);
        let mut d = vec![0.0; n];
        for i in 2..n - 2 {
            d[i] = (j[i + 1] - j[i - 1]) / (2.0 * dx);
        }
        d
    };
    let mut times = Vec::with_capacity(slices.len() - 1);
    let mut values = Vec::with_capacity(slices.len() - 1);
    let mut prev_div = divergence(&slices[0]);
    for w in slices.windows(2) {
        let dt = w[1].t - w[0].t;
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
        if !(dt > 0.0) {
            return Err(Error::invalid("slice times must be strictly increasing"));
        }
        let div = divergence(&w[1]);
        let mut res = vec![0.0; n];
        for i in 2..n - 2 {
            res[i] = (w[1].density[i] - w[0].density[i]) / dt + 0.5 * (prev_div[i] + div[i]);
        }
        times.push(0.5 * (w[0].t + w[1].t));
        values.push(res);
        prev_div = div;
    }
    Ok(ContinuityResidual { times, values })
}
