use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};

use crate::error::{Error, Result};
use crate::grid::{RadialFn, RadialGrid, Space};

/// Long-range Coulomb part `A·erf(r/r_c)/r`, with `A = β q_i q_j`.
///
/// Its transform `4πA·exp(-k²r_c²/4)/k²` is applied analytically in k-space,
/// so only short-ranged functions ever pass through the sine transform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoulombTail {
    pub amplitude: f64,
    pub r_c: f64,
}

impl CoulombTail {
    pub fn new(amplitude: f64, r_c: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::invalid("Coulomb amplitude must be finite"));
        }
        if !(r_c.is_finite() && r_c > 0.0) {
            return Err(Error::invalid(format!("splitting radius must be positive, got {r_c}")));
        }
        Ok(Self { amplitude, r_c })
    }

    pub fn at_r(&self, r: f64) -> f64 {
        self.amplitude * erf(r / self.r_c) / r
    }

    pub fn at_k(&self, k: f64) -> f64 {
        4.0 * PI * self.amplitude * (-0.25 * k * k * self.r_c * self.r_c).exp() / (k * k)
    }
}

/// Dimensionless pair interaction `βφ(r) = βφ_s(r) + βφ_l(r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairPotential {
    pub label: String,
    short_range: RadialFn,
    long_range: Option<CoulombTail>,
}

impl PairPotential {
    pub fn new(label: impl Into<String>, short_range: RadialFn, long_range: Option<CoulombTail>) -> Result<Self> {
        short_range.require(Space::R, "PairPotential")?;
        Ok(Self {
            label: label.into(),
            short_range,
            long_range,
        })
    }

    pub fn short_ranged(label: impl Into<String>, beta_phi: RadialFn) -> Result<Self> {
        Self::new(label, beta_phi, None)
    }

    pub fn zero(label: impl Into<String>, grid: RadialGrid) -> Self {
        Self {
            label: label.into(),
            short_range: RadialFn::zeros(grid, Space::R),
            long_range: None,
        }
    }

    /// Bare Coulomb `A/r`, split into `A·erfc(r/r_c)/r` and the erf tail.
    pub fn coulomb(label: impl Into<String>, grid: RadialGrid, amplitude: f64, r_c: f64) -> Result<Self> {
        let tail = CoulombTail::new(amplitude, r_c)?;
        let short = RadialFn::from_fn(grid, Space::R, |r| amplitude * erfc(r / r_c) / r)?;
        Self::new(label, short, Some(tail))
    }

    pub fn grid(&self) -> &RadialGrid {
        self.short_range.grid()
    }

    pub fn short_range(&self) -> &RadialFn {
        &self.short_range
    }

    pub fn long_range(&self) -> Option<&CoulombTail> {
        self.long_range.as_ref()
    }

    /// `βφ_l(k)` on the k-mesh, if there is a long-range part.
    pub fn long_range_k(&self) -> Option<RadialFn> {
        self.long_range.map(|t| {
            let grid = *self.grid();
            RadialFn::from_vec(grid, Space::K, grid.k_values().iter().map(|&k| t.at_k(k)).collect())
        })
    }

    pub(crate) fn tail_r_values(&self) -> Vec<f64> {
        let grid = self.grid();
        match self.long_range {
            Some(t) => grid.r_values().iter().map(|&r| t.at_r(r)).collect(),
            None => vec![0.0; grid.n_points()],
        }
    }

    pub(crate) fn tail_k_values(&self) -> Vec<f64> {
        let grid = self.grid();
        match self.long_range {
            Some(t) => grid.k_values().iter().map(|&k| t.at_k(k)).collect(),
            None => vec![0.0; grid.n_points()],
        }
    }

    /// Full `βφ(r)` on the r-mesh.
    pub fn full_r(&self) -> RadialFn {
        let values = self
            .short_range
            .values()
            .iter()
            .zip(self.tail_r_values())
            .map(|(s, l)| s + l)
            .collect();
        RadialFn::from_vec(*self.grid(), Space::R, values)
    }

    /// Largest `|βφ_s|` over the outer 5% of the mesh; small when the short
    /// part has decayed before `r_max`.
    pub fn short_range_tail(&self) -> f64 {
        self.short_range.tail_deviation(0.0, 0.05)
    }

    /// Potential with both parts multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Ok(Self {
            label: self.label.clone(),
            short_range: self.short_range.map(|v| factor * v)?,
            long_range: self.long_range.map(|t| CoulombTail {
                amplitude: factor * t.amplitude,
                ..t
            }),
        })
    }

    /// Sum of two potentials on the same grid. Long-range parts must share `r_c`.
    pub fn plus(&self, other: &PairPotential, label: impl Into<String>) -> Result<Self> {
        self.short_range
            .require_compatible(&other.short_range, "PairPotential::plus")?;
        let long_range = match (self.long_range, other.long_range) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => {
                if a.r_c != b.r_c {
                    return Err(Error::invalid("cannot add Coulomb tails with different r_c"));
                }
                Some(CoulombTail {
                    amplitude: a.amplitude + b.amplitude,
                    r_c: a.r_c,
                })
            }
        };
        let short = self
            .short_range
            .values()
            .iter()
            .zip(other.short_range.values())
            .map(|(a, b)| a + b)
            .collect();
        Self::new(label, RadialFn::new(*self.grid(), Space::R, short)?, long_range)
    }
}

/// One classical fluid component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeciesSpec {
    pub label: String,
    /// Number density, bohr⁻³.
    pub density: f64,
    /// Mass in electron masses.
    pub mass: f64,
    /// Charge in units of e.
    pub charge: f64,
    /// Temperature in Hartree.
    pub temperature: f64,
}

impl SpeciesSpec {
    pub fn new(label: impl Into<String>, density: f64, temperature: f64) -> Result<Self> {
        let s = Self {
            label: label.into(),
            density,
            mass: 1.0,
            charge: 0.0,
            temperature,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_charge(mut self, charge: f64) -> Self {
        self.charge = charge;
        self
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.density.is_finite() && self.density > 0.0) {
            return Err(Error::invalid(format!(
                "species {}: density must be positive, got {}",
                self.label, self.density
            )));
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::invalid(format!(
                "species {}: classical solve needs T > 0, got {}",
                self.label, self.temperature
            )));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::invalid(format!("species {}: mass must be positive", self.label)));
        }
        if !self.charge.is_finite() {
            return Err(Error::invalid(format!("species {}: charge must be finite", self.label)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coulomb_split_reconstructs_bare_potential() {
        let grid = RadialGrid::new(512, 20.0).unwrap();
        let p = PairPotential::coulomb("ee", grid, 0.7, 1.3).unwrap();
        let full = p.full_r();
        for (i, v) in full.values().iter().enumerate() {
            let r = grid.r(i);
            assert!((v - 0.7 / r).abs() < 1e-8 * (0.7 / r).max(1.0), "r = {r}");
        }
        assert!(p.short_range_tail() < 1e-10);
    }

    #[test]
    fn tail_transform_is_the_screened_coulomb_form() {
        let t = CoulombTail::new(2.0, 1.0).unwrap();
        let k = 0.5;
        assert!((t.at_k(k) - 8.0 * PI * (-0.0625f64).exp() / 0.25).abs() < 1e-12);
    }

    #[test]
    fn species_validation() {
        assert!(SpeciesSpec::new("a", 0.0, 1.0).is_err());
        assert!(SpeciesSpec::new("a", 1.0, 0.0).is_err());
        assert!(SpeciesSpec::new("a", 1.0, 1.0)
            .unwrap()
            .with_mass(-1.0)
            .validate()
            .is_err());
    }

    #[test]
    fn adding_potentials() {
        let grid = RadialGrid::new(64, 10.0).unwrap();
        let a = PairPotential::coulomb("a", grid, 1.0, 1.0).unwrap();
        let b = PairPotential::short_ranged("b", RadialFn::constant(grid, Space::R, 0.5)).unwrap();
        let sum = a.plus(&b, "a+b").unwrap();
        assert_eq!(sum.long_range().unwrap().amplitude, 1.0);
        let diff = sum.full_r().values()[3] - a.full_r().values()[3];
        assert!((diff - 0.5).abs() < 1e-15);
    }
}
