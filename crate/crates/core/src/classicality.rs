//! Thermal de Broglie wavelength and a quantum/classical verdict.
//!
//! `λ = h / p` with the thermal momentum `p = √(3 m k_B T)` (translational
//! kinetic energy `3T/2`). A body is treated as quantum when `λ ≥ L` for the
//! length scale `L` of interest. This module works in SI; the degeneracy
//! estimate is done in atomic units and converted at the boundary.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 constants (SI). `h` and `k_B` are exact by definition.
pub mod constants {
    pub const PLANCK: f64 = 6.626_070_15e-34;
    pub const BOLTZMANN: f64 = 1.380_649e-23;
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    pub const HARTREE: f64 = 4.359_744_722_207_1e-18;
    pub const BOHR: f64 = 5.291_772_109_03e-11;
    pub const PROTON_RADIUS: f64 = 0.88e-15;
}

use constants::*;

pub fn kelvin_to_hartree(t: f64) -> f64 {
    t * BOLTZMANN / HARTREE
}

pub fn hartree_to_kelvin(e: f64) -> f64 {
    e * HARTREE / BOLTZMANN
}

pub fn kg_to_electron_masses(m: f64) -> f64 {
    m / ELECTRON_MASS
}

pub fn electron_masses_to_kg(m: f64) -> f64 {
    m * ELECTRON_MASS
}

pub fn meters_to_bohr(x: f64) -> f64 {
    x / BOHR
}

pub fn bohr_to_meters(x: f64) -> f64 {
    x * BOHR
}

/// Number density m⁻³ to bohr⁻³.
pub fn per_m3_to_per_bohr3(n: f64) -> f64 {
    n * BOHR.powi(3)
}

/// `h/√(3 k_B)`: `λ √(m T)` for every mass and temperature.
pub fn wavelength_constant() -> f64 {
    PLANCK / (3.0 * BOLTZMANN).sqrt()
}

/// λ in meters for mass in kg and temperature in K.
pub fn thermal_wavelength(mass_kg: f64, temperature_k: f64) -> Result<f64> {
    thermal_wavelength_with(mass_kg, temperature_k, 1.0)
}

/// As [`thermal_wavelength`] with the kinetic energy multiplied by
/// `kinetic_factor` (1 for `3T/2`).
pub fn thermal_wavelength_with(mass_kg: f64, temperature_k: f64, kinetic_factor: f64) -> Result<f64> {
    if !(mass_kg.is_finite() && mass_kg > 0.0) {
        return Err(Error::invalid(format!("mass must be positive, got {mass_kg}")));
    }
    if !(kinetic_factor.is_finite() && kinetic_factor > 0.0) {
        return Err(Error::invalid(format!(
            "kinetic factor must be positive, got {kinetic_factor}"
        )));
    }
    if temperature_k == 0.0 {
        return Err(Error::ZeroTemperature);
    }
    if !(temperature_k.is_finite() && temperature_k > 0.0) {
        return Err(Error::invalid(format!(
            "temperature must be positive, got {temperature_k}"
        )));
    }
    Ok(PLANCK / (3.0 * kinetic_factor * mass_kg * BOLTZMANN * temperature_k).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Degeneracy {
    /// Hartree.
    pub fermi_energy: f64,
    /// `2 E_F / 5`, Hartree.
    pub quantum_temperature: f64,
}

/// Fermi energy of the majority spin and the matching temperature `2E_F/5`.
/// Density in bohr⁻³, mass in electron masses.
pub fn degeneracy_temperature(density: f64, mass: f64, zeta: f64) -> Result<Degeneracy> {
    if !(density.is_finite() && density > 0.0) {
        return Err(Error::invalid(format!("density must be positive, got {density}")));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid(format!("mass must be positive, got {mass}")));
    }
    if !(0.0..=1.0).contains(&zeta) {
        return Err(Error::invalid(format!("zeta must lie in [0, 1], got {zeta}")));
    }
    let n_sigma = 0.5 * (1.0 + zeta) * density;
    let k_f = (6.0 * PI * PI * n_sigma).cbrt();
    let fermi_energy = k_f * k_f / (2.0 * mass);
    Ok(Degeneracy {
        fermi_energy,
        quantum_temperature: 0.4 * fermi_energy,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Quantum,
    Classical,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Quantum => "quantum",
            Verdict::Classical => "classical",
        })
    }
}

/// Optional fluid data for [`classify`]: density in m⁻³ and polarization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluidDensity {
    pub density_m3: f64,
    pub zeta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyInfo {
    pub fermi_energy_hartree: f64,
    pub quantum_temperature_hartree: f64,
    pub quantum_temperature_k: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsEcho {
    pub planck_j_s: f64,
    pub boltzmann_j_per_k: f64,
    pub electron_mass_kg: f64,
    pub hartree_j: f64,
    pub bohr_m: f64,
}

impl Default for ConstantsEcho {
    fn default() -> Self {
        Self {
            planck_j_s: PLANCK,
            boltzmann_j_per_k: BOLTZMANN,
            electron_mass_kg: ELECTRON_MASS,
            hartree_j: HARTREE,
            bohr_m: BOHR,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalityReport {
    pub mass_kg: f64,
    pub mass_electron_masses: f64,
    pub temperature_k: f64,
    pub temperature_hartree: f64,
    /// Temperature entering λ: `max(T, T_q)` when a density is given.
    pub effective_temperature_k: f64,
    pub kinetic_factor: f64,
    pub wavelength_m: f64,
    pub wavelength_bohr: f64,
    pub comparison_length_m: f64,
    pub wavelength_over_length: f64,
    pub verdict: Verdict,
    pub degeneracy: Option<DegeneracyInfo>,
    pub constants: ConstantsEcho,
}

pub fn classify(
    mass_kg: f64,
    temperature_k: f64,
    length_m: f64,
    fluid: Option<FluidDensity>,
) -> Result<ClassicalityReport> {
    classify_with(mass_kg, temperature_k, length_m, fluid, 1.0)
}

pub fn classify_with(
    mass_kg: f64,
    temperature_k: f64,
    length_m: f64,
    fluid: Option<FluidDensity>,
    kinetic_factor: f64,
) -> Result<ClassicalityReport> {
    if !(length_m.is_finite() && length_m > 0.0) {
        return Err(Error::invalid(format!("length must be positive, got {length_m}")));
    }
    if !(temperature_k.is_finite() && temperature_k >= 0.0) {
        return Err(Error::invalid(format!(
            "temperature must be non-negative, got {temperature_k}"
        )));
    }
    let mass_me = kg_to_electron_masses(mass_kg);
    let degeneracy = fluid
        .map(|f| {
            let d = degeneracy_temperature(per_m3_to_per_bohr3(f.density_m3), mass_me, f.zeta)?;
            Ok::<_, Error>(DegeneracyInfo {
                fermi_energy_hartree: d.fermi_energy,
                quantum_temperature_hartree: d.quantum_temperature,
                quantum_temperature_k: hartree_to_kelvin(d.quantum_temperature),
            })
        })
        .transpose()?;
    let t_eff = degeneracy.map_or(temperature_k, |d| temperature_k.max(d.quantum_temperature_k));
    let wavelength = thermal_wavelength_with(mass_kg, t_eff, kinetic_factor)?;
    Ok(ClassicalityReport {
        mass_kg,
        mass_electron_masses: mass_me,
        temperature_k,
        temperature_hartree: kelvin_to_hartree(temperature_k),
        effective_temperature_k: t_eff,
        kinetic_factor,
        wavelength_m: wavelength,
        wavelength_bohr: meters_to_bohr(wavelength),
        comparison_length_m: length_m,
        wavelength_over_length: wavelength / length_m,
        verdict: if wavelength >= length_m {
            Verdict::Quantum
        } else {
            Verdict::Classical
        },
        degeneracy,
        constants: ConstantsEcho::default(),
    })
}

/// The 1 kg, 300 K wavelength as published, next to the value computed here.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublishedComparison {
    pub published_m: f64,
    pub computed_m: f64,
    /// `published / computed`.
    pub factor: f64,
    /// Same formula with ħ in place of h, for reference.
    pub computed_with_hbar_m: f64,
}

pub const PUBLISHED_CAT_WAVELENGTH: f64 = 9.45e-23;

pub fn published_cat_comparison() -> PublishedComparison {
    let computed = thermal_wavelength(1.0, 300.0).expect("valid inputs");
    PublishedComparison {
        published_m: PUBLISHED_CAT_WAVELENGTH,
        computed_m: computed,
        factor: PUBLISHED_CAT_WAVELENGTH / computed,
        computed_with_hbar_m: computed / (2.0 * PI),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn electron_at_room_temperature() {
        let l = thermal_wavelength(ELECTRON_MASS, 300.0).unwrap();
        assert_relative_eq!(l, 6.23e-9, max_relative = 5e-3);
    }

    #[test]
    fn four_times_the_mass_halves_the_wavelength() {
        let a = thermal_wavelength(3.7e-20, 12.0).unwrap();
        let b = thermal_wavelength(4.0 * 3.7e-20, 12.0).unwrap();
        assert_relative_eq!(b, a / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn zero_temperature_is_its_own_error() {
        assert!(matches!(thermal_wavelength(1.0, 0.0), Err(Error::ZeroTemperature)));
        assert!(matches!(thermal_wavelength(-1.0, 1.0), Err(Error::InvalidInput(_))));
        assert!(matches!(thermal_wavelength(1.0, -1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn kinetic_factor_scales_as_inverse_root() {
        let a = thermal_wavelength_with(1.0, 300.0, 1.0).unwrap();
        let b = thermal_wavelength_with(1.0, 300.0, 4.0).unwrap();
        assert_relative_eq!(b, a / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn degeneracy_ratio_is_two_fifths() {
        for (n, m, z) in [(1e-3, 1.0, 0.0), (0.5, 3.0, 1.0), (2.0, 0.1, 0.4)] {
            let d = degeneracy_temperature(n, m, z).unwrap();
            assert_relative_eq!(d.quantum_temperature / d.fermi_energy, 0.4, max_relative = 1e-15);
        }
        let dilute = degeneracy_temperature(1e-30, 1.0, 0.0).unwrap();
        assert!(dilute.fermi_energy < 1e-18);
    }

    #[test]
    fn unpolarized_fermi_energy_matches_alpha() {
        let r_s: f64 = 1.0;
        let n = 3.0 / (4.0 * PI * r_s.powi(3));
        let d = degeneracy_temperature(n, 1.0, 0.0).unwrap();
        let k_f = 1.0 / (crate::ideal::alpha() * r_s);
        assert_relative_eq!(d.fermi_energy, k_f * k_f / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn cat_is_classical_even_at_one_kelvin() {
        for t in [300.0, 1.0] {
            let r = classify(1.0, t, PROTON_RADIUS, None).unwrap();
            assert_eq!(r.verdict, Verdict::Classical);
            assert!(r.wavelength_over_length < 1e-6);
        }
    }

    #[test]
    fn electron_is_quantum_on_the_bohr_scale() {
        let r = classify(ELECTRON_MASS, 300.0, BOHR, None).unwrap();
        assert_eq!(r.verdict, Verdict::Quantum);
    }

    #[test]
    fn degenerate_fluid_uses_quantum_temperature() {
        // metallic electron density, 1e29 m^-3, at 1 K
        let fluid = FluidDensity {
            density_m3: 1e29,
            zeta: 0.0,
        };
        let r = classify(ELECTRON_MASS, 1.0, BOHR, Some(fluid)).unwrap();
        let d = r.degeneracy.unwrap();
        assert_eq!(r.effective_temperature_k, d.quantum_temperature_k);
        assert!(d.quantum_temperature_k > 1e4);
        // T = 0 is allowed once the fluid supplies T_q
        assert!(classify(ELECTRON_MASS, 0.0, BOHR, Some(fluid)).is_ok());
        assert!(classify(ELECTRON_MASS, 0.0, BOHR, None).is_err());
    }

    #[test]
    fn published_value_is_reported_not_tuned() {
        let c = published_cat_comparison();
        assert_relative_eq!(c.computed_m, 5.944e-24, max_relative = 1e-3);
        assert!(c.factor > 15.0 && c.factor < 17.0);
    }
}
