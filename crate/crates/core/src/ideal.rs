//! Pair-distribution functions of the non-interacting electron fluid.
//!
//! For spin σ with density `n_σ` and Fermi wavevector `k_σ = (6π² n_σ)^{1/3}`
//! the same-spin PDF at T = 0 is
//!
//! ```text
//! g⁰_σσ(r) = 1 - [3 j₁(k_σ r) / (k_σ r)]²,       g⁰_σσ'(r) = 1 (σ ≠ σ').
//! ```
//!
//! At finite T the bracket becomes `F(r) = (1/n_σ)(1/2π²) ∫dk k² f_k sin(kr)/(kr)`
//! with the Fermi occupation `f_k = 1/(exp((k²/2 - μ)/T) + 1)`.
//!
//! In the unpolarized gas each spin holds `n/2` and `k_σ = 1/(α r_s)` with
//! `α = (4/9π)^{1/3} ≈ 0.52106`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{RadialFn, RadialGrid, Space};
use crate::par::{self, Execution};
use crate::quad::PanelRule;
use crate::transform::FourierBessel;

/// The five-digit value quoted in the literature; [`alpha`] is authoritative.
pub const ALPHA_QUOTED: f64 = 0.52106;

/// Occupations below this fraction of the peak are dropped from k-integrals.
const OCCUPATION_CUTOFF: f64 = 1e-16;

/// `(4/9π)^{1/3}`, so that the unpolarized `k_F = 1/(α r_s)`.
pub fn alpha() -> f64 {
    (4.0 / (9.0 * PI)).cbrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn label(self) -> &'static str {
        match self {
            Spin::Up => "up",
            Spin::Down => "down",
        }
    }
}

/// Uniform electron fluid: Wigner–Seitz radius, spin polarization and
/// temperature (Hartree). Spin up is the majority spin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JelliumSpec {
    pub r_s: f64,
    pub zeta: f64,
    pub temperature: f64,
}

impl JelliumSpec {
    pub fn new(r_s: f64, zeta: f64, temperature: f64) -> Result<Self> {
        if !(r_s.is_finite() && r_s > 0.0) {
            return Err(Error::invalid(format!("r_s must be positive, got {r_s}")));
        }
        if !(0.0..=1.0).contains(&zeta) {
            return Err(Error::invalid(format!("zeta must lie in [0, 1], got {zeta}")));
        }
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(Error::invalid(format!(
                "temperature must be non-negative, got {temperature}"
            )));
        }
        Ok(Self { r_s, zeta, temperature })
    }

    /// Temperature given as a multiple of the majority-spin Fermi energy.
    pub fn with_temperature_ratio(r_s: f64, zeta: f64, t_over_ef: f64) -> Result<Self> {
        let cold = Self::new(r_s, zeta, 0.0)?;
        if !(t_over_ef.is_finite() && t_over_ef >= 0.0) {
            return Err(Error::invalid(format!("T/E_F must be non-negative, got {t_over_ef}")));
        }
        Self::new(r_s, zeta, t_over_ef * cold.fermi_energy(Spin::Up))
    }

    pub fn density(&self) -> f64 {
        3.0 / (4.0 * PI * self.r_s.powi(3))
    }

    pub fn spin_density(&self, spin: Spin) -> f64 {
        let frac = match spin {
            Spin::Up => 0.5 * (1.0 + self.zeta),
            Spin::Down => 0.5 * (1.0 - self.zeta),
        };
        frac * self.density()
    }

    pub fn fermi_wavevector(&self, spin: Spin) -> f64 {
        fermi_wavevector(self.spin_density(spin))
    }

    pub fn fermi_energy(&self, spin: Spin) -> f64 {
        0.5 * self.fermi_wavevector(spin).powi(2)
    }

    /// `T / E_F` of the majority spin.
    pub fn temperature_ratio(&self) -> f64 {
        self.temperature / self.fermi_energy(Spin::Up)
    }

    /// Spins with a non-zero population, majority first.
    pub fn occupied_spins(&self) -> Vec<Spin> {
        if self.zeta < 1.0 {
            vec![Spin::Up, Spin::Down]
        } else {
            vec![Spin::Up]
        }
    }

    fn occupied(&self, spin: Spin) -> Result<f64> {
        let n = self.spin_density(spin);
        if n > 0.0 {
            Ok(n)
        } else {
            Err(Error::invalid(format!(
                "spin-{} channel is empty at zeta = {}",
                spin.label(),
                self.zeta
            )))
        }
    }
}

/// `(6π² n_σ)^{1/3}` for a single spin species.
pub fn fermi_wavevector(n_sigma: f64) -> f64 {
    (6.0 * PI * PI * n_sigma).cbrt()
}

/// `3 j₁(x)/x`, equal to 1 at the origin.
pub fn exchange_factor(x: f64) -> f64 {
    let x = x.abs();
    if x < 0.5 {
        // 3 Σ_{k≥1} (-1)^{k+1} 2k x^{2k-2} / (2k+1)!
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 2..10u32 {
            let kf = k as f64;
            // ratio of successive coefficients
            term *= -x2 * kf / ((kf - 1.0) * (2.0 * kf) * (2.0 * kf + 1.0));
            sum += term;
        }
        sum
    } else {
        3.0 * (x.sin() - x * x.cos()) / (x * x * x)
    }
}

/// Same-spin ideal PDF at T = 0 for Fermi wavevector `k_f`.
pub fn g0_same_spin(r: f64, k_f: f64) -> f64 {
    let f = exchange_factor(r * k_f);
    1.0 - f * f
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Every spin-resolved PDF tends to 1 at large r.
    #[default]
    Unity,
    /// Unpolarized convention with spin-resolved PDFs tending to 1/2.
    HalfUnpolarized,
}

/// Ideal PDFs for one spin channel.
#[derive(Clone, Debug)]
pub struct IdealPdf {
    pub spin: Spin,
    pub spin_density: f64,
    pub same_spin: RadialFn,
    pub opposite_spin: RadialFn,
}

impl IdealPdf {
    /// Applies an output convention. Internally everything stays at [`Normalization::Unity`].
    pub fn normalized(&self, spec: &JelliumSpec, norm: Normalization) -> Result<IdealPdf> {
        match norm {
            Normalization::Unity => Ok(self.clone()),
            Normalization::HalfUnpolarized => {
                if spec.zeta != 0.0 {
                    return Err(Error::invalid(
                        "the 1/2 normalization applies only to the unpolarized fluid",
                    ));
                }
                Ok(IdealPdf {
                    same_spin: self.same_spin.map(|v| 0.5 * v)?,
                    opposite_spin: self.opposite_spin.map(|v| 0.5 * v)?,
                    ..self.clone()
                })
            }
        }
    }
}

/// Majority-spin ideal PDFs at T = 0.
pub fn gr0_t0(spec: &JelliumSpec, grid: &RadialGrid) -> Result<IdealPdf> {
    gr0_t0_spin(spec, grid, Spin::Up)
}

pub fn gr0_t0_spin(spec: &JelliumSpec, grid: &RadialGrid, spin: Spin) -> Result<IdealPdf> {
    if spec.temperature != 0.0 {
        return Err(Error::invalid(format!("gr0_t0 needs T = 0, got {}", spec.temperature)));
    }
    let n = spec.occupied(spin)?;
    let k_f = fermi_wavevector(n);
    Ok(IdealPdf {
        spin,
        spin_density: n,
        same_spin: RadialFn::from_fn(*grid, Space::R, |r| g0_same_spin(r, k_f))?,
        opposite_spin: RadialFn::constant(*grid, Space::R, 1.0),
    })
}

/// Majority-spin ideal PDFs at the temperature in `spec` (any T ≥ 0).
pub fn gr0_finite_t(spec: &JelliumSpec, grid: &RadialGrid) -> Result<IdealPdf> {
    gr0_finite_t_spin(spec, grid, Spin::Up, Execution::default())
}

pub fn gr0_finite_t_spin(spec: &JelliumSpec, grid: &RadialGrid, spin: Spin, exec: Execution) -> Result<IdealPdf> {
    if spec.temperature == 0.0 {
        return gr0_t0_spin(spec, grid, spin);
    }
    let n = spec.occupied(spin)?;
    let t = spec.temperature;
    let mu = chemical_potential(n, t)?;
    let factor = finite_t_exchange_factor(mu, t, grid, exec);
    let values = factor.iter().map(|f| 1.0 - f * f).collect();
    Ok(IdealPdf {
        spin,
        spin_density: n,
        same_spin: RadialFn::new(*grid, Space::R, values)?,
        opposite_spin: RadialFn::constant(*grid, Space::R, 1.0),
    })
}

/// `F(r)` on the grid, normalized by the quadrature's own density so that
/// `F(0) = 1` holds exactly. The k-panels are halved until `F` stops moving.
fn finite_t_exchange_factor(mu: f64, t: f64, grid: &RadialGrid, exec: Execution) -> Vec<f64> {
    let r = grid.r_values();
    let mut width = PI / (2.0 * grid.r_max());
    let mut previous: Option<Vec<f64>> = None;
    for _ in 0..8 {
        let rule = occupation_rule(mu, t, width);
        let weights: Vec<f64> = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&k, &w)| w * k * k * fermi_occupation(k, mu, t))
            .collect();
        let norm: f64 = weights.iter().sum();
        let current = par::map_slice(exec, &r, |&ri| {
            let s: f64 = rule.nodes.iter().zip(&weights).map(|(&k, &w)| w * sinc(k * ri)).sum();
            s / norm
        });
        if let Some(prev) = &previous {
            let change = prev
                .iter()
                .zip(&current)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if change < 1e-13 {
                return current;
            }
        }
        previous = Some(current);
        width *= 0.5;
    }
    previous.expect("at least one pass")
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Fermi–Dirac occupation of a plane wave with `ε = k²/2`.
pub fn fermi_occupation(k: f64, mu: f64, t: f64) -> f64 {
    let x = (0.5 * k * k - mu) / t;
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Panels in k with breaks clustered where the occupation changes.
fn occupation_rule(mu: f64, t: f64, max_width: f64) -> PanelRule {
    let tail = -OCCUPATION_CUTOFF.ln();
    let centre = mu.max(0.0);
    let mut breaks = vec![0.0];
    for s in [
        -tail, -20.0, -10.0, -5.0, -2.0, -1.0, 0.0, 1.0, 2.0, 5.0, 10.0, 20.0, tail,
    ] {
        let eps = centre + s * t;
        if eps > 0.0 {
            breaks.push((2.0 * eps).sqrt());
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    PanelRule::new(&breaks, max_width, 16)
}

/// Spin density `(1/2π²) ∫ dk k² f_k` for chemical potential `mu`.
pub fn spin_density_for(mu: f64, t: f64) -> f64 {
    let k_cut = (2.0 * (mu.max(0.0) - OCCUPATION_CUTOFF.ln() * t)).sqrt();
    let rule = occupation_rule(mu, t, k_cut / 16.0);
    rule.integrate(|k| k * k * fermi_occupation(k, mu, t)) / (2.0 * PI * PI)
}

/// Chemical potential of one spin species of free fermions (unit mass).
///
/// `t = 0` returns the Fermi energy.
pub fn chemical_potential(n_sigma: f64, t: f64) -> Result<f64> {
    if !(n_sigma.is_finite() && n_sigma > 0.0) {
        return Err(Error::invalid(format!("spin density must be positive, got {n_sigma}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("temperature must be non-negative, got {t}")));
    }
    let e_f = 0.5 * fermi_wavevector(n_sigma).powi(2);
    if t == 0.0 {
        return Ok(e_f);
    }
    let thermal = (2.0 * PI / t).sqrt();
    let classical = t * (n_sigma * thermal.powi(3)).ln();
    let mut lo = e_f.min(classical) - 5.0 * t;
    let mut hi = e_f.max(classical) + 5.0 * t;
    let mut step = 10.0 * t;
    let mut guard = 0;
    while spin_density_for(lo, t) > n_sigma {
        lo -= step;
        step *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(Error::ChemicalPotential("no lower bracket".into()));
        }
    }
    step = 10.0 * t;
    while spin_density_for(hi, t) < n_sigma {
        hi += step;
        step *= 2.0;
        guard += 1;
        if guard > 400 {
            return Err(Error::ChemicalPotential("no upper bracket".into()));
        }
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if spin_density_for(mid, t) < n_sigma {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let rel = (spin_density_for(mu, t) / n_sigma - 1.0).abs();
    if rel > 1e-10 {
        return Err(Error::ChemicalPotential(format!(
            "density sum rule off by {rel:e} at mu = {mu}"
        )));
    }
    Ok(mu)
}

/// `S(k) = 1 + n ∫ d³r e^{ik·r} (g(r) - 1)`.
pub fn ideal_structure_factor(g0: &RadialFn, n: f64) -> Result<RadialFn> {
    g0.require(Space::R, "ideal_structure_factor")?;
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::invalid(format!("density must be positive, got {n}")));
    }
    let deviation = g0.tail_deviation(1.0, 0.05);
    if deviation > 1e-3 {
        return Err(Error::UndecayedTail { deviation });
    }
    let h: Vec<f64> = g0.values().iter().map(|g| g - 1.0).collect();
    let hk = FourierBessel::new(*g0.grid()).forward_values(&h);
    RadialFn::new(*g0.grid(), Space::K, hk.iter().map(|v| 1.0 + n * v).collect())
}
