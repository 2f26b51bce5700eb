//! Classical map of the interacting electron fluid.
//!
//! Electrons of each spin are treated as a classical fluid at an effective
//! temperature `T_cf`. Same-spin pairs interact through the Pauli potential
//! plus Coulomb, opposite spins through Coulomb only:
//!
//! ```text
//! βφ_σσ(r)  = βP_σ(r) + λ q²/(T_cf r)
//! βφ_σσ'(r) =           λ q²/(T_cf r)
//! ```
//!
//! Scanning the coupling `λ` from 0 to 1 gives the exchange-correlation
//! energy per electron,
//!
//! ```text
//! E_xc = ∫₀¹ dλ I(λ),    I(λ) = (n/2) ∫ 4πr² (q²/r) [ḡ_λ(r) - 1] dr,
//! ```
//!
//! with `ḡ = Σ x_σ x_σ' g_σσ'` and `x_σ = n_σ/n`.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::grid::{RadialFn, RadialGrid, Space};
use crate::hnc::{solve_hnc_system, HncControls, HncSolution, HncState, PairPotential, SpeciesSpec, SymMatrix};
use crate::ideal::{gr0_finite_t_spin, JelliumSpec, Spin};
use crate::par;
use crate::pauli::PauliPotential;

/// How the classical-fluid temperature is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EffectiveTemperature {
    /// `T_cf` given directly (Hartree).
    UserSupplied { t_cf: f64 },
    /// `T_cf = √(T² + T_q²)` for a given quantum temperature `T_q` (Hartree).
    Quadrature { t_q: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum CoulombModel {
    Bare,
    /// `(q²/r)(1 - exp(-r/λ_ee))`.
    DiffractionCorrected {
        lambda_ee: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalMapConfig {
    pub r_s: f64,
    pub zeta: f64,
    /// Physical temperature, Hartree. Sets the ideal PDFs behind the Pauli
    /// potentials.
    pub physical_t: f64,
    pub t_cf: EffectiveTemperature,
    pub coulomb: CoulombModel,
    pub lambda_grid: Vec<f64>,
    /// Electron charge in units of e; 0 switches Coulomb off.
    pub charge: f64,
    pub n_points: usize,
    pub r_max_over_rs: f64,
    pub controls: HncControls,
}

impl ClassicalMapConfig {
    /// Bare Coulomb, nine evenly spaced couplings, 2048 points to 20 r_s.
    pub fn new(r_s: f64, zeta: f64, physical_t: f64, t_cf: EffectiveTemperature) -> Self {
        Self {
            r_s,
            zeta,
            physical_t,
            t_cf,
            coulomb: CoulombModel::Bare,
            lambda_grid: uniform_lambda_grid(9),
            charge: 1.0,
            n_points: 2048,
            r_max_over_rs: 20.0,
            controls: HncControls::default(),
        }
    }

    pub fn jellium(&self) -> Result<JelliumSpec> {
        JelliumSpec::new(self.r_s, self.zeta, self.physical_t)
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.n_points, self.r_max_over_rs * self.r_s)
    }

    pub fn classical_temperature(&self) -> f64 {
        match self.t_cf {
            EffectiveTemperature::UserSupplied { t_cf } => t_cf,
            EffectiveTemperature::Quadrature { t_q } => self.physical_t.hypot(t_q),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.jellium()?;
        self.grid()?;
        self.controls.validate()?;
        let t_cf = self.classical_temperature();
        if !(t_cf.is_finite() && t_cf > 0.0) {
            return Err(Error::invalid(format!(
                "classical-fluid temperature must be positive, got {t_cf}"
            )));
        }
        if let EffectiveTemperature::Quadrature { t_q } = self.t_cf {
            if !(t_q.is_finite() && t_q >= 0.0) {
                return Err(Error::invalid(format!("T_q must be non-negative, got {t_q}")));
            }
        }
        if let CoulombModel::DiffractionCorrected { lambda_ee } = self.coulomb {
            if !(lambda_ee.is_finite() && lambda_ee > 0.0) {
                return Err(Error::invalid(format!("λ_ee must be positive, got {lambda_ee}")));
            }
        }
        if !self.charge.is_finite() {
            return Err(Error::invalid("charge must be finite"));
        }
        let l = &self.lambda_grid;
        if l.first() != Some(&0.0) || l.last() != Some(&1.0) {
            return Err(Error::invalid("coupling grid must start at 0 and end at 1"));
        }
        // written negated so NaN fails
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if l.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("coupling grid must be strictly increasing"));
        }
        Ok(())
    }
}

/// `n` evenly spaced couplings from 0 to 1.
pub fn uniform_lambda_grid(n: usize) -> Vec<f64> {
    let last = n.saturating_sub(1).max(1) as f64;
    (0..n).map(|i| i as f64 / last).collect()
}

fn check_coupling(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::invalid(format!("coupling must lie in [0, 1], got {lambda}")));
    }
    Ok(())
}

/// A prepared map: Pauli potentials extracted once, reused for every λ.
#[derive(Clone, Debug)]
pub struct ClassicalMap {
    config: ClassicalMapConfig,
    spec: JelliumSpec,
    grid: RadialGrid,
    spins: Vec<Spin>,
    pauli: Vec<PauliPotential>,
    ideal: Vec<RadialFn>,
}

impl ClassicalMap {
    pub fn new(config: ClassicalMapConfig) -> Result<Self> {
        config.validate()?;
        let spec = config.jellium()?;
        let grid = config.grid()?;
        let spins = spec.occupied_spins();
        let exec = config.controls.exec;
        let mut pauli = Vec::with_capacity(spins.len());
        let mut ideal = Vec::with_capacity(spins.len());
        for &spin in &spins {
            let pdf = gr0_finite_t_spin(&spec, &grid, spin, exec)?;
            let ex = crate::pauli::extract_pauli(&pdf.same_spin, pdf.spin_density)?;
            pauli.push(PauliPotential {
                beta_p: ex.beta_p,
                r_s: spec.r_s,
                zeta: spec.zeta,
                spin,
                t_over_ef: spec.temperature_ratio(),
                cap_value: ex.cap_value,
            });
            ideal.push(pdf.same_spin);
        }
        Ok(Self {
            config,
            spec,
            grid,
            spins,
            pauli,
            ideal,
        })
    }

    pub fn config(&self) -> &ClassicalMapConfig {
        &self.config
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn pauli(&self, spin: Spin) -> Option<&PauliPotential> {
        self.spins.iter().position(|&s| s == spin).map(|i| &self.pauli[i])
    }

    /// Ideal same-spin PDF at the physical temperature.
    pub fn ideal_same_spin(&self, spin: Spin) -> Option<&RadialFn> {
        self.spins.iter().position(|&s| s == spin).map(|i| &self.ideal[i])
    }

    /// `x_σ = n_σ / n` for the occupied spins.
    pub fn fractions(&self) -> Vec<f64> {
        let n = self.spec.density();
        self.spins.iter().map(|&s| self.spec.spin_density(s) / n).collect()
    }

    /// `λ βV_ee(r)`, split into an erfc short part and an erf tail at `r_c = r_s`.
    pub fn coulomb_potential(&self, lambda: f64) -> Result<PairPotential> {
        check_coupling(lambda)?;
        let amplitude = lambda * self.config.charge.powi(2) / self.config.classical_temperature();
        let r_c = self.spec.r_s;
        match self.config.coulomb {
            CoulombModel::Bare => PairPotential::coulomb("coulomb", self.grid, amplitude, r_c),
            CoulombModel::DiffractionCorrected { lambda_ee } => {
                let tail = crate::hnc::CoulombTail::new(amplitude, r_c)?;
                let short = RadialFn::from_fn(self.grid, Space::R, |r| {
                    amplitude * (erfc(r / r_c) - (-r / lambda_ee).exp()) / r
                })?;
                PairPotential::new("coulomb", short, Some(tail))
            }
        }
    }

    /// Pair potentials ordered as [`ClassicalMap::spins`].
    pub fn pair_potentials(&self, lambda: f64) -> Result<SymMatrix<PairPotential>> {
        let coulomb = self.coulomb_potential(lambda)?;
        SymMatrix::try_from_fn(self.spins.len(), |i, j| {
            let label = format!("{}-{}", self.spins[i].label(), self.spins[j].label());
            if i == j {
                let pauli = self.pauli[i].as_pair_potential()?;
                pauli.plus(&coulomb, label)
            } else {
                let mut p = coulomb.clone();
                p.label = label;
                Ok(p)
            }
        })
    }

    fn species(&self) -> Result<Vec<SpeciesSpec>> {
        let t_cf = self.config.classical_temperature();
        self.spins
            .iter()
            .map(|&s| {
                SpeciesSpec::new(s.label(), self.spec.spin_density(s), t_cf)
                    .map(|sp| sp.with_charge(-self.config.charge))
            })
            .collect()
    }

    pub fn solve(&self, lambda: f64) -> Result<SpinResolved> {
        let potentials = self.pair_potentials(lambda)?;
        let solution = solve_hnc_system(&self.species()?, &potentials, None, &self.config.controls, None)?;
        Ok(SpinResolved {
            lambda,
            spins: self.spins.clone(),
            fractions: self.fractions(),
            solution,
        })
    }

    /// `I(λ)` for a spin-averaged PDF.
    pub fn integrand(&self, g_bar: &RadialFn) -> f64 {
        let n = self.spec.density();
        let q2 = self.config.charge.powi(2);
        // (n/2) ∫4πr²(1/r)(ḡ-1) = 2πn ∫ r(ḡ-1)
        2.0 * std::f64::consts::PI * n * q2 * first_moment(g_bar, -1.0)
    }

    /// `n ∫ 4πr² (ḡ - 1) dr`, which is -1 for a perfectly screened hole.
    pub fn hole(&self, g_bar: &RadialFn) -> f64 {
        let n = self.spec.density();
        n * g_bar.map(|v| v - 1.0).map_or(f64::NAN, |f| f.volume_integral())
    }

    /// `I(0)` evaluated directly from the ideal PDFs.
    pub fn exclusion_hole_integrand(&self) -> f64 {
        let x = self.fractions();
        let mut g_bar = vec![0.0; self.grid.n_points()];
        for (a, &xa) in x.iter().enumerate() {
            for (b, &xb) in x.iter().enumerate() {
                let g = if a == b { Some(self.ideal[a].values()) } else { None };
                for (i, v) in g_bar.iter_mut().enumerate() {
                    *v += xa * xb * g.map_or(1.0, |g| g[i]);
                }
            }
        }
        self.integrand(&RadialFn::new(self.grid, Space::R, g_bar).expect("finite ideal PDF"))
    }

    pub fn exc(&self) -> Result<ExcResult> {
        let lambdas = &self.config.lambda_grid;
        if lambdas.len() < 5 {
            return Err(Error::invalid(format!(
                "coupling integration needs at least 5 points, got {}",
                lambdas.len()
            )));
        }
        let outcomes = par::map_slice(self.config.controls.exec, lambdas, |&l| {
            self.solve(l).map(|s| self.row(&s))
        });
        let mut rows = Vec::with_capacity(lambdas.len());
        for (l, outcome) in lambdas.iter().zip(outcomes) {
            match outcome {
                Ok(row) => rows.push(row),
                Err(e) => {
                    return Err(Error::CouplingSweep {
                        lambda: *l,
                        source: Box::new(e),
                        partial: rows,
                    })
                }
            }
        }
        let xs: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.integrand).collect();
        let fine = trapezoid(&xs, &ys);
        let (cx, cy) = every_other(&xs, &ys);
        let coarse = trapezoid(&cx, &cy);
        Ok(ExcResult {
            e_xc: fine,
            e_xc_richardson: fine + (fine - coarse) / 3.0,
            quadrature_error: (fine - coarse).abs() / 3.0,
            exclusion_hole_integrand: self.exclusion_hole_integrand(),
            rows,
        })
    }

    fn row(&self, s: &SpinResolved) -> IntegrandRow {
        let g_bar = s.spin_averaged();
        IntegrandRow {
            lambda: s.lambda,
            integrand: self.integrand(&g_bar),
            contact_same: s.same_spin(Spin::Up).contact(),
            hole: self.hole(&g_bar),
            iterations: s.solution.iterations,
            residual: s.solution.residual,
        }
    }
}

/// `∫ r (f(r) + shift) dr` by the trapezoid rule from r = 0.
fn first_moment(f: &RadialFn, shift: f64) -> f64 {
    let grid = f.grid();
    let last = f.len() - 1;
    let sum: f64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = if i == last { 0.5 } else { 1.0 };
            w * grid.r(i) * (v + shift)
        })
        .sum();
    grid.dr() * sum
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Every other node, always keeping the last one.
fn every_other(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let last = x.len() - 1;
    let keep: Vec<usize> = (0..=last).filter(|i| i % 2 == 0 || *i == last).collect();
    (
        keep.iter().map(|&i| x[i]).collect(),
        keep.iter().map(|&i| y[i]).collect(),
    )
}

/// Spin-resolved PDFs at one coupling.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpinResolved {
    pub lambda: f64,
    pub spins: Vec<Spin>,
    pub fractions: Vec<f64>,
    pub solution: HncSolution,
}

impl SpinResolved {
    fn index(&self, spin: Spin) -> Option<usize> {
        self.spins.iter().position(|&s| s == spin)
    }

    /// `g_σσ'`, or `None` if either spin is empty.
    pub fn pair(&self, a: Spin, b: Spin) -> Option<&HncState> {
        Some(self.solution.pair(self.index(a)?, self.index(b)?))
    }

    pub fn same_spin(&self, spin: Spin) -> &HncState {
        self.pair(spin, spin).expect("majority spin is always present")
    }

    /// `ḡ(r) = Σ x_σ x_σ' g_σσ'(r)`.
    pub fn spin_averaged(&self) -> RadialFn {
        let m = self.spins.len();
        let grid = *self.solution.pair(0, 0).g.grid();
        let mut out = vec![0.0; grid.n_points()];
        for a in 0..m {
            for b in 0..m {
                let w = self.fractions[a] * self.fractions[b];
                for (o, g) in out.iter_mut().zip(self.solution.pair(a, b).g.values()) {
                    *o += w * g;
                }
            }
        }
        RadialFn::new(grid, Space::R, out).expect("finite PDFs")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrandRow {
    pub lambda: f64,
    /// `I(λ)`, Hartree per electron.
    pub integrand: f64,
    /// Majority same-spin `g(0)`.
    pub contact_same: f64,
    /// `n ∫ 4πr² (ḡ - 1) dr`.
    pub hole: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcResult {
    /// Trapezoid rule on the full coupling grid.
    pub e_xc: f64,
    /// Richardson combination with the every-other-node rule.
    pub e_xc_richardson: f64,
    pub quadrature_error: f64,
    /// `I(0)` from the ideal PDFs directly.
    pub exclusion_hole_integrand: f64,
    pub rows: Vec<IntegrandRow>,
}

/// Pair potentials at coupling `lambda`, ordered majority spin first.
pub fn coulomb_pair_potentials(config: &ClassicalMapConfig, lambda: f64) -> Result<SymMatrix<PairPotential>> {
    ClassicalMap::new(config.clone())?.pair_potentials(lambda)
}

pub fn solve_spin_resolved(config: &ClassicalMapConfig, lambda: f64) -> Result<SpinResolved> {
    check_coupling(lambda)?;
    ClassicalMap::new(config.clone())?.solve(lambda)
}

pub fn exc_coupling_integration(config: &ClassicalMapConfig) -> Result<ExcResult> {
    ClassicalMap::new(config.clone())?.exc()
}

/// Exchange energy per electron of the unpolarized gas at T = 0,
/// `-(3/4)(3/2π)^{2/3} / r_s`.
pub fn exchange_energy_unpolarized(r_s: f64) -> f64 {
    -0.75 * (1.5 / std::f64::consts::PI).powf(2.0 / 3.0) / r_s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small(r_s: f64, zeta: f64) -> ClassicalMapConfig {
        let spec = JelliumSpec::new(r_s, zeta, 0.0).unwrap();
        let t_q = 0.4 * spec.fermi_energy(Spin::Up);
        ClassicalMapConfig {
            n_points: 512,
            ..ClassicalMapConfig::new(r_s, zeta, 0.0, EffectiveTemperature::Quadrature { t_q })
        }
    }

    #[test]
    fn config_validation() {
        let mut c = small(1.0, 0.0);
        assert!(c.validate().is_ok());
        c.lambda_grid = vec![0.0, 0.5, 0.4, 1.0];
        assert!(c.validate().is_err());
        c.lambda_grid = vec![0.1, 1.0];
        assert!(c.validate().is_err());
        let mut c = small(1.0, 0.0);
        c.t_cf = EffectiveTemperature::UserSupplied { t_cf: 0.0 };
        assert!(c.validate().is_err());
        let mut c = small(1.0, 0.0);
        c.coulomb = CoulombModel::DiffractionCorrected { lambda_ee: 0.0 };
        assert!(c.validate().is_err());
    }

    #[test]
    fn quadrature_temperature() {
        let c = ClassicalMapConfig::new(1.0, 0.0, 0.3, EffectiveTemperature::Quadrature { t_q: 0.4 });
        assert_relative_eq!(c.classical_temperature(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn opposite_spins_feel_only_coulomb() {
        let map = ClassicalMap::new(small(2.0, 0.0)).unwrap();
        let pots = map.pair_potentials(1.0).unwrap();
        let coulomb = map.coulomb_potential(1.0).unwrap();
        assert_eq!(pots.get(0, 1).short_range(), coulomb.short_range());
        assert_eq!(pots.get(0, 1).long_range(), coulomb.long_range());
        // zero coupling leaves opposite spins free and same spins Pauli-only
        let pots = map.pair_potentials(0.0).unwrap();
        assert!(pots.get(0, 1).full_r().values().iter().all(|&v| v == 0.0));
        assert_eq!(pots.get(0, 0).full_r(), map.pauli(Spin::Up).unwrap().beta_p);
    }

    #[test]
    fn diffraction_correction_fades_beyond_its_length() {
        let mut c = small(1.0, 1.0);
        let lambda_ee = 0.3;
        let bare = ClassicalMap::new(c.clone()).unwrap().coulomb_potential(1.0).unwrap();
        c.coulomb = CoulombModel::DiffractionCorrected { lambda_ee };
        let soft = ClassicalMap::new(c).unwrap().coulomb_potential(1.0).unwrap();
        let (b, s) = (bare.full_r(), soft.full_r());
        let grid = b.grid();
        for i in 0..grid.n_points() {
            let r = grid.r(i);
            let bound = b.values()[i] * (-r / lambda_ee).exp();
            assert!((b.values()[i] - s.values()[i] - bound).abs() <= 1e-12 * b.values()[i].abs().max(1.0));
            if r > 10.0 * lambda_ee {
                assert!((b.values()[i] - s.values()[i]).abs() <= 5e-5 * b.values()[i]);
            }
        }
        // finite at the origin
        assert!(s.values()[0].is_finite() && s.values()[0] < b.values()[0]);
    }

    #[test]
    fn coupling_outside_unit_interval_is_rejected() {
        let map = ClassicalMap::new(small(1.0, 1.0)).unwrap();
        assert!(map.solve(1.5).is_err());
        assert!(map.solve(-0.1).is_err());
    }

    #[test]
    fn short_coupling_grid_is_rejected() {
        let mut c = small(1.0, 1.0);
        c.lambda_grid = vec![0.0, 0.5, 1.0];
        assert!(exc_coupling_integration(&c).is_err());
    }

    #[test]
    fn sweep_failure_carries_partial_table() {
        let mut c = small(1.0, 1.0);
        c.controls.max_iter = 2;
        match exc_coupling_integration(&c) {
            Err(Error::CouplingSweep { lambda, partial, .. }) => {
                assert_eq!(lambda, 0.0);
                assert!(partial.is_empty());
            }
            other => panic!("expected a sweep failure, got {other:?}"),
        }
    }

    #[test]
    fn trapezoid_and_richardson_on_a_cubic() {
        let x = uniform_lambda_grid(9);
        let y: Vec<f64> = x.iter().map(|t| t * t).collect();
        let fine = trapezoid(&x, &y);
        let (cx, cy) = every_other(&x, &y);
        let coarse = trapezoid(&cx, &cy);
        assert_relative_eq!(fine + (fine - coarse) / 3.0, 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn exchange_energy_constant() {
        assert_relative_eq!(exchange_energy_unpolarized(1.0), -0.458_165_293, max_relative = 1e-8);
    }
}
