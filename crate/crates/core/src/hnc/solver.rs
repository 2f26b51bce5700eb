use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ng::NgAccelerator;
use super::{PairPotential, SpeciesSpec, SymMatrix};
use crate::error::{Error, Result};
use crate::grid::{RadialFn, RadialGrid, Space};
use crate::par::{self, Execution};
use crate::transform::FourierBessel;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HncControls {
    /// Picard weight of the new iterate, in (0, 1].
    pub mixing: f64,
    /// Max-norm tolerance on the change of γ per iteration.
    pub tol: f64,
    pub max_iter: usize,
    pub ng_acceleration: bool,
    /// First iteration at which Ng extrapolation may replace a Picard step.
    pub ng_start: usize,
    /// Consecutive residual increases that count as divergence.
    pub divergence_window: usize,
    pub exec: Execution,
}

impl Default for HncControls {
    fn default() -> Self {
        Self {
            mixing: 0.3,
            tol: 1e-8,
            max_iter: 5000,
            ng_acceleration: true,
            ng_start: 10,
            divergence_window: 50,
            exec: Execution::default(),
        }
    }
}

impl HncControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(Error::invalid(format!(
                "mixing must lie in (0, 1], got {}",
                self.mixing
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::invalid(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// Converged correlation functions of one pair of components.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HncState {
    pub label: String,
    pub g: RadialFn,
    pub h: RadialFn,
    /// Full direct correlation, long-range tail included.
    pub c: RadialFn,
    /// Partial structure factor `δ_ij + √(n_i n_j) h_ij(k)`.
    pub s_k: RadialFn,
    pub bridge: RadialFn,
    /// Short-ranged part of `γ = h - c` (equal to γ without Coulomb tails);
    /// usable as a warm start.
    pub gamma: RadialFn,
    pub iterations: usize,
    pub residual: f64,
}

impl HncState {
    /// g extrapolated to r = 0.
    pub fn contact(&self) -> f64 {
        self.g.value_at_origin().max(0.0)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HncSolution {
    pub labels: Vec<String>,
    pub densities: Vec<f64>,
    pub states: SymMatrix<HncState>,
    pub iterations: usize,
    pub residual: f64,
    pub residual_history: Vec<f64>,
}

impl HncSolution {
    pub fn n_species(&self) -> usize {
        self.densities.len()
    }

    pub fn pair(&self, i: usize, j: usize) -> &HncState {
        self.states.get(i, j)
    }

    fn into_single(self) -> HncState {
        self.states.items.into_iter().next().expect("one pair")
    }
}

/// Single-component HNC (bridge `None`) or MHNC solve.
pub fn solve_hnc(
    potential: &PairPotential,
    species: &SpeciesSpec,
    bridge: Option<&RadialFn>,
    controls: &HncControls,
) -> Result<HncState> {
    solve_hnc_from(potential, species, bridge, controls, None)
}

/// As [`solve_hnc`], starting from a given short-ranged γ instead of zero.
pub fn solve_hnc_from(
    potential: &PairPotential,
    species: &SpeciesSpec,
    bridge: Option<&RadialFn>,
    controls: &HncControls,
    initial_gamma: Option<&RadialFn>,
) -> Result<HncState> {
    let potentials = SymMatrix::from_fn(1, |_, _| potential.clone());
    let bridges = bridge.map(|b| SymMatrix::from_fn(1, |_, _| b.clone()));
    let initial = initial_gamma.map(|g| SymMatrix::from_fn(1, |_, _| g.clone()));
    let sol = solve_hnc_system(
        std::slice::from_ref(species),
        &potentials,
        bridges.as_ref(),
        controls,
        initial.as_ref(),
    )?;
    Ok(sol.into_single())
}

/// Multi-component solve; needs at least two species.
pub fn solve_hnc_multi(
    species: &[SpeciesSpec],
    potentials: &SymMatrix<PairPotential>,
    bridges: Option<&SymMatrix<RadialFn>>,
    controls: &HncControls,
) -> Result<HncSolution> {
    if species.len() < 2 {
        return Err(Error::invalid(format!(
            "multi-component solve needs at least two species, got {}",
            species.len()
        )));
    }
    solve_hnc_system(species, potentials, bridges, controls, None)
}

/// Solve for any number of species (one included), optionally warm-started.
pub fn solve_hnc_system(
    species: &[SpeciesSpec],
    potentials: &SymMatrix<PairPotential>,
    bridges: Option<&SymMatrix<RadialFn>>,
    controls: &HncControls,
    initial_gamma: Option<&SymMatrix<RadialFn>>,
) -> Result<HncSolution> {
    controls.validate()?;
    let problem = Problem::new(species, potentials, bridges, controls.exec)?;
    let initial = match initial_gamma {
        Some(init) => {
            if init.dim() != problem.m {
                return Err(Error::invalid("initial guess has the wrong dimension"));
            }
            let mut flat = Vec::with_capacity(problem.n_pairs() * problem.n);
            for (_, f) in init.iter() {
                problem.grid.ensure_same(f.grid(), "initial guess")?;
                flat.extend_from_slice(f.values());
            }
            flat
        }
        None => vec![0.0; problem.n_pairs() * problem.n],
    };
    let (gamma, iterations, residual, history) = problem.iterate(initial, controls)?;
    problem.assemble(species, &gamma, iterations, residual, history)
}

/// Max-norm violations of the OZ relation and the closure by a solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub oz: f64,
    pub closure: f64,
}

/// Re-evaluates OZ and closure on `solution` (in r-space, with γ = h - c).
pub fn consistency(
    species: &[SpeciesSpec],
    potentials: &SymMatrix<PairPotential>,
    bridges: Option<&SymMatrix<RadialFn>>,
    solution: &HncSolution,
) -> Result<Consistency> {
    let problem = Problem::new(species, potentials, bridges, Execution::Sequential)?;
    let mut closure: f64 = 0.0;
    let mut c_short = Vec::with_capacity(problem.n_pairs());
    let mut gamma_full = Vec::with_capacity(problem.n_pairs());
    for (p, (_, state)) in solution.states.iter().enumerate() {
        let g = state.g.values();
        let h = state.h.values();
        let c = state.c.values();
        let b = state.bridge.values();
        let mut cs = Vec::with_capacity(problem.n);
        let mut gf = Vec::with_capacity(problem.n);
        for i in 0..problem.n {
            let phi = problem.phi_s[p][i] + problem.tail_r[p][i];
            let expected = (-phi + h[i] - c[i] + b[i]).exp();
            closure = closure.max((g[i] - expected).abs());
            cs.push(c[i] + problem.tail_r[p][i]);
            gf.push(h[i] - c[i]);
        }
        c_short.push(cs);
        gamma_full.push(gf);
    }
    let ck = problem.full_ck(&c_short);
    let (gamma_k, _) = problem.oz(&ck)?;
    let mut oz: f64 = 0.0;
    for p in 0..problem.n_pairs() {
        let gk: Vec<f64> = gamma_k[p].iter().zip(&problem.tail_k[p]).map(|(g, t)| g - t).collect();
        let gr = problem.transform.inverse_values(&gk);
        for i in 0..problem.n {
            oz = oz.max((gr[i] + problem.tail_r[p][i] - gamma_full[p][i]).abs());
        }
    }
    Ok(Consistency { oz, closure })
}

struct Problem {
    grid: RadialGrid,
    n: usize,
    m: usize,
    densities: Vec<f64>,
    labels: Vec<String>,
    phi_s: Vec<Vec<f64>>,
    tail_r: Vec<Vec<f64>>,
    tail_k: Vec<Vec<f64>>,
    bridge: Vec<Vec<f64>>,
    transform: FourierBessel,
    exec: Execution,
}

type Iterated = (Vec<f64>, usize, f64, Vec<f64>);
/// One sample vector per species pair.
type PerPair = Vec<Vec<f64>>;

impl Problem {
    fn new(
        species: &[SpeciesSpec],
        potentials: &SymMatrix<PairPotential>,
        bridges: Option<&SymMatrix<RadialFn>>,
        exec: Execution,
    ) -> Result<Self> {
        let m = species.len();
        if m == 0 {
            return Err(Error::invalid("no species"));
        }
        for s in species {
            s.validate()?;
        }
        if potentials.dim() != m {
            return Err(Error::invalid(format!(
                "{m} species but a {0}×{0} potential matrix",
                potentials.dim()
            )));
        }
        let grid = *potentials.get(0, 0).grid();
        let mut phi_s = Vec::new();
        let mut tail_r = Vec::new();
        let mut tail_k = Vec::new();
        let mut labels = Vec::new();
        for ((i, j), p) in potentials.iter() {
            grid.ensure_same(p.grid(), "potential matrix")?;
            phi_s.push(p.short_range().values().to_vec());
            tail_r.push(p.tail_r_values());
            tail_k.push(p.tail_k_values());
            labels.push(if p.label.is_empty() {
                format!("{}-{}", species[i].label, species[j].label)
            } else {
                p.label.clone()
            });
        }
        let bridge = match bridges {
            Some(b) => {
                if b.dim() != m {
                    return Err(Error::invalid("bridge matrix has the wrong dimension"));
                }
                b.iter()
                    .map(|(_, f)| {
                        f.require(Space::R, "bridge")?;
                        grid.ensure_same(f.grid(), "bridge")?;
                        Ok(f.values().to_vec())
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            None => vec![vec![0.0; grid.n_points()]; phi_s.len()],
        };
        Ok(Self {
            grid,
            n: grid.n_points(),
            m,
            densities: species.iter().map(|s| s.density).collect(),
            labels,
            phi_s,
            tail_r,
            tail_k,
            bridge,
            transform: FourierBessel::new(grid),
            exec,
        })
    }

    fn n_pairs(&self) -> usize {
        self.m * (self.m + 1) / 2
    }

    /// HNC closure for the short part: `c_s = exp(-βφ_s + γ_s + B) - 1 - γ_s`.
    fn closure(&self, p: usize, gamma: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let g = (-self.phi_s[p][i] + gamma[i] + self.bridge[p][i]).exp();
                g - 1.0 - gamma[i]
            })
            .collect()
    }

    /// `c(k) = FT[c_s](k) - βφ_l(k)` for every pair.
    fn full_ck(&self, c_short: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let idx: Vec<usize> = (0..self.n_pairs()).collect();
        par::map_slice(self.exec, &idx, |&p| {
            let mut ck = self.transform.forward_values(&c_short[p]);
            for (v, t) in ck.iter_mut().zip(&self.tail_k[p]) {
                *v -= t;
            }
            ck
        })
    }

    /// Solves the OZ relation at every k. Returns `(Γ = H - C, H)` per pair.
    fn oz(&self, ck: &[Vec<f64>]) -> Result<(PerPair, PerPair)> {
        let n = self.n;
        let np = self.n_pairs();
        if self.m == 1 {
            let dens = self.densities[0];
            let mut gam = Vec::with_capacity(n);
            let mut hk = Vec::with_capacity(n);
            for (j, &c) in ck[0].iter().enumerate() {
                let denom = 1.0 - dens * c;
                if denom.abs() < 1e-12 || !denom.is_finite() {
                    return Err(Error::SingularOz {
                        k: self.grid.k(j),
                        value: denom,
                    });
                }
                let h = c / denom;
                hk.push(h);
                gam.push(h - c);
            }
            return Ok((vec![gam], vec![hk]));
        }
        // k-major scratch: for each k, np values of Γ followed by np of H
        let m = self.m;
        let mut buf = vec![0.0; n * 2 * np];
        par::for_each_chunk_mut(self.exec, &mut buf, 2 * np, |j, out| {
            let c = DMatrix::from_fn(m, m, |a, b| ck[SymMatrix::<()>::index(m, a, b)][j]);
            let mut lhs = DMatrix::<f64>::identity(m, m);
            for a in 0..m {
                for b in 0..m {
                    lhs[(a, b)] -= c[(a, b)] * self.densities[b];
                }
            }
            match lhs.lu().solve(&c) {
                Some(h) if h.iter().all(|v| v.is_finite()) => {
                    let mut p = 0;
                    for a in 0..m {
                        for b in a..m {
                            let hab = 0.5 * (h[(a, b)] + h[(b, a)]);
                            out[p] = hab - c[(a, b)];
                            out[np + p] = hab;
                            p += 1;
                        }
                    }
                }
                _ => out.iter_mut().for_each(|v| *v = f64::NAN),
            }
        });
        if let Some(pos) = buf.iter().position(|v| !v.is_finite()) {
            return Err(Error::SingularOz {
                k: self.grid.k(pos / (2 * np)),
                value: 0.0,
            });
        }
        let mut gam = vec![vec![0.0; n]; np];
        let mut hk = vec![vec![0.0; n]; np];
        for j in 0..n {
            for p in 0..np {
                gam[p][j] = buf[j * 2 * np + p];
                hk[p][j] = buf[j * 2 * np + np + p];
            }
        }
        Ok((gam, hk))
    }

    /// One application of the fixed-point map on the flattened short-ranged γ.
    fn apply(&self, gamma: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let c_short: Vec<Vec<f64>> = (0..self.n_pairs())
            .map(|p| self.closure(p, &gamma[p * n..(p + 1) * n]))
            .collect();
        if c_short.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("closure overflow"));
        }
        let ck = self.full_ck(&c_short);
        let (gam_k, _) = self.oz(&ck)?;
        let idx: Vec<usize> = (0..self.n_pairs()).collect();
        let parts = par::map_slice(self.exec, &idx, |&p| {
            let gk: Vec<f64> = gam_k[p].iter().zip(&self.tail_k[p]).map(|(g, t)| g - t).collect();
            self.transform.inverse_values(&gk)
        });
        Ok(parts.concat())
    }

    fn pair_residuals(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        (0..self.n_pairs())
            .map(|p| {
                let r = p * self.n..(p + 1) * self.n;
                a[r.clone()]
                    .iter()
                    .zip(&b[r])
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    fn worst_pair(&self, residuals: &[f64]) -> String {
        let (p, _) = residuals
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &r)| {
                if r > acc.1 || r.is_nan() {
                    (i, r)
                } else {
                    acc
                }
            });
        self.labels[p].clone()
    }

    fn iterate(&self, mut input: Vec<f64>, controls: &HncControls) -> Result<Iterated> {
        let mut ng = NgAccelerator::default();
        let mut history = Vec::new();
        let mut last = f64::INFINITY;
        let mut rising = 0usize;
        // previous (input, output) for falling back after a bad Ng step
        let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;
        let mut last_step_ng = false;
        for it in 1..=controls.max_iter {
            let output = match self.apply(&input) {
                Ok(out) if out.iter().all(|v| v.is_finite()) => out,
                _ => {
                    if let (true, Some((f, g))) = (last_step_ng, previous.as_ref()) {
                        ng.clear();
                        last_step_ng = false;
                        input = mix(f, g, controls.mixing);
                        continue;
                    }
                    let pair = self.labels[0].clone();
                    return Err(Error::Diverged {
                        iterations: it,
                        residual: f64::INFINITY,
                        pair,
                    });
                }
            };
            let per_pair = self.pair_residuals(&input, &output);
            let residual = per_pair.iter().copied().fold(0.0, f64::max);
            history.push(residual);
            if residual <= controls.tol {
                return Ok((input, it, residual, history));
            }
            if residual > last {
                rising += 1;
                if rising >= controls.divergence_window {
                    return Err(Error::Diverged {
                        iterations: it,
                        residual,
                        pair: self.worst_pair(&per_pair),
                    });
                }
            } else {
                rising = 0;
            }
            last = residual;
            if it == controls.max_iter {
                return Err(Error::NotConverged {
                    iterations: it,
                    residual,
                    pair: self.worst_pair(&per_pair),
                });
            }
            let next = if controls.ng_acceleration {
                ng.push(input.clone(), output.clone());
                if it >= controls.ng_start {
                    ng.extrapolate()
                } else {
                    None
                }
            } else {
                None
            };
            last_step_ng = next.is_some();
            let next = next.unwrap_or_else(|| mix(&input, &output, controls.mixing));
            previous = Some((input, output));
            input = next;
        }
        unreachable!("loop returns on the last iteration")
    }

    fn assemble(
        &self,
        species: &[SpeciesSpec],
        gamma: &[f64],
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    ) -> Result<HncSolution> {
        let n = self.n;
        let np = self.n_pairs();
        let c_short: Vec<Vec<f64>> = (0..np).map(|p| self.closure(p, &gamma[p * n..(p + 1) * n])).collect();
        let ck = self.full_ck(&c_short);
        let (_, hk) = self.oz(&ck)?;
        let mut states = Vec::with_capacity(np);
        let mut p = 0;
        for i in 0..self.m {
            for j in i..self.m {
                let gam = &gamma[p * n..(p + 1) * n];
                let g: Vec<f64> = (0..n)
                    .map(|r| (-self.phi_s[p][r] + gam[r] + self.bridge[p][r]).exp())
                    .collect();
                let h: Vec<f64> = g.iter().map(|v| v - 1.0).collect();
                let c: Vec<f64> = c_short[p].iter().zip(&self.tail_r[p]).map(|(cs, t)| cs - t).collect();
                let delta = if i == j { 1.0 } else { 0.0 };
                let weight = (self.densities[i] * self.densities[j]).sqrt();
                let s: Vec<f64> = hk[p].iter().map(|v| delta + weight * v).collect();
                states.push(HncState {
                    label: self.labels[p].clone(),
                    g: RadialFn::new(self.grid, Space::R, g)?,
                    h: RadialFn::new(self.grid, Space::R, h)?,
                    c: RadialFn::new(self.grid, Space::R, c)?,
                    s_k: RadialFn::new(self.grid, Space::K, s)?,
                    bridge: RadialFn::new(self.grid, Space::R, self.bridge[p].clone())?,
                    gamma: RadialFn::new(self.grid, Space::R, gam.to_vec())?,
                    iterations,
                    residual,
                });
                p += 1;
            }
        }
        Ok(HncSolution {
            labels: species.iter().map(|s| s.label.clone()).collect(),
            densities: self.densities.clone(),
            states: SymMatrix {
                dim: self.m,
                items: states,
            },
            iterations,
            residual,
            residual_history: history,
        })
    }
}

fn mix(input: &[f64], output: &[f64], alpha: f64) -> Vec<f64> {
    input.iter().zip(output).map(|(f, g)| f + alpha * (g - f)).collect()
}
