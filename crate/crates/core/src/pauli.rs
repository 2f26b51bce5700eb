//! Pauli-exclusion potential: the classical pair potential βP(r) whose HNC
//! solution is the ideal-fermion same-spin g⁰(r).
//!
//! Extraction inverts the HNC closure with zero bridge:
//!
//! ```text
//! h = g⁰ - 1,   c = OZ⁻¹[h],   βP(r) = -ln g⁰(r) + h(r) - c(r)
//! ```
//!
//! Where g⁰ falls below [`CAP_FLOOR`] the logarithm is replaced by a flat
//! cap. Because g⁰ depends on r only through `k_F r ∝ r/r_s`, βP is a
//! universal function of `r/r_s` when the grid is scaled with `r_s`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{RadialFn, RadialGrid, Space};
use crate::hnc::{oz_c_from_h, solve_hnc, HncControls, HncState, PairPotential, SpeciesSpec};
use crate::ideal::{gr0_finite_t_spin, JelliumSpec, Spin};
use crate::par::Execution;

pub const CAP_FLOOR: f64 = 1e-8;

const FORMAT_TAG: &str = "# clmap pauli-potential v1";

/// Raw result of inverting one g⁰.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub beta_p: RadialFn,
    pub h: RadialFn,
    pub c: RadialFn,
    pub cap_value: f64,
    /// Number of leading grid points replaced by the cap.
    pub capped_points: usize,
}

/// HNC inversion of `g0` at density `n`.
pub fn extract_pauli(g0: &RadialFn, n: f64) -> Result<Extraction> {
    g0.require(Space::R, "extract_pauli")?;
    if let Some(i) = g0.values().iter().position(|&v| v < 0.0) {
        return Err(Error::invalid(format!(
            "g0 is negative ({}) at r = {}",
            g0.values()[i],
            g0.grid().r(i)
        )));
    }
    let deviation = g0.tail_deviation(1.0, 0.05);
    if deviation > 1e-3 {
        return Err(Error::UndecayedTail { deviation });
    }
    let h = g0.map(|v| v - 1.0)?;
    let c = oz_c_from_h(&h, n)?;
    let g = g0.values();
    let first_ok = g
        .iter()
        .position(|&v| v >= CAP_FLOOR)
        .ok_or_else(|| Error::invalid("g0 never rises above the cap floor"))?;
    let raw = |i: usize| -g[i].ln() + h.values()[i] - c.values()[i];
    let cap_value = raw(first_ok);
    let values: Vec<f64> = (0..g.len())
        .map(|i| {
            if i < first_ok || g[i] < CAP_FLOOR {
                cap_value
            } else {
                raw(i)
            }
        })
        .collect();
    Ok(Extraction {
        beta_p: RadialFn::new(*g0.grid(), Space::R, values)?,
        h,
        c,
        cap_value,
        capped_points: first_ok,
    })
}

/// βP(r) together with the conventions it was extracted under.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliPotential {
    pub beta_p: RadialFn,
    /// Wigner–Seitz radius of the fluid the potential was extracted for.
    pub r_s: f64,
    pub zeta: f64,
    pub spin: Spin,
    /// Temperature of the ideal fluid in units of the majority-spin E_F.
    pub t_over_ef: f64,
    pub cap_value: f64,
}

impl PauliPotential {
    /// Extracts βP for the majority spin of `spec` on `grid`.
    pub fn extract(spec: &JelliumSpec, grid: &RadialGrid, exec: Execution) -> Result<Self> {
        Self::extract_spin(spec, grid, Spin::Up, exec)
    }

    pub fn extract_spin(spec: &JelliumSpec, grid: &RadialGrid, spin: Spin, exec: Execution) -> Result<Self> {
        let pdf = gr0_finite_t_spin(spec, grid, spin, exec)?;
        let ex = extract_pauli(&pdf.same_spin, pdf.spin_density)?;
        Ok(Self {
            beta_p: ex.beta_p,
            r_s: spec.r_s,
            zeta: spec.zeta,
            spin,
            t_over_ef: spec.temperature_ratio(),
            cap_value: ex.cap_value,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        self.beta_p.grid()
    }

    /// `r_max / r_s` of the extraction grid.
    pub fn r_max_over_rs(&self) -> f64 {
        self.grid().r_max() / self.r_s
    }

    /// The same βP(r/r_s) samples on the grid scaled to another density.
    pub fn rescaled(&self, r_s: f64) -> Result<Self> {
        if !(r_s.is_finite() && r_s > 0.0) {
            return Err(Error::invalid(format!("r_s must be positive, got {r_s}")));
        }
        if r_s == self.r_s {
            return Ok(self.clone());
        }
        let grid = RadialGrid::new(self.grid().n_points(), self.r_max_over_rs() * r_s)?;
        Ok(Self {
            beta_p: RadialFn::new(grid, Space::R, self.beta_p.values().to_vec())?,
            r_s,
            ..self.clone()
        })
    }

    pub fn as_pair_potential(&self) -> Result<PairPotential> {
        PairPotential::short_ranged("pauli", self.beta_p.clone())
    }

    /// Two-column text: `r/r_s  βP`, preceded by `#` metadata lines. Values
    /// carry 17 significant digits so that [`PauliPotential::read_from`]
    /// recovers every bit.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{FORMAT_TAG}")?;
        writeln!(w, "# zeta = {:.16e}", self.zeta)?;
        writeln!(w, "# spin = {}", self.spin.label())?;
        writeln!(w, "# t_over_ef = {:.16e}", self.t_over_ef)?;
        writeln!(w, "# cap_value = {:.16e}", self.cap_value)?;
        writeln!(w, "# r_s = {:.16e}", self.r_s)?;
        writeln!(w, "# n_points = {}", self.grid().n_points())?;
        writeln!(w, "# r_max = {:.16e}", self.grid().r_max())?;
        writeln!(w, "# columns: r_over_rs beta_p")?;
        for (i, v) in self.beta_p.values().iter().enumerate() {
            writeln!(w, "{:.16e} {:.16e}", self.grid().r(i) / self.r_s, v)?;
        }
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self> {
        let mut meta = std::collections::HashMap::new();
        let mut rows = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if lineno == 1 && trimmed != FORMAT_TAG {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected `{FORMAT_TAG}`"),
                });
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                if let Some((key, value)) = rest.split_once('=') {
                    meta.insert(key.trim().to_string(), (lineno, value.trim().to_string()));
                }
                continue;
            }
            let mut cols = trimmed.split_whitespace();
            let (Some(x), Some(v), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::Parse {
                    line: lineno,
                    message: "expected two columns".into(),
                });
            };
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno,
                    message: e.to_string(),
                })
            };
            rows.push((lineno, parse(x)?, parse(v)?));
        }
        let get = |key: &str| -> Result<(usize, String)> {
            meta.get(key).cloned().ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("missing header `{key}`"),
            })
        };
        let num = |key: &str| -> Result<f64> {
            let (line, s) = get(key)?;
            s.parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("{key}: {e}"),
            })
        };
        let (spin_line, spin) = get("spin")?;
        let spin = match spin.as_str() {
            "up" => Spin::Up,
            "down" => Spin::Down,
            other => {
                return Err(Error::Parse {
                    line: spin_line,
                    message: format!("unknown spin `{other}`"),
                })
            }
        };
        let (n_line, n_points) = get("n_points")?;
        let n_points: usize = n_points.parse().map_err(|_| Error::Parse {
            line: n_line,
            message: "n_points must be an integer".into(),
        })?;
        let r_s = num("r_s")?;
        let grid = RadialGrid::new(n_points, num("r_max")?)?;
        if rows.len() != n_points {
            return Err(Error::Parse {
                line: rows.last().map_or(0, |r| r.0),
                message: format!("{} rows for {n_points} points", rows.len()),
            });
        }
        for (i, &(line, x, _)) in rows.iter().enumerate() {
            let expect = grid.r(i) / r_s;
            if (x - expect).abs() > 1e-12 * expect.max(1.0) {
                return Err(Error::Parse {
                    line,
                    message: format!("r/r_s = {x} does not match the grid ({expect})"),
                });
            }
        }
        Ok(Self {
            beta_p: RadialFn::new(grid, Space::R, rows.iter().map(|r| r.2).collect())?,
            r_s,
            zeta: num("zeta")?,
            spin,
            t_over_ef: num("t_over_ef")?,
            cap_value: num("cap_value")?,
        })
    }
}

/// Outcome of a forward HNC solve with βP as the only interaction.
#[derive(Clone, Debug)]
pub struct Verification {
    pub rms_error: f64,
    pub max_error: f64,
    pub target: RadialFn,
    pub state: HncState,
}

/// Solves HNC with `p` (rescaled to `spec.r_s` if needed) and compares the
/// result with the ideal same-spin g⁰ of `spec`.
pub fn verify_pauli(p: &PauliPotential, spec: &JelliumSpec, controls: &HncControls) -> Result<Verification> {
    if spec.zeta != p.zeta {
        return Err(Error::invalid(format!(
            "potential extracted at zeta = {}, verifying at {}",
            p.zeta, spec.zeta
        )));
    }
    let ratio = spec.temperature_ratio();
    if (ratio - p.t_over_ef).abs() > 1e-12 * p.t_over_ef.max(1.0) {
        return Err(Error::invalid(format!(
            "potential extracted at T/E_F = {}, verifying at {ratio}",
            p.t_over_ef
        )));
    }
    let p = p.rescaled(spec.r_s)?;
    let target = gr0_finite_t_spin(spec, p.grid(), p.spin, controls.exec)?;
    // βP is dimensionless; the species temperature only labels the fluid.
    let t_cf = spec.temperature.max(0.4 * spec.fermi_energy(p.spin));
    let species = SpeciesSpec::new(p.spin.label(), target.spin_density, t_cf)?;
    let state = solve_hnc(&p.as_pair_potential()?, &species, None, controls)?;
    Ok(Verification {
        rms_error: state.g.rms_diff(&target.same_spin)?,
        max_error: state.g.max_abs_diff(&target.same_spin)?,
        target: target.same_spin,
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_grid(r_s: f64) -> RadialGrid {
        RadialGrid::new(2048, 20.0 * r_s).unwrap()
    }

    #[test]
    fn uncorrelated_pair_has_no_pauli_potential() {
        let grid = default_grid(1.0);
        let ex = extract_pauli(&RadialFn::constant(grid, Space::R, 1.0), 0.2).unwrap();
        assert!(ex.beta_p.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn inversion_is_exact_algebra() {
        let spec = JelliumSpec::new(1.0, 1.0, 0.0).unwrap();
        let grid = default_grid(1.0);
        let pdf = crate::ideal::gr0_t0(&spec, &grid).unwrap();
        let ex = extract_pauli(&pdf.same_spin, pdf.spin_density).unwrap();
        assert_eq!(ex.capped_points, 0);
        let g0 = pdf.same_spin.values();
        for (i, &g) in g0.iter().enumerate() {
            let back = (-ex.beta_p.values()[i] + ex.h.values()[i] - ex.c.values()[i]).exp();
            assert!((back - g).abs() <= 1e-12, "i = {i}: {back} vs {g}");
        }
    }

    #[test]
    fn cap_is_flat_near_origin() {
        // hard core: g vanishes inside r = 0.5
        let grid = default_grid(1.0);
        let g0 = RadialFn::from_fn(grid, Space::R, |r| {
            if r < 0.5 {
                0.0
            } else {
                1.0 - (-4.0 * (r - 0.5).powi(2)).exp()
            }
        })
        .unwrap();
        let ex = extract_pauli(&g0, 0.1).unwrap();
        assert!(ex.capped_points > 0);
        let v = ex.beta_p.values();
        assert!(v[..ex.capped_points].iter().all(|&x| x == ex.cap_value));
        assert!(v.iter().all(|x| x.is_finite()));
        assert!(v[ex.capped_points + 1] < ex.cap_value);
    }

    #[test]
    fn rejects_negative_or_undecayed_input() {
        let grid = default_grid(1.0);
        let neg = RadialFn::from_fn(grid, Space::R, |r| if r < 1.0 { -0.1 } else { 1.0 }).unwrap();
        assert!(extract_pauli(&neg, 0.2).is_err());
        let slow = RadialFn::from_fn(grid, Space::R, |r| 1.0 - 1.0 / (1.0 + r)).unwrap();
        assert!(matches!(extract_pauli(&slow, 0.2), Err(Error::UndecayedTail { .. })));
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let spec = JelliumSpec::new(2.5, 0.3, 0.0).unwrap();
        let p = PauliPotential::extract(&spec, &RadialGrid::new(256, 50.0).unwrap(), Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        p.write_to(&mut buf).unwrap();
        let back = PauliPotential::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, p);
        for (a, b) in back.beta_p.values().iter().zip(p.beta_p.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn malformed_text_is_rejected() {
        assert!(PauliPotential::read_from("hello\n".as_bytes()).is_err());
        let spec = JelliumSpec::new(1.0, 1.0, 0.0).unwrap();
        let p = PauliPotential::extract(&spec, &RadialGrid::new(64, 20.0).unwrap(), Execution::Sequential).unwrap();
        let mut buf = Vec::new();
        p.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let truncated: String = text.lines().take(20).map(|l| format!("{l}\n")).collect();
        assert!(PauliPotential::read_from(truncated.as_bytes()).is_err());
        let garbled = text.replacen("# n_points = 64", "# n_points = sixty-four", 1);
        assert!(PauliPotential::read_from(garbled.as_bytes()).is_err());
    }

    #[test]
    fn zero_potential_verifies_against_uncorrelated_target() {
        // βP ≡ 0 with g⁰ ≡ 1 is the opposite-spin channel
        let grid = default_grid(1.0);
        let species = SpeciesSpec::new("down", 0.1, 1.0).unwrap();
        let st = solve_hnc(&PairPotential::zero("0", grid), &species, None, &HncControls::default()).unwrap();
        let one = RadialFn::constant(grid, Space::R, 1.0);
        assert!(st.g.rms_diff(&one).unwrap() < 1e-8);
    }

    #[test]
    fn verification_rejects_mismatched_conventions() {
        let spec = JelliumSpec::new(1.0, 1.0, 0.0).unwrap();
        let p = PauliPotential::extract(&spec, &RadialGrid::new(256, 20.0).unwrap(), Execution::Sequential).unwrap();
        let other = JelliumSpec::new(1.0, 0.0, 0.0).unwrap();
        assert!(verify_pauli(&p, &other, &HncControls::default()).is_err());
    }
}
