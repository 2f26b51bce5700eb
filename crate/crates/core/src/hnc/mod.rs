//! Ornstein–Zernike relation with hypernetted-chain closure.
//!
//! For components `i, j` with densities `n_i` the solver finds `h = g - 1`
//! and `c` satisfying
//!
//! ```text
//! h_ij(k) = c_ij(k) + Σ_m n_m c_im(k) h_mj(k)                 (OZ)
//! g_ij(r) = exp(-βφ_ij(r) + h_ij(r) - c_ij(r) + B_ij(r))       (HNC / MHNC)
//! ```
//!
//! iterating on the indirect correlation `γ = h - c` with Picard mixing and
//! optional Ng acceleration. Coulomb tails are split off and handled
//! analytically in k-space (see [`CoulombTail`]).

mod ng;
mod potential;
mod solver;

pub use potential::{CoulombTail, PairPotential, SpeciesSpec};
pub use solver::{
    consistency, solve_hnc, solve_hnc_from, solve_hnc_multi, solve_hnc_system, Consistency, HncControls, HncSolution,
    HncState,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{RadialFn, Space};
use crate::transform::FourierBessel;

/// Symmetric `m × m` matrix stored as its upper triangle, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix<T> {
    dim: usize,
    items: Vec<T>,
}

impl<T> SymMatrix<T> {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut items = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                items.push(f(i, j));
            }
        }
        Self { dim, items }
    }

    pub fn try_from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Result<T>) -> Result<Self> {
        let mut items = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in i..dim {
                items.push(f(i, j)?);
            }
        }
        Ok(Self { dim, items })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index(dim: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // rows before i hold dim + (dim - 1) + ... + (dim - i + 1) entries
        i * dim - i * i.saturating_sub(1) / 2 + (j - i)
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.items[Self::index(self.dim, i, j)]
    }

    /// Entries in storage order together with their `(i, j)`, `i ≤ j`.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &T)> {
        let dim = self.dim;
        let coords = (0..dim).flat_map(move |i| (i..dim).map(move |j| (i, j)));
        coords.zip(self.items.iter())
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> SymMatrix<U> {
        SymMatrix {
            dim: self.dim,
            items: self.items.iter().map(f).collect(),
        }
    }
}

/// Direct correlation from total correlation by OZ inversion,
/// `c(k) = h(k) / (1 + n h(k))`.
pub fn oz_c_from_h(h: &RadialFn, n: f64) -> Result<RadialFn> {
    h.require(Space::R, "oz_c_from_h")?;
    if !(n.is_finite() && n >= 0.0) {
        return Err(Error::invalid(format!("density must be non-negative, got {n}")));
    }
    let t = FourierBessel::new(*h.grid());
    let hk = t.forward_values(h.values());
    let mut ck = Vec::with_capacity(hk.len());
    for (j, &v) in hk.iter().enumerate() {
        let denom = 1.0 + n * v;
        if denom.abs() < 1e-10 {
            return Err(Error::SingularOz {
                k: h.grid().k(j),
                value: denom,
            });
        }
        ck.push(v / denom);
    }
    RadialFn::new(*h.grid(), Space::R, t.inverse_values(&ck))
}

/// `S(k) = 1 + n h(k)` from a converged state.
pub fn s_of_k(state: &HncState, n: f64) -> Result<RadialFn> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::invalid(format!("density must be positive, got {n}")));
    }
    let hk = FourierBessel::new(*state.h.grid()).forward_values(state.h.values());
    RadialFn::new(*state.h.grid(), Space::K, hk.iter().map(|v| 1.0 + n * v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;

    #[test]
    fn sym_matrix_indexing() {
        for dim in 1..6 {
            let m = SymMatrix::from_fn(dim, |i, j| (i, j));
            for i in 0..dim {
                for j in 0..dim {
                    let (a, b) = *m.get(i, j);
                    assert_eq!((a, b), (i.min(j), i.max(j)));
                }
            }
        }
    }

    #[test]
    fn zero_h_gives_zero_c() {
        let grid = RadialGrid::new(128, 10.0).unwrap();
        let c = oz_c_from_h(&RadialFn::zeros(grid, Space::R), 0.5).unwrap();
        assert!(c.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dilute_limit_c_equals_h() {
        let grid = RadialGrid::new(256, 20.0).unwrap();
        let h = RadialFn::from_fn(grid, Space::R, |r| -(-r * r).exp()).unwrap();
        let c = oz_c_from_h(&h, 0.0).unwrap();
        assert!(c.max_abs_diff(&h).unwrap() < 1e-12);
    }

    #[test]
    fn singular_denominator_is_reported() {
        let grid = RadialGrid::new(128, 10.0).unwrap();
        // n h(k) ≈ -1 at small k for a deep, wide hole at high density
        let h = RadialFn::from_fn(grid, Space::R, |r| -(-(r / 2.0).powi(2)).exp()).unwrap();
        let hk0 = FourierBessel::new(grid).forward_values(h.values())[0];
        let n = -1.0 / hk0;
        assert!(matches!(oz_c_from_h(&h, n), Err(Error::SingularOz { .. })));
    }
}
