//! 3-D Fourier–Bessel transforms of radially symmetric functions.
//!
//! Normalization pair (continuous form):
//!
//! ```text
//! F(k) = (4π/k)     ∫₀^∞ dr r f(r) sin(kr)
//! f(r) = (1/(2π²r)) ∫₀^∞ dk k F(k) sin(kr)
//! ```
//!
//! On a [`RadialGrid`] both integrals become rectangle sums over the
//! conjugate meshes, i.e. a type-I discrete sine transform of length
//! `n - 1`. Since `dr·dk = π/n` the discrete pair is an exact inverse of
//! itself up to rounding. The last sample on each mesh sits on a node of
//! every sine and is always returned as zero, so functions are expected to
//! have decayed by `r_max` (or `k_max`).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::grid::{RadialFn, RadialGrid, Space};

/// Transform plan bound to one grid. Cheap to clone; each call allocates
/// its own workspace.
#[derive(Clone)]
pub struct FourierBessel {
    grid: RadialGrid,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FourierBessel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierBessel")
            .field("grid", &self.grid)
            .finish_non_exhaustive()
    }
}

impl FourierBessel {
    pub fn new(grid: RadialGrid) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(2 * grid.n_points());
        Self { grid, fft }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// `X_k = Σ_{m=1}^{n-1} x_m sin(π m k / n)` for `k = 1..=n`, with
    /// `x_m = input[m-1]`. `input[n-1]` multiplies `sin(π k) = 0` and is ignored.
    fn sine_sum(&self, input: &[f64]) -> Vec<f64> {
        let n = self.grid.n_points();
        debug_assert_eq!(input.len(), n);
        let mut buf = vec![Complex::new(0.0, 0.0); 2 * n];
        for m in 1..n {
            let x = input[m - 1];
            buf[m].re = x;
            buf[2 * n - m].re = -x;
        }
        self.fft.process(&mut buf);
        let mut out: Vec<f64> = (1..=n).map(|k| -0.5 * buf[k].im).collect();
        out[n - 1] = 0.0;
        out
    }

    /// r-space samples to k-space samples.
    pub fn forward_values(&self, f: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let rf: Vec<f64> = f.iter().enumerate().map(|(i, v)| g.r(i) * v).collect();
        let s = self.sine_sum(&rf);
        let pre = 4.0 * PI * g.dr();
        s.iter().enumerate().map(|(j, v)| pre * v / g.k(j)).collect()
    }

    /// k-space samples to r-space samples.
    pub fn inverse_values(&self, big_f: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let kf: Vec<f64> = big_f.iter().enumerate().map(|(j, v)| g.k(j) * v).collect();
        let s = self.sine_sum(&kf);
        let pre = g.dk() / (2.0 * PI * PI);
        s.iter().enumerate().map(|(i, v)| pre * v / g.r(i)).collect()
    }

    pub fn ft_r_to_k(&self, f: &RadialFn) -> Result<RadialFn> {
        f.require(Space::R, "ft_r_to_k")?;
        self.grid.ensure_same(f.grid(), "ft_r_to_k")?;
        RadialFn::new(self.grid, Space::K, self.forward_values(f.values()))
    }

    pub fn ft_k_to_r(&self, big_f: &RadialFn) -> Result<RadialFn> {
        big_f.require(Space::K, "ft_k_to_r")?;
        self.grid.ensure_same(big_f.grid(), "ft_k_to_r")?;
        RadialFn::new(self.grid, Space::R, self.inverse_values(big_f.values()))
    }
}

/// Convenience wrapper planning a transform for `f`'s grid.
pub fn ft_r_to_k(f: &RadialFn) -> Result<RadialFn> {
    FourierBessel::new(*f.grid()).ft_r_to_k(f)
}

pub fn ft_k_to_r(big_f: &RadialFn) -> Result<RadialFn> {
    FourierBessel::new(*big_f.grid()).ft_k_to_r(big_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaussian_pair(grid: RadialGrid) -> (RadialFn, RadialFn) {
        let f = RadialFn::from_fn(grid, Space::R, |r| (-r * r).exp()).unwrap();
        let exact = RadialFn::from_fn(grid, Space::K, |k| PI.powf(1.5) * (-k * k / 4.0).exp()).unwrap();
        (f, exact)
    }

    #[test]
    fn gaussian_forward_matches_closed_form() {
        let grid = RadialGrid::new(1024, 25.0).unwrap();
        let (f, exact) = gaussian_pair(grid);
        let big_f = ft_r_to_k(&f).unwrap();
        assert!(big_f.max_abs_diff(&exact).unwrap() < 1e-12);
    }

    #[test]
    fn gaussian_inverse_matches_closed_form() {
        let grid = RadialGrid::new(1024, 25.0).unwrap();
        let (f, exact) = gaussian_pair(grid);
        let back = ft_k_to_r(&exact).unwrap();
        assert!(back.max_abs_diff(&f).unwrap() < 1e-12);
    }

    #[test]
    fn zero_maps_to_zero() {
        let grid = RadialGrid::new(256, 10.0).unwrap();
        let z = RadialFn::zeros(grid, Space::R);
        assert!(ft_r_to_k(&z).unwrap().values().iter().all(|&v| v == 0.0));
        let z = RadialFn::zeros(grid, Space::K);
        assert!(ft_k_to_r(&z).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wrong_space_is_rejected() {
        let grid = RadialGrid::new(64, 1.0).unwrap();
        let f = RadialFn::zeros(grid, Space::K);
        assert!(ft_r_to_k(&f).is_err());
        assert!(ft_k_to_r(&RadialFn::zeros(grid, Space::R)).is_err());
    }

    #[test]
    fn parseval_for_gaussian() {
        let grid = RadialGrid::new(1024, 25.0).unwrap();
        let (f, _) = gaussian_pair(grid);
        let big_f = ft_r_to_k(&f).unwrap();
        let lhs = f.map(|v| v * v).unwrap().volume_integral();
        let rhs = big_f.map(|v| v * v).unwrap().volume_integral() / (8.0 * PI.powi(3));
        // ∫4πr²f² against (1/2π²)∫k²F²; volume_integral carries the 4π.
        assert!(((lhs - rhs) / lhs).abs() < 1e-8, "{lhs} vs {rhs}");
        // closed form: (π/2)^{3/2}
        assert!((lhs - (PI / 2.0).powf(1.5)).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(
            width in 0.3f64..2.0,
            amp in -5.0f64..5.0,
            shift in 0.0f64..3.0,
        ) {
            let grid = RadialGrid::new(512, 30.0).unwrap();
            let f = RadialFn::from_fn(grid, Space::R, |r| {
                amp * (-((r - shift) / width).powi(2)).exp()
            }).unwrap();
            prop_assume!(f.values()[511].abs() < 1e-12);
            let t = FourierBessel::new(grid);
            let back = t.ft_k_to_r(&t.ft_r_to_k(&f).unwrap()).unwrap();
            prop_assert!(back.rms_diff(&f).unwrap() < 1e-10);
        }

        #[test]
        fn forward_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let grid = RadialGrid::new(128, 12.0).unwrap();
            let t = FourierBessel::new(grid);
            let f1: Vec<f64> = grid.r_values().iter().map(|r| (-r * r).exp()).collect();
            let f2: Vec<f64> = grid.r_values().iter().map(|r| (-r).exp()).collect();
            let mix: Vec<f64> = f1.iter().zip(&f2).map(|(x, y)| a * x + b * y).collect();
            let lhs = t.forward_values(&mix);
            let (t1, t2) = (t.forward_values(&f1), t.forward_values(&f2));
            for j in 0..128 {
                prop_assert!((lhs[j] - (a * t1[j] + b * t2[j])).abs() < 1e-12);
            }
        }
    }
}
