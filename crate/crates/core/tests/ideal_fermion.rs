use std::f64::consts::PI;

use approx::assert_relative_eq;
use clmap::ideal::{
    alpha, chemical_potential, gr0_finite_t_spin, gr0_t0, ideal_structure_factor, spin_density_for, JelliumSpec, Spin,
};
use clmap::{Execution, RadialGrid};

fn analytic_s0(x: f64) -> f64 {
    if x <= 2.0 {
        0.75 * x - x.powi(3) / 16.0
    } else {
        1.0
    }
}

#[test]
fn unpolarized_fermi_wavevector_uses_alpha() {
    for r_s in [0.5, 1.0, 4.0] {
        let spec = JelliumSpec::new(r_s, 0.0, 0.0).unwrap();
        assert_relative_eq!(
            spec.fermi_wavevector(Spin::Up),
            1.0 / (alpha() * r_s),
            max_relative = 1e-14
        );
    }
}

#[test]
fn structure_factor_matches_piecewise_form() {
    let spec = JelliumSpec::new(1.0, 1.0, 0.0).unwrap();
    let grid = RadialGrid::new(2048, 320.0).unwrap();
    let pdf = gr0_t0(&spec, &grid).unwrap();
    let s = ideal_structure_factor(&pdf.same_spin, pdf.spin_density).unwrap();
    let k_f = spec.fermi_wavevector(Spin::Up);
    let err = (0..grid.n_points())
        .map(|j| (s.values()[j] - analytic_s0(grid.k(j) / k_f)).abs())
        .fold(0.0, f64::max);
    println!("max |S - S_exact| = {err:e}");
    assert!(err < 1e-4);
}

#[test]
fn structure_factor_error_is_a_truncation_effect() {
    // the error at the first k point falls like 1/r_max
    let spec = JelliumSpec::new(1.0, 1.0, 0.0).unwrap();
    let k_f = spec.fermi_wavevector(Spin::Up);
    let err = |r_max: f64| {
        let grid = RadialGrid::new(2048, r_max).unwrap();
        let pdf = gr0_t0(&spec, &grid).unwrap();
        let s = ideal_structure_factor(&pdf.same_spin, pdf.spin_density).unwrap();
        (0..grid.n_points())
            .map(|j| (s.values()[j] - analytic_s0(grid.k(j) / k_f)).abs())
            .fold(0.0, f64::max)
    };
    let ratio = err(40.0) / err(160.0);
    assert!(ratio > 3.0 && ratio < 5.0, "ratio {ratio}");
}

#[test]
fn sommerfeld_chemical_potential() {
    let n = 0.05;
    let e_f = 0.5 * (6.0 * PI * PI * n).powf(2.0 / 3.0);
    let t = 0.05 * e_f;
    let mu = chemical_potential(n, t).unwrap();
    let sommerfeld = e_f * (1.0 - PI * PI / 12.0 * 0.05f64.powi(2));
    assert_relative_eq!(mu, sommerfeld, max_relative = 2e-5);
    assert_relative_eq!(spin_density_for(mu, t), n, max_relative = 1e-10);
}

#[test]
fn classical_chemical_potential() {
    let n = 1e-4;
    let t = 10.0;
    let mu = chemical_potential(n, t).unwrap();
    let lambda3 = (2.0 * PI / t).powf(1.5);
    // first quantum correction: + T n λ³ / 2^{3/2}
    let boltzmann = t * (n * lambda3).ln() + t * n * lambda3 / 2f64.powf(1.5);
    assert!((mu - boltzmann).abs() < 1e-6 * t, "{mu} vs {boltzmann}");
}

#[test]
fn cold_limit_of_finite_temperature() {
    let grid = RadialGrid::new(1024, 20.0).unwrap();
    let cold = gr0_t0(&JelliumSpec::new(1.0, 1.0, 0.0).unwrap(), &grid).unwrap();
    let warm_spec = JelliumSpec::with_temperature_ratio(1.0, 1.0, 0.01).unwrap();
    let warm = gr0_finite_t_spin(&warm_spec, &grid, Spin::Up, Execution::default()).unwrap();
    let d = warm.same_spin.max_abs_diff(&cold.same_spin).unwrap();
    println!("T/E_F = 0.01: max |Δg| = {d:e}");
    assert!(d < 1e-3);
}

#[test]
fn hot_limit_is_gaussian_hole() {
    // Boltzmann occupation gives g = 1 - exp(-T r²)
    let grid = RadialGrid::new(1024, 20.0).unwrap();
    let spec = JelliumSpec::with_temperature_ratio(1.0, 1.0, 200.0).unwrap();
    let pdf = gr0_finite_t_spin(&spec, &grid, Spin::Up, Execution::default()).unwrap();
    let t = spec.temperature;
    let err = (0..grid.n_points())
        .map(|i| (pdf.same_spin.values()[i] - (1.0 - (-t * grid.r(i).powi(2)).exp())).abs())
        .fold(0.0, f64::max);
    println!("T/E_F = 200: max deviation from Gaussian hole = {err:e}");
    assert!(err < 1e-3);
}

#[test]
fn finite_temperature_hole_matches_compressibility() {
    // n ∫ (g - 1) = -(1/n)(1/2π²) ∫ k² f_k² dk: the hole holds less than one
    // electron once T > 0, the rest showing up in S(0) = T (∂n/∂μ)/n.
    use clmap::ideal::fermi_occupation;
    let grid = RadialGrid::new(1024, 20.0).unwrap();
    for ratio in [0.1, 1.0, 4.0] {
        let spec = JelliumSpec::with_temperature_ratio(1.0, 1.0, ratio).unwrap();
        let pdf = gr0_finite_t_spin(&spec, &grid, Spin::Up, Execution::default()).unwrap();
        let hole = pdf.spin_density * pdf.same_spin.map(|g| g - 1.0).unwrap().volume_integral();
        let t = spec.temperature;
        let mu = chemical_potential(pdf.spin_density, t).unwrap();
        let k_max = (2.0 * (mu.max(0.0) + 40.0 * t)).sqrt();
        let steps = 200_000;
        let dk = k_max / steps as f64;
        let f2: f64 = (1..steps)
            .map(|i| {
                let k = i as f64 * dk;
                k * k * fermi_occupation(k, mu, t).powi(2)
            })
            .sum::<f64>()
            * dk;
        let expected = -f2 / (2.0 * PI * PI * pdf.spin_density);
        println!("T/E_F = {ratio}: hole = {hole}, oracle = {expected}");
        assert!((hole - expected).abs() < 1e-3);
    }
}

#[test]
fn sequential_and_parallel_agree_bitwise() {
    let grid = RadialGrid::new(512, 20.0).unwrap();
    let spec = JelliumSpec::with_temperature_ratio(2.0, 0.5, 0.7).unwrap();
    let a = gr0_finite_t_spin(&spec, &grid, Spin::Down, Execution::Sequential).unwrap();
    let b = gr0_finite_t_spin(&spec, &grid, Spin::Down, Execution::default()).unwrap();
    assert_eq!(a.same_spin, b.same_spin);
}
