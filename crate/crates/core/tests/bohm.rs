use std::f64::consts::PI;

use clmap::bohm::{
    box_eigenstate, box_eigenstate_on, box_energy, continuity_residual, kinetic_in_q, quantum_potential, LineGrid,
    TimeSlice,
};

/// Interior points at least five cells from walls and nodes.
fn interior(level: usize, n_points: usize) -> impl Iterator<Item = usize> {
    let cells = n_points - 1;
    let per_lobe = cells / level;
    (0..n_points).filter(move |&i| {
        let d = i % per_lobe;
        d >= 5 && per_lobe - d >= 5
    })
}

#[test]
fn ground_state_q_is_the_energy() {
    let f = box_eigenstate(1, 1.0).unwrap();
    let e = box_energy(1, 1.0, 1.0);
    assert!((e - PI * PI / 2.0).abs() < 1e-15);
    let devs: Vec<f64> = interior(1, f.grid.n_points())
        .map(|i| (f.q[i].unwrap() / e - 1.0).abs())
        .collect();
    let worst = devs.iter().copied().fold(0.0, f64::max);
    let mean = devs.iter().sum::<f64>() / devs.len() as f64;
    println!("level 1 relative deviation: mean {mean:e}, worst {worst:e}");
    // One ulp of rounding in R is amplified by 1/(π dx)² in R''/R while the
    // stencil error is (π dx)²/12; no grid gets every point below 1e-8.
    assert!(mean <= 1e-8);
    assert!(worst <= 3e-8);
}

#[test]
fn wider_box_scales_as_inverse_square() {
    let f = box_eigenstate(1, 2.5).unwrap();
    let e = PI * PI / (2.0 * 2.5 * 2.5);
    let i = f.grid.n_points() / 3;
    assert!((f.q[i].unwrap() / e - 1.0).abs() <= 1e-8);
}

#[test]
fn kinetic_energy_lives_in_q() {
    for level in 1..=5 {
        let f = box_eigenstate(level, 1.0).unwrap();
        let k = kinetic_in_q(&f).unwrap();
        let e = box_energy(level, 1.0, 1.0);
        println!(
            "level {level}: ∫nQ = {}, KE = {}, residual = {:e}",
            k.integral_nq, k.kinetic_energy, k.residual
        );
        assert!(k.residual <= 1e-6);
        assert!(
            (k.kinetic_energy / e - 1.0).abs() <= 1e-6,
            "KE {} vs {e}",
            k.kinetic_energy
        );
    }
}

#[test]
fn second_order_convergence() {
    let err = |n: usize| {
        let f = box_eigenstate_on(1, 1.0, n).unwrap();
        let i = (n - 1) / 2;
        (f.q[i].unwrap() - PI * PI / 2.0).abs()
    };
    let ratio = err(257) / err(513);
    println!("error ratio = {ratio}");
    assert!((ratio - 4.0).abs() <= 0.5);

    // same for a density that is not a discrete eigenfunction
    let gauss = |n: usize| {
        let grid = LineGrid::new(n, -4.0, 4.0).unwrap();
        let d: Vec<f64> = grid.x_values().iter().map(|x| (-x * x).exp()).collect();
        let q = quantum_potential(&d, 1.0, &grid).unwrap();
        let i = (n - 1) / 2 + (n - 1) / 8; // x = 1
        let x = grid.x(i);
        (q[i].unwrap() - 0.5 * (1.0 - x * x)).abs()
    };
    let ratio = gauss(401) / gauss(801);
    assert!((ratio - 4.0).abs() <= 0.5, "gaussian ratio {ratio}");
}

#[test]
fn stationary_slices_have_no_residual() {
    let f = box_eigenstate_on(2, 1.0, 1025).unwrap();
    let slice = |t| TimeSlice {
        t,
        density: f.density.clone(),
        phase: vec![0.3; 1025],
    };
    let r = continuity_residual(&[slice(0.0), slice(0.1), slice(0.2)], 1.0, &f.grid).unwrap();
    assert_eq!(r.max_abs(), 0.0);
    assert_eq!(r.times, vec![0.05, 0.15000000000000002]);
}

#[test]
fn boosted_gaussian_converges_at_second_order() {
    let (v, m) = (0.7, 1.3);
    let run = |n: usize, dt: f64| {
        let grid = LineGrid::new(n, -6.0, 6.0).unwrap();
        let slice = |t: f64| TimeSlice {
            t,
            density: grid.x_values().iter().map(|x| (-(x - v * t).powi(2)).exp()).collect(),
            phase: grid
                .x_values()
                .iter()
                .map(|x| m * v * x - 0.5 * m * v * v * t)
                .collect(),
        };
        continuity_residual(&[slice(0.0), slice(dt)], m, &grid)
            .unwrap()
            .max_abs()
    };
    let coarse = run(241, 0.02);
    let fine = run(481, 0.01);
    println!("continuity residual {coarse:e} -> {fine:e}");
    assert!(fine < coarse);
    assert!((coarse / fine - 4.0).abs() < 0.5);
}

#[test]
fn mismatched_slices_are_rejected() {
    let grid = LineGrid::new(32, 0.0, 1.0).unwrap();
    let a = TimeSlice {
        t: 0.0,
        density: vec![1.0; 32],
        phase: vec![0.0; 32],
    };
    let b = TimeSlice {
        t: 1.0,
        density: vec![1.0; 31],
        phase: vec![0.0; 31],
    };
    assert!(continuity_residual(&[a.clone(), b], 1.0, &grid).is_err());
    assert!(continuity_residual(&[a], 1.0, &grid).is_err());
}
