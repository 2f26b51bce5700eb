use clmap::chnc::{exchange_energy_unpolarized, ClassicalMap, ClassicalMapConfig, EffectiveTemperature};
use clmap::ideal::{JelliumSpec, Spin};

fn config(r_s: f64, zeta: f64) -> ClassicalMapConfig {
    let spec = JelliumSpec::new(r_s, zeta, 0.0).unwrap();
    let t_q = 0.4 * spec.fermi_energy(Spin::Up);
    ClassicalMapConfig::new(r_s, zeta, 0.0, EffectiveTemperature::Quadrature { t_q })
}

#[test]
fn zero_coupling_reproduces_ideal_pdfs() {
    let map = ClassicalMap::new(config(2.0, 0.0)).unwrap();
    let s = map.solve(0.0).unwrap();
    for spin in [Spin::Up, Spin::Down] {
        let rms = s
            .same_spin(spin)
            .g
            .rms_diff(map.ideal_same_spin(spin).unwrap())
            .unwrap();
        assert!(rms <= 1e-3, "{spin:?}: {rms}");
    }
    let ud = &s.pair(Spin::Up, Spin::Down).unwrap().g;
    assert!(ud.values().iter().all(|v| (v - 1.0).abs() < 1e-6));
}

#[test]
fn partially_polarized_zero_coupling() {
    let map = ClassicalMap::new(config(1.5, 0.4)).unwrap();
    let s = map.solve(0.0).unwrap();
    for spin in [Spin::Up, Spin::Down] {
        let rms = s
            .same_spin(spin)
            .g
            .rms_diff(map.ideal_same_spin(spin).unwrap())
            .unwrap();
        assert!(rms <= 1e-3, "{spin:?}: {rms}");
    }
}

#[test]
fn zero_charge_removes_coupling() {
    let mut c = config(2.0, 1.0);
    c.charge = 0.0;
    let map = ClassicalMap::new(c).unwrap();
    let a = map.solve(0.0).unwrap();
    let b = map.solve(1.0).unwrap();
    assert_eq!(a.same_spin(Spin::Up).g, b.same_spin(Spin::Up).g);
    let ex = map.exc().unwrap();
    assert!(ex.rows.iter().all(|r| r.integrand == 0.0));
    assert_eq!(ex.e_xc, 0.0);
}

#[test]
fn exchange_correlation_energy_unpolarized() {
    let map = ClassicalMap::new(config(2.0, 0.0)).unwrap();
    let ex = map.exc().unwrap();
    for row in &ex.rows {
        println!(
            "λ = {:.3}  I = {:.6}  g(0) = {:.3e}  hole = {:.5}  iter = {}",
            row.lambda, row.integrand, row.contact_same, row.hole, row.iterations
        );
    }
    println!("E_xc = {} ± {}", ex.e_xc, ex.quadrature_error);
    assert!(ex.e_xc < 0.0);
    assert!(ex.rows.iter().all(|r| r.integrand < 0.0));
    // the zero-coupling integrand is the exclusion-hole energy
    let first = &ex.rows[0];
    assert!((first.integrand - ex.exclusion_hole_integrand).abs() <= 1e-6);
    // exchange oracle, a few percent
    let e_x = exchange_energy_unpolarized(2.0);
    assert!(
        (first.integrand / e_x - 1.0).abs() < 0.03,
        "{} vs {e_x}",
        first.integrand
    );
    // correlation lowers the energy
    assert!(ex.e_xc < e_x);
    // screening sum rule and hole bound
    let last = ex.rows.last().unwrap();
    assert!((last.hole + 1.0).abs() <= 0.02, "hole at λ=1: {}", last.hole);
    assert!(ex.rows.iter().all(|r| r.hole >= -1.0 - 0.02));
    // exclusion survives interaction, contact does not grow with λ
    for w in ex.rows.windows(2) {
        assert!(w[1].contact_same <= w[0].contact_same + 1e-6);
    }
}

#[test]
fn polarized_energy_is_negative() {
    let ex = ClassicalMap::new(config(1.0, 1.0)).unwrap().exc().unwrap();
    println!("ζ=1, r_s=1: E_xc = {}", ex.e_xc);
    assert!(ex.e_xc < 0.0);
}

#[test]
fn strong_coupling_digs_a_deeper_hole() {
    let map = ClassicalMap::new(config(5.0, 0.0)).unwrap();
    let free = map.solve(0.0).unwrap();
    let full = map.solve(1.0).unwrap();
    let (g0, g1) = (&free.same_spin(Spin::Up).g, &full.same_spin(Spin::Up).g);
    let grid = g0.grid();
    for i in 0..grid.n_points() {
        if grid.r(i) < 5.0 {
            assert!(g1.values()[i] <= g0.values()[i] + 1e-9, "r = {}", grid.r(i));
        }
    }
    let ud = &full.pair(Spin::Up, Spin::Down).unwrap().g;
    assert!(ud.value_at_origin() < 0.5);
}

#[test]
fn results_depend_on_lengths_only_through_r_s() {
    // With T_cf ∝ E_F ∝ 1/r_s², the reduced Coulomb coupling is λ r_s, so
    // (r_s = 3, λ = 1/3) and (r_s = 1, λ = 1) are the same fluid in r/r_s.
    let a = ClassicalMap::new(config(3.0, 1.0)).unwrap().solve(1.0 / 3.0).unwrap();
    let b = ClassicalMap::new(config(1.0, 1.0)).unwrap().solve(1.0).unwrap();
    let (ga, gb) = (&a.same_spin(Spin::Up).g, &b.same_spin(Spin::Up).g);
    let diff = ga
        .values()
        .iter()
        .zip(gb.values())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    println!("collapse max |Δg| = {diff:e}");
    assert!(diff < 1e-7);
}
