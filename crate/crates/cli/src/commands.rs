//! Subcommand arguments and their runners. Everything here is in atomic
//! units except `classify`, which converts SI input at this boundary.

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use clmap::bohm::{self, BohmFields};
use clmap::chnc::{
    uniform_lambda_grid, ClassicalMap, ClassicalMapConfig, CoulombModel, EffectiveTemperature, SpinResolved,
};
use clmap::classicality::{self, FluidDensity};
use clmap::hnc::HncControls;
use clmap::ideal::{gr0_finite_t_spin, JelliumSpec, Spin};
use clmap::pauli::{verify_pauli, PauliPotential};
use clmap::{Execution, RadialGrid};

use crate::output::{CliError, GridSpec, RunOutput, Table};

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Command {
    /// Ideal-fermion pair-distribution functions.
    Gr0(Gr0Args),
    /// Extract the Pauli potential, optionally verifying the round trip.
    Pauli(PauliArgs),
    /// Spin-resolved PDFs of the classical map at one coupling.
    Solve(SolveArgs),
    /// Exchange-correlation energy by coupling-constant integration.
    Exc(ExcArgs),
    /// Bohm quantum potential of model states.
    #[command(subcommand)]
    Bohm(BohmCommand),
    /// Thermal de Broglie wavelength and quantum/classical verdict.
    Classify(ClassifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gr0(_) => "gr0",
            Command::Pauli(_) => "pauli",
            Command::Solve(_) => "solve",
            Command::Exc(_) => "exc",
            Command::Bohm(_) => "bohm",
            Command::Classify(_) => "classify",
        }
    }

    pub fn run(&self) -> Result<RunOutput, CliError> {
        match self {
            Command::Gr0(a) => gr0(a),
            Command::Pauli(a) => pauli(a),
            Command::Solve(a) => solve(a),
            Command::Exc(a) => exc(a),
            Command::Bohm(b) => run_bohm(b),
            Command::Classify(a) => classify(a),
        }
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct JelliumArgs {
    /// Wigner-Seitz radius, bohr.
    #[arg(long = "rs", default_value_t = 1.0)]
    pub r_s: f64,
    /// Spin polarization in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    pub zeta: f64,
    /// Physical temperature over the majority-spin Fermi energy.
    #[arg(long, default_value_t = 0.0)]
    pub temp_ratio: f64,
}

impl JelliumArgs {
    fn spec(&self) -> Result<JelliumSpec, CliError> {
        Ok(JelliumSpec::with_temperature_ratio(
            self.r_s,
            self.zeta,
            self.temp_ratio,
        )?)
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct GridArgs {
    /// Radial grid points.
    #[arg(long, default_value_t = 2048)]
    pub grid_n: usize,
    /// Grid extent in units of r_s.
    #[arg(long, default_value_t = 20.0)]
    pub rmax_rs: f64,
}

impl GridArgs {
    fn grid(&self, r_s: f64) -> Result<RadialGrid, CliError> {
        Ok(RadialGrid::new(self.grid_n, self.rmax_rs * r_s)?)
    }

    fn spec(&self, grid: &RadialGrid) -> GridSpec {
        GridSpec {
            n_points: grid.n_points(),
            r_max: grid.r_max(),
            r_max_over_rs: self.rmax_rs,
        }
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 0.3)]
    pub mixing: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iter: usize,
    /// Disable Ng acceleration.
    #[arg(long)]
    pub no_ng: bool,
    /// Run on one thread.
    #[arg(long)]
    pub sequential: bool,
}

impl SolverArgs {
    fn controls(&self) -> HncControls {
        HncControls {
            mixing: self.mixing,
            tol: self.tol,
            max_iter: self.max_iter,
            ng_acceleration: !self.no_ng,
            exec: self.exec(),
            ..HncControls::default()
        }
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct MapArgs {
    /// Classical-fluid temperature, Hartree.
    #[arg(long, conflicts_with = "tq")]
    pub tcf: Option<f64>,
    /// Quantum temperature T_q in T_cf = sqrt(T² + T_q²), Hartree.
    /// Without --tcf or --tq, T_q = 2E_F/5 of the majority spin.
    #[arg(long)]
    pub tq: Option<f64>,
    /// Diffraction-corrected Coulomb with this thermal length, bohr.
    #[arg(long)]
    pub diffraction: Option<f64>,
    /// Electron charge in units of e.
    #[arg(long, default_value_t = 1.0)]
    pub charge: f64,
}

fn map_config(
    j: &JelliumArgs,
    g: &GridArgs,
    m: &MapArgs,
    s: &SolverArgs,
    lambda_grid: Vec<f64>,
) -> Result<ClassicalMapConfig, CliError> {
    let spec = j.spec()?;
    let t_cf = match (m.tcf, m.tq) {
        (Some(t_cf), _) => EffectiveTemperature::UserSupplied { t_cf },
        (None, Some(t_q)) => EffectiveTemperature::Quadrature { t_q },
        (None, None) => EffectiveTemperature::Quadrature {
            t_q: 0.4 * spec.fermi_energy(Spin::Up),
        },
    };
    Ok(ClassicalMapConfig {
        coulomb: match m.diffraction {
            Some(lambda_ee) => CoulombModel::DiffractionCorrected { lambda_ee },
            None => CoulombModel::Bare,
        },
        lambda_grid,
        charge: m.charge,
        n_points: g.grid_n,
        r_max_over_rs: g.rmax_rs,
        controls: s.controls(),
        ..ClassicalMapConfig::new(spec.r_s, spec.zeta, spec.temperature, t_cf)
    })
}

fn r_over_rs(grid: &RadialGrid, r_s: f64) -> Vec<f64> {
    grid.r_values().iter().map(|r| r / r_s).collect()
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct Gr0Args {
    #[command(flatten)]
    pub jellium: JelliumArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub sequential: bool,
}

fn gr0(a: &Gr0Args) -> Result<RunOutput, CliError> {
    let spec = a.jellium.spec()?;
    let grid = a.grid.grid(spec.r_s)?;
    let exec = if a.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let up = gr0_finite_t_spin(&spec, &grid, Spin::Up, exec)?;
    let down = if spec.zeta < 1.0 {
        Some(gr0_finite_t_spin(&spec, &grid, Spin::Down, exec)?)
    } else {
        None
    };
    let mut columns = vec!["r_over_rs", "g_same_up", "g_opposite"];
    if down.is_some() {
        columns.push("g_same_down");
    }
    let mut t = Table::new(&columns);
    t.meta("rs", spec.r_s)
        .meta("zeta", spec.zeta)
        .meta("temp_ratio", a.jellium.temp_ratio)
        .meta("grid_n", grid.n_points())
        .meta("rmax_rs", a.grid.rmax_rs);
    for (i, x) in r_over_rs(&grid, spec.r_s).into_iter().enumerate() {
        let mut row = vec![x, up.same_spin.values()[i], up.opposite_spin.values()[i]];
        if let Some(d) = &down {
            row.push(d.same_spin.values()[i]);
        }
        t.row(row);
    }
    let diagnostics = json!({
        "fermi_wavevector_up": spec.fermi_wavevector(Spin::Up),
        "fermi_energy_up": spec.fermi_energy(Spin::Up),
        "temperature_hartree": spec.temperature,
        "contact_up": up.same_spin.value_at_origin(),
        "tail_deviation_up": up.same_spin.tail_deviation(1.0, 0.05),
    });
    Ok(RunOutput {
        files: vec![("gr0.csv".into(), t.render("gr0"))],
        grid: Some(a.grid.spec(&grid)),
        summary: format!("g0 written for r_s = {}, zeta = {}", spec.r_s, spec.zeta),
        diagnostics,
    })
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct PauliArgs {
    #[command(flatten)]
    pub jellium: JelliumArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Forward-solve HNC with the extracted potential and report the RMS error.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

fn pauli(a: &PauliArgs) -> Result<RunOutput, CliError> {
    let spec = a.jellium.spec()?;
    let grid = a.grid.grid(spec.r_s)?;
    let controls = a.solver.controls();
    let spins = spec.occupied_spins();
    let potentials = spins
        .iter()
        .map(|&s| PauliPotential::extract_spin(&spec, &grid, s, controls.exec))
        .collect::<Result<Vec<_>, _>>()?;

    let mut columns = vec!["r_over_rs", "beta_p_same_up", "beta_p_opposite"];
    if potentials.len() > 1 {
        columns.push("beta_p_same_down");
    }
    let mut t = Table::new(&columns);
    t.meta("rs", spec.r_s)
        .meta("zeta", spec.zeta)
        .meta("temp_ratio", a.jellium.temp_ratio)
        .meta("cap_value_up", potentials[0].cap_value);
    for (i, x) in r_over_rs(&grid, spec.r_s).into_iter().enumerate() {
        // unlike spins carry no exclusion
        let mut row = vec![x, potentials[0].beta_p.values()[i], 0.0];
        if let Some(p) = potentials.get(1) {
            row.push(p.beta_p.values()[i]);
        }
        t.row(row);
    }
    let mut files = vec![("pauli.csv".to_string(), t.render("pauli"))];
    let mut per_spin = Vec::new();
    for p in &potentials {
        let mut buf = Vec::new();
        p.write_to(&mut buf).map_err(CliError::from)?;
        files.push((
            format!("pauli_{}.txt", p.spin.label()),
            String::from_utf8(buf).expect("ascii"),
        ));
        let mut entry = json!({
            "spin": p.spin.label(),
            "cap_value": p.cap_value,
            "t_over_ef": p.t_over_ef,
        });
        if a.verify {
            let v = verify_pauli(p, &spec, &controls)?;
            entry["rms_error"] = json!(v.rms_error);
            entry["max_error"] = json!(v.max_error);
            entry["iterations"] = json!(v.state.iterations);
            entry["residual"] = json!(v.state.residual);
        }
        per_spin.push(entry);
    }
    let summary = match per_spin[0].get("rms_error") {
        Some(rms) => format!("Pauli potential extracted; round-trip RMS {rms}"),
        None => "Pauli potential extracted".to_string(),
    };
    Ok(RunOutput {
        files,
        grid: Some(a.grid.spec(&grid)),
        diagnostics: json!({ "spins": per_spin }),
        summary,
    })
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub jellium: JelliumArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Coupling constant in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
}

fn spin_table(map: &ClassicalMap, s: &SpinResolved, r_s: f64) -> Table {
    let two = map.spins().len() > 1;
    let mut columns = vec!["r_over_rs", "g_up_up"];
    if two {
        columns.extend(["g_up_down", "g_down_down"]);
    }
    let mut t = Table::new(&columns);
    let c = map.config();
    t.meta("rs", c.r_s)
        .meta("zeta", c.zeta)
        .meta("lambda", s.lambda)
        .meta("t_cf", c.classical_temperature());
    let uu = s.same_spin(Spin::Up).g.values();
    let pair = |a, b| s.pair(a, b).map(|st| st.g.values());
    let (ud, dd) = (pair(Spin::Up, Spin::Down), pair(Spin::Down, Spin::Down));
    for (i, x) in r_over_rs(map.grid(), r_s).into_iter().enumerate() {
        let mut row = vec![x, uu[i]];
        if let (Some(ud), Some(dd)) = (ud, dd) {
            row.extend([ud[i], dd[i]]);
        }
        t.row(row);
    }
    t
}

fn solve(a: &SolveArgs) -> Result<RunOutput, CliError> {
    let config = map_config(&a.jellium, &a.grid, &a.map, &a.solver, vec![0.0, 1.0])?;
    let map = ClassicalMap::new(config)?;
    let s = map.solve(a.lambda)?;
    let g_bar = s.spin_averaged();
    let diagnostics = json!({
        "t_cf": map.config().classical_temperature(),
        "iterations": s.solution.iterations,
        "residual": s.solution.residual,
        "contact_up_up": s.same_spin(Spin::Up).contact(),
        "hole": map.hole(&g_bar),
        "integrand": map.integrand(&g_bar),
    });
    Ok(RunOutput {
        files: vec![("solve.csv".into(), spin_table(&map, &s, a.jellium.r_s).render("solve"))],
        grid: Some(a.grid.spec(map.grid())),
        summary: format!(
            "converged in {} iterations (residual {:e})",
            s.solution.iterations, s.solution.residual
        ),
        diagnostics,
    })
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ExcArgs {
    #[command(flatten)]
    pub jellium: JelliumArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Evenly spaced couplings from 0 to 1 (at least 5).
    #[arg(long, default_value_t = 9)]
    pub lambda_points: usize,
}

fn exc(a: &ExcArgs) -> Result<RunOutput, CliError> {
    let config = map_config(
        &a.jellium,
        &a.grid,
        &a.map,
        &a.solver,
        uniform_lambda_grid(a.lambda_points),
    )?;
    let map = ClassicalMap::new(config)?;
    let result = map.exc()?;
    let mut t = Table::new(&["lambda", "integrand", "contact_same", "hole", "iterations", "residual"]);
    t.meta("rs", a.jellium.r_s)
        .meta("zeta", a.jellium.zeta)
        .meta("t_cf", map.config().classical_temperature())
        .meta("e_xc", crate::output::num(result.e_xc));
    for r in &result.rows {
        t.row(vec![
            r.lambda,
            r.integrand,
            r.contact_same,
            r.hole,
            r.iterations as f64,
            r.residual,
        ]);
    }
    let json_body = serde_json::to_string_pretty(&result).expect("result serializes") + "\n";
    Ok(RunOutput {
        files: vec![("exc.csv".into(), t.render("exc")), ("exc.json".into(), json_body)],
        grid: Some(a.grid.spec(map.grid())),
        summary: format!(
            "E_xc = {} Hartree (quadrature error {:e})",
            result.e_xc, result.quadrature_error
        ),
        diagnostics: json!({
            "e_xc": result.e_xc,
            "e_xc_richardson": result.e_xc_richardson,
            "quadrature_error": result.quadrature_error,
            "exclusion_hole_integrand": result.exclusion_hole_integrand,
            "t_cf": map.config().classical_temperature(),
        }),
    })
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum BohmCommand {
    /// Particle in a box [0, a].
    Box(BoxArgs),
    /// Harmonic-oscillator ground state.
    Oscillator(OscillatorArgs),
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct BoxArgs {
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    /// Box width, bohr.
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
    #[arg(long, default_value_t = bohm::DEFAULT_BOX_POINTS)]
    pub points: usize,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct OscillatorArgs {
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Mass in electron masses.
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 4001)]
    pub points: usize,
}

fn run_bohm(b: &BohmCommand) -> Result<RunOutput, CliError> {
    let (fields, exact) = match b {
        BohmCommand::Box(a) => (
            bohm::box_eigenstate_on(a.level, a.width, a.points)?,
            bohm::box_energy(a.level, a.width, 1.0),
        ),
        BohmCommand::Oscillator(a) => (
            bohm::oscillator_ground_state(a.omega, a.mass, a.points)?,
            0.25 * a.omega,
        ),
    };
    let kinetic = bohm::kinetic_in_q(&fields)?;
    let label = match b {
        BohmCommand::Box(_) => "energy",
        BohmCommand::Oscillator(_) => "kinetic_energy_exact",
    };
    Ok(RunOutput {
        files: vec![("bohm.csv".into(), bohm_table(&fields).render("bohm"))],
        grid: None,
        summary: format!(
            "∫nQ = {}, kinetic energy = {} (relative residual {:e})",
            kinetic.integral_nq, kinetic.kinetic_energy, kinetic.residual
        ),
        diagnostics: json!({
            "integral_nq": kinetic.integral_nq,
            "kinetic_energy": kinetic.kinetic_energy,
            "residual": kinetic.residual,
            label: exact,
            "masked_points": fields.masked().len(),
            "n_points": fields.grid.n_points(),
            "dx": fields.grid.dx(),
        }),
    })
}

fn bohm_table(f: &BohmFields) -> Table {
    let mut t = Table::new(&["x", "n", "R", "Q", "j"]);
    t.meta("mass", f.mass)
        .meta("density_threshold", bohm::DENSITY_THRESHOLD)
        .meta("masked_points", f.masked().len());
    for i in 0..f.grid.n_points() {
        t.row(vec![
            f.grid.x(i),
            f.density[i],
            f.amplitude[i],
            f.q[i].unwrap_or(f64::NAN),
            f.current[i],
        ]);
    }
    t
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Si,
    Atomic,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ClassifyArgs {
    /// Units of --mass, --temp, --length and --density.
    #[arg(long, value_enum, default_value_t = Units::Si)]
    pub units: Units,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub temp: Option<f64>,
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long, conflicts_with = "mass")]
    pub mass_kg: Option<f64>,
    #[arg(long, conflicts_with = "temp")]
    pub temp_k: Option<f64>,
    #[arg(long, conflicts_with = "length")]
    pub length_m: Option<f64>,
    #[arg(long, conflicts_with = "density")]
    pub density_m3: Option<f64>,
    /// Polarization used with a density.
    #[arg(long, default_value_t = 0.0)]
    pub zeta: f64,
    /// Multiplier on the 3T/2 kinetic energy.
    #[arg(long, default_value_t = 1.0)]
    pub kinetic_factor: f64,
}

impl ClassifyArgs {
    /// (mass kg, T K, L m, density m⁻³) in SI.
    fn si(&self) -> Result<(f64, f64, f64, Option<f64>), CliError> {
        use classicality::*;
        let atomic = self.units == Units::Atomic;
        let pick = |si: Option<f64>, generic: Option<f64>, convert: fn(f64) -> f64| {
            si.or(generic.map(|v| if atomic { convert(v) } else { v }))
        };
        let mass = pick(self.mass_kg, self.mass, electron_masses_to_kg)
            .ok_or_else(|| CliError::validation("classify needs --mass or --mass-kg"))?;
        let temp = pick(self.temp_k, self.temp, hartree_to_kelvin)
            .ok_or_else(|| CliError::validation("classify needs --temp or --temp-k"))?;
        let length = pick(self.length_m, self.length, bohr_to_meters).unwrap_or(constants::BOHR);
        let density = pick(self.density_m3, self.density, |n| n / constants::BOHR.powi(3));
        Ok((mass, temp, length, density))
    }
}

fn classify(a: &ClassifyArgs) -> Result<RunOutput, CliError> {
    let (mass, temp, length, density) = a.si()?;
    let fluid = density.map(|density_m3| FluidDensity {
        density_m3,
        zeta: a.zeta,
    });
    let report = classicality::classify_with(mass, temp, length, fluid, a.kinetic_factor)?;
    let mut doc = json!({ "report": report });
    if mass == 1.0 && temp == 300.0 && a.kinetic_factor == 1.0 {
        doc["published_reference"] = json!(classicality::published_cat_comparison());
    }
    let body = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
    let mut summary = format!(
        "mass        {:e} kg\ntemperature {} K (effective {} K)\nwavelength  {:e} m\nlength      {:e} m\nverdict     {}",
        report.mass_kg,
        report.temperature_k,
        report.effective_temperature_k,
        report.wavelength_m,
        report.comparison_length_m,
        report.verdict
    );
    if let Some(r) = doc.get("published_reference") {
        summary.push_str(&format!(
            "\npublished   {:e} m (ratio to computed {:.4})",
            r["published_m"].as_f64().unwrap_or(f64::NAN),
            r["factor"].as_f64().unwrap_or(f64::NAN)
        ));
    }
    Ok(RunOutput {
        files: vec![("classify.json".into(), body)],
        grid: None,
        diagnostics: serde_json::to_value(report).expect("report serializes"),
        summary,
    })
}
