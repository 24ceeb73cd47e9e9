use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use num_complex::Complex64;
use prequant::corpus::{self, sample_points};
use prequant::flow::{integrate, Trajectory};
use prequant::lift::{integrate_lifted, LiftedTrajectory};
use prequant::quantum::{
    projective_distance, propagate_many, tangency_defect, HermitianMatrix, QuantumError, StateVector,
};
use prequant::scenario::Scenario;
use prequant::verify::{self, bracket_summary, complex_pairs, Report, Tolerances};
use prequant::Observable;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::{BracketArgs, Common, Format, QuantumArgs, ReportArgs, TrajectoryArgs};

fn read_config(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn load_scenario(common: &Common) -> Result<Scenario, CliError> {
    let text = read_config(&common.config)?;
    let mut scenario = Scenario::from_json(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", common.config.display())))?;
    if let Some(seed) = common.seed {
        scenario.seed = seed;
    }
    Ok(scenario)
}

fn scenario_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Writes `bytes` to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => {
            let mut stdout = io::stdout().lock();
            match stdout.write_all(bytes).and_then(|_| stdout.flush()) {
                // A closed pipe (e.g. `| head`) is the reader's choice, not a failure.
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

fn json_bytes(value: &impl Serialize) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
    bytes.push(b'\n');
    bytes
}

#[derive(Serialize)]
struct TrajectoryJson {
    hamiltonian: String,
    integrator: &'static str,
    dt: f64,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn coordinate_columns(dim: usize) -> Vec<String> {
    let mut columns = vec!["t".to_string()];
    columns.extend((1..=dim).map(|i| format!("q{i}")));
    columns.extend((1..=dim).map(|i| format!("p{i}")));
    columns
}

fn trajectory_json(traj: &Trajectory, thetas: Option<&[f64]>) -> Result<TrajectoryJson, CliError> {
    let dim = traj.generator.dim();
    let mut columns = coordinate_columns(dim);
    if thetas.is_some() {
        columns.extend(["theta", "phase_re", "phase_im"].map(String::from));
    }
    columns.push("H".into());
    let mut rows = Vec::with_capacity(traj.len());
    for (k, (t, z)) in traj.times.iter().zip(&traj.points).enumerate() {
        let mut row = vec![*t];
        row.extend(&z.q);
        row.extend(&z.p);
        if let Some(thetas) = thetas {
            let phase = Complex64::from_polar(1.0, thetas[k]);
            row.extend([thetas[k], phase.re, phase.im]);
        }
        row.push(traj.generator.evaluate(z)?);
        rows.push(row);
    }
    Ok(TrajectoryJson {
        hamiltonian: traj.generator.to_string(),
        integrator: traj.kind.name(),
        dt: traj.dt,
        columns,
        rows,
    })
}

pub fn simulate(args: &TrajectoryArgs) -> Result<ExitCode, CliError> {
    let scenario = load_scenario(&args.common)?;
    let system = scenario.system()?;
    let traj = integrate(&system, &scenario.initial.base, scenario.dt, scenario.steps, scenario.integrator)?;
    let bytes = match args.format {
        Format::Csv => {
            let mut out = Vec::new();
            traj.write_csv(&mut out)?;
            out
        }
        Format::Json => json_bytes(&trajectory_json(&traj, None)?),
    };
    emit(args.common.out.as_deref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}

pub fn lift(args: &TrajectoryArgs) -> Result<ExitCode, CliError> {
    let scenario = load_scenario(&args.common)?;
    let system = scenario.system()?;
    let traj: LiftedTrajectory =
        integrate_lifted(&system, &scenario.initial, scenario.dt, scenario.steps, scenario.integrator)?;
    let bytes = match args.format {
        Format::Csv => {
            let mut out = Vec::new();
            traj.write_csv(&mut out)?;
            out
        }
        Format::Json => json_bytes(&trajectory_json(&traj.base, Some(&traj.thetas))?),
    };
    emit(args.common.out.as_deref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}

fn tolerances(overrides: &[String]) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    for spec in overrides {
        tol.apply_override(spec)?;
    }
    Ok(tol)
}

fn report_exit(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    }
}

pub fn verify(args: &ReportArgs) -> Result<ExitCode, CliError> {
    let tol = tolerances(&args.tolerances)?;
    let scenario = load_scenario(&args.common)?;
    let report = Report {
        checks: verify::verify_scenario(&scenario, &tol)?,
        seed: scenario.seed,
        scenario: scenario_name(&args.common.config),
    };
    emit(args.common.out.as_deref(), &json_bytes(&report))?;
    for check in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("check failed: {} measured {:e} > tolerance {:e}", check.name, check.measured, check.tolerance);
    }
    Ok(report_exit(report.all_pass()))
}

pub fn opcheck(args: &ReportArgs) -> Result<ExitCode, CliError> {
    let tol = tolerances(&args.tolerances)?;
    let scenario = load_scenario(&args.common)?;
    let report = verify::opcheck(&scenario, &tol)?;
    emit(args.common.out.as_deref(), &json_bytes(&report))?;
    Ok(report_exit(report.all_pass()))
}

fn default_hbar() -> f64 {
    1.0
}

/// Input of the `quantum` subcommand. Complex numbers are `[re, im]`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuantumSpec {
    dim: usize,
    hermitian: Vec<Vec<[f64; 2]>>,
    psi0: Vec<[f64; 2]>,
    #[serde(default = "default_hbar")]
    hbar: f64,
    times: Vec<f64>,
}

#[derive(Serialize)]
struct QuantumOutput {
    times: Vec<f64>,
    states: Vec<Vec<[f64; 2]>>,
    norms: Vec<f64>,
    tangency_defects: Vec<f64>,
    projective_distances: Vec<f64>,
}

fn complex_vec(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
}

fn invalid_input(e: QuantumError) -> CliError {
    match e {
        QuantumError::NoConvergence { .. } => CliError::Numerical(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

pub fn quantum(args: &QuantumArgs) -> Result<ExitCode, CliError> {
    let text = read_config(&args.config)?;
    let spec: QuantumSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: invalid quantum spec: {e}", args.config.display())))?;
    if spec.hermitian.len() != spec.dim {
        return Err(CliError::Config(format!(
            "hermitian has {} rows, expected dim = {}",
            spec.hermitian.len(),
            spec.dim
        )));
    }
    if spec.times.iter().any(|t| !t.is_finite()) {
        return Err(CliError::Config("times must be finite".into()));
    }
    let h = HermitianMatrix::from_rows(spec.hermitian.iter().map(|r| complex_vec(r)).collect()).map_err(invalid_input)?;
    let psi0 = StateVector::new(complex_vec(&spec.psi0)).map_err(invalid_input)?;
    if psi0.dim() != spec.dim {
        return Err(CliError::Config(format!("psi0 has length {}, expected dim = {}", psi0.dim(), spec.dim)));
    }
    let states = propagate_many(&h, &psi0, &spec.times, spec.hbar).map_err(invalid_input)?;
    let output = QuantumOutput {
        times: spec.times.clone(),
        norms: states.iter().map(StateVector::norm).collect(),
        tangency_defects: states
            .iter()
            .map(|psi| tangency_defect(&h, psi, spec.hbar))
            .collect::<Result<_, _>>()?,
        projective_distances: states.iter().map(|psi| projective_distance(psi, &psi0)).collect(),
        states: states.iter().map(|psi| complex_pairs(psi.amplitudes())).collect(),
    };
    emit(args.out.as_deref(), &json_bytes(&output))?;
    Ok(ExitCode::SUCCESS)
}

pub fn brackets(args: &BracketArgs) -> Result<ExitCode, CliError> {
    let scenario = load_scenario(&args.common)?;
    let n = scenario.dim;
    let parse = |name: &str, text: &str| {
        Observable::parse(text, n).map_err(|e| CliError::Config(format!("--{name}: {e}")))
    };
    let f = parse("f", &args.f)?;
    let g = parse("g", &args.g)?;
    let points = sample_points(n, args.samples, 2.0, &mut corpus::rng(scenario.seed));
    let summary = bracket_summary(&f, &g, &points)?;
    let bytes = match args.format {
        Format::Json => json_bytes(&summary),
        Format::Csv => {
            let mut out = Vec::new();
            writeln!(out, "# omega bracket {{f,g}} = {}", summary.omega_bracket)?;
            writeln!(out, "# canonical bracket = {}", summary.canonical_bracket)?;
            let mut header = coordinate_columns(n);
            header.remove(0);
            writeln!(out, "{},omega,canonical", header.join(","))?;
            for s in &summary.samples {
                let cells: Vec<String> = s
                    .q
                    .iter()
                    .chain(&s.p)
                    .chain([&s.omega, &s.canonical])
                    .map(|x| prequant::flow::fmt_f64(*x))
                    .collect();
                writeln!(out, "{}", cells.join(","))?;
            }
            out
        }
    };
    emit(args.common.out.as_deref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}
