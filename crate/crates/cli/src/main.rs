//! Command-line front end for designing and validating sensing codes.

mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qecsense_core::bosonic::{binomial_signal, chebyshev_code, chebyshev_qfi, FockModel};
use qecsense_core::dephasing::{
    approx_gain_max, build_recovery, decompose_modes, design_approx, design_beyond_hnls,
    design_exact, lindblad_model, ring_model, sensitivity_report, CorrelationModel, QubitDesign,
};
use qecsense_core::model::{design_commuting_code, diagonalize_commuting, hnls_check, verify_kl};
use qecsense_core::simulator::{evolve_trajectory, DensityMatrix, EvolutionSchedule};

use io::{emit, parse_model, schema, CliError, ModelFile};

#[derive(Parser)]
#[command(
    name = "qecsense",
    about = "Design and validate ancilla-free quantum error correction codes for sensing",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design an optimal code for a commuting Lindblad model.
    Design(DesignArgs),
    /// Design a dephasing code and report scheme sensitivities.
    Dephasing(DephasingArgs),
    /// Report sensitivities of the available schemes on one model.
    Sensitivity(SensitivityArgs),
    /// Build bosonic codes and their near-optimality figures.
    Bosonic(BosonicArgs),
    /// Integrate the dephasing dynamics under periodic recovery.
    Simulate(SimulateArgs),
    /// Fan a parameter grid out over worker threads.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct DesignArgs {
    /// Lindblad model JSON file.
    #[arg(long)]
    model: PathBuf,
    /// Output path for the design report (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct DephasingModelArgs {
    /// Dephasing model JSON file.
    #[arg(long, conflicts_with = "ring")]
    model: Option<PathBuf>,
    /// Ring model size, as `N=6` or plain `6`.
    #[arg(long)]
    ring: Option<String>,
    /// Ring correlation coefficients by distance, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha: Vec<f64>,
    /// Dephasing time for ring models.
    #[arg(long, default_value_t = 1.0)]
    t2: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DesignKind {
    Exact,
    Approx,
    Beyond,
}

#[derive(Args)]
struct DephasingArgs {
    #[command(flatten)]
    input: DephasingModelArgs,
    /// Design variant to construct alongside the sensitivity row.
    #[arg(long, value_enum)]
    design: Option<DesignKind>,
    /// Gain for the approx/beyond designs (defaults to the maximum).
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Noise mode to leave uncorrected (beyond designs; defaults to auto).
    #[arg(long)]
    mode: Option<usize>,
    /// Output path for the sensitivity CSV row (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output path for the design report JSON.
    #[arg(long)]
    design_out: Option<PathBuf>,
}

#[derive(Args)]
struct SensitivityArgs {
    #[command(flatten)]
    input: DephasingModelArgs,
    /// Output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BosonicArgs {
    /// Bosonic model JSON file (alternative to --s/--M).
    #[arg(long, conflicts_with_all = ["s", "truncation"])]
    model: Option<PathBuf>,
    /// Signal order s >= 2.
    #[arg(long, required_unless_present = "model")]
    s: Option<usize>,
    /// Fock-space truncation M.
    #[arg(long = "M", alias = "m", required_unless_present = "model")]
    truncation: Option<usize>,
    /// Also report the binomial code comparison (requires s | M).
    #[arg(long)]
    binomial: bool,
    /// Output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: DephasingModelArgs,
    /// Design variant carrying the probe.
    #[arg(long, value_enum, default_value = "exact")]
    design: DesignKind,
    /// Gain for the approx/beyond designs.
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Noise mode to leave uncorrected (beyond designs).
    #[arg(long)]
    mode: Option<usize>,
    /// Total probing time.
    #[arg(long)]
    t: f64,
    /// Recovery interval.
    #[arg(long)]
    dt: f64,
    /// Integrator step (default dt/50).
    #[arg(long)]
    step: Option<f64>,
    /// Estimand value driving the Hamiltonian.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    omega: f64,
    /// Integrate without applying the recovery channel.
    #[arg(long)]
    no_recovery: bool,
    /// Output path for the trajectory CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SweepTask {
    /// Grid over bosonic (s, M) pairs.
    Bosonic,
    /// Grid over ring sizes with fixed correlation coefficients.
    Ring,
}

#[derive(Args)]
struct SweepArgs {
    /// What to compute per grid point.
    #[arg(long, value_enum)]
    task: SweepTask,
    /// Grid assignments `key=v1,v2,...`; repeatable.
    #[arg(long = "grid")]
    grids: Vec<String>,
    /// Ring correlation coefficients (ring task).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha: Vec<f64>,
    /// Dephasing time (ring task).
    #[arg(long, default_value_t = 1.0)]
    t2: f64,
    /// Output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Design(args) => run_design(args),
        Command::Dephasing(args) => run_dephasing(args),
        Command::Sensitivity(args) => run_sensitivity(args),
        Command::Bosonic(args) => run_bosonic(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Sweep(args) => run_sweep(args),
    }
}

fn run_design(args: DesignArgs) -> Result<(), CliError> {
    let ModelFile::Lindblad(model) = parse_model(&args.model)? else {
        return Err(schema("", "design expects a Lindblad model file"));
    };
    let hnls = hnls_check(&model);
    if !hnls.holds {
        return Err(CliError::Model(format!(
            "HNLS is violated: the Hamiltonian lies in the Lindblad span (residual {:.3e})",
            hnls.residual_norm
        )));
    }
    let diagonal = diagonalize_commuting(&model).map_err(|e| {
        if matches!(e, qecsense_core::model::ModelError::NotCommuting { .. }) {
            CliError::Model(
                "HNLS holds but model is non-commuting; the commuting-noise design does not apply"
                    .into(),
            )
        } else {
            CliError::Model(e.to_string())
        }
    })?;
    let result = design_commuting_code(&diagonal).map_err(|e| CliError::Model(e.to_string()))?;
    let report = verify_kl(&result.code, &model);
    let payload = json!({
        "qfi_coefficient": result.qfi_coefficient,
        "lp_value": result.lp.objective_value,
        "dual_value": result.lp.dual_value,
        "design_vector": result.design_vector,
        "ket0": io::complex_vector_json(result.code.ket0()),
        "ket1": io::complex_vector_json(result.code.ket1()),
        "kl": {
            "jump_deviation": report.max_jump_deviation,
            "product_deviation": report.max_product_deviation,
            "signal_strength": report.signal_strength,
            "passes": report.passes,
        },
    });
    emit(
        args.out.as_deref(),
        &format!("{}\n", serde_json::to_string_pretty(&payload).unwrap()),
    )
}

fn load_dephasing_model(input: &DephasingModelArgs) -> Result<CorrelationModel, CliError> {
    if let Some(path) = &input.model {
        match parse_model(path)? {
            ModelFile::Correlation(cm) => Ok(cm),
            _ => Err(schema(
                "",
                "expected a dephasing model file (keys N, T2, h, C)",
            )),
        }
    } else if let Some(ring) = &input.ring {
        let digits = ring
            .strip_prefix("N=")
            .or(ring.strip_prefix("n="))
            .unwrap_or(ring);
        let qubits: usize = digits
            .parse()
            .map_err(|_| schema("", format!("cannot parse ring size '{ring}'")))?;
        ring_model(qubits, &input.alpha, input.t2).map_err(|e| CliError::Model(e.to_string()))
    } else {
        Err(schema("", "either --model or --ring is required"))
    }
}

const SENSITIVITY_HEADER: &str = "N,hnls,eta1,eta_par,eta_ghz,eta_qec,best_u\n";

fn sensitivity_row(cm: &CorrelationModel) -> Result<String, CliError> {
    let report = sensitivity_report(cm).map_err(|e| CliError::Model(e.to_string()))?;
    Ok(format!(
        "{},{},{},{},{},{},{}\n",
        cm.qubits(),
        report.hnls,
        report.eta_single,
        report.eta_parallel,
        report.eta_ghz,
        report.eta_qec,
        report.best_mode,
    ))
}

fn build_design(
    cm: &CorrelationModel,
    kind: DesignKind,
    gamma: Option<f64>,
    mode: Option<usize>,
) -> Result<QubitDesign, CliError> {
    let design = match kind {
        DesignKind::Exact => design_exact(cm).map(|(d, _)| d),
        DesignKind::Approx => {
            let gain = match gamma {
                Some(g) => g,
                None => approx_gain_max(cm).map_err(|e| CliError::Model(e.to_string()))?,
            };
            design_approx(cm, gain)
        }
        DesignKind::Beyond => design_beyond_hnls(cm, gamma, mode),
    };
    design.map_err(|e| CliError::Model(e.to_string()))
}

fn design_json(cm: &CorrelationModel, design: &QubitDesign) -> Result<String, CliError> {
    let model = lindblad_model(cm).map_err(|e| CliError::Model(e.to_string()))?;
    let report = verify_kl(&design.code, &model);
    let payload = json!({
        "profile": design.profile,
        "angles": design.angles,
        "gain": design.gain,
        "uncorrected": design.uncorrected,
        "qfi_coefficient": design.qfi_coefficient,
        "kl": {
            "jump_deviation": report.max_jump_deviation,
            "product_deviation": report.max_product_deviation,
            "signal_strength": report.signal_strength,
            "passes": report.passes,
        },
    });
    Ok(format!(
        "{}\n",
        serde_json::to_string_pretty(&payload).unwrap()
    ))
}

fn run_dephasing(args: DephasingArgs) -> Result<(), CliError> {
    let cm = load_dephasing_model(&args.input)?;
    let mut csv = String::from(SENSITIVITY_HEADER);
    csv.push_str(&sensitivity_row(&cm)?);
    emit(args.out.as_deref(), &csv)?;
    if let Some(kind) = args.design {
        let design = build_design(&cm, kind, args.gamma, args.mode)?;
        emit(args.design_out.as_deref(), &design_json(&cm, &design)?)?;
    }
    Ok(())
}

fn run_sensitivity(args: SensitivityArgs) -> Result<(), CliError> {
    let cm = load_dephasing_model(&args.input)?;
    let mut csv = String::from(SENSITIVITY_HEADER);
    csv.push_str(&sensitivity_row(&cm)?);
    emit(args.out.as_deref(), &csv)
}

const BOSONIC_HEADER: &str = "s,M,ratio,F_coeff,F_opt_bound,binomial_ratio\n";

fn bosonic_row(order: usize, truncation: usize, with_binomial: bool) -> Result<String, CliError> {
    let model =
        FockModel::plain(truncation, order, 1.0).map_err(|e| CliError::Model(e.to_string()))?;
    let code = chebyshev_code(&model).map_err(|e| CliError::Model(e.to_string()))?;
    let comparison = chebyshev_qfi(&code, &model);
    let binomial = if with_binomial {
        let signal = binomial_signal(&model).map_err(|e| CliError::Model(e.to_string()))?;
        format!("{}", signal * signal / comparison.optimal_bound)
    } else {
        String::new()
    };
    Ok(format!(
        "{},{},{},{},{},{}\n",
        order,
        truncation,
        comparison.ratio,
        comparison.qfi_coefficient,
        comparison.optimal_bound,
        binomial,
    ))
}

fn run_bosonic(args: BosonicArgs) -> Result<(), CliError> {
    let (order, truncation) = match (&args.model, args.s, args.truncation) {
        (Some(path), _, _) => match parse_model(path)? {
            ModelFile::Fock(model) => (model.signal_order(), model.truncation()),
            _ => return Err(schema("", "expected a bosonic model file (keys M, s)")),
        },
        (None, Some(s), Some(m)) => (s, m),
        _ => return Err(schema("", "either --model or both --s and --M are required")),
    };
    let mut out = String::from(BOSONIC_HEADER);
    out.push_str(&bosonic_row(order, truncation, args.binomial)?);
    emit(args.out.as_deref(), &out)
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let cm = load_dephasing_model(&args.input)?;
    let design = build_design(&cm, args.design, args.gamma, args.mode)?;
    let modes = decompose_modes(&cm).map_err(|e| CliError::Model(e.to_string()))?;
    let model = lindblad_model(&cm).map_err(|e| CliError::Model(e.to_string()))?;
    let recovery = if args.no_recovery {
        None
    } else {
        Some(build_recovery(&design, &modes).map_err(|e| CliError::Model(e.to_string()))?)
    };
    let step = args.step.unwrap_or(args.dt / 50.0);
    let schedule = EvolutionSchedule::new(args.t, args.dt, step, args.omega)
        .map_err(|e| CliError::Model(e.to_string()))?;
    let initial = DensityMatrix::from_pure(&design.code.plus_state())
        .map_err(|e| CliError::Model(e.to_string()))?;
    let trajectory = evolve_trajectory(&model, &initial, &schedule, recovery.as_ref())
        .map_err(|e| CliError::Model(e.to_string()))?;

    let mut out = String::from("time,codespace_pop,bloch_x,bloch_y,bloch_z\n");
    for point in &trajectory.points {
        let population = point.state.codespace_population(&design.code);
        let bloch = point.state.logical_bloch(&design.code);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            point.time, population, bloch[0], bloch[1], bloch[2]
        ));
    }
    emit(args.out.as_deref(), &out)
}

/// Parse one `key=v1,v2,...` grid assignment.
fn parse_grid(spec: &str) -> Result<(String, Vec<String>), CliError> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| schema("", format!("grid '{spec}' must look like key=v1,v2")))?;
    let values: Vec<String> = values.split(',').map(str::to_string).collect();
    if values.is_empty() || values.iter().any(String::is_empty) {
        return Err(schema("", format!("grid '{spec}' has empty values")));
    }
    Ok((key.to_string(), values))
}

fn worker_count(jobs: usize) -> usize {
    let cap = std::env::var("QECSENSE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    cap.min(jobs).max(1)
}

/// Run the closure over every job index on a small worker pool, keeping
/// the results in input order.
fn run_parallel<F>(jobs: usize, job: F) -> Vec<Result<String, CliError>>
where
    F: Fn(usize) -> Result<String, CliError> + Sync,
{
    let results: Mutex<Vec<Option<Result<String, CliError>>>> =
        Mutex::new((0..jobs).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = worker_count(jobs);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= jobs {
                    break;
                }
                let outcome = job(index);
                results.lock().unwrap()[index] = Some(outcome);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

fn run_sweep(args: SweepArgs) -> Result<(), CliError> {
    let mut grids = Vec::new();
    for spec in &args.grids {
        grids.push(parse_grid(spec)?);
    }
    match args.task {
        SweepTask::Bosonic => {
            let orders = grid_values(&grids, "s")?;
            let truncations = grid_values(&grids, "M")?;
            let points: Vec<(usize, usize)> = orders
                .iter()
                .flat_map(|&s| truncations.iter().map(move |&m| (s, m)))
                .collect();
            let rows = run_parallel(points.len(), |i| {
                let (s, m) = points[i];
                bosonic_row(s, m, m % s == 0)
            });
            let mut out = String::from(BOSONIC_HEADER);
            for row in rows {
                out.push_str(&row?);
            }
            emit(args.out.as_deref(), &out)
        }
        SweepTask::Ring => {
            let sizes = grid_values(&grids, "n")?;
            let rows = run_parallel(sizes.len(), |i| {
                let n = sizes[i];
                let expected = n / 2;
                let alpha: Vec<f64> = if args.alpha.len() >= expected {
                    args.alpha[..expected].to_vec()
                } else {
                    let mut padded = args.alpha.clone();
                    padded.resize(expected, 0.0);
                    padded
                };
                let cm =
                    ring_model(n, &alpha, args.t2).map_err(|e| CliError::Model(e.to_string()))?;
                sensitivity_row(&cm)
            });
            let mut out = String::from(SENSITIVITY_HEADER);
            for row in rows {
                out.push_str(&row?);
            }
            emit(args.out.as_deref(), &out)
        }
    }
}

fn grid_values(grids: &[(String, Vec<String>)], key: &str) -> Result<Vec<usize>, CliError> {
    let (_, raw) = grids
        .iter()
        .find(|(k, _)| k == key)
        .ok_or_else(|| schema("", format!("sweep needs a grid for '{key}'")))?;
    raw.iter()
        .map(|v| {
            v.parse::<usize>()
                .map_err(|_| schema("", format!("grid value '{v}' for '{key}' is not an integer")))
        })
        .collect()
}
