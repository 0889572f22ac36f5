//! Command-line driver: run simulations, the limit study, the operator
//! verification suite, and the manufactured-solution table, writing
//! plot-ready CSV and flat binary snapshots.
//!
//! Exit codes: 0 success, 2 usage, 3 configuration, 4 numerical abort,
//! 5 verification-suite failure.

mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qhd_core::config::SimConfig;
use qhd_core::integrate::simulate;
use qhd_core::limit::{fit_report, limit_study, study_csv};
use qhd_core::mms::{render_table, spatial_convergence_table};
use qhd_core::snapshot::{read_snapshot, write_snapshot};
use qhd_core::QhdError;

const EXIT_CONFIG: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;
const EXIT_SUITE: u8 = 5;

#[derive(Parser)]
#[command(
    name = "qhd",
    version,
    about = "Pseudo-spectral quantum hydrodynamics on periodic boxes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// Configuration file (key-value format, see README)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory override
    #[arg(long)]
    out: Option<PathBuf>,
    /// Planck constant override
    #[arg(long)]
    hbar: Option<f64>,
    /// Points per axis override
    #[arg(long)]
    grid: Option<usize>,
    /// Dimension override (1, 2 or 3)
    #[arg(long)]
    dim: Option<usize>,
    /// Final time override
    #[arg(long)]
    tmax: Option<f64>,
    /// Initial-data size override
    #[arg(long)]
    eps: Option<f64>,
    /// Seed for randomized initial data
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one run; writes snapshots, energy.csv and status.txt
    Simulate(Overrides),
    /// Run an hbar family against the classical baseline and fit the rates
    LimitStudy {
        #[command(flatten)]
        overrides: Overrides,
        /// Comma-separated hbar values; a 0 baseline is added if missing
        #[arg(long, default_value = "0,0.01,0.02,0.04,0.08,0.16,0.32")]
        hbar_list: String,
    },
    /// Run the operator and identity verification suite
    VerifyOps {
        /// Points per axis for the checks
        #[arg(long, default_value_t = 32)]
        grid: usize,
        /// Seed for the randomized fields
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Manufactured-solution spatial convergence table
    Mms {
        /// Coarse resolution
        #[arg(long, default_value_t = 16)]
        coarse: usize,
        /// Fine resolution
        #[arg(long, default_value_t = 32)]
        fine: usize,
    },
    /// Recompute the diagnostics CSV from stored snapshots
    Report {
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("QHD_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global()
                .ok();
        }
    }
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify(&e))
        }
    }
}

fn classify(e: &QhdError) -> u8 {
    match e {
        QhdError::VacuumApproach { .. }
        | QhdError::NonFinite(_)
        | QhdError::SimulationAborted(_) => EXIT_NUMERICAL,
        QhdError::Io(_) => 1,
        _ => EXIT_CONFIG,
    }
}

fn load_config(ov: &Overrides) -> Result<SimConfig<f64>, QhdError> {
    let mut cfg = match &ov.config {
        Some(path) => SimConfig::from_file(path)?,
        None => SimConfig::default(),
    };
    if let Some(h) = ov.hbar {
        cfg.params.hbar = h;
    }
    if let Some(n) = ov.grid {
        cfg.grid_points = n;
    }
    if let Some(d) = ov.dim {
        cfg.grid_dim = d;
    }
    if let Some(t) = ov.tmax {
        cfg.t_max = t;
    }
    if let Some(e) = ov.eps {
        cfg.init.eps = e;
    }
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    if let Some(out) = &ov.out {
        cfg.output_dir = out.display().to_string();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(cmd: Command) -> Result<ExitCode, QhdError> {
    match cmd {
        Command::Simulate(ov) => cmd_simulate(&ov),
        Command::LimitStudy {
            overrides,
            hbar_list,
        } => cmd_limit_study(&overrides, &hbar_list),
        Command::VerifyOps { grid, seed } => cmd_verify_ops(grid, seed),
        Command::Mms { coarse, fine } => cmd_mms(coarse, fine),
        Command::Report { overrides } => cmd_report(&overrides),
    }
}

fn cmd_simulate(ov: &Overrides) -> Result<ExitCode, QhdError> {
    let cfg = load_config(ov)?;
    let out_dir = PathBuf::from(&cfg.output_dir);
    std::fs::create_dir_all(&out_dir)?;

    let result = simulate(&cfg)?;
    let trajectory = &result.trajectory;

    for (i, state) in trajectory.snapshots.iter().enumerate() {
        write_snapshot(&out_dir.join(format!("snap_{i:06}.bin")), state)?;
    }
    if let Some(report) = &result.report {
        let file = std::fs::File::create(out_dir.join("energy.csv"))?;
        report.write_csv(std::io::BufWriter::new(file))?;
    }
    let status = trajectory.status;
    let mut status_text = format!("status = {}\n", status.as_str());
    status_text.push_str(&format!("steps = {}\n", trajectory.steps));
    status_text.push_str(&format!("final_time = {}\n", trajectory.final_state().time));
    status_text.push_str(&format!(
        "max_rel_mass_drift = {}\n",
        trajectory.max_rel_mass_drift
    ));
    if let Some(t) = trajectory.regime_exit_time {
        status_text.push_str(&format!("regime_exit_time = {t}\n"));
    }
    std::fs::write(out_dir.join("status.txt"), status_text)?;

    println!(
        "{}: {} snapshots, {} steps, final t = {}",
        status.as_str(),
        trajectory.snapshots.len(),
        trajectory.steps,
        trajectory.final_state().time
    );
    Ok(if status.is_abort() {
        ExitCode::from(EXIT_NUMERICAL)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_limit_study(ov: &Overrides, hbar_list: &str) -> Result<ExitCode, QhdError> {
    let cfg = load_config(ov)?;
    let hbars: Result<Vec<f64>, _> = hbar_list
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect();
    let hbars = hbars
        .map_err(|_| QhdError::InvalidConfig(format!("cannot parse --hbar-list `{hbar_list}`")))?;

    let out_dir = PathBuf::from(&cfg.output_dir);
    std::fs::create_dir_all(&out_dir)?;

    let study = limit_study(&cfg, &hbars)?;
    std::fs::write(out_dir.join("limit_errors.csv"), study_csv(&study.rows))?;
    let report = fit_report(&study.fit, study.shared_dt);
    std::fs::write(out_dir.join("fit_report.txt"), &report)?;
    print!("{report}");

    let aborted = study.rows.iter().any(|r| r.status.is_abort());
    Ok(if aborted {
        ExitCode::from(EXIT_NUMERICAL)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_verify_ops(grid: usize, seed: u64) -> Result<ExitCode, QhdError> {
    let outcomes = verify::run_all(grid, seed)?;
    println!(
        "{:<44} {:>13} {:>10}  result",
        "check", "measured", "tolerance"
    );
    let mut all_ok = true;
    for o in &outcomes {
        println!(
            "{:<44} {:>13.3e} {:>10.1e}  {}",
            o.name,
            o.measured,
            o.tolerance,
            if o.pass { "pass" } else { "FAIL" }
        );
        all_ok &= o.pass;
    }
    println!(
        "{} of {} checks passed",
        outcomes.iter().filter(|o| o.pass).count(),
        outcomes.len()
    );
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SUITE)
    })
}

fn cmd_mms(coarse: usize, fine: usize) -> Result<ExitCode, QhdError> {
    let rows = spatial_convergence_table::<f64>(coarse, fine)?;
    print!("{}", render_table(&rows, coarse, fine));
    let ok = rows.iter().all(|r| r.ratio > 1e3);
    if !ok {
        eprintln!("error: at least one term group decays slower than the spectral expectation");
    }
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SUITE)
    })
}

fn cmd_report(ov: &Overrides) -> Result<ExitCode, QhdError> {
    use qhd_core::diagnostics::energy_budget;
    use qhd_core::integrate::{TerminalStatus, Trajectory, BOUND_C, BOUND_NU};
    use qhd_core::spectral::SpectralWorkspace;

    let cfg = load_config(ov)?;
    let dir = PathBuf::from(&cfg.output_dir);
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .map(|n| n.starts_with("snap_") && n.ends_with(".bin"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    if paths.len() < 2 {
        return Err(QhdError::TooFewSnapshots {
            needed: 2,
            got: paths.len(),
        });
    }
    let mut snapshots = Vec::with_capacity(paths.len());
    for p in &paths {
        snapshots.push(read_snapshot::<f64>(p)?);
    }
    let grid = std::sync::Arc::clone(snapshots[0].grid());
    let trajectory = Trajectory {
        snapshots,
        status: TerminalStatus::Completed,
        regime_exit_time: None,
        steps: 0,
        max_rel_mass_drift: 0.0,
        max_l2: 0.0,
    };
    let ws = SpectralWorkspace::new(&grid);
    let report = energy_budget(&ws, &trajectory, &cfg.params, BOUND_NU, BOUND_C)?;
    let out_path = dir.join("report.csv");
    let file = std::fs::File::create(&out_path)?;
    report.write_csv(std::io::BufWriter::new(file))?;
    println!(
        "wrote {} ({} rows)",
        out_path.display(),
        report.records.len()
    );
    Ok(ExitCode::SUCCESS)
}
