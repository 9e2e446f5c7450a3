//! Command-line front end. Subcommands run the layered-head experiments from
//! a TOML config and emit CSV report directories; errors come out as one
//! machine-parsable line on stderr with distinct exit codes for config (1),
//! runtime (2), and I/O (3) failures.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, ExperimentKind, RunConfig};
use headwave::dielectrics::{build_head_stack, DispersionSpec, TissueDb, TissueRecord};
use headwave::dosimetry::{compliance_check, peak_sar};
use headwave::experiments::{
    self, ExperimentsError, SweepPlan, TumorScenario, DEFAULT_TUMOR_TISSUE,
};

const DB_ENV_VAR: &str = "HEADWAVE_DB";

#[derive(Parser)]
#[command(
    name = "headwave",
    version,
    about = "Plane-wave propagation, dosimetry, and differential experiments on a layered head model"
)]
struct Cli {
    /// Tissue database TOML; overrides the config's db_path and HEADWAVE_DB.
    #[arg(long, global = true, value_name = "PATH")]
    db: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Field and SAR depth profiles through the head stack.
    Penetrate(ConfigArg),
    /// Baseline vs inclusion differential: s-parameters, delays, profiles.
    Detect(ConfigArg),
    /// Repeat an experiment along one swept parameter axis.
    Sweep(ConfigArg),
    /// Print the tissue database.
    Tissues,
    /// Parse and validate a config file without running anything.
    Validate(ConfigArg),
}

#[derive(Args)]
struct ConfigArg {
    /// Run configuration, TOML.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
}

/// Failure classes mapped to process exit codes.
enum CliError {
    Config(String),
    Runtime(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) | CliError::Io(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Config(format!("config: {e}")),
        }
    }
}

impl From<ExperimentsError> for CliError {
    fn from(e: ExperimentsError) -> Self {
        match e {
            ExperimentsError::Io(inner) => CliError::Io(inner.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", one_line(e.message()));
            ExitCode::from(e.code())
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Tissues => {
            let db = resolve_db(cli.db.as_deref(), None)?;
            print_tissues(&db);
            Ok(())
        }
        Command::Validate(arg) => {
            let cfg = config::load_config(&arg.config)?;
            let db = resolve_db(cli.db.as_deref(), cfg.db_path.as_deref())?;
            preflight(&cfg, &db)?;
            println!("ok: {}", arg.config.display());
            Ok(())
        }
        Command::Penetrate(arg) => {
            let cfg = load_for(&arg.config, ExperimentKind::Penetration, "penetrate")?;
            let db = resolve_db(cli.db.as_deref(), cfg.db_path.as_deref())?;
            preflight(&cfg, &db)?;
            run_penetrate(&cfg, &db)
        }
        Command::Detect(arg) => {
            let cfg = load_for(&arg.config, ExperimentKind::Detection, "detect")?;
            let db = resolve_db(cli.db.as_deref(), cfg.db_path.as_deref())?;
            preflight(&cfg, &db)?;
            run_detect(&cfg, &db)
        }
        Command::Sweep(arg) => {
            let cfg = load_for(&arg.config, ExperimentKind::Sweep, "sweep")?;
            let db = resolve_db(cli.db.as_deref(), cfg.db_path.as_deref())?;
            preflight(&cfg, &db)?;
            run_sweep(&cfg, &db)
        }
    }
}

fn load_for(
    path: &Path,
    expected: ExperimentKind,
    subcommand: &str,
) -> Result<RunConfig, CliError> {
    let cfg = config::load_config(path)?;
    if cfg.experiment != expected {
        return Err(CliError::Config(format!(
            "config {}: experiment is \"{}\" but the subcommand is \"{subcommand}\" (expects \"{}\")",
            path.display(),
            cfg.experiment.name(),
            expected.name()
        )));
    }
    Ok(cfg)
}

/// Database precedence: --db flag, then the config's db_path, then the
/// HEADWAVE_DB environment variable, then the built-in table.
fn resolve_db(flag: Option<&Path>, cfg_path: Option<&Path>) -> Result<TissueDb, CliError> {
    let chosen: Option<PathBuf> = flag
        .map(Path::to_path_buf)
        .or_else(|| cfg_path.map(Path::to_path_buf))
        .or_else(|| std::env::var_os(DB_ENV_VAR).map(PathBuf::from));
    match chosen {
        None => Ok(TissueDb::builtin()),
        Some(path) => {
            let doc = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            TissueDb::from_toml_str(&doc)
                .map_err(|e| CliError::Config(format!("db {}: {e}", path.display())))
        }
    }
}

/// Everything the experiments will need from the database, checked up front
/// so bad names fail as config errors instead of mid-run.
fn preflight(cfg: &RunConfig, db: &TissueDb) -> Result<(), CliError> {
    build_head_stack(db).map_err(|e| CliError::Config(format!("db: {e}")))?;
    let needs_tumor_tissue: Option<&str> = match cfg.experiment {
        ExperimentKind::Detection => Some(&cfg.tumor.tissue),
        ExperimentKind::Sweep => match cfg.sweep_plan() {
            Some(SweepPlan::Frequency(_)) | None => None,
            Some(_) => Some(DEFAULT_TUMOR_TISSUE),
        },
        ExperimentKind::Penetration => None,
    };
    if let Some(name) = needs_tumor_tissue {
        db.require(name)
            .map_err(|e| CliError::Config(format!("tumor.tissue: {e}")))?;
    }
    Ok(())
}

fn run_penetrate(cfg: &RunConfig, db: &TissueDb) -> Result<(), CliError> {
    let stack = build_head_stack(db).map_err(ExperimentsError::from)?;
    let report = experiments::penetration_profile(
        &stack,
        cfg.preset.to_kind(),
        &cfg.frequencies_hz(),
        cfg.amplitude_v_per_m,
    )?;
    for (f, sar) in report.frequencies.iter().zip(&report.sars) {
        let peak = peak_sar(sar).expect("profiles are non-empty");
        let hot = compliance_check(sar, cfg.sar_limit_w_per_kg)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        println!(
            "{} GHz: peak SAR {} W/kg at {} mm ({}); {} interval(s) above {} W/kg",
            f / 1e9,
            peak.sar_w_per_kg,
            peak.depth_m * 1e3,
            peak.tissue,
            hot.len(),
            cfg.sar_limit_w_per_kg
        );
    }
    let dest = cfg.output_dir.join("penetration");
    experiments::write_penetration(&dest, &report)?;
    println!("wrote {}", dest.display());
    Ok(())
}

fn run_detect(cfg: &RunConfig, db: &TissueDb) -> Result<(), CliError> {
    let scenario: TumorScenario = cfg.scenario();
    let report = experiments::tumor_experiment_with(db, &scenario)?;
    let max_delta = report
        .delta_s11_db
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
    println!(
        "band center {} GHz: max |delta s11| {} dB, delay shift {} ps (group {} ps)",
        report.band_center_hz / 1e9,
        max_delta,
        report.delta_delay_s * 1e12,
        report.delta_group_delay_s * 1e12
    );
    let peak = peak_sar(&report.tumor.sar).expect("profiles are non-empty");
    let hot = compliance_check(&report.tumor.sar, cfg.sar_limit_w_per_kg)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    println!(
        "with inclusion: peak SAR {} W/kg at {} mm ({}); {} interval(s) above {} W/kg",
        peak.sar_w_per_kg,
        peak.depth_m * 1e3,
        peak.tissue,
        hot.len(),
        cfg.sar_limit_w_per_kg
    );
    let dest = cfg.output_dir.join("differential");
    experiments::write_differential(&dest, &report)?;
    println!("wrote {}", dest.display());
    Ok(())
}

fn run_sweep(cfg: &RunConfig, db: &TissueDb) -> Result<(), CliError> {
    let plan = cfg.sweep_plan().expect("validated sweep config has a plan");
    let reports = experiments::sweep(db, &plan)?;
    let dest = cfg.output_dir.join("sweep");
    experiments::write_sweep(&dest, &plan, &reports)?;
    println!(
        "wrote {} ({} point(s) along {})",
        dest.display(),
        reports.len(),
        plan.axis_name()
    );
    Ok(())
}

fn print_tissues(db: &TissueDb) {
    println!(
        "{:<14} {:<10} {:>8} {:>15} {:>19} {:>10}",
        "name", "model", "eps_r", "sigma_S_per_m", "density_kg_per_m3", "radius_mm"
    );
    for record in db.records() {
        let (model, eps, sigma) = describe(record);
        let radius = record
            .radius_mm
            .map_or_else(|| "-".to_string(), |r| r.to_string());
        println!(
            "{:<14} {:<10} {:>8} {:>15} {:>19} {:>10}",
            record.name, model, eps, sigma, record.density, radius
        );
    }
}

fn describe(record: &TissueRecord) -> (&'static str, String, String) {
    match &record.dispersion {
        DispersionSpec::Static { eps_r, sigma } => {
            ("static", eps_r.to_string(), sigma.to_string())
        }
        DispersionSpec::ColeCole { .. } => (
            "cole-cole",
            record.dispersion.eps_r_nominal().to_string(),
            record.dispersion.sigma_static().to_string(),
        ),
    }
}
