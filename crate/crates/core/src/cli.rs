//! Command-line front end: bounds queries, simulations, figure curves.
//!
//! Exit status contract: 0 success, 2 usage error, 3 domain/guard error.
//! A JSON config file can supply any flag; explicit flags override it.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::logq::{LogQuantity, Unit};
use crate::model::{DiscretenessModel, ModelParams, DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_MU_GEV};
use crate::montecarlo::{self, ExperimentSpec, Mode, SamplerKind};
use crate::sweep::{self, CurveSeries, FigureId, FigureParams, MassGrid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "GRIDSTAT_OUT_DIR";

const DEFAULT_MU_LIST: &str = "1e-3,1,1e3,1e6";

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => m,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Domain(_) => "domain",
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "gridstat",
    version,
    about = "Detectability bounds and Monte Carlo checks for displacements on a discrete spatial grid"
)]
struct Cli {
    /// JSON config file supplying defaults for any flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic thresholds for one mass or a coupled mass pair
    Bounds(BoundsArgs),
    /// Seeded Monte Carlo run verifying the predicted standard deviation
    Simulate(SimulateArgs),
    /// Emit bound curves over a mass grid as CSV or JSON
    Figure(FigureArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Threshold mass scale in GeV
    #[arg(long)]
    mu: Option<f64>,
    /// Degrees-of-freedom exponent
    #[arg(long)]
    alpha: Option<f64>,
    /// Grid-suppression exponent
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Particle mass in GeV
    #[arg(long)]
    mass: f64,
    /// Heavy-object mass in GeV (coupled bounds)
    #[arg(long)]
    big_mass: Option<f64>,
    /// Mean displacement in meters, for verdicts
    #[arg(long)]
    displacement: Option<f64>,
    /// State-uncertainty floor in meters, for verdicts
    #[arg(long)]
    sigma_m: Option<f64>,
    /// Safety factor applied in feasibility verdicts (>= 1)
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<ReportFormat>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    mode: CliMode,
    /// Mean particle displacement (scaled units or meters)
    #[arg(long)]
    d_mean: f64,
    /// Particle grid spacing
    #[arg(long, default_value_t = 1.0)]
    grid: f64,
    /// Object grid spacing (coupled mode)
    #[arg(long)]
    grid_object: Option<f64>,
    /// M / m (coupled mode)
    #[arg(long)]
    mass_ratio: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    sampler: Option<CliSampler>,
    /// Also snap the derived particle displacement onto its own grid
    #[arg(long)]
    snap_particle_grid: bool,
    /// Write the result JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Figure id: 1a, 1b, 1c, 1d, or 4
    #[arg(long)]
    id: String,
    /// Comma-separated list of mu values in GeV
    #[arg(long)]
    mu_list: Option<String>,
    /// Measurement precision in meters (1c/1d curves)
    #[arg(long)]
    precision: Option<f64>,
    /// Light-particle mass in GeV (fig 4 curve)
    #[arg(long)]
    probe_mass: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
    /// Mass grid lower edge in GeV
    #[arg(long)]
    mass_min: Option<f64>,
    /// Mass grid upper edge in GeV
    #[arg(long)]
    mass_max: Option<f64>,
    /// Output directory (default: $GRIDSTAT_OUT_DIR or .)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<SeriesFormat>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CliMode {
    Independent,
    Coupled,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CliSampler {
    Exact,
    NormalApprox,
    Auto,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum SeriesFormat {
    Csv,
    Json,
}

/// Flag defaults loadable from `--config`. Field names match the flags.
#[derive(Deserialize, Debug, Default, Clone)]
#[serde(default)]
struct ConfigFile {
    mu: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    seed: Option<u64>,
    trials: Option<u64>,
    margin: Option<f64>,
    sigma_m: Option<f64>,
    out_dir: Option<PathBuf>,
    sampler: Option<String>,
    precision: Option<f64>,
    probe_mass: Option<f64>,
    grid_points: Option<usize>,
    mass_min: Option<f64>,
    mass_max: Option<f64>,
    mu_list: Option<Vec<f64>>,
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 2 on usage errors, 0 on help/version
            e.exit();
        }
    };
    let config = match load_config(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    let result = match cli.command {
        Command::Bounds(args) => cmd_bounds(&args, &config),
        Command::Simulate(args) => cmd_simulate(&args, &config),
        Command::Figure(args) => cmd_figure(&args, &config),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &CliError) -> i32 {
    let structured = serde_json::json!({ "error": e.message(), "kind": e.kind() });
    eprintln!("{structured}");
    e.exit_code()
}

fn load_config(path: Option<&std::path::Path>) -> Result<ConfigFile, CliError> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", p.display())))
        }
    }
}

fn require_positive(name: &str, value: f64) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Usage(format!(
            "{name} must be finite and strictly positive, got {value}"
        )))
    }
}

fn build_model(args: &ModelArgs, config: &ConfigFile) -> Result<DiscretenessModel, CliError> {
    let params = ModelParams {
        mu_gev: require_positive("--mu", args.mu.or(config.mu).unwrap_or(DEFAULT_MU_GEV))?,
        alpha: args.alpha.or(config.alpha).unwrap_or(DEFAULT_ALPHA),
        beta: args.beta.or(config.beta).unwrap_or(DEFAULT_BETA),
    };
    DiscretenessModel::from_params(&params).map_err(|e| CliError::Usage(e.to_string()))
}

fn meters(value: f64) -> LogQuantity {
    LogQuantity::from_log10(value.log10(), Unit::METER)
}

fn gev(value: f64) -> LogQuantity {
    LogQuantity::from_log10(value.log10(), Unit::GEV)
}

/// Linear form when representable, `10^x` notation otherwise.
fn fmt_value(log10: f64) -> String {
    if log10.abs() <= 300.0 {
        format!("{:.6e}", 10f64.powf(log10))
    } else {
        format!("10^{log10:.4}")
    }
}

#[derive(Serialize, Debug)]
struct Verdict {
    check: String,
    actual: f64,
    required: f64,
    margin: f64,
    pass: bool,
}

fn verdict(check: &str, actual_log10: f64, bound_log10: f64, margin: f64) -> Verdict {
    let required = bound_log10 + margin.log10();
    Verdict {
        check: check.to_string(),
        actual: 10f64.powf(actual_log10.clamp(-300.0, 300.0)),
        required: 10f64.powf(required.clamp(-300.0, 300.0)),
        margin,
        pass: actual_log10 >= required,
    }
}

#[derive(Serialize, Debug)]
struct BoundsReport {
    mode: &'static str,
    mass_gev: f64,
    big_mass_gev: Option<f64>,
    mu_gev: f64,
    alpha: f64,
    beta: f64,
    compton_m: f64,
    l_eff_m: f64,
    min_displacement_m: f64,
    worst_accuracy: Option<f64>,
    amplification: Option<f64>,
    delta_d_m: Option<f64>,
    floor_m: f64,
    verdicts: Vec<Verdict>,
}

fn cmd_bounds(args: &BoundsArgs, config: &ConfigFile) -> Result<(), CliError> {
    let model = build_model(&args.model, config)?;
    let mass = gev(require_positive("--mass", args.mass)?);
    let margin = args.margin.or(config.margin).unwrap_or(1.0);
    if !(margin >= 1.0) {
        return Err(CliError::Usage(format!("--margin must be >= 1, got {margin}")));
    }
    let sigma_m = args
        .sigma_m
        .or(config.sigma_m)
        .map(|s| require_positive("--sigma-m", s))
        .transpose()?;
    let displacement = args
        .displacement
        .map(|d| require_positive("--displacement", d))
        .transpose()?;
    let format = args.format.unwrap_or(ReportFormat::Text);

    let report = match args.big_mass {
        None => {
            let b = bounds::independent_bounds(&model, mass);
            let mut verdicts = Vec::new();
            if let Some(d) = displacement {
                verdicts.push(verdict(
                    "displacement >= margin * min_displacement",
                    d.log10(),
                    b.min_displacement.log10(),
                    margin,
                ));
            }
            BoundsReport {
                mode: "independent",
                mass_gev: args.mass,
                big_mass_gev: None,
                mu_gev: model.mu().to_linear().unwrap_or(f64::NAN),
                alpha: model.alpha(),
                beta: model.beta(),
                compton_m: model.constants().compton(mass).to_linear().unwrap_or(f64::NAN),
                l_eff_m: model.l_eff(mass).to_linear().unwrap_or(f64::NAN),
                min_displacement_m: b.min_displacement.to_linear().unwrap_or(f64::NAN),
                worst_accuracy: b.worst_accuracy.to_linear().ok(),
                amplification: None,
                delta_d_m: None,
                floor_m: b.floor.to_linear().unwrap_or(f64::NAN),
                verdicts,
            }
        }
        Some(big) => {
            let big_mass = gev(require_positive("--big-mass", big)?);
            let b = bounds::coupled_bounds(&model, mass, big_mass);
            let mut verdicts = Vec::new();
            let mut delta_d_m = None;
            if let Some(d) = displacement {
                let dd = b.delta_d_at(meters(d));
                delta_d_m = dd.to_linear().ok();
                verdicts.push(verdict(
                    "displacement >= margin * min_displacement",
                    d.log10(),
                    b.min_displacement.log10(),
                    margin,
                ));
                // transferred variance must clear the particle's own floors
                let mut floor_log10 = model.constants().compton(mass).log10();
                if let Some(s) = sigma_m {
                    floor_log10 = floor_log10.max(s.log10());
                }
                verdicts.push(verdict(
                    "delta_d >= margin * max(compton, sigma_m)",
                    dd.log10(),
                    floor_log10,
                    margin,
                ));
            }
            BoundsReport {
                mode: "coupled",
                mass_gev: args.mass,
                big_mass_gev: Some(big),
                mu_gev: model.mu().to_linear().unwrap_or(f64::NAN),
                alpha: model.alpha(),
                beta: model.beta(),
                compton_m: model.constants().compton(mass).to_linear().unwrap_or(f64::NAN),
                l_eff_m: model.l_eff(big_mass).to_linear().unwrap_or(f64::NAN),
                min_displacement_m: b.min_displacement.to_linear().unwrap_or(f64::NAN),
                worst_accuracy: None,
                amplification: b.amplification.to_linear().ok(),
                delta_d_m,
                floor_m: b.floor.to_linear().unwrap_or(f64::NAN),
                verdicts,
            }
        }
    };

    match format {
        ReportFormat::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report)
                    .map_err(|e| CliError::Domain(e.to_string()))?
            );
        }
        ReportFormat::Text => print_bounds_text(&report),
    }
    Ok(())
}

fn print_bounds_text(r: &BoundsReport) {
    println!(
        "{} bounds (mu = {:e} GeV, alpha = {}, beta = {})",
        r.mode, r.mu_gev, r.alpha, r.beta
    );
    println!("  mass:               {:e} GeV", r.mass_gev);
    if let Some(big) = r.big_mass_gev {
        println!("  object mass:        {big:e} GeV");
    }
    println!("  compton wavelength: {:.6e} m", r.compton_m);
    println!("  l_eff:              {:.6e} m", r.l_eff_m);
    println!("  min displacement:   {:.6e} m", r.min_displacement_m);
    if let Some(w) = r.worst_accuracy {
        println!("  worst accuracy:     {w:.6e}");
    }
    if let Some(a) = r.amplification {
        println!("  amplification:      {a:.6e}");
    }
    if let Some(dd) = r.delta_d_m {
        println!("  delta_d (transfer): {dd:.6e} m");
    }
    println!("  floor:              {:.6e} m", r.floor_m);
    for v in &r.verdicts {
        println!(
            "  {}: {} (actual {:.6e}, required {:.6e}, margin {})",
            if v.pass { "PASS" } else { "FAIL" },
            v.check,
            v.actual,
            v.required,
            v.margin
        );
    }
}

fn cmd_simulate(args: &SimulateArgs, config: &ConfigFile) -> Result<(), CliError> {
    let sampler = match args.sampler {
        Some(CliSampler::Exact) => SamplerKind::Exact,
        Some(CliSampler::NormalApprox) => SamplerKind::NormalApprox,
        Some(CliSampler::Auto) => SamplerKind::Auto,
        None => match config.sampler.as_deref() {
            Some("exact") => SamplerKind::Exact,
            Some("normal_approx") | Some("normal-approx") => SamplerKind::NormalApprox,
            Some("auto") | None => SamplerKind::Auto,
            Some(other) => {
                return Err(CliError::Usage(format!("unknown sampler {other:?} in config")))
            }
        },
    };
    let spec = ExperimentSpec {
        mode: match args.mode {
            CliMode::Independent => Mode::Independent,
            CliMode::Coupled => Mode::Coupled,
        },
        d_mean: require_positive("--d-mean", args.d_mean)?,
        grid_particle: require_positive("--grid", args.grid)?,
        grid_object: args.grid_object,
        mass_ratio: args.mass_ratio,
        trials: args.trials.or(config.trials).unwrap_or(100_000),
        seed: args.seed.or(config.seed).unwrap_or(0),
        sampler,
        snap_particle_grid: args.snap_particle_grid,
    };
    if spec.mode == Mode::Coupled {
        if let Some(r) = spec.mass_ratio {
            if r <= 1.0 {
                eprintln!("warning: coupled mode expects mass_ratio > 1, got {r}");
            }
        }
    }
    let result = montecarlo::simulate(&spec).map_err(|e| {
        if e.is_guard() {
            CliError::Domain(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    })?;
    let json = serde_json::to_string_pretty(&result)
        .map_err(|e| CliError::Domain(e.to_string()))?;
    match &args.out {
        None => println!("{json}"),
        Some(path) => {
            fs::write(path, format!("{json}\n")).map_err(|e| {
                CliError::Domain(format!("cannot write {}: {e}", path.display()))
            })?;
        }
    }
    Ok(())
}

fn parse_mu_list(args: &FigureArgs, config: &ConfigFile) -> Result<Vec<f64>, CliError> {
    if let Some(list) = &args.mu_list {
        split_mu_list(list)
    } else if let Some(list) = &config.mu_list {
        list.iter()
            .map(|&v| require_positive("mu_list entry", v))
            .collect()
    } else {
        split_mu_list(DEFAULT_MU_LIST)
    }
}

fn split_mu_list(list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad value {s:?} in --mu-list")))
                .and_then(|v| require_positive("--mu-list entry", v))
        })
        .collect()
}

fn cmd_figure(args: &FigureArgs, config: &ConfigFile) -> Result<(), CliError> {
    let figure_id: FigureId = args
        .id
        .parse()
        .map_err(|e: sweep::SweepError| CliError::Usage(e.to_string()))?;
    let mu_list = parse_mu_list(args, config)?;
    let defaults = MassGrid::default();
    let grid = MassGrid {
        min_gev: require_positive(
            "--mass-min",
            args.mass_min.or(config.mass_min).unwrap_or(defaults.min_gev),
        )?,
        max_gev: require_positive(
            "--mass-max",
            args.mass_max.or(config.mass_max).unwrap_or(defaults.max_gev),
        )?,
        points: args.grid_points.or(config.grid_points).unwrap_or(defaults.points),
    };
    let extra = FigureParams {
        precision_m: require_positive(
            "--precision",
            args.precision
                .or(config.precision)
                .unwrap_or(FigureParams::default().precision_m),
        )?,
        probe_mass_gev: require_positive(
            "--probe-mass",
            args.probe_mass
                .or(config.probe_mass)
                .unwrap_or(FigureParams::default().probe_mass_gev),
        )?,
    };
    let format = args.format.unwrap_or(SeriesFormat::Csv);
    let out_dir = args
        .out
        .clone()
        .or_else(|| config.out_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Domain(format!("cannot create {}: {e}", out_dir.display())))?;

    for mu in mu_list {
        let model = build_model(
            &ModelArgs {
                mu: Some(mu),
                alpha: args.model.alpha,
                beta: args.model.beta,
            },
            config,
        )?;
        let series = sweep::generate_curve(figure_id, &model, &grid, &extra)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let ext = match format {
            SeriesFormat::Csv => "csv",
            SeriesFormat::Json => "json",
        };
        let path = out_dir.join(format!("{figure_id}_mu{mu:e}.{ext}"));
        write_series(&series, &path, format)?;
        print_landmarks(figure_id, &model, &extra, mu, &path);
    }
    Ok(())
}

fn write_series(
    series: &CurveSeries,
    path: &std::path::Path,
    format: SeriesFormat,
) -> Result<(), CliError> {
    let file = fs::File::create(path)
        .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))?;
    let mut sink = std::io::BufWriter::new(file);
    let result = match format {
        SeriesFormat::Csv => sweep::emit_csv(series, &mut sink),
        SeriesFormat::Json => sweep::emit_json(series, &mut sink),
    };
    result
        .and_then(|()| sink.flush())
        .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))
}

fn print_landmarks(
    figure_id: FigureId,
    model: &DiscretenessModel,
    extra: &FigureParams,
    mu: f64,
    path: &std::path::Path,
) {
    let at_mu = sweep::curve_value_log10(figure_id, model, extra, mu.log10());
    let mp_log = model.constants().planck_mass.log10();
    let at_mp = sweep::curve_value_log10(figure_id, model, extra, mp_log);
    println!(
        "{figure_id} mu={mu:e} GeV: value(m=mu) = {}, value(m=m_P) = {} -> {}",
        fmt_value(at_mu),
        fmt_value(at_mp),
        path.display()
    );
}
