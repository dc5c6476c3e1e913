mod config;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use cavity_singlet::scenarios::{
    run_protocol, run_scenario, sweep_base, ScenarioReport, SweepSpec, SCENARIOS,
};
use clap::{Args, Parser, Subcommand};
use config::{parse_values, resolve, Format, Overrides, RunConfig};
use serde_json::{json, Value};

const EXIT_CONFIG: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_TARGET: u8 = 3;

#[derive(Parser)]
#[command(name = "singlet", version, about = "Adiabatic preparation of N-party singlet states in a cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario or an explicit parameter set.
    Run(Common),
    /// Vary one parameter and tabulate the final fidelity.
    Sweep(SweepArgs),
    /// Check a configuration without running it.
    Validate(ValidateArgs),
    /// List scenario identifiers.
    List,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML config, or a `_meta.json` from an earlier run.
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long = "format")]
    format: Option<String>,
    /// Exit with status 3 when a reference target is missed.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated values.
    #[arg(long)]
    values: Option<String>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    axis: Option<String>,
    #[arg(long)]
    values: Option<String>,
}

struct Failure(u8, String);

fn config_error(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_CONFIG, msg.to_string())
}

fn overrides(c: &Common, axis: Option<&String>, values: Option<&String>) -> Result<Overrides, Failure> {
    let formats = match &c.format {
        Some(s) => Some(
            s.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(Format::parse)
                .collect::<Result<Vec<_>, _>>()
                .map_err(config_error)?,
        ),
        None => None,
    };
    Ok(Overrides {
        scenario: c.scenario.clone(),
        n: c.n,
        seed: c.seed,
        t_final: c.t_final,
        out: c.out.clone(),
        formats,
        axis: axis.cloned(),
        values: values.map(|v| parse_values(v)).transpose().map_err(config_error)?,
    })
}

fn load(c: &Common, axis: Option<&String>, values: Option<&String>) -> Result<RunConfig, Failure> {
    let o = overrides(c, axis, values)?;
    let cfg = resolve(c.config.as_deref(), &o).map_err(config_error)?;
    cfg.params.validate().map_err(config_error)?;
    let _ = env_logger::Builder::new().filter_level(cfg.verbosity.level()).try_init();
    Ok(cfg)
}

fn write(dir: &Path, file: &str, contents: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| config_error(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(file);
    std::fs::write(&path, contents).map_err(|e| config_error(format!("cannot write {}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn cmd_run(c: &Common) -> Result<(), Failure> {
    let cfg = load(c, None, None)?;
    let start = Instant::now();
    let report = match &cfg.scenario {
        Some(name) => run_scenario(name, &cfg.params),
        None => run_protocol(&cfg.params).map(|r| ScenarioReport {
            name: "protocol".into(),
            endpoints: vec![("F(t_f)".into(), r.final_fidelity)],
            table: r.series,
            checks: Vec::new(),
            sweep: None,
        }),
    }
    .map_err(|e| Failure(EXIT_SOLVER, e.to_string()))?;
    let runtime = start.elapsed().as_secs_f64();
    let name = report.name.clone();
    if cfg.formats.contains(&Format::Csv) {
        let csv = report.table.to_csv().map_err(|e| Failure(EXIT_SOLVER, e.to_string()))?;
        write(&cfg.out, &format!("{name}_timeseries.csv"), &csv)?;
    }
    if cfg.formats.contains(&Format::Json) {
        let meta = json!({
            "command": "run",
            "scenario": cfg.scenario,
            "params": cfg.params,
            "seed": cfg.params.seed,
            "endpoints": report.endpoints.iter().map(|(k, v)| json!({ "name": k, "value": v })).collect::<Vec<_>>(),
            "checks": report.checks,
            "metadata": Value::Object(report.table.metadata.clone()),
            "runtime_s": runtime,
            "version": env!("CARGO_PKG_VERSION"),
        });
        write(&cfg.out, &format!("{name}_meta.json"), &pretty(&meta))?;
    }
    if cfg.formats.contains(&Format::Svg) {
        let svg = plot::render_svg(&report.table, &name).map_err(|e| Failure(EXIT_SOLVER, e))?;
        write(&cfg.out, &format!("{name}.svg"), &svg)?;
    }
    for (k, v) in &report.endpoints {
        println!("{k} = {v:.6}");
    }
    for check in &report.checks {
        println!("{}", check.describe());
    }
    if c.strict && !report.all_passed() {
        return Err(Failure(EXIT_TARGET, "reference target missed".into()));
    }
    Ok(())
}

fn sweep_spec(cfg: &RunConfig) -> Result<SweepSpec, Failure> {
    let axis = cfg.sweep_axis.clone().ok_or_else(|| config_error("sweep needs --axis"))?;
    let values = cfg.sweep_values.clone().unwrap_or_default();
    if values.is_empty() {
        return Err(config_error("sweep needs at least one value in --values"));
    }
    let base = sweep_base(cfg.scenario.as_deref().unwrap_or(""), &cfg.params);
    let spec = SweepSpec::new(base, &axis, values);
    spec.validate().map_err(config_error)?;
    for v in &spec.values {
        spec.base
            .with_axis(&spec.axis, *v)
            .and_then(|p| p.validate())
            .map_err(|e| config_error(format!("{}={v}: {e}", spec.axis)))?;
    }
    Ok(spec)
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), Failure> {
    let cfg = load(&a.common, a.axis.as_ref(), a.values.as_ref())?;
    let spec = sweep_spec(&cfg)?;
    let result = cavity_singlet::scenarios::run_sweep(&spec).map_err(|e| Failure(EXIT_SOLVER, e.to_string()))?;
    let name = format!("{}_sweep", cfg.scenario.as_deref().unwrap_or("protocol"));
    if cfg.formats.contains(&Format::Csv) {
        let csv = result.to_csv().map_err(|e| Failure(EXIT_SOLVER, e.to_string()))?;
        write(&cfg.out, &format!("{name}.csv"), &csv)?;
    }
    if cfg.formats.contains(&Format::Json) {
        let meta = json!({
            "command": "sweep",
            "scenario": cfg.scenario,
            "params": spec.base,
            "seed": spec.base.seed,
            "sweep": { "axis": spec.axis, "values": spec.values },
            "points": result.points,
            "version": env!("CARGO_PKG_VERSION"),
        });
        write(&cfg.out, &format!("{name}_meta.json"), &pretty(&meta))?;
    }
    if cfg.formats.contains(&Format::Svg) {
        let svg = plot::render_svg(&result.to_series(), &name).map_err(|e| Failure(EXIT_SOLVER, e))?;
        write(&cfg.out, &format!("{name}.svg"), &svg)?;
    }
    for p in &result.points {
        println!("{} = {}: F = {:.6} ({})", spec.axis, p.value, p.fidelity, p.status);
    }
    if result.points.iter().any(|p| !p.ok()) {
        return Err(Failure(EXIT_SOLVER, "some sweep points failed".into()));
    }
    Ok(())
}

fn cmd_validate(a: &ValidateArgs) -> Result<(), Failure> {
    let cfg = load(&a.common, a.axis.as_ref(), a.values.as_ref())?;
    if cfg.sweep_axis.is_some() || cfg.sweep_values.is_some() {
        sweep_spec(&cfg)?;
    }
    let p = &cfg.params;
    println!(
        "config ok: scenario {}, N = {}, model {:?}, solver {:?}, seed {}",
        cfg.scenario.as_deref().unwrap_or("none"),
        p.n,
        p.model,
        p.resolved_solver(),
        p.seed
    );
    Ok(())
}

fn cmd_list() {
    for (name, description) in SCENARIOS {
        println!("{name:<12} {description}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Run(c) => cmd_run(c),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Validate(a) => cmd_validate(a),
        Command::List => {
            cmd_list();
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
