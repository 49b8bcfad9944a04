//! `mzsim` command line front end.
//!
//! Configuration is layered: built-in defaults, then an optional TOML
//! file, then command-line overrides. Any config key can be set with
//! `--section.key value` (for example `--sim.dt 1e-9`, which matches
//! `sim.dt_s`); the merged result is validated as a whole, so typos in
//! files and flags are rejected the same way.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod config;
pub mod output;
pub mod scenarios;

use config::{Config, SCENARIO_NAMES};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration; exit code 2.
    Config(String),
    /// Failure while running a valid configuration; exit code 3.
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "mzsim", version, about = "Transient interference simulator", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario and write traces, profiles and a summary.
    Run(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Scenario preset (fig2, fig4a, fig4b, fig4c, fig7, doubleslit_sweep,
    /// doubleslit_transient, custom).
    #[arg(long)]
    scenario: Option<String>,

    /// Propagation model: local, nonlocal or both.
    #[arg(long)]
    model: Option<String>,

    /// TOML configuration file merged over the defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (overrides output.dir).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    dump_config: bool,

    /// Explicit `section.key=value` override; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

/// Runs the CLI for `args` (including argv[0]); returns the process exit
/// code. `stdout` receives the summary or the dumped config.
pub fn run_cli<W: std::io::Write>(args: &[String], stdout: &mut W) -> i32 {
    match run_cli_inner(args, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn run_cli_inner<W: std::io::Write>(args: &[String], stdout: &mut W) -> Result<(), CliError> {
    let args = rewrite_dotted_flags(args)?;
    let cli = Cli::try_parse_from(&args).map_err(|e| {
        use clap::error::ErrorKind;
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            print!("{e}");
            std::process::exit(0);
        }
        CliError::Config(e.to_string())
    })?;
    let Command::Run(run) = cli.command;
    let cfg = effective_config(&run)?;
    if run.dump_config {
        writeln!(stdout, "{}", cfg.to_toml_string().trim_end())
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        return Ok(());
    }
    let outcome = scenarios::run(&cfg)?;
    write!(stdout, "{}", outcome.summary).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(())
}

/// Converts `--section.key=value` and `--section.key value` into
/// `--set section.key=value` so clap does not need a flag per config key.
fn rewrite_dotted_flags(args: &[String]) -> Result<Vec<String>, CliError> {
    let mut out = Vec::with_capacity(args.len());
    let mut it = args.iter().peekable();
    while let Some(arg) = it.next() {
        let dotted = arg
            .strip_prefix("--")
            .filter(|rest| rest.split('=').next().is_some_and(|k| k.contains('.')));
        match dotted {
            Some(rest) => {
                let pair = if rest.contains('=') {
                    rest.to_string()
                } else {
                    let value = it.next().ok_or_else(|| {
                        CliError::Config(format!("flag --{rest} requires a value"))
                    })?;
                    format!("{rest}={value}")
                };
                out.push("--set".to_string());
                out.push(pair);
            }
            None => out.push(arg.clone()),
        }
    }
    Ok(out)
}

fn effective_config(run: &RunArgs) -> Result<Config, CliError> {
    let defaults: toml::Value = toml::from_str(&Config::default().to_toml_string())
        .expect("default config is valid TOML");
    let mut value = defaults;

    if let Some(path) = &run.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let file: toml::Value = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        merge_toml(&mut value, file);
    }

    for pair in &run.set {
        apply_override(&mut value, pair)?;
    }
    if let Some(scenario) = &run.scenario {
        if !SCENARIO_NAMES.contains(&scenario.as_str()) {
            return Err(CliError::Config(format!(
                "unknown scenario \"{scenario}\"; expected one of: {}",
                SCENARIO_NAMES.join(", ")
            )));
        }
        set_key(&mut value, "scenario", toml::Value::String(scenario.clone()))?;
    }
    if let Some(model) = &run.model {
        if !["local", "nonlocal", "both"].contains(&model.as_str()) {
            return Err(CliError::Config(format!(
                "unknown model \"{model}\"; expected local, nonlocal or both"
            )));
        }
        set_key(&mut value, "model", toml::Value::String(model.clone()))?;
    }
    if let Some(out) = &run.out {
        set_key(
            &mut value,
            "output.dir",
            toml::Value::String(out.display().to_string()),
        )?;
    }

    let cfg: Config = value
        .try_into()
        .map_err(|e| CliError::Config(e.to_string()))?;
    validate_config(&cfg)?;
    Ok(cfg)
}

fn validate_config(cfg: &Config) -> Result<(), CliError> {
    let err = |msg: String| Err(CliError::Config(msg));
    let n = &cfg.network;
    if !(n.arm_length_m > 0.0) {
        return err(format!("network.arm_length_m must be > 0, got {}", n.arm_length_m));
    }
    if !(0.0..n.arm_length_m).contains(&n.aom_position_m) {
        return err(format!(
            "network.aom_position_m must lie in [0, arm_length), got {}",
            n.aom_position_m
        ));
    }
    if !(n.wavelength_m > 0.0) {
        return err(format!("network.wavelength_m must be > 0, got {}", n.wavelength_m));
    }
    if !(n.coherence_length_m > 0.0) {
        return err(format!(
            "network.coherence_length_m must be > 0, got {}",
            n.coherence_length_m
        ));
    }
    if !(cfg.schedule.ramp_duration_s > 0.0) {
        return err(format!(
            "schedule.ramp_duration_s must be > 0, got {}",
            cfg.schedule.ramp_duration_s
        ));
    }
    if !(cfg.sim.dt_s > 0.0) {
        return err(format!("sim.dt_s must be > 0, got {}", cfg.sim.dt_s));
    }
    if !(cfg.sim.t_end_s > cfg.sim.t_start_s) {
        return err(format!(
            "sim window is empty: t_start_s = {}, t_end_s = {}",
            cfg.sim.t_start_s, cfg.sim.t_end_s
        ));
    }
    let d = &cfg.diffraction;
    if !(d.wavelength_m > 0.0 && d.slit_width_m > 0.0 && d.slit_separation_m > d.slit_width_m) {
        return err(
            "diffraction geometry requires wavelength > 0, width > 0 and separation > width"
                .to_string(),
        );
    }
    if d.grid_points < 3 {
        return err(format!(
            "diffraction.grid_points must be at least 3, got {}",
            d.grid_points
        ));
    }
    for &z in &d.distances_m {
        if !(z > 0.0) {
            return err(format!("diffraction.distances_m entries must be > 0, got {z}"));
        }
    }
    if !(d.transient_z_m > 0.0) {
        return err(format!(
            "diffraction.transient_z_m must be > 0, got {}",
            d.transient_z_m
        ));
    }
    if !(cfg.analysis.onset_threshold > 0.0 && cfg.analysis.onset_threshold < 1.0) {
        return err(format!(
            "analysis.onset_threshold must lie in (0, 1), got {}",
            cfg.analysis.onset_threshold
        ));
    }
    Ok(())
}

fn merge_toml(base: &mut toml::Value, incoming: toml::Value) {
    match (base, incoming) {
        (toml::Value::Table(base), toml::Value::Table(incoming)) => {
            for (k, v) in incoming {
                match base.get_mut(&k) {
                    Some(slot) if slot.is_table() && v.is_table() => merge_toml(slot, v),
                    _ => {
                        base.insert(k, v);
                    }
                }
            }
        }
        (base, incoming) => *base = incoming,
    }
}

fn set_key(value: &mut toml::Value, key: &str, new: toml::Value) -> Result<(), CliError> {
    *resolve_key(value, key)? = new;
    Ok(())
}

fn apply_override(value: &mut toml::Value, pair: &str) -> Result<(), CliError> {
    let (key, raw) = pair
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override \"{pair}\" is not KEY=VALUE")))?;
    let slot = resolve_key(value, key)?;
    let parsed = parse_override_value(slot, key, raw)?;
    *slot = parsed;
    Ok(())
}

/// Finds the config slot for a dotted key. Unit suffixes may be omitted:
/// `sim.dt` resolves to `sim.dt_s`, `network.arm_length` to
/// `network.arm_length_m`.
fn resolve_key<'v>(value: &'v mut toml::Value, key: &str) -> Result<&'v mut toml::Value, CliError> {
    let mut current = value;
    let parts: Vec<&str> = key.split('.').collect();
    for (depth, part) in parts.iter().enumerate() {
        let table = current.as_table_mut().ok_or_else(|| {
            CliError::Config(format!("\"{}\" is not a section", parts[..depth].join(".")))
        })?;
        let resolved = [part.to_string(), format!("{part}_s"), format!("{part}_m")]
            .into_iter()
            .find(|cand| table.contains_key(cand))
            .ok_or_else(|| CliError::Config(format!("unknown configuration key \"{key}\"")))?;
        current = table.get_mut(&resolved).expect("key resolved above");
    }
    Ok(current)
}

fn parse_override_value(
    slot: &toml::Value,
    key: &str,
    raw: &str,
) -> Result<toml::Value, CliError> {
    let bad = |what: &str| {
        CliError::Config(format!("cannot parse \"{raw}\" as {what} for \"{key}\""))
    };
    Ok(match slot {
        toml::Value::Float(_) => {
            toml::Value::Float(raw.parse::<f64>().map_err(|_| bad("a number"))?)
        }
        toml::Value::Integer(_) => {
            toml::Value::Integer(raw.parse::<i64>().map_err(|_| bad("an integer"))?)
        }
        toml::Value::Boolean(_) => {
            toml::Value::Boolean(raw.parse::<bool>().map_err(|_| bad("a boolean"))?)
        }
        toml::Value::String(_) => toml::Value::String(raw.to_string()),
        toml::Value::Array(items) if items.iter().all(|v| v.is_float() || v.is_integer()) => {
            let parsed: Result<Vec<toml::Value>, _> = raw
                .split(',')
                .map(|s| s.trim().parse::<f64>().map(toml::Value::Float))
                .collect();
            toml::Value::Array(parsed.map_err(|_| bad("a comma-separated number list"))?)
        }
        _ => return Err(bad("a supported value")),
    })
}
