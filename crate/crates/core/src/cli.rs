//! The `interlace` command line: `simulate`, `warren`, `converge`, `compare`.
//!
//! Every flag mirrors a config key; flags override values read from
//! `--config`. Outputs embed the resolved config and the seed.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{config_from_value, CommandKind, ConfigError, RunConfig};
use crate::driving::{ingest_path, SeedSpec};
use crate::dynamics::{run_dynamics, sample_dynamics};
use crate::error::Error;
use crate::pattern::{slots, ContinuousPattern, DiscretePattern};
use crate::rescale::{convergence_pipeline, preset_scaling, ConvergenceConfig, REPORT_SCHEMA_VERSION};
use crate::stats::{MomentSummary, SampleDump};
use crate::warren::{warren_replicas, warren_sample};

#[derive(Debug, Parser)]
#[command(
    name = "interlace",
    version,
    about = "Interlacing particle dynamics and reflected Brownian motions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the block/push dynamics and write its trajectory CSV.
    Simulate(Flags),
    /// Sample reflected interlacing Brownian motions and write the grid CSV.
    Warren(Flags),
    /// Measure fixed-time KS distances of rescaled dynamics to the Brownian limit.
    Converge(Flags),
    /// Compare two sample dumps slot by slot.
    Compare(Flags),
}

#[derive(Debug, Default, Args)]
struct Flags {
    /// JSON config; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<String>,
    /// Number of levels N
    #[arg(long)]
    levels: Option<usize>,
    /// poisson, bernoulli or lazy
    #[arg(long)]
    driver: Option<String>,
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Comma-separated evaluation times
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    /// Comma-separated speed-up values n
    #[arg(long, value_delimiter = ',')]
    n_values: Option<Vec<f64>>,
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long)]
    replicas: Option<usize>,
    /// Write every k-th grid point
    #[arg(long)]
    stride: Option<usize>,
    /// Driving path CSV replacing the generated driver
    #[arg(long)]
    driver_file: Option<String>,
    /// Initial pattern, levels separated by `;`, e.g. "0;-1 0"
    #[arg(long, allow_hyphen_values = true)]
    initial: Option<String>,
    /// Also write final states of `replicas` runs as a sample dump
    #[arg(long)]
    samples_out: Option<String>,
    #[arg(long)]
    sample_a: Option<String>,
    #[arg(long)]
    sample_b: Option<String>,
}

impl Flags {
    fn overrides(&self) -> Map<String, Value> {
        let mut m = Map::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("seed", self.seed.map(Value::from));
        put("out", self.out.clone().map(Value::from));
        put("N", self.levels.map(Value::from));
        put("driver", self.driver.clone().map(Value::from));
        put("rate", self.rate.map(Value::from));
        put("p", self.p.map(Value::from));
        put("q", self.q.map(Value::from));
        put("horizon", self.horizon.map(Value::from));
        put("times", self.times.clone().map(Value::from));
        put("n_values", self.n_values.clone().map(Value::from));
        put("grid_step", self.grid_step.map(Value::from));
        put("replicas", self.replicas.map(Value::from));
        put("stride", self.stride.map(Value::from));
        put("driver_file", self.driver_file.clone().map(Value::from));
        put("initial", self.initial.clone().map(Value::from));
        put("samples_out", self.samples_out.clone().map(Value::from));
        put("sample_a", self.sample_a.clone().map(Value::from));
        put("sample_b", self.sample_b.clone().map(Value::from));
        m
    }
}

fn read(path: impl AsRef<Path>) -> Result<String, Error> {
    let path = path.as_ref();
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &str, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn resolve(kind: CommandKind, flags: &Flags) -> Result<RunConfig, Error> {
    let mut map = match &flags.config {
        Some(path) => {
            let text = read(path)?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(m)) => m,
                Ok(_) => {
                    return Err(ConfigError::Parse {
                        path: ".".into(),
                        msg: "config must be a JSON object".into(),
                    }
                    .into())
                }
                Err(e) => {
                    return Err(ConfigError::Parse {
                        path: ".".into(),
                        msg: e.to_string(),
                    }
                    .into())
                }
            }
        }
        None => Map::new(),
    };
    let name = serde_json::to_value(kind).expect("command serializes");
    if let Some(existing) = map.get("command") {
        if *existing != name {
            return Err(ConfigError::Invalid {
                key: "command",
                msg: format!("config says {existing}, command line says {name}"),
            }
            .into());
        }
    }
    map.insert("command".into(), name);
    map.extend(flags.overrides());
    Ok(config_from_value(Value::Object(map))?)
}

fn header_comments(cfg: &RunConfig) -> Vec<String> {
    vec![format!("config {}", cfg.to_json()), format!("seed {}", cfg.seed)]
}

fn parse_initial<T>(cfg: &RunConfig, size: usize) -> Result<Option<crate::pattern::Pattern<T>>, Error>
where
    T: Copy + std::str::FromStr,
    T::Err: std::fmt::Display,
{
    let Some(text) = cfg.initial_text() else {
        return Ok(None);
    };
    let p: crate::pattern::Pattern<T> = text.parse()?;
    if p.size() != size {
        return Err(ConfigError::Invalid {
            key: "initial",
            msg: format!("pattern has {} levels, N is {size}", p.size()),
        }
        .into());
    }
    Ok(Some(p))
}

fn simulate(cfg: &RunConfig) -> Result<String, Error> {
    let kind = cfg.driver_kind()?;
    let seed = SeedSpec::new(cfg.seed, 0);
    let (driving, size, horizon) = match &cfg.driver_file {
        Some(path) => {
            let driving = ingest_path(&read(path)?)?;
            let size = driving.size();
            if cfg.levels.is_some_and(|n| n != size) {
                return Err(ConfigError::Invalid {
                    key: "N",
                    msg: format!("driver file has {size} levels"),
                }
                .into());
            }
            let horizon = cfg.horizon.unwrap_or(driving.horizon());
            (driving, size, horizon)
        }
        None => {
            let size = cfg.require_levels()?;
            let horizon = cfg.require_horizon()?;
            (kind.generate(size, horizon, seed)?, size, horizon)
        }
    };
    let initial = match parse_initial::<i64>(cfg, size)? {
        Some(p) => p,
        None if cfg.driver_file.is_some() => DiscretePattern::from_flat(size, driving.initial_values().to_vec())?,
        None => DiscretePattern::packed(size)?,
    };
    initial.validate()?;
    let traj = run_dynamics(&initial, &driving, horizon)?;
    let csv = traj.to_csv(&header_comments(cfg));

    if let Some(path) = &cfg.samples_out {
        // with a single speed-up n, each replica runs to n * horizon and its
        // final state is rescaled
        let scaling = match cfg.n_values.as_deref() {
            None => None,
            Some(&[n]) => Some((n, preset_scaling(kind, n)?)),
            Some(_) => {
                return Err(ConfigError::Invalid {
                    key: "n_values",
                    msg: "simulate takes at most one speed-up value".into(),
                }
                .into())
            }
        };
        let run_to = scaling.as_ref().map_or(horizon, |(n, _)| n * horizon);
        let finals: Vec<ContinuousPattern> = (0..cfg.replicas as u64)
            .into_par_iter()
            .map(|r| -> Result<ContinuousPattern, Error> {
                let d = kind.generate(size, run_to, seed.with_stream(r))?;
                let last = sample_dynamics(&initial, &d, &[run_to])?
                    .pop()
                    .expect("one sample time");
                Ok(match &scaling {
                    Some((_, preset)) => preset.rescale_state(run_to, &last).1,
                    None => last.to_continuous(),
                })
            })
            .collect::<Result<_, _>>()?;
        let dump = SampleDump::new(size, finals)?;
        write(path, &dump.to_csv(&header_comments(cfg)))?;
    }
    Ok(csv)
}

fn warren(cfg: &RunConfig) -> Result<String, Error> {
    let size = cfg.require_levels()?;
    let horizon = cfg.require_horizon()?;
    let initial = parse_initial::<f64>(cfg, size)?;
    if let Some(p) = &initial {
        p.validate()?;
    }
    let seed = SeedSpec::new(cfg.seed, 0);
    let traj = warren_sample(size, initial.as_ref(), horizon, cfg.grid_step, seed)?;
    let csv = traj.to_csv(cfg.stride, &header_comments(cfg));
    if let Some(path) = &cfg.samples_out {
        let finals = warren_replicas(size, initial.as_ref(), &[horizon], cfg.grid_step, cfg.replicas, seed)?
            .into_iter()
            .map(|mut v| v.pop().expect("one sample time"))
            .collect();
        let dump = SampleDump::new(size, finals)?;
        write(path, &dump.to_csv(&header_comments(cfg)))?;
    }
    Ok(csv)
}

fn converge(cfg: &RunConfig) -> Result<String, Error> {
    let size = cfg.require_levels()?;
    let pc = ConvergenceConfig {
        driver: cfg.driver_kind()?,
        n_values: cfg.n_values.clone().unwrap_or_default(),
        size,
        times: cfg.evaluation_times(),
        replicas: cfg.replicas,
        seed: cfg.seed,
        grid_step: cfg.grid_step,
        initial: parse_initial::<i64>(cfg, size)?,
    };
    let mut report = convergence_pipeline(&pc)?;
    report.run_config = Some(serde_json::to_value(cfg).expect("config serializes"));
    Ok(report.to_json())
}

#[derive(Debug, Serialize)]
struct SlotComparison {
    level: usize,
    index: usize,
    ks: f64,
    a: MomentSummary,
    b: MomentSummary,
}

#[derive(Debug, Serialize)]
struct CompareReport {
    schema_version: u32,
    sample_a: String,
    sample_b: String,
    size: usize,
    replicas_a: usize,
    replicas_b: usize,
    max_ks: f64,
    slots: Vec<SlotComparison>,
    seed: u64,
    run_config: Value,
}

fn compare(cfg: &RunConfig) -> Result<String, Error> {
    let path_a = cfg.sample_a.as_deref().expect("validated");
    let path_b = cfg.sample_b.as_deref().expect("validated");
    let a = SampleDump::from_csv(&read(path_a)?)?;
    let b = SampleDump::from_csv(&read(path_b)?)?;
    if a.size != b.size {
        return Err(ConfigError::Invalid {
            key: "sample_b",
            msg: format!("dumps have {} and {} levels", a.size, b.size),
        }
        .into());
    }
    let mut out = Vec::new();
    for s in slots(a.size) {
        let (ma, mb) = (a.marginal(s), b.marginal(s));
        out.push(SlotComparison {
            level: s.level,
            index: s.index,
            ks: ma.ks(&mb)?,
            a: ma.summary()?,
            b: mb.summary()?,
        });
    }
    let report = CompareReport {
        schema_version: REPORT_SCHEMA_VERSION,
        sample_a: path_a.to_string(),
        sample_b: path_b.to_string(),
        size: a.size,
        replicas_a: a.replicas.len(),
        replicas_b: b.replicas.len(),
        max_ks: out.iter().map(|c| c.ks).fold(0.0, f64::max),
        slots: out,
        seed: cfg.seed,
        run_config: serde_json::to_value(cfg).expect("config serializes"),
    };
    Ok(serde_json::to_string_pretty(&report).expect("report serializes"))
}

/// Primary output of a command and where it was written, if anywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub text: String,
    pub written_to: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command, and writes the
/// primary output to `out` when set.
pub fn run_command<I, T>(args: I) -> Result<CommandOutput, Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let (kind, flags) = match &cli.command {
        Command::Simulate(f) => (CommandKind::Simulate, f),
        Command::Warren(f) => (CommandKind::Warren, f),
        Command::Converge(f) => (CommandKind::Converge, f),
        Command::Compare(f) => (CommandKind::Compare, f),
    };
    let cfg = resolve(kind, flags)?;
    let text = match kind {
        CommandKind::Simulate => simulate(&cfg)?,
        CommandKind::Warren => warren(&cfg)?,
        CommandKind::Converge => converge(&cfg)?,
        CommandKind::Compare => compare(&cfg)?,
    };
    if let Some(path) = &cfg.out {
        write(path, &text)?;
    }
    Ok(CommandOutput {
        text,
        written_to: cfg.out.map(PathBuf::from),
    })
}
