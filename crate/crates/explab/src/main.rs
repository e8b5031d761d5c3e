use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use thiserror::Error;

mod config;
mod experiments;
mod output;
mod plot;

use config::{ConfigError, ExperimentConfig, Overrides, RawConfig};
use experiments::Experiment;
use output::{RunManifest, RunOutput, Versions};

const EXIT_RUN_ERROR: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ASSERTION: u8 = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
    #[error("computation failed: {0}")]
    Compute(String),
}

macro_rules! compute_error {
    ($($t:ty),*) => {
        $(impl From<$t> for RunError {
            fn from(e: $t) -> Self {
                RunError::Compute(e.to_string())
            }
        })*
    };
}

compute_error!(
    entlab_core::classdyn::ClassError,
    entlab_core::entropy::EntropyError,
    entlab_core::eup::EupError,
    entlab_core::numkernel::NumError,
    entlab_core::qpartitions::QPartError,
    entlab_core::quantization::QuantError
);

fn subcommand(e: &dyn Experiment) -> Command {
    Command::new(e.name())
        .about(e.about())
        .after_long_help(e.columns())
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .required(true)
                .value_parser(value_parser!(PathBuf))
                .help("TOML configuration file"),
        )
        .arg(
            Arg::new("N")
                .long("N")
                .value_name("N")
                .num_args(1..)
                .value_delimiter(',')
                .value_parser(value_parser!(usize))
                .help("Hilbert space dimensions, overriding the config"),
        )
        .arg(
            Arg::new("seed")
                .long("seed")
                .value_parser(value_parser!(u64))
                .help("Random seed, overriding the config"),
        )
        .arg(
            Arg::new("plot")
                .long("plot")
                .action(ArgAction::SetTrue)
                .help("Also write SVG plots"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .value_name("DIR")
                .value_parser(value_parser!(PathBuf))
                .help("Output directory, overriding the config"),
        )
}

fn cli(registry: &[Box<dyn Experiment>]) -> Command {
    registry.iter().fold(
        Command::new("entlab")
            .version(env!("CARGO_PKG_VERSION"))
            .about("Entropy and uncertainty experiments on quantized cat maps")
            .subcommand_required(true)
            .arg_required_else_help(true),
        |cmd, e| cmd.subcommand(subcommand(e.as_ref())),
    )
}

fn overrides(m: &ArgMatches) -> Overrides {
    Overrides {
        n: m.get_many::<usize>("N").map(|v| v.copied().collect()),
        seed: m.get_one::<u64>("seed").copied(),
        out: m.get_one::<PathBuf>("out").cloned(),
        plot: m.get_flag("plot"),
    }
}

fn run(e: &dyn Experiment, m: &ArgMatches) -> Result<bool, RunError> {
    let path = m.get_one::<PathBuf>("config").expect("required");
    let raw = RawConfig::load(path)?;
    let cfg = ExperimentConfig::resolve(e.name(), raw, &e.defaults(), overrides(m))?;
    let start = Instant::now();
    let mut out = RunOutput::new(&cfg.out, cfg.plot)?;
    e.run(&cfg, &mut out)?;
    let passed = out.checks().iter().all(|c| c.passed);
    for c in out.checks() {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let manifest = RunManifest {
        experiment: cfg.experiment.clone(),
        passed,
        config: &cfg,
        versions: Versions {
            entlab: env!("CARGO_PKG_VERSION"),
            entlab_core: entlab_core::VERSION,
        },
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        files: out.files().to_vec(),
        checks: out.checks().to_vec(),
    };
    manifest.write(out.dir())?;
    if !passed {
        for c in out.checks().iter().filter(|c| !c.passed) {
            eprintln!("assertion failed: {}: {}", c.name, c.detail);
        }
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let registry = experiments::registry();
    let matches = cli(&registry).get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let e = registry
        .iter()
        .find(|e| e.name() == name)
        .expect("subcommands come from the registry");
    match run(e.as_ref(), sub) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_ASSERTION),
        Err(err @ RunError::Config(_)) => {
            eprintln!("entlab: {err}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(err) => {
            eprintln!("entlab: {err}");
            ExitCode::from(EXIT_RUN_ERROR)
        }
    }
}
