//! `gcoverlay`: generate, garble, verify, schedule and simulate circuits for
//! the garbling overlay.
//!
//! Exit status: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 internal error.

mod commands;
mod config;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gcoverlay::gc::garble_circuit;
use gcoverlay::genlib::ProblemKind;
use gcoverlay::scheduler::trace::Trace;
use gcoverlay::ExactTime;

use commands::{Artifact, SimMode};
use config::{parse_seed, resolve_seed, Format, InputArgs, OptionArgs, RunConfig, Seed, TimingArgs, DEFAULT_SEED};

#[derive(Debug)]
pub enum CliError {
    Verify(String),
    Usage(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Verify(m) | CliError::Usage(m) | CliError::Internal(m) => m,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "gcoverlay", version, about = "Garbled-circuit toolchain and overlay timing model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, value_enum, default_value = "table", global = true)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, value_name = "PATH", global = true)]
    out: Option<PathBuf>,
    /// Print the effective configuration as JSON on stderr.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit a benchmark circuit as a `.gcn` netlist.
    Gen {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Garble, evaluate and decode against cleartext evaluation.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        /// Integer seed, or `random`.
        #[arg(long, value_parser = parse_seed)]
        seed: Option<Seed>,
        /// Random trials when the circuit has more than 20 input bits.
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Evaluate this garbled container instead of garbling afresh.
        #[arg(long, value_name = "PATH")]
        garbled: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Gate, wire and wire-percent tables, with reference values when known.
    Stats {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Garble a circuit; with `--out` writes the binary container.
    Garble {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_parser = parse_seed)]
        seed: Option<Seed>,
        #[command(flatten)]
        common: Common,
    },
    /// Layers, batches and memory placement; optionally the binary trace.
    Schedule {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        timing: TimingArgs,
        #[command(flatten)]
        opts: OptionArgs,
        /// Also write the packed register trace here.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the overlay timing model.
    Simulate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        timing: TimingArgs,
        #[command(flatten)]
        opts: OptionArgs,
        /// Simulate a binary trace from `schedule --trace`.
        #[arg(long, value_name = "PATH", conflicts_with_all = ["kind", "netlist", "sweep_cells", "compare_policies"])]
        trace: Option<PathBuf>,
        /// Totals for each cell count N (N AND and N XOR cells).
        #[arg(long, value_delimiter = ',', value_name = "N,..")]
        sweep_cells: Option<Vec<u32>>,
        /// Run every memory policy side by side.
        #[arg(long, conflicts_with = "sweep_cells")]
        compare_policies: bool,
        /// Exact rational time instead of f64.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Compare every bundled benchmark with its published figures.
    Report {
        #[arg(long, value_parser = |s: &str| s.parse::<ProblemKind>().map_err(|e| e.to_string()))]
        kind: Option<ProblemKind>,
        /// Bandwidth estimate for this many AND gates ...
        #[arg(long, requires = "time_us")]
        ands: Option<u64>,
        /// ... garbled in this many microseconds.
        #[arg(long, requires = "ands")]
        time_us: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

fn emit(out: Option<&Path>, artifact: Artifact) -> Result<(), CliError> {
    let bytes = match artifact {
        Artifact::Text(s) => s.into_bytes(),
        Artifact::Bytes(b) => b,
    };
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes).and_then(|_| stdout.flush()).map_err(|e| CliError::Internal(e.to_string()))
        }
    }
}

fn show_config(common: &Common, cfg: &RunConfig) {
    if common.print_config {
        eprintln!("{}", cfg.to_json());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { input, common } => {
            let source = input.require()?;
            show_config(&common, &RunConfig::new("gen", Some(source.clone()), common.format, common.out.clone()));
            let c = source.load()?;
            emit(common.out.as_deref(), Artifact::Text(commands::gen(&c)))
        }
        Command::Verify { input, seed, trials, garbled, common } => {
            let source = input.require()?;
            let seed = resolve_seed(seed.unwrap_or(Seed::Fixed(DEFAULT_SEED)));
            let mut cfg = RunConfig::new("verify", Some(source.clone()), common.format, common.out.clone())
                .with("trials", trials)
                .with("garbled", &garbled);
            cfg.seed = Some(seed);
            show_config(&common, &cfg);
            let c = source.load()?;
            let gc = match &garbled {
                Some(path) => commands::load_garbled(path)?,
                None => garble_circuit(&c, seed),
            };
            let outcome = commands::verify(source.name(), &c, &gc, seed, trials);
            emit(common.out.as_deref(), Artifact::Text(outcome.render(common.format)))?;
            if outcome.ok() {
                Ok(())
            } else {
                Err(CliError::Verify(format!("{} of {} trials failed", outcome.total - outcome.passed, outcome.total)))
            }
        }
        Command::Stats { input, common } => {
            let source = input.require()?;
            show_config(&common, &RunConfig::new("stats", Some(source.clone()), common.format, common.out.clone()));
            let c = source.load()?;
            emit(common.out.as_deref(), Artifact::Text(commands::stats(&source.name(), &c, &source, common.format)))
        }
        Command::Garble { input, seed, common } => {
            let source = input.require()?;
            let seed = resolve_seed(seed.unwrap_or(Seed::Fixed(DEFAULT_SEED)));
            let mut cfg = RunConfig::new("garble", Some(source.clone()), common.format, common.out.clone());
            cfg.seed = Some(seed);
            show_config(&common, &cfg);
            let c = source.load()?;
            let artifact = commands::garble(&source.name(), &c, seed, common.format, common.out.is_some());
            emit(common.out.as_deref(), artifact)
        }
        Command::Schedule { input, timing, opts, trace, common } => {
            let source = input.require()?;
            let params = timing.params::<f64>()?;
            let options = opts.options();
            let mut cfg = RunConfig::new("schedule", Some(source.clone()), common.format, common.out.clone()).with("trace", &trace);
            cfg.timing = Some(params);
            cfg.options = Some(options);
            show_config(&common, &cfg);
            let c = source.load()?;
            let (text, built) = commands::schedule(&c, &params, &options, common.format)?;
            if let Some(path) = &trace {
                let t = built.map_err(|e| CliError::Usage(e.to_string()))?;
                fs::write(path, t.to_bytes()).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
            }
            emit(common.out.as_deref(), Artifact::Text(text))
        }
        Command::Simulate { input, timing, opts, trace, sweep_cells, compare_policies, exact, common } => {
            let source = input.source()?;
            let options = opts.options();
            let mut cfg = RunConfig::new("simulate", source.clone(), common.format, common.out.clone())
                .with("trace", &trace)
                .with("sweep_cells", &sweep_cells)
                .with("compare_policies", compare_policies)
                .with("exact", exact);
            cfg.timing = Some(timing.params::<f64>()?);
            cfg.options = Some(options);
            show_config(&common, &cfg);

            let loaded_trace;
            let circuit;
            let mode = if let Some(path) = &trace {
                loaded_trace = Trace::from_bytes(&config::read_bytes(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                SimMode::Trace(&loaded_trace)
            } else {
                let source = source.ok_or_else(|| CliError::Usage("an input is required: --kind/--width[/--dim], --netlist or --trace".into()))?;
                circuit = source.load()?;
                match &sweep_cells {
                    Some(counts) if counts.iter().any(|&n| n == 0) || counts.is_empty() => {
                        return Err(CliError::Usage("--sweep-cells needs positive counts".into()));
                    }
                    Some(counts) => SimMode::Sweep(&circuit, counts),
                    None if compare_policies => SimMode::Compare(&circuit),
                    None => SimMode::Single(&circuit),
                }
            };
            let text = if exact {
                commands::simulate::<ExactTime>(mode, &timing.params()?, &options, common.format)?
            } else {
                commands::simulate::<f64>(mode, &timing.params()?, &options, common.format)?
            };
            emit(common.out.as_deref(), Artifact::Text(text))
        }
        Command::Report { kind, ands, time_us, common } => {
            let cfg = RunConfig::new("report", None, common.format, common.out.clone())
                .with("kind", kind)
                .with("ands", ands)
                .with("time_us", time_us);
            show_config(&common, &cfg);
            let doc = commands::report(kind, ands.zip(time_us))?;
            emit(common.out.as_deref(), Artifact::Text(doc.render(common.format)))?;
            match doc.exact_mismatches() {
                0 => Ok(()),
                n => Err(CliError::Verify(format!("{n} exact reference fields do not match"))),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
