use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use gcoverlay::genlib::{ProblemKind, ProblemSpec};
use gcoverlay::netlist::{parse, Circuit};
use gcoverlay::scheduler::Policy;
use gcoverlay::sim::{SimOptions, TimingParams};
use gcoverlay::Scalar;

use crate::CliError;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0x5eed_2017;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Seed {
    Fixed(u64),
    Random,
}

pub fn parse_seed(s: &str) -> Result<Seed, String> {
    if s.eq_ignore_ascii_case("random") {
        return Ok(Seed::Random);
    }
    let parsed = match s.strip_prefix("0x") {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map(Seed::Fixed).map_err(|_| format!("expected an integer or 'random', got '{s}'"))
}

fn parse_kind(s: &str) -> Result<ProblemKind, String> {
    s.parse().map_err(|e: gcoverlay::genlib::GenError| e.to_string())
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse().map_err(|e: gcoverlay::scheduler::SchedError| e.to_string())
}

/// `A,X` or a single `N` for both cell kinds.
pub fn parse_cells(s: &str) -> Result<(u32, u32), String> {
    let nums: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse::<u32>().map_err(|_| format!("bad cell count '{p}'")))
        .collect::<Result<_, _>>()?;
    match nums[..] {
        [n] if n > 0 => Ok((n, n)),
        [a, x] if a > 0 && x > 0 => Ok((a, x)),
        _ => Err(format!("expected N or N_AND,N_XOR with positive counts, got '{s}'")),
    }
}

/// Where the circuit comes from: a generator spec or a `.gcn` file.
#[derive(Args, Clone, Debug, Default)]
pub struct InputArgs {
    /// Benchmark generator: adder, hamming, multiplier, sorter, matmul.
    #[arg(long, value_parser = parse_kind, conflicts_with = "netlist", requires = "width")]
    pub kind: Option<ProblemKind>,
    /// Operand width in bits.
    #[arg(long, requires = "kind")]
    pub width: Option<u32>,
    /// Element count for sorter, matrix dimension for matmul.
    #[arg(long, requires = "kind")]
    pub dim: Option<u32>,
    /// Read the circuit from a `.gcn` file.
    #[arg(long, value_name = "PATH")]
    pub netlist: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Spec(ProblemSpec),
    Netlist(PathBuf),
}

impl InputArgs {
    pub fn source(&self) -> Result<Option<Source>, CliError> {
        match (&self.kind, &self.netlist) {
            (Some(kind), None) => {
                let width = self.width.ok_or_else(|| CliError::Usage("--width is required with --kind".into()))?;
                let dim = match self.dim {
                    Some(d) => d,
                    None if kind.uses_dim() => {
                        return Err(CliError::Usage(format!("--dim is required for {}", kind.name())));
                    }
                    None => 1,
                };
                Ok(Some(Source::Spec(ProblemSpec { kind: *kind, width, dim })))
            }
            (None, Some(path)) => Ok(Some(Source::Netlist(path.clone()))),
            (None, None) => Ok(None),
            (Some(_), Some(_)) => Err(CliError::Usage("give either --kind or --netlist, not both".into())),
        }
    }

    pub fn require(&self) -> Result<Source, CliError> {
        self.source()?.ok_or_else(|| CliError::Usage("an input is required: --kind/--width[/--dim] or --netlist".into()))
    }
}

impl Source {
    pub fn load(&self) -> Result<Circuit, CliError> {
        match self {
            Source::Spec(spec) => spec.generate().map_err(|e| CliError::Usage(e.to_string())),
            Source::Netlist(path) => {
                let text = read_text(path)?;
                parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Source::Spec(spec) => spec.to_string(),
            Source::Netlist(path) => path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned()),
        }
    }

    pub fn spec(&self) -> Option<ProblemSpec> {
        match self {
            Source::Spec(s) => Some(*s),
            Source::Netlist(_) => None,
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Overrides for the overlay timing model.
#[derive(Args, Clone, Debug, Default, Serialize)]
pub struct TimingArgs {
    /// AND and XOR cell counts, `N` or `N_AND,N_XOR`.
    #[arg(long, value_parser = parse_cells, value_name = "N[,M]")]
    pub cells: Option<(u32, u32)>,
    #[arg(long, value_name = "HZ")]
    pub local_clock_hz: Option<f64>,
    #[arg(long, value_name = "HZ")]
    pub main_clock_hz: Option<f64>,
    #[arg(long, value_name = "CYCLES")]
    pub gand_latency: Option<u32>,
    #[arg(long, value_name = "CYCLES")]
    pub gxor_latency: Option<u32>,
    #[arg(long, value_name = "CYCLES")]
    pub bram_cycles: Option<u32>,
    #[arg(long, value_name = "NS")]
    pub ddr_latency_ns: Option<f64>,
    #[arg(long, value_name = "NS")]
    pub reg_write_ns: Option<f64>,
    #[arg(long, value_name = "BITS")]
    pub ddr_word_bits: Option<u32>,
    #[arg(long, value_name = "N")]
    pub ddr_ports: Option<u32>,
}

fn scalar<T: Scalar>(name: &str, v: f64) -> Result<T, CliError> {
    T::from_f64(v).ok_or_else(|| CliError::Usage(format!("--{name} value {v} is not representable")))
}

impl TimingArgs {
    pub fn params<T: Scalar>(&self) -> Result<TimingParams<T>, CliError> {
        let mut p = TimingParams::<T>::default();
        if let Some((a, x)) = self.cells {
            p.n_and_cells = a;
            p.n_xor_cells = x;
        }
        if let Some(v) = self.local_clock_hz {
            p.local_clock_hz = scalar("local-clock-hz", v)?;
        }
        if let Some(v) = self.main_clock_hz {
            p.main_clock_hz = scalar("main-clock-hz", v)?;
        }
        if let Some(v) = self.ddr_latency_ns {
            p.ddr_latency_ns = scalar("ddr-latency-ns", v)?;
        }
        if let Some(v) = self.reg_write_ns {
            p.reg_write_ns = scalar("reg-write-ns", v)?;
        }
        p.gand_latency_cycles = self.gand_latency.unwrap_or(p.gand_latency_cycles);
        p.gxor_latency_cycles = self.gxor_latency.unwrap_or(p.gxor_latency_cycles);
        p.bram_access_cycles = self.bram_cycles.unwrap_or(p.bram_access_cycles);
        p.ddr_word_bits = self.ddr_word_bits.unwrap_or(p.ddr_word_bits);
        p.ddr_ports = self.ddr_ports.unwrap_or(p.ddr_ports);
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(p)
    }
}

/// Dispatch and memory options.
#[derive(Args, Clone, Debug, Serialize)]
pub struct OptionArgs {
    /// Memory policy: all-ddr, directly-used, most-frequently-used.
    #[arg(long, value_parser = parse_policy, default_value = "all-ddr")]
    pub policy: Policy,
    /// Start gates as their own descriptors arrive.
    #[arg(long)]
    pub overlap: bool,
    /// Stream XOR gates without waiting for completion.
    #[arg(long)]
    pub xor_nosync: bool,
    /// Pack three addresses into two registers.
    #[arg(long)]
    pub packed: bool,
    /// BRAM label slots, overriding the policy default.
    #[arg(long, value_name = "LABELS")]
    pub bram_capacity: Option<usize>,
}

impl OptionArgs {
    pub fn options(&self) -> SimOptions {
        SimOptions {
            overlap: self.overlap,
            xor_nosync: self.xor_nosync,
            packed: self.packed,
            policy: self.policy,
            bram_capacity: self.bram_capacity,
        }
    }
}

/// Everything needed to replay a run.
#[derive(Debug, Serialize)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub source: Option<Source>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingParams<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub options: Option<SimOptions>,
    pub format: Format,
    pub out: Option<PathBuf>,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl RunConfig {
    pub fn new(subcommand: &'static str, source: Option<Source>, format: Format, out: Option<PathBuf>) -> Self {
        RunConfig { subcommand, source, seed: None, timing: None, options: None, format, out, extra: Default::default() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.extra.insert(key.into(), serde_json::to_value(value).expect("config value serializes"));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

pub fn resolve_seed(seed: Seed) -> u64 {
    match seed {
        Seed::Fixed(s) => s,
        Seed::Random => rand::random(),
    }
}
