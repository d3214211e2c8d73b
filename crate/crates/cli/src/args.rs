use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gemmforge::catalog::TB_CHAIN_LENGTH;
use gemmforge::report::Format;
use gemmforge::stratix::{Budget, TbParams};
use gemmforge::GemmDims;

#[derive(Debug, Parser)]
#[command(name = "gemmforge", version, about = "GEMM accelerator design-space exploration for Versal and Stratix 10 NX")]
pub struct Cli {
    /// Device catalog JSON; the bundled catalog is used when unset.
    #[arg(long, global = true, env = "GEMMFORGE_CATALOG")]
    pub catalog: Option<PathBuf>,

    /// Table format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Md)]
    pub format: FormatArg,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Md,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Md => Format::Md,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Versal AIE + PL designs.
    #[command(subcommand)]
    Versal(VersalCmd),
    /// Stratix 10 NX tensor-block designs.
    #[command(subcommand)]
    Stratix(StratixCmd),
    /// Cycle-level tensor-block simulation.
    #[command(subcommand)]
    Sim(SimCmd),
    /// Structural netlists.
    #[command(subcommand)]
    Netlist(NetlistCmd),
    /// Device catalogs.
    #[command(subcommand)]
    Catalog(CatalogCmd),
}

#[derive(Debug, Args)]
pub struct AieArgs {
    /// AIE placement name, e.g. P1.
    #[arg(long)]
    pub aie: String,
    /// AIE solution catalog JSON; bundled P1/P2 when unset.
    #[arg(long)]
    pub aie_catalog: Option<PathBuf>,
    #[arg(long, default_value = "VC1902")]
    pub device: String,
}

#[derive(Debug, Subcommand)]
pub enum VersalCmd {
    /// Rank U×V×W tilings and buffer mappings.
    Solve {
        #[command(flatten)]
        aie: AieArgs,
        #[arg(long, default_value_t = 5)]
        top: usize,
        /// Write HLS directives for the best design to this file.
        #[arg(long)]
        hls_out: Option<PathBuf>,
    },
    /// Evaluate designs at their operating points.
    Report {
        /// Design list JSON; the ten published designs when unset.
        #[arg(long)]
        designs: Option<PathBuf>,
        #[arg(long)]
        aie_catalog: Option<PathBuf>,
        #[arg(long, default_value = "VC1902")]
        device: String,
    },
    /// Effective throughput of one design on zero-padded s×s×s problems.
    Sweep {
        #[command(flatten)]
        aie: AieArgs,
        #[arg(long)]
        u: u64,
        #[arg(long)]
        v: u64,
        #[arg(long)]
        w: u64,
        /// PL clock in Hz; must match a calibration point.
        #[arg(long)]
        freq: f64,
        #[arg(long, value_delimiter = ',', default_value = "512,1024,2048,4096")]
        sizes: Vec<u64>,
    },
}

fn parse_la(s: &str) -> Result<u64, String> {
    let v: u64 = s.parse().map_err(|e| format!("{e}"))?;
    if v < 2 || !TB_CHAIN_LENGTH.is_multiple_of(v) {
        return Err(format!("array length must divide {TB_CHAIN_LENGTH} (and be at least 2), got {v}"));
    }
    Ok(v)
}

fn parse_positive(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_dims(s: &str) -> Result<GemmDims, String> {
    s.parse::<GemmDims>().map_err(|e| e.to_string())
}

fn parse_freq(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("frequency must be positive, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct TbArgs {
    /// Tensor blocks per array (divides 36).
    #[arg(long, value_parser = parse_la)]
    pub la: u64,
    #[arg(long, value_parser = parse_positive)]
    pub ek: u64,
    #[arg(long, value_parser = parse_positive)]
    pub en: u64,
    #[arg(long, value_parser = parse_positive)]
    pub em: u64,
}

impl TbArgs {
    pub fn params(&self) -> TbParams {
        TbParams { l_a: self.la, e_k: self.ek, e_n: self.en, e_m: self.em }
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct BudgetArgs {
    /// M20K budget as a fraction of the device total.
    #[arg(long, conflicts_with = "budget_blocks")]
    pub budget: Option<f64>,
    /// M20K budget as an absolute block count.
    #[arg(long)]
    pub budget_blocks: Option<u64>,
}

impl BudgetArgs {
    pub fn budget(&self) -> Budget {
        match (self.budget, self.budget_blocks) {
            (_, Some(b)) => Budget::Absolute(b),
            (Some(f), None) => Budget::Fraction(f),
            (None, None) => Budget::default(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum StratixCmd {
    /// Largest native buffer size within the M20K budget.
    Solve {
        #[command(flatten)]
        tb: TbArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value = "NX2100")]
        device: String,
    },
    /// Evaluate a grid of layouts and rank by throughput.
    Dse {
        /// Grid JSON; the ten published layouts when unset.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long, default_value = "NX2100")]
        device: String,
    },
    /// Cycle count and throughput of one native GEMM.
    Latency {
        #[command(flatten)]
        tb: TbArgs,
        #[arg(long, value_parser = parse_dims)]
        dims: GemmDims,
        /// Clock in Hz.
        #[arg(long, value_parser = parse_freq)]
        freq: f64,
    },
    /// Effective throughput on zero-padded s×s×s problems.
    Sweep {
        #[command(flatten)]
        tb: TbArgs,
        /// Native size giving the peak throughput.
        #[arg(long, value_parser = parse_dims)]
        dims: GemmDims,
        #[arg(long, value_parser = parse_freq)]
        freq: f64,
        #[arg(long, value_delimiter = ',', default_value = "512,1024,2048,4096,8192,16384")]
        sizes: Vec<u64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SimCmd {
    /// Simulate C = A·B and compare with the reference GEMM.
    Run {
        #[command(flatten)]
        tb: TbArgs,
        #[arg(long, value_parser = parse_dims)]
        dims: GemmDims,
        /// Raw row-major int8 A (m×k); random when unset.
        #[arg(long, requires = "b")]
        a: Option<PathBuf>,
        /// Raw row-major int8 B (k×n).
        #[arg(long, requires = "a")]
        b: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write C as little-endian int32.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the event trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EmitArg {
    Json,
    Hdl,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum NetlistCmd {
    /// Generate, check and write a netlist.
    Emit {
        #[command(flatten)]
        tb: TbArgs,
        #[arg(long, value_parser = parse_dims)]
        dims: GemmDims,
        #[arg(long, default_value_t = 0)]
        addr_stages: u64,
        #[arg(long, default_value_t = 0)]
        data_stages: u64,
        #[arg(long, value_enum, default_value_t = EmitArg::Both)]
        emit: EmitArg,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogCmd {
    /// Check every catalog invariant.
    Validate,
    /// Print the catalog in use.
    Show,
}
