//! Structural netlists of tensor-block designs.
//!
//! [`generate`] lays out the tensor blocks, M20K buffers, soft adders,
//! pipeline registers and a control stub for a design; [`check`] re-derives
//! the expected structure and reports every mismatch; [`emit`] renders JSON
//! or a small structural HDL subset.

mod check;
mod emit;
mod generate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use check::{check, CheckReport, Violation, ViolationKind};
pub use emit::{emit, Format};
pub use generate::generate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Pipeline {
    pub addr_stages: u64,
    pub data_stages: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TbMode {
    LoadPort,
    Compute,
}

/// Supported M20K aspect ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum M20kConfig {
    D512W40,
    D1024W20,
    D2048W10,
    D2048W8,
    D1024W16,
    D512W32,
}

impl M20kConfig {
    pub const ALL: [M20kConfig; 6] = [Self::D512W40, Self::D1024W20, Self::D2048W10, Self::D2048W8, Self::D1024W16, Self::D512W32];

    pub fn depth(self) -> u64 {
        match self {
            Self::D512W40 | Self::D512W32 => 512,
            Self::D1024W20 | Self::D1024W16 => 1024,
            Self::D2048W10 | Self::D2048W8 => 2048,
        }
    }

    pub fn width(self) -> u64 {
        match self {
            Self::D512W40 => 40,
            Self::D1024W20 => 20,
            Self::D2048W10 => 10,
            Self::D2048W8 => 8,
            Self::D1024W16 => 16,
            Self::D512W32 => 32,
        }
    }

    /// Whether this config may implement a buffer of the given word width.
    pub fn suits(self, buffer_width: u64) -> bool {
        match buffer_width {
            80 => matches!(self, Self::D512W40 | Self::D1024W20 | Self::D2048W10),
            32 => matches!(self, Self::D2048W8 | Self::D1024W16 | Self::D512W32),
            _ => false,
        }
    }
}

impl fmt::Display for M20kConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.depth(), self.width())
    }
}

impl FromStr for M20kConfig {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|c| c.to_string() == s).ok_or_else(|| format!("unknown M20K config {s:?}"))
    }
}

impl TryFrom<String> for M20kConfig {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<M20kConfig> for String {
    fn from(c: M20kConfig) -> Self {
        c.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BufferName {
    A,
    B,
    C,
}

impl BufferName {
    /// Word width of the buffer in bits.
    pub fn width(self) -> u64 {
        match self {
            Self::A | Self::B => 80,
            Self::C => 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdderRole {
    Tree,
    Accumulator,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceKind {
    TensorBlock { mode: TbMode },
    M20k { config: M20kConfig, buffer: BufferName, partition: u64 },
    SoftAdder { width: u64, role: AdderRole },
    PipelineReg { width: u64, stage: u64 },
    ControlStub { ports: Vec<String> },
}

impl InstanceKind {
    /// Primitive name used in HDL text.
    pub fn primitive(&self) -> &'static str {
        match self {
            Self::TensorBlock { .. } => "tensor_block",
            Self::M20k { .. } => "m20k",
            Self::SoftAdder { .. } => "soft_adder",
            Self::PipelineReg { .. } => "pipeline_reg",
            Self::ControlStub { .. } => "control_stub",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    #[serde(flatten)]
    pub kind: InstanceKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Endpoint {
    pub instance: String,
    pub port: String,
}

impl Endpoint {
    pub fn new(instance: impl Into<String>, port: impl Into<String>) -> Self {
        Self { instance: instance.into(), port: port.into() }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.instance, self.port)
    }
}

/// A net. Well-formed nets have exactly one driver; the list form lets
/// [`check`] report malformed ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Net {
    pub name: String,
    pub width: u64,
    pub drivers: Vec<Endpoint>,
    pub sinks: Vec<Endpoint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Netlist {
    pub name: String,
    pub instances: Vec<Instance>,
    pub nets: Vec<Net>,
    pub attributes: BTreeMap<String, String>,
}

impl Netlist {
    pub fn count(&self, pred: impl Fn(&InstanceKind) -> bool) -> u64 {
        self.instances.iter().filter(|i| pred(&i.kind)).count() as u64
    }

    pub fn tensor_blocks(&self) -> u64 {
        self.count(|k| matches!(k, InstanceKind::TensorBlock { .. }))
    }

    pub fn load_ports(&self) -> u64 {
        self.count(|k| matches!(k, InstanceKind::TensorBlock { mode: TbMode::LoadPort }))
    }

    pub fn m20ks(&self) -> u64 {
        self.count(|k| matches!(k, InstanceKind::M20k { .. }))
    }

    pub fn adders(&self, role: AdderRole) -> u64 {
        self.count(|k| matches!(k, InstanceKind::SoftAdder { role: r, .. } if *r == role))
    }

    pub fn pipeline_regs(&self) -> u64 {
        self.count(|k| matches!(k, InstanceKind::PipelineReg { .. }))
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Instance id of a tensor block: N-block `e`, group `g`, array `j`, position `p`.
pub fn tb_id(e: u64, g: u64, j: u64, p: u64) -> String {
    format!("tb_e{e}_n{g}_k{j}_p{p}")
}

/// Port names of the control stub.
pub const CONTROL_PORTS: [&str; 5] = ["addr_a", "addr_b", "addr_c", "bank_sel", "load_en"];
