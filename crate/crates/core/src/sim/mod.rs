//! Cycle-level simulator of the tensor-block array.
//!
//! Each array is a cascade chain of `l_a` tensor blocks. Block 0 is only a
//! loading port; blocks `1..l_a` each hold a 3×10 slice of A in one of two
//! ping-pong banks and multiply it by a 10-element column slice of B every
//! cycle. Partial results travel down the chain two cycles per block, the
//! `e_k` arrays of a reduction group are summed by a pipelined adder tree,
//! and the tree output is accumulated into the C buffer.

mod engine;
mod matrix;
mod reference;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stratix::StratixError;

pub use engine::{simulate, simulate_with, SimOptions};
pub use matrix::Matrix;
pub use reference::reference_gemm;

/// Largest `m·k·n` the simulator accepts.
pub const MAX_VOLUME: u128 = 1 << 32;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("shape mismatch: A is {}x{}, B is {}x{}", a.0, a.1, b.0, b.1)]
    Shape { a: (usize, usize), b: (usize, usize) },
    #[error(transparent)]
    Constraint(#[from] StratixError),
    #[error("m*k*n = {volume} exceeds the simulator limit of 2^32")]
    TooLarge { volume: u128 },
    #[error("schedule hazard at cycle {cycle}: {detail}")]
    Hazard { cycle: u64, detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TbRole {
    LoadPort,
    Compute,
}

/// One array: N-block `n_block`, reduction group `group`, array `array`
/// within the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArrayId {
    pub n_block: u64,
    pub group: u64,
    pub array: u64,
}

/// Register state of one tensor block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TbState {
    pub bank0: [[i8; 10]; 3],
    pub bank1: [[i8; 10]; 3],
    /// Bank read by the dot-product engines.
    pub active_bank: u8,
    pub role: TbRole,
    /// (array index within its reduction group, index within the array)
    pub position: (u64, u64),
}

impl TbState {
    pub(crate) fn new(array: u64, index: u64) -> Self {
        Self {
            bank0: [[0; 10]; 3],
            bank1: [[0; 10]; 3],
            active_bank: 0,
            role: if index == 0 { TbRole::LoadPort } else { TbRole::Compute },
            position: (array, index),
        }
    }

    pub fn bank(&self, b: u8) -> &[[i8; 10]; 3] {
        if b == 0 {
            &self.bank0
        } else {
            &self.bank1
        }
    }

    pub(crate) fn bank_mut(&mut self, b: u8) -> &mut [[i8; 10]; 3] {
        if b == 0 {
            &mut self.bank0
        } else {
            &mut self.bank1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    /// A register word (ten int8 values) entered a tensor block's bank.
    LoadWord { array: ArrayId, tb: u64, bank: u8, register: u8, tile: u64, row: u64, k_start: u64 },
    /// The last block of an array produced its cascade sum.
    ArrayOutput { array: ArrayId, step: u64, column: u64, rows: [u64; 3], k_start: u64, k_len: u64, values: [i32; 3] },
    /// A reduction group's adder tree finished; `values` were added into C.
    CUpdate { n_block: u64, group: u64, step: u64, column: u64, rows: [u64; 3], sum: [i32; 3] },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub cycle: u64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimResult {
    pub c: Matrix<i32>,
    pub cycles: u64,
    pub trace: Option<Vec<TraceRecord>>,
}

impl SimResult {
    /// The trace as line-delimited JSON; empty when tracing was off.
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for rec in self.trace.iter().flatten() {
            out.push_str(&serde_json::to_string(rec).expect("trace records serialize"));
            out.push('\n');
        }
        out
    }
}
