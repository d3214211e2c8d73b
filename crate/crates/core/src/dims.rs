//! GEMM problem dimensions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dimensions of `C = A·B` where A is `m×k` and B is `k×n`; serialized as
/// `MxKxN`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GemmDims {
    pub m: u64,
    pub k: u64,
    pub n: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimsParseError {
    #[error("expected dimensions as MxKxN, got `{0}`")]
    Format(String),
    #[error("dimension `{0}` is not a positive integer")]
    Value(String),
}

impl GemmDims {
    pub const fn new(m: u64, k: u64, n: u64) -> Self {
        Self { m, k, n }
    }

    pub fn is_positive(&self) -> bool {
        self.m > 0 && self.k > 0 && self.n > 0
    }

    /// Multiply-accumulate count `m·k·n`.
    pub fn volume(&self) -> u128 {
        self.m as u128 * self.k as u128 * self.n as u128
    }

    /// Integer operations, counting a MAC as two.
    pub fn ops(&self) -> f64 {
        2.0 * self.volume() as f64
    }

    /// Bytes of A, B and C when every element is stored as 8 bits.
    pub fn operand_bytes(&self) -> u128 {
        let (m, k, n) = (self.m as u128, self.k as u128, self.n as u128);
        m * k + k * n + m * n
    }

    /// Componentwise product with a scale triple.
    pub fn scaled(&self, sm: u64, sk: u64, sn: u64) -> Self {
        Self::new(self.m * sm, self.k * sk, self.n * sn)
    }
}

impl fmt::Display for GemmDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.m, self.k, self.n)
    }
}

impl FromStr for GemmDims {
    type Err = DimsParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(['x', 'X', '×']).collect();
        if parts.len() != 3 {
            return Err(DimsParseError::Format(s.to_string()));
        }
        let mut vals = [0u64; 3];
        for (slot, p) in vals.iter_mut().zip(&parts) {
            *slot = match p.trim().parse::<u64>() {
                Ok(v) if v > 0 => v,
                _ => return Err(DimsParseError::Value(p.to_string())),
            };
        }
        Ok(Self::new(vals[0], vals[1], vals[2]))
    }
}

impl TryFrom<String> for GemmDims {
    type Error = DimsParseError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<GemmDims> for String {
    fn from(d: GemmDims) -> Self {
        d.to_string()
    }
}

/// Smallest multiple of `step` that is `>= value`.
pub(crate) fn round_up(value: u64, step: u64) -> u64 {
    value.div_ceil(step) * step
}
