//! Stratix 10 NX tensor-block accelerator model.
//!
//! A design is `E_M` N-blocks of `E_N` reduction groups of `E_K` arrays, each
//! array being `L_A` cascaded tensor blocks whose first block only loads.

mod dse;
mod latency;
mod memory;
mod perf;
mod solver;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{StratixDevice, TB_CHAIN_LENGTH};
use crate::GemmDims;

pub use dse::{dse, DseFailure, DseReport, Grid, GridEntry, StratixDesign};
pub use latency::{fractional_cycles, latency, LatencyBreakdown};
pub use memory::{
    buffer_partitioning, buffer_partitioning_ceil, m20k_cost_32, m20k_cost_80, m20k_for, ram_efficiency,
    ram_efficiency_of, total_m20k, StratixGeometry, M20K_BITS,
};
pub use perf::{
    bandwidth_requirement, energy_efficiency, padded_dims, scalability, throughput, throughput_from_cycles,
};
pub use solver::{solve_native, Budget, NativeSolution};

/// Values held by one tensor-block register (one row of a 3×10 A block).
pub const DOT_LENGTH: u64 = 10;
/// Dot-product engines per tensor block.
pub const ENGINES: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dim {
    M,
    K,
    N,
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dim::M => "M",
            Dim::K => "K",
            Dim::N => "N",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StratixError {
    #[error("array length must divide 36 and be at least 2, got {0}")]
    ArrayLength(u64),
    #[error("{0} must be at least 1")]
    ZeroExpansion(&'static str),
    #[error("cannot parse tensor-block configuration `{0}` (expected LAxEKxENxEM)")]
    ParamsFormat(String),
    #[error("{dim} = {value} is not a multiple of {step}")]
    NotMultiple { dim: Dim, value: u64, step: u64 },
    #[error("N = {n} is too small to hide register loading (needs at least {min})")]
    NTooSmall { n: u64, min: u64 },
    #[error("{buffer} buffer depth {numerator}/{divisor} is not an integer")]
    FractionalDepth { buffer: &'static str, numerator: u64, divisor: u64 },
    #[error("design needs {used} tensor blocks but the device has {total}")]
    TbOverflow { used: u64, total: u64 },
    #[error("design needs {used} M20Ks but the budget is {budget}")]
    M20kOverflow { used: u64, budget: u64 },
    #[error("no native size fits the M20K budget of {budget} (minimum size needs {minimum})")]
    Infeasible { budget: u64, minimum: u64 },
    #[error("budget fraction must lie in (0, 1], got {0}")]
    BudgetFraction(f64),
    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("power must be positive, got {0}")]
    NonPositivePower(f64),
    #[error("dimensions must be positive")]
    ZeroDims,
}

/// The four tensor-block layout parameters; serialized as `LAxEKxENxEM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TbParams {
    /// Tensor blocks per array.
    pub l_a: u64,
    /// Arrays per reduction group.
    pub e_k: u64,
    /// Reduction groups per N-block.
    pub e_n: u64,
    /// N-blocks.
    pub e_m: u64,
}

impl TbParams {
    /// Validates on construction.
    pub fn new(l_a: u64, e_k: u64, e_n: u64, e_m: u64) -> Result<Self, StratixError> {
        let p = Self { l_a, e_k, e_n, e_m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), StratixError> {
        if self.l_a < 2 || !TB_CHAIN_LENGTH.is_multiple_of(self.l_a) {
            return Err(StratixError::ArrayLength(self.l_a));
        }
        for (name, v) in [("E_K", self.e_k), ("E_N", self.e_n), ("E_M", self.e_m)] {
            if v == 0 {
                return Err(StratixError::ZeroExpansion(name));
            }
        }
        Ok(())
    }

    pub fn compute_dims(&self) -> ComputeDims {
        compute_dims(self)
    }

    /// Smallest `N'` that hides the `L_A·3`-cycle register load.
    pub fn n_min(&self) -> u64 {
        self.l_a * ENGINES * self.e_n
    }

    pub fn arrays(&self) -> u64 {
        self.e_k * self.e_n * self.e_m
    }

    pub fn tensor_blocks(&self) -> u64 {
        self.l_a * self.arrays()
    }

    /// Multiple-of and load-hiding constraints on a native size.
    pub fn check_dims(&self, dims: GemmDims) -> Result<(), StratixError> {
        if !dims.is_positive() {
            return Err(StratixError::ZeroDims);
        }
        let c = self.compute_dims();
        for (dim, value, step) in [(Dim::M, dims.m, c.d_m), (Dim::K, dims.k, c.d_k), (Dim::N, dims.n, c.d_n)] {
            if value % step != 0 {
                return Err(StratixError::NotMultiple { dim, value, step });
            }
        }
        if dims.n < self.n_min() {
            return Err(StratixError::NTooSmall { n: dims.n, min: self.n_min() });
        }
        Ok(())
    }

    /// Design name used for generated files, e.g. `tb_18x16x4x3`.
    pub fn design_name(&self) -> String {
        format!("tb_{self}")
    }
}

impl fmt::Display for TbParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}x{}", self.l_a, self.e_k, self.e_n, self.e_m)
    }
}

impl FromStr for TbParams {
    type Err = StratixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let vals: Result<Vec<u64>, _> = s.trim().split(['x', 'X', '×']).map(|p| p.trim().parse()).collect();
        match vals.as_deref() {
            Ok(&[l_a, e_k, e_n, e_m]) => Self::new(l_a, e_k, e_n, e_m),
            _ => Err(StratixError::ParamsFormat(s.to_string())),
        }
    }
}

impl TryFrom<String> for TbParams {
    type Error = StratixError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<TbParams> for String {
    fn from(p: TbParams) -> Self {
        p.to_string()
    }
}

/// The compute GEMM size `D_M'×D_K'×D_N'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComputeDims {
    pub d_m: u64,
    pub d_k: u64,
    pub d_n: u64,
}

impl ComputeDims {
    pub fn as_dims(&self) -> GemmDims {
        GemmDims::new(self.d_m, self.d_k, self.d_n)
    }
}

impl fmt::Display for ComputeDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.d_m, self.d_k, self.d_n)
    }
}

/// `(E_M·3) × ((L_A−1)·E_K·10) × E_N`.
pub fn compute_dims(params: &TbParams) -> ComputeDims {
    ComputeDims {
        d_m: params.e_m * ENGINES,
        d_k: (params.l_a - 1) * params.e_k * DOT_LENGTH,
        d_n: params.e_n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TbUsage {
    pub tbs_used: u64,
    /// Loading-port blocks, one per array.
    pub wasted_tbs: u64,
    pub utilization: f64,
}

pub fn tb_usage(params: &TbParams, device: &StratixDevice) -> Result<TbUsage, StratixError> {
    params.validate()?;
    let tbs_used = params.tensor_blocks();
    if tbs_used > device.tb_total {
        return Err(StratixError::TbOverflow { used: tbs_used, total: device.tb_total });
    }
    Ok(TbUsage {
        tbs_used,
        wasted_tbs: params.arrays(),
        utilization: tbs_used as f64 / device.tb_total as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::DeviceCatalog;

    fn nx() -> StratixDevice {
        DeviceCatalog::bundled().stratix("NX2100").unwrap().clone()
    }

    fn p(s: &str) -> TbParams {
        s.parse().unwrap()
    }

    #[test]
    fn compute_dims_examples() {
        let c = compute_dims(&p("18x16x4x3"));
        assert_eq!((c.d_m, c.d_k, c.d_n), (9, 2720, 4));
        let c = compute_dims(&p("9x8x10x5"));
        assert_eq!((c.d_m, c.d_k, c.d_n), (15, 640, 10));
        let c = compute_dims(&p("2x1x1x1"));
        assert_eq!((c.d_m, c.d_k, c.d_n), (3, 10, 1));
    }

    #[test]
    fn tb_usage_examples() {
        let u = tb_usage(&p("18x16x4x3"), &nx()).unwrap();
        assert_eq!((u.tbs_used, u.wasted_tbs), (3456, 192));
        assert!((u.utilization - 0.873).abs() < 5e-4);
        let u = tb_usage(&p("9x16x5x5"), &nx()).unwrap();
        assert_eq!((u.tbs_used, u.wasted_tbs), (3600, 400));
        assert!((u.utilization - 0.909).abs() < 5e-4);
        let u = tb_usage(&p("36x1x1x1"), &nx()).unwrap();
        assert_eq!((u.tbs_used, u.wasted_tbs), (36, 1));
        assert_eq!(u.utilization, 36.0 / 3960.0);
        assert!(matches!(tb_usage(&p("36x16x4x3"), &nx()), Err(StratixError::TbOverflow { .. })));
    }

    #[test]
    fn params_validation() {
        assert_eq!("7x1x1x1".parse::<TbParams>(), Err(StratixError::ArrayLength(7)));
        assert_eq!("1x1x1x1".parse::<TbParams>(), Err(StratixError::ArrayLength(1)));
        assert_eq!("2x0x1x1".parse::<TbParams>(), Err(StratixError::ZeroExpansion("E_K")));
        assert!(matches!("2x1x1".parse::<TbParams>(), Err(StratixError::ParamsFormat(_))));
        assert_eq!(p("18x16x4x3").design_name(), "tb_18x16x4x3");
    }

    #[test]
    fn dims_checks_name_the_dimension() {
        let params = p("18x16x3x4");
        assert_eq!(
            params.check_dims(GemmDims::new(850, 2720, 750)),
            Err(StratixError::NotMultiple { dim: Dim::M, value: 850, step: 12 })
        );
        assert_eq!(
            p("4x1x1x1").check_dims(GemmDims::new(3, 30, 11)),
            Err(StratixError::NTooSmall { n: 11, min: 12 })
        );
    }
}
