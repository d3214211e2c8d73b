//! Cycle counts for one native GEMM.

use serde::{Deserialize, Serialize};

use super::{StratixError, TbParams};
use crate::GemmDims;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatencyBreakdown {
    /// Initial register load, 3 cycles per block of an array.
    pub t_load: u64,
    /// Cascade propagation, 2 cycles per computing block.
    pub t_prop: u64,
    /// Adder-tree depth.
    pub t_adder: u64,
    /// A tiles of size `D_M'×D_K'`.
    pub tiles: u64,
    /// Cycles to stream every B column past one tile.
    pub t_n: u64,
    pub t_total: u64,
}

impl LatencyBreakdown {
    /// Fill and drain overhead outside the streaming cycles.
    pub fn overhead(&self) -> u64 {
        self.t_load + self.t_prop + self.t_adder
    }
}

fn adder_depth(e_k: u64) -> u64 {
    // ceil(log2(e_k)), 0 for a single array
    if e_k <= 1 {
        0
    } else {
        u64::BITS as u64 - (e_k - 1).leading_zeros() as u64
    }
}

fn fixed_cycles(params: &TbParams) -> (u64, u64, u64) {
    (params.l_a * 3, (params.l_a - 1) * 2, adder_depth(params.e_k))
}

pub fn latency(params: &TbParams, dims: GemmDims) -> Result<LatencyBreakdown, StratixError> {
    params.validate()?;
    params.check_dims(dims)?;
    let c = params.compute_dims();
    let (t_load, t_prop, t_adder) = fixed_cycles(params);
    let tiles = (dims.m / c.d_m) * (dims.k / c.d_k);
    let t_n = dims.n / params.e_n;
    Ok(LatencyBreakdown { t_load, t_prop, t_adder, tiles, t_n, t_total: t_load + t_prop + t_adder + tiles * t_n })
}

/// The latency formula with real-valued tile and column counts, for sizes
/// that are not multiples of the compute size. Matches `latency().t_total`
/// exactly on aligned sizes.
pub fn fractional_cycles(params: &TbParams, dims: GemmDims) -> Result<f64, StratixError> {
    params.validate()?;
    if !dims.is_positive() {
        return Err(StratixError::ZeroDims);
    }
    if dims.n < params.n_min() {
        return Err(StratixError::NTooSmall { n: dims.n, min: params.n_min() });
    }
    let c = params.compute_dims();
    let (t_load, t_prop, t_adder) = fixed_cycles(params);
    let tiles = (dims.m * dims.k) as f64 / (c.d_k * c.d_m) as f64;
    let t_n = dims.n as f64 / params.e_n as f64;
    Ok((t_load + t_prop + t_adder) as f64 + tiles * t_n)
}
