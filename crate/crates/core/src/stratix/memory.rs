//! M20K buffer model.
//!
//! A and B are 80-bit wide (one 10×int8 block per entry) with doubled depth
//! for double-buffering. C is split into two 32-bit halves per output row.

use serde::{Deserialize, Serialize};

use super::{Dim, StratixError, TbParams, DOT_LENGTH, ENGINES};
use crate::GemmDims;

/// Nominal bits in one M20K block.
pub const M20K_BITS: u64 = 20 * 1024;
const M20K_ROWS: u64 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StratixGeometry {
    pub a_part: u64,
    pub b_part: u64,
    pub c_part: u64,
    pub a_depth: u64,
    pub b_depth: u64,
    pub c_depth: u64,
}

impl StratixGeometry {
    pub fn logical_bits(&self) -> u128 {
        let wide = (self.a_part * self.a_depth + self.b_part * self.b_depth) as u128 * 80;
        wide + (self.c_part * self.c_depth) as u128 * 32
    }
}

/// Partition factors; they depend only on the layout.
fn parts(params: &TbParams) -> (u64, u64, u64) {
    (
        params.e_m * params.e_k,
        (params.l_a - 1) * params.e_k * params.e_n,
        params.e_m * params.e_n * ENGINES * 2,
    )
}

/// Depth numerators and divisors for A, B and C.
fn depth_fractions(params: &TbParams, native: GemmDims) -> [(&'static str, u64, u64); 3] {
    let (a_part, b_part, c_part) = parts(params);
    [
        ("A", 2 * native.m * native.k, a_part * DOT_LENGTH),
        ("B", 2 * native.k * native.n, b_part * DOT_LENGTH),
        ("C", native.m * native.n * 2, c_part),
    ]
}

/// Exact partitioning; `native` must be a multiple of the compute size.
pub fn buffer_partitioning(params: &TbParams, native: GemmDims) -> Result<StratixGeometry, StratixError> {
    params.validate()?;
    if !native.is_positive() {
        return Err(StratixError::ZeroDims);
    }
    let c = params.compute_dims();
    for (dim, value, step) in [(Dim::M, native.m, c.d_m), (Dim::K, native.k, c.d_k), (Dim::N, native.n, c.d_n)] {
        if value % step != 0 {
            return Err(StratixError::NotMultiple { dim, value, step });
        }
    }
    let mut depths = [0u64; 3];
    for (slot, (buffer, numerator, divisor)) in depths.iter_mut().zip(depth_fractions(params, native)) {
        if numerator % divisor != 0 {
            return Err(StratixError::FractionalDepth { buffer, numerator, divisor });
        }
        *slot = numerator / divisor;
    }
    let (a_part, b_part, c_part) = parts(params);
    Ok(StratixGeometry { a_part, b_part, c_part, a_depth: depths[0], b_depth: depths[1], c_depth: depths[2] })
}

/// Partitioning for sizes that are not multiples of the compute size; each
/// depth is rounded up to the next whole entry.
pub fn buffer_partitioning_ceil(params: &TbParams, native: GemmDims) -> Result<StratixGeometry, StratixError> {
    params.validate()?;
    if !native.is_positive() {
        return Err(StratixError::ZeroDims);
    }
    let [a, b, c] = depth_fractions(params, native).map(|(_, num, den)| num.div_ceil(den));
    let (a_part, b_part, c_part) = parts(params);
    Ok(StratixGeometry { a_part, b_part, c_part, a_depth: a, b_depth: b, c_depth: c })
}

/// M20Ks for one 80-bit buffer: two 512×40 blocks per 512 entries.
pub fn m20k_cost_80(depth: u64) -> u64 {
    2 * depth.div_ceil(M20K_ROWS)
}

/// M20Ks for one 32-bit buffer.
pub fn m20k_cost_32(depth: u64) -> u64 {
    depth.div_ceil(M20K_ROWS)
}

pub fn m20k_for(geometry: &StratixGeometry) -> u64 {
    geometry.a_part * m20k_cost_80(geometry.a_depth)
        + geometry.b_part * m20k_cost_80(geometry.b_depth)
        + geometry.c_part * m20k_cost_32(geometry.c_depth)
}

pub fn total_m20k(params: &TbParams, native: GemmDims) -> Result<u64, StratixError> {
    Ok(m20k_for(&buffer_partitioning(params, native)?))
}

pub fn ram_efficiency_of(geometry: &StratixGeometry) -> f64 {
    geometry.logical_bits() as f64 / (m20k_for(geometry) as u128 * M20K_BITS as u128) as f64
}

pub fn ram_efficiency(params: &TbParams, native: GemmDims) -> Result<f64, StratixError> {
    Ok(ram_efficiency_of(&buffer_partitioning(params, native)?))
}
