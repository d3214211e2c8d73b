//! AIE usage, RAM efficiency, bandwidth and scalability metrics.

use serde::{Deserialize, Serialize};

use super::memory::ram_efficiency_of;
use super::{AieSolution, VersalDesign, VersalError};
use crate::dims::round_up;
use crate::{worst_case_bandwidth, GemmDims};

/// Core and PLIO counts of an AIE solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AieUsage {
    pub matmul_cores: u64,
    pub add_cores: u64,
    pub total_cores: u64,
    pub plio_in_a: u64,
    pub plio_in_b: u64,
    pub plio_out: u64,
}

impl AieUsage {
    pub fn plio_total(&self) -> u64 {
        self.plio_in_a + self.plio_in_b + self.plio_out
    }
}

/// `X·Y·Z` MatMul cores, an `X·Z` adder stage when `Y > 1`, `X·Y` + `Y·Z`
/// input ports and `X·Z` output ports.
pub fn aie_usage(aie: &AieSolution) -> AieUsage {
    let matmul_cores = aie.x * aie.y * aie.z;
    let add_cores = if aie.y > 1 { aie.x * aie.z } else { 0 };
    AieUsage {
        matmul_cores,
        add_cores,
        total_cores: matmul_cores + add_cores,
        plio_in_a: aie.x * aie.y,
        plio_in_b: aie.y * aie.z,
        plio_out: aie.x * aie.z,
    }
}

/// Uses the design's model BRAM/URAM counts.
pub fn ram_efficiency(design: &VersalDesign) -> f64 {
    ram_efficiency_of(&design.geometry, design.brams_used, design.urams_used)
}

/// GiB/s needed to move A, B and C once per native GEMM at `throughput` TOPs.
pub fn bandwidth_requirement(native: GemmDims, throughput: f64) -> Result<f64, VersalError> {
    if throughput.is_nan() || throughput <= 0.0 {
        return Err(VersalError::NonPositiveThroughput(throughput));
    }
    let seconds = native.ops() / (throughput * 1e12);
    Ok(worst_case_bandwidth(native, seconds))
}

/// TOPs per watt; power is always a measured input.
pub fn energy_efficiency(throughput: f64, power_w: f64) -> Result<f64, VersalError> {
    if power_w.is_nan() || power_w <= 0.0 {
        return Err(VersalError::NonPositivePower(power_w));
    }
    Ok(throughput / power_w)
}

/// An `s×s×s` problem zero-padded to multiples of the compute GEMM size.
pub fn padded_dims(compute: GemmDims, s: u64) -> GemmDims {
    GemmDims::new(round_up(s, compute.m), round_up(s, compute.k), round_up(s, compute.n))
}

/// Throughput left after zero-padding an `s×s×s` problem.
pub fn scalability(native_peak: f64, compute: GemmDims, s: u64) -> f64 {
    assert!(s >= 1, "problem size must be at least 1");
    let padded = padded_dims(compute, s);
    native_peak * GemmDims::new(s, s, s).volume() as f64 / padded.volume() as f64
}
