//! Throughput, bandwidth and zero-padding scalability.

use super::{latency, StratixError, TbParams};
use crate::dims::round_up;
use crate::{worst_case_bandwidth, GemmDims};

fn check_freq(freq: f64) -> Result<(), StratixError> {
    if freq.is_nan() || freq <= 0.0 {
        return Err(StratixError::NonPositiveFrequency(freq));
    }
    Ok(())
}

/// TOPs for `dims` finished in `cycles` at `freq` Hz.
pub fn throughput_from_cycles(dims: GemmDims, cycles: f64, freq: f64) -> Result<f64, StratixError> {
    check_freq(freq)?;
    Ok(dims.ops() / (cycles / freq) / 1e12)
}

pub fn throughput(params: &TbParams, dims: GemmDims, freq: f64) -> Result<f64, StratixError> {
    check_freq(freq)?;
    let cycles = latency(params, dims)?.t_total;
    throughput_from_cycles(dims, cycles as f64, freq)
}

/// GiB/s to stream A, B and C once per native GEMM.
pub fn bandwidth_requirement(native: GemmDims, t_total: f64, freq: f64) -> Result<f64, StratixError> {
    check_freq(freq)?;
    Ok(worst_case_bandwidth(native, t_total / freq))
}

pub fn energy_efficiency(throughput: f64, power_w: f64) -> Result<f64, StratixError> {
    if power_w.is_nan() || power_w <= 0.0 {
        return Err(StratixError::NonPositivePower(power_w));
    }
    Ok(throughput / power_w)
}

/// `s×s×s` padded to multiples of `D_M'` and `D_K'`; N is padded to a
/// multiple of `E_N` and to at least the load-hiding minimum.
pub fn padded_dims(params: &TbParams, s: u64) -> GemmDims {
    let c = params.compute_dims();
    GemmDims::new(round_up(s, c.d_m), round_up(s, c.d_k), round_up(s, c.d_n).max(params.n_min()))
}

pub fn scalability(params: &TbParams, native_peak: f64, s: u64) -> f64 {
    assert!(s >= 1, "problem size must be at least 1");
    let padded = padded_dims(params, s);
    native_peak * GemmDims::new(s, s, s).volume() as f64 / padded.volume() as f64
}
