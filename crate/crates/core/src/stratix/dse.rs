//! Design-space exploration over a grid of tensor-block layouts.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::memory::{buffer_partitioning, buffer_partitioning_ceil, m20k_for, ram_efficiency_of};
use super::perf::{bandwidth_requirement, energy_efficiency, throughput_from_cycles};
use super::{
    fractional_cycles, latency, solve_native, tb_usage, Budget, ComputeDims, LatencyBreakdown,
    StratixError, StratixGeometry, TbParams,
};
use crate::catalog::StratixDevice;
use crate::GemmDims;

const BUNDLED_GRID: &str = include_str!("../../data/stratix_grid.json");

/// One layout to evaluate at a measured frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub config: TbParams,
    /// Post-route clock in Hz.
    pub freq: f64,
    /// Measured power in W.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    /// Native size to use instead of solving for one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub native: Option<GemmDims>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub entries: Vec<GridEntry>,
}

impl Grid {
    /// The ten published Stratix 10 NX designs with their native sizes.
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED_GRID).expect("bundled grid parses")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, std::io::Error> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }
}

/// A fully evaluated design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratixDesign {
    pub params: TbParams,
    pub compute: ComputeDims,
    pub native: GemmDims,
    /// Whether `native` is a multiple of the compute size. Misaligned sizes
    /// use rounded-up depths and the real-valued cycle formula.
    pub aligned: bool,
    pub geometry: StratixGeometry,
    pub m20ks_used: u64,
    pub tbs_used: u64,
    pub wasted_tbs: u64,
    pub freq: f64,
    pub power: Option<f64>,
    pub latency: Option<LatencyBreakdown>,
    pub cycles: f64,
    pub throughput: f64,
    pub bandwidth: f64,
    pub ram_efficiency: f64,
    pub energy_efficiency: Option<f64>,
}

impl StratixDesign {
    pub fn evaluate(entry: &GridEntry, device: &StratixDevice, budget: Budget) -> Result<Self, StratixError> {
        let params = entry.config;
        let usage = tb_usage(&params, device)?;
        let native = match entry.native {
            Some(n) => n,
            None => solve_native(&params, device, budget)?.native,
        };
        let aligned = params.check_dims(native).is_ok();
        let (geometry, latency, cycles) = if aligned {
            let l = latency(&params, native)?;
            (buffer_partitioning(&params, native)?, Some(l), l.t_total as f64)
        } else {
            (buffer_partitioning_ceil(&params, native)?, None, fractional_cycles(&params, native)?)
        };
        let m20ks_used = m20k_for(&geometry);
        if m20ks_used > device.m20k_total {
            return Err(StratixError::M20kOverflow { used: m20ks_used, budget: device.m20k_total });
        }
        let throughput = throughput_from_cycles(native, cycles, entry.freq)?;
        let energy_efficiency = entry.power.map(|p| energy_efficiency(throughput, p)).transpose()?;
        Ok(Self {
            params,
            compute: params.compute_dims(),
            native,
            aligned,
            geometry,
            m20ks_used,
            tbs_used: usage.tbs_used,
            wasted_tbs: usage.wasted_tbs,
            freq: entry.freq,
            power: entry.power,
            latency,
            cycles,
            throughput,
            bandwidth: bandwidth_requirement(native, cycles, entry.freq)?,
            ram_efficiency: ram_efficiency_of(&geometry),
            energy_efficiency,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DseFailure {
    pub config: TbParams,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DseReport {
    /// Ranked by throughput, highest first.
    pub designs: Vec<StratixDesign>,
    pub failures: Vec<DseFailure>,
}

fn rank(a: &StratixDesign, b: &StratixDesign) -> Ordering {
    b.throughput.total_cmp(&a.throughput).then(a.params.cmp(&b.params))
}

/// Evaluates every grid entry; failures are collected, not fatal.
pub fn dse(grid: &[GridEntry], device: &StratixDevice, budget: Budget) -> DseReport {
    let results: Vec<_> = grid
        .par_iter()
        .map(|entry| (entry.config, StratixDesign::evaluate(entry, device, budget)))
        .collect();
    let mut report = DseReport::default();
    for (config, result) in results {
        match result {
            Ok(d) => report.designs.push(d),
            Err(e) => report.failures.push(DseFailure { config, error: e.to_string() }),
        }
    }
    report.designs.sort_by(rank);
    report.failures.sort_by_key(|a| a.config);
    report
}
