//! Versal AIE + PL accelerator model.
//!
//! An [`AieSolution`] fixes the array-level tiling `X×Y×Z` of `M×K×N`
//! kernels. The PL adds a second tiling level `U×V×W` held in on-chip
//! buffers, each mapped to BRAM or URAM. [`solve_uvw`] maximizes `U·V·W`
//! under depth and device-resource limits.

mod evaluate;
mod hls;
mod memory;
mod perf;
mod solver;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::VersalDevice;
use crate::GemmDims;

pub use evaluate::{evaluate, DesignPoint, DesignPoints, VersalEvaluation};
pub use hls::emit_hls_directives;
pub use memory::{
    bram_cost, buffer_geometry, mapping_resources, ram_efficiency_of, uram_cost, BramUnits, Buffer,
    BufferGeometry, Mapping, Resource, ResourceUse, BRAM36_BITS, ENTRY_BITS, MAX_DEPTH, URAM_BITS,
};
pub use perf::{
    aie_usage, bandwidth_requirement, energy_efficiency, padded_dims, ram_efficiency, scalability,
    AieUsage,
};
pub use solver::{solve_uvw, Constraint, VersalDesign};

const BUNDLED_SOLUTIONS: &str = include_str!("../../data/aie_solutions.json");

#[derive(Debug, Error, PartialEq)]
pub enum VersalError {
    #[error("buffer depth {depth} exceeds the 4K entry cap")]
    DepthCap { depth: u64 },
    #[error("buffer depth must be at least 1")]
    ZeroDepth,
    #[error("U, V and W must all be at least 1")]
    ZeroTiling,
    #[error("{buffer} depth {numerator}/{divisor} is not an integer")]
    FractionalDepth { buffer: &'static str, numerator: u64, divisor: u64 },
    #[error("invalid AIE solution {placement}: {reason}")]
    InvalidSolution { placement: String, reason: String },
    #[error("no feasible design: {0}")]
    Infeasible(Constraint),
    #[error("throughput must be positive, got {0}")]
    NonPositiveThroughput(f64),
    #[error("power must be positive, got {0}")]
    NonPositivePower(f64),
    #[error("top_k must be at least 1")]
    ZeroTopK,
    #[error("unknown AIE placement {0:?}")]
    UnknownPlacement(String),
    #[error("invalid mapping {0:?}, expected three of B/U such as BUU")]
    MappingFormat(String),
    #[error("no calibration point for {placement} at {freq_hz} Hz")]
    NoCalibration { placement: String, freq_hz: f64 },
}

/// One measured (PL frequency, throughput) pair for an AIE solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    /// PL clock in Hz.
    pub pl_freq: f64,
    /// Achieved throughput in TOPs on the native buffer size.
    pub throughput: f64,
}

/// A placed AIE-array GEMM solution: `X×Y×Z` kernels of size `M×K×N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AieSolution {
    pub placement: String,
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub m: u64,
    pub k: u64,
    pub n: u64,
    pub kernel_efficiency: f64,
    #[serde(default)]
    pub calibration: Vec<CalibrationPoint>,
}

impl AieSolution {
    pub fn validate(&self) -> Result<(), VersalError> {
        let fail = |reason: &str| VersalError::InvalidSolution {
            placement: self.placement.clone(),
            reason: reason.to_string(),
        };
        if [self.x, self.y, self.z, self.m, self.k, self.n].contains(&0) {
            return Err(fail("all tiling and kernel dimensions must be at least 1"));
        }
        if !(self.m * self.k).is_multiple_of(16) || !(self.k * self.n).is_multiple_of(16) {
            return Err(fail("M·K and K·N must be multiples of 16"));
        }
        if !(self.m * self.n).is_multiple_of(4) {
            return Err(fail("M·N must be a multiple of 4"));
        }
        if !(self.kernel_efficiency > 0.0 && self.kernel_efficiency <= 1.0) {
            return Err(fail("kernel efficiency must lie in (0, 1]"));
        }
        Ok(())
    }

    /// `(X·M)×(Y·K)×(Z·N)`, the GEMM the AIE array runs per invocation.
    pub fn compute_dims(&self) -> GemmDims {
        GemmDims::new(self.x * self.m, self.y * self.k, self.z * self.n)
    }

    /// Cores needed for MatMul kernels plus the adder tree.
    pub fn total_cores(&self) -> u64 {
        aie_usage(self).total_cores
    }

    pub fn fits(&self, device: &VersalDevice) -> bool {
        self.total_cores() <= device.aie_cores
    }

    /// Calibrated throughput at exactly `freq_hz` (within 1 Hz).
    pub fn throughput_at(&self, freq_hz: f64) -> Result<f64, VersalError> {
        self.calibration
            .iter()
            .find(|p| (p.pl_freq - freq_hz).abs() < 1.0)
            .map(|p| p.throughput)
            .ok_or_else(|| VersalError::NoCalibration {
                placement: self.placement.clone(),
                freq_hz,
            })
    }

    /// The solution with X and Z (and M and N) exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            placement: format!("{}-swapped", self.placement),
            x: self.z,
            z: self.x,
            m: self.n,
            n: self.m,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AieCatalog {
    pub solutions: Vec<AieSolution>,
}

impl AieCatalog {
    /// P1 (13×4×6) and P2 (10×3×10) with 32×128×32 kernels.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_SOLUTIONS).expect("bundled AIE catalog is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, AieCatalogError> {
        let catalog: Self = serde_json::from_str(text)?;
        for s in &catalog.solutions {
            s.validate()?;
        }
        Ok(catalog)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AieCatalogError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn get(&self, placement: &str) -> Option<&AieSolution> {
        self.solutions.iter().find(|s| s.placement.eq_ignore_ascii_case(placement))
    }
}

#[derive(Debug, Error)]
pub enum AieCatalogError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] VersalError),
}

#[cfg(test)]
pub(crate) fn p1() -> AieSolution {
    AieCatalog::bundled().get("P1").unwrap().clone()
}

#[cfg(test)]
pub(crate) fn p2() -> AieSolution {
    AieCatalog::bundled().get("P2").unwrap().clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_solutions() {
        let s = p1();
        assert_eq!((s.x, s.y, s.z, s.m, s.k, s.n), (13, 4, 6, 32, 128, 32));
        assert_eq!(s.compute_dims(), GemmDims::new(416, 512, 192));
        assert_eq!(p2().compute_dims(), GemmDims::new(320, 384, 320));
        assert_eq!(s.throughput_at(290e6).unwrap(), 76.93);
        assert!(s.throughput_at(250e6).is_err());
    }

    #[test]
    fn divisibility_is_enforced() {
        let mut s = p1();
        s.m = 1;
        s.n = 2;
        assert!(matches!(s.validate(), Err(VersalError::InvalidSolution { .. })));
    }
}
