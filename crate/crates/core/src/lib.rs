//! Design-space exploration for GEMM accelerators on AI-optimized FPGAs.
//!
//! Two device families are modeled:
//!
//! * [`versal`]: an AIE-array accelerator whose programmable-logic buffers are
//!   sized by an exhaustive `U·V·W` search over BRAM/URAM mappings.
//! * [`stratix`]: an in-fabric tensor-block accelerator whose native buffer
//!   size is chosen by an exhaustive `M'·K'·N'` search under an M20K budget.
//!
//! [`sim`] executes the tensor-block dataflow cycle by cycle, and [`netlist`]
//! produces the structural description of a tensor-block design.

pub mod catalog;
pub mod dims;
pub mod netlist;
pub mod report;
pub mod sim;
pub mod stratix;
pub mod versal;

pub use catalog::{CatalogError, DeviceCatalog, StratixDevice, VersalDevice};
pub use dims::{DimsParseError, GemmDims};

/// Bytes in one GiB; every bandwidth figure in the crate is reported in GiB/s.
pub const GIB: f64 = (1u64 << 30) as f64;

/// Worst-case off-chip bandwidth: the whole of A and B loaded and C stored
/// (all as 8-bit) within `seconds`.
pub(crate) fn worst_case_bandwidth(dims: GemmDims, seconds: f64) -> f64 {
    dims.operand_bytes() as f64 / seconds / GIB
}
