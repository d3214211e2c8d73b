//! Device catalogs.
//!
//! A catalog is a single JSON document listing Versal and Stratix devices with
//! explicit resource totals. Frequencies are in Hz and bandwidths in bytes/s.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tensor blocks are placed in cascade chains of this length.
pub const TB_CHAIN_LENGTH: u64 = 36;

const BUNDLED_CATALOG: &str = include_str!("../data/catalog.json");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read catalog {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse catalog: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{path}: {reason}")]
    Invariant { path: String, reason: String },
    #[error("no device named `{0}` in catalog")]
    UnknownDevice(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VersalDevice {
    pub name: String,
    /// 36 Kbit block RAMs available to the PL.
    pub bram36_total: u64,
    /// 288 Kbit UltraRAMs available to the PL.
    pub uram_total: u64,
    pub aie_cores: u64,
    pub aie_pl_tiles: u64,
    /// AIE array clock in Hz.
    pub aie_freq: f64,
    /// Attainable PL clock range in Hz, `[low, high]`.
    pub pl_freq_range: [f64; 2],
    pub peak_tops_int8: f64,
    /// Peak DRAM bandwidth in bytes/s.
    pub dram_bw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratixDevice {
    pub name: String,
    pub m20k_total: u64,
    pub tb_total: u64,
    pub peak_tops_int8: f64,
    /// Peak DRAM bandwidth in bytes/s.
    pub dram_bw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceCatalog {
    pub versal_devices: Vec<VersalDevice>,
    pub stratix_devices: Vec<StratixDevice>,
}

fn violation(path: String, reason: &str) -> CatalogError {
    CatalogError::Invariant { path, reason: reason.to_string() }
}

fn require_count(path: String, value: u64) -> Result<(), CatalogError> {
    if value == 0 {
        return Err(violation(path, "must be at least 1"));
    }
    Ok(())
}

fn require_positive(path: String, value: f64) -> Result<(), CatalogError> {
    if !(value.is_finite() && value > 0.0) {
        return Err(violation(path, "must be a positive number"));
    }
    Ok(())
}

impl VersalDevice {
    fn validate(&self, at: &str) -> Result<(), CatalogError> {
        require_count(format!("{at}.bram36_total"), self.bram36_total)?;
        require_count(format!("{at}.uram_total"), self.uram_total)?;
        require_count(format!("{at}.aie_cores"), self.aie_cores)?;
        require_count(format!("{at}.aie_pl_tiles"), self.aie_pl_tiles)?;
        require_positive(format!("{at}.aie_freq"), self.aie_freq)?;
        require_positive(format!("{at}.pl_freq_range[0]"), self.pl_freq_range[0])?;
        require_positive(format!("{at}.pl_freq_range[1]"), self.pl_freq_range[1])?;
        if self.pl_freq_range[0] > self.pl_freq_range[1] {
            return Err(violation(format!("{at}.pl_freq_range"), "low bound exceeds high bound"));
        }
        require_positive(format!("{at}.peak_tops_int8"), self.peak_tops_int8)?;
        require_positive(format!("{at}.dram_bw"), self.dram_bw)
    }
}

impl StratixDevice {
    fn validate(&self, at: &str) -> Result<(), CatalogError> {
        require_count(format!("{at}.m20k_total"), self.m20k_total)?;
        if self.tb_total < TB_CHAIN_LENGTH || !self.tb_total.is_multiple_of(TB_CHAIN_LENGTH) {
            return Err(violation(
                format!("{at}.tb_total"),
                "must be a positive multiple of the 36-block chain length",
            ));
        }
        require_positive(format!("{at}.peak_tops_int8"), self.peak_tops_int8)?;
        require_positive(format!("{at}.dram_bw"), self.dram_bw)
    }
}

impl DeviceCatalog {
    /// The catalog shipped with the crate (VC1902 and NX2100).
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_CATALOG).expect("bundled catalog is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CatalogError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| CatalogError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CatalogError> {
        let catalog: Self = serde_json::from_str(text)?;
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serializes")
    }

    pub fn validate(&self) -> Result<(), CatalogError> {
        let mut names = HashSet::new();
        for (i, d) in self.versal_devices.iter().enumerate() {
            let at = format!("versal_devices[{i}]");
            d.validate(&at)?;
            if !names.insert(d.name.as_str()) {
                return Err(violation(format!("{at}.name"), "duplicate device name"));
            }
        }
        for (i, d) in self.stratix_devices.iter().enumerate() {
            let at = format!("stratix_devices[{i}]");
            d.validate(&at)?;
            if !names.insert(d.name.as_str()) {
                return Err(violation(format!("{at}.name"), "duplicate device name"));
            }
        }
        Ok(())
    }

    pub fn versal(&self, name: &str) -> Result<&VersalDevice, CatalogError> {
        self.versal_devices
            .iter()
            .find(|d| d.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| CatalogError::UnknownDevice(name.to_string()))
    }

    pub fn stratix(&self, name: &str) -> Result<&StratixDevice, CatalogError> {
        self.stratix_devices
            .iter()
            .find(|d| d.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| CatalogError::UnknownDevice(name.to_string()))
    }
}
