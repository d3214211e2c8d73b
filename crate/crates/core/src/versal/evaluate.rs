//! Full evaluation of chosen designs at measured operating points.

use serde::{Deserialize, Serialize};

use super::{aie_usage, bandwidth_requirement, energy_efficiency, ram_efficiency, AieCatalog, Mapping, VersalDesign, VersalError};
use crate::catalog::VersalDevice;

const BUNDLED_POINTS: &str = include_str!("../../data/versal_designs.json");

/// A design to report: tiling, placement, mapping and its operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub placement: String,
    pub u: u64,
    pub v: u64,
    pub w: u64,
    /// Compact form such as `BUU`.
    pub mapping: String,
    /// PL clock in Hz.
    pub pl_freq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignPoints {
    pub designs: Vec<DesignPoint>,
}

impl DesignPoints {
    /// The ten published VC1902 designs.
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED_POINTS).expect("bundled designs parse")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VersalEvaluation {
    pub design: VersalDesign,
    pub aie_cores: u64,
    pub pl_freq: f64,
    pub throughput: f64,
    pub power: Option<f64>,
    pub energy_efficiency: Option<f64>,
    pub ram_efficiency: f64,
    pub bandwidth: f64,
}

/// Evaluates a point; the design must fit `device`.
pub fn evaluate(point: &DesignPoint, aies: &AieCatalog, device: &VersalDevice) -> Result<VersalEvaluation, VersalError> {
    let aie = aies.get(&point.placement).ok_or_else(|| VersalError::UnknownPlacement(point.placement.clone()))?;
    let mapping = Mapping::parse_compact(&point.mapping).ok_or_else(|| VersalError::MappingFormat(point.mapping.clone()))?;
    let design = VersalDesign::new(aie, point.u, point.v, point.w, mapping)?;
    design.check(device).map_err(VersalError::Infeasible)?;
    let throughput = aie.throughput_at(point.pl_freq)?;
    let energy = point.power.map(|p| energy_efficiency(throughput, p)).transpose()?;
    Ok(VersalEvaluation {
        aie_cores: aie_usage(aie).total_cores,
        pl_freq: point.pl_freq,
        throughput,
        power: point.power,
        energy_efficiency: energy,
        ram_efficiency: ram_efficiency(&design),
        bandwidth: bandwidth_requirement(design.native_dims, throughput)?,
        design,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DeviceCatalog;

    #[test]
    fn bundled_points_evaluate() {
        let cat = DeviceCatalog::bundled();
        let dev = cat.versal("VC1902").unwrap();
        let aies = AieCatalog::bundled();
        let evals: Vec<_> = DesignPoints::bundled().designs.iter().map(|p| evaluate(p, &aies, dev).unwrap()).collect();
        assert_eq!(evals.len(), 10);
        let e = &evals[1];
        assert_eq!(e.design.label(), "2x2x8 (P1)");
        assert_eq!((e.design.brams_used, e.design.urams_used, e.aie_cores), (416, 408, 390));
        assert!((e.bandwidth - 101.4).abs() < 0.05);
    }

    #[test]
    fn bad_points() {
        let cat = DeviceCatalog::bundled();
        let dev = cat.versal("VC1902").unwrap();
        let aies = AieCatalog::bundled();
        let good = DesignPoints::bundled().designs[1].clone();
        let mut p = good.clone();
        p.placement = "P9".into();
        assert!(matches!(evaluate(&p, &aies, dev), Err(VersalError::UnknownPlacement(_))));
        let mut p = good.clone();
        p.mapping = "BXU".into();
        assert!(matches!(evaluate(&p, &aies, dev), Err(VersalError::MappingFormat(_))));
        let mut p = good.clone();
        p.pl_freq = 123e6;
        assert!(matches!(evaluate(&p, &aies, dev), Err(VersalError::NoCalibration { .. })));
        let mut p = good;
        p.mapping = "BBB".into();
        assert!(matches!(evaluate(&p, &aies, dev), Err(VersalError::Infeasible(_))));
    }
}
