//! Exhaustive `U·V·W` search.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::memory::{buffer_geometry, mapping_resources, BramUnits, BufferGeometry, Mapping, MAX_DEPTH};
use super::{AieSolution, VersalError};
use crate::catalog::VersalDevice;
use crate::GemmDims;

/// The limit that rules out every candidate when a search comes back empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    /// Even `U = V = W = 1` exceeds the 4K depth cap.
    DepthCap,
    /// Every mapping overflows the device BRAMs.
    BramTotal,
    /// Every mapping overflows the device URAMs.
    UramTotal,
    /// Each mapping overflows BRAMs or URAMs (but not the same one for all).
    BramOrUram,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::DepthCap => "buffer depth cap (4K entries)",
            Constraint::BramTotal => "device BRAM total",
            Constraint::UramTotal => "device URAM total",
            Constraint::BramOrUram => "device BRAM and URAM totals",
        })
    }
}

/// A PL configuration on top of an AIE solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VersalDesign {
    pub aie: AieSolution,
    pub u: u64,
    pub v: u64,
    pub w: u64,
    pub geometry: BufferGeometry,
    pub mapping: Mapping,
    /// Exact BRAM total in half-block units.
    pub bram_halves: u64,
    pub brams_used: u64,
    pub urams_used: u64,
    pub native_dims: GemmDims,
    pub compute_dims: GemmDims,
}

impl VersalDesign {
    /// Evaluates a specific `(U, V, W, mapping)` without any device check.
    pub fn new(aie: &AieSolution, u: u64, v: u64, w: u64, mapping: Mapping) -> Result<Self, VersalError> {
        aie.validate()?;
        let geometry = buffer_geometry(aie, u, v, w)?;
        let used = mapping_resources(&geometry, mapping)?;
        let compute_dims = aie.compute_dims();
        Ok(Self {
            aie: aie.clone(),
            u,
            v,
            w,
            geometry,
            mapping,
            bram_halves: used.bram_units.halves(),
            brams_used: used.brams,
            urams_used: used.urams,
            native_dims: compute_dims.scaled(u, v, w),
            compute_dims,
        })
    }

    pub fn product(&self) -> u64 {
        self.u * self.v * self.w
    }

    pub fn bram_units(&self) -> BramUnits {
        BramUnits::from_halves(self.bram_halves)
    }

    /// Re-checks the depth cap and device totals.
    pub fn check(&self, device: &VersalDevice) -> Result<(), Constraint> {
        if self.geometry.max_depth() > MAX_DEPTH {
            return Err(Constraint::DepthCap);
        }
        match (self.brams_used > device.bram36_total, self.urams_used > device.uram_total) {
            (false, false) => Ok(()),
            (true, false) => Err(Constraint::BramTotal),
            (false, true) => Err(Constraint::UramTotal),
            (true, true) => Err(Constraint::BramOrUram),
        }
    }

    /// `U×V×W (P1)`.
    pub fn label(&self) -> String {
        format!("{}x{}x{} ({})", self.u, self.v, self.w, self.aie.placement)
    }

    fn rank_key(&self) -> (u64, u64, u64, u64) {
        (self.product(), self.v, self.u, self.w)
    }
}

/// Ranking: `U·V·W` desc, then V desc, U desc, W desc, then mapping order.
fn rank(a: &VersalDesign, b: &VersalDesign) -> Ordering {
    b.rank_key().cmp(&a.rank_key()).then(a.mapping.cmp(&b.mapping))
}

/// Per-dimension bounds implied by the depth cap with the other two
/// factors at 1.
fn search_box(aie: &AieSolution) -> (u64, u64, u64) {
    let uv = MAX_DEPTH * 16 / (aie.m * aie.k);
    let vw = MAX_DEPTH * 16 / (aie.k * aie.n);
    let uw = MAX_DEPTH * 4 / (aie.m * aie.n);
    (uv.min(uw), uv.min(vw), vw.min(uw))
}

/// Enumerates every `(U, V, W)` inside the depth caps and every mapping,
/// keeps those that fit the device, and returns the `top_k` best.
pub fn solve_uvw(aie: &AieSolution, device: &VersalDevice, top_k: usize) -> Result<Vec<VersalDesign>, VersalError> {
    if top_k == 0 {
        return Err(VersalError::ZeroTopK);
    }
    aie.validate()?;
    let (u_max, v_max, w_max) = search_box(aie);
    if u_max == 0 || v_max == 0 || w_max == 0 {
        return Err(VersalError::Infeasible(Constraint::DepthCap));
    }

    let mut feasible: Vec<VersalDesign> = (1..=u_max)
        .into_par_iter()
        .flat_map_iter(|u| {
            let mut out = Vec::new();
            for v in 1..=v_max {
                for w in 1..=w_max {
                    let Ok(geometry) = buffer_geometry(aie, u, v, w) else { continue };
                    if geometry.max_depth() > MAX_DEPTH {
                        continue;
                    }
                    for mapping in Mapping::all() {
                        let design = VersalDesign::new(aie, u, v, w, mapping)
                            .expect("geometry inside depth cap evaluates");
                        if design.check(device).is_ok() {
                            out.push(design);
                        }
                    }
                }
            }
            out
        })
        .collect();

    if feasible.is_empty() {
        return Err(VersalError::Infeasible(binding_constraint(aie, device)));
    }
    feasible.sort_by(rank);
    feasible.truncate(top_k);
    Ok(feasible)
}

/// Explains an empty search using the unit tiling, which every other
/// candidate dominates in resource use.
fn binding_constraint(aie: &AieSolution, device: &VersalDevice) -> Constraint {
    let (mut bram, mut uram) = (true, true);
    for mapping in Mapping::all() {
        let Ok(d) = VersalDesign::new(aie, 1, 1, 1, mapping) else {
            return Constraint::DepthCap;
        };
        match d.check(device) {
            Err(Constraint::BramTotal) => uram = false,
            Err(Constraint::UramTotal) => bram = false,
            Err(Constraint::DepthCap) => return Constraint::DepthCap,
            _ => {}
        }
    }
    match (bram, uram) {
        (true, false) => Constraint::BramTotal,
        (false, true) => Constraint::UramTotal,
        _ => Constraint::BramOrUram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::DeviceCatalog;
    use crate::versal::{p1, p2, Resource};

    fn vc1902() -> VersalDevice {
        DeviceCatalog::bundled().versal("VC1902").unwrap().clone()
    }

    #[test]
    fn p1_optimum_is_32() {
        let top = solve_uvw(&p1(), &vc1902(), 10).unwrap();
        assert_eq!(top[0].product(), 32);
        let bu = Mapping::parse_compact("BUU").unwrap();
        assert!(top
            .iter()
            .any(|d| (d.u, d.v, d.w) == (2, 2, 8) && d.mapping == bu && d.product() == 32));
        assert!(top.windows(2).all(|w| rank(&w[0], &w[1]) != Ordering::Greater));
    }

    #[test]
    fn p2_4x2x4_is_feasible_with_bbu() {
        let d = VersalDesign::new(&p2(), 4, 2, 4, Mapping::parse_compact("BBU").unwrap()).unwrap();
        assert_eq!((d.brams_used, d.urams_used), (900, 400));
        assert!(d.check(&vc1902()).is_ok());
        let top = solve_uvw(&p2(), &vc1902(), 20).unwrap();
        assert!(top.iter().any(|t| (t.u, t.v, t.w, t.mapping) == (4, 2, 4, d.mapping)));
    }

    #[test]
    fn no_uram_forces_all_bram() {
        let mut dev = vc1902();
        dev.uram_total = 0;
        match solve_uvw(&p1(), &dev, 3) {
            Ok(top) => {
                assert!(top[0].product() < 32);
                for d in &top {
                    assert_eq!(d.urams_used, 0);
                    assert_eq!(d.mapping, Mapping::new(Resource::Bram, Resource::Bram, Resource::Bram));
                }
            }
            Err(VersalError::Infeasible(_)) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn infeasible_reports_binding_constraint() {
        let mut dev = vc1902();
        dev.bram36_total = 1;
        dev.uram_total = 1;
        assert_eq!(
            solve_uvw(&p1(), &dev, 1),
            Err(VersalError::Infeasible(Constraint::BramOrUram))
        );
        dev.uram_total = 10_000;
        dev.bram36_total = 0;
        // all-URAM still fits when URAMs are plentiful
        assert!(solve_uvw(&p1(), &dev, 1).is_ok());
    }

    #[test]
    fn zero_top_k_is_rejected() {
        assert_eq!(solve_uvw(&p1(), &vc1902(), 0), Err(VersalError::ZeroTopK));
    }
}
