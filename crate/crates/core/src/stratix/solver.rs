//! Exhaustive search for the native buffer size `M'×K'×N'`.

use serde::{Deserialize, Serialize};

use super::memory::{buffer_partitioning, m20k_for};
use super::{StratixError, TbParams};
use crate::catalog::StratixDevice;
use crate::GemmDims;

/// M20K budget for the buffers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Budget {
    /// Fraction of the device total, rounded down.
    Fraction(f64),
    /// Absolute block count.
    Absolute(u64),
}

impl Default for Budget {
    fn default() -> Self {
        Budget::Fraction(0.90)
    }
}

impl Budget {
    pub fn blocks(&self, device: &StratixDevice) -> Result<u64, StratixError> {
        match *self {
            Budget::Absolute(n) => Ok(n),
            Budget::Fraction(f) if f > 0.0 && f <= 1.0 => Ok((f * device.m20k_total as f64).floor() as u64),
            Budget::Fraction(f) => Err(StratixError::BudgetFraction(f)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NativeSolution {
    pub native: GemmDims,
    pub m20ks: u64,
    pub budget: u64,
}

fn cost(params: &TbParams, m: u64, k: u64, n: u64) -> u64 {
    m20k_for(&buffer_partitioning(params, GemmDims::new(m, k, n)).expect("aligned sizes partition exactly"))
}

/// Preference order: product, then N', K', M'.
fn key(d: GemmDims) -> (u128, u64, u64, u64) {
    (d.volume(), d.n, d.k, d.m)
}

/// Maximizes `M'·K'·N'` over multiples of the compute size with
/// `N' >= L_A·3·E_N` and the M20K total within budget.
///
/// M20K use is nondecreasing in each dimension, so for every `(M', K')` the
/// largest feasible `N'` is found by bisection and both outer loops stop at
/// the first infeasible value.
pub fn solve_native(params: &TbParams, device: &StratixDevice, budget: Budget) -> Result<NativeSolution, StratixError> {
    params.validate()?;
    let tbs = params.tensor_blocks();
    if tbs > device.tb_total {
        return Err(StratixError::TbOverflow { used: tbs, total: device.tb_total });
    }
    let limit = budget.blocks(device)?;
    let c = params.compute_dims();
    let q_min = params.n_min() / params.e_n;
    let fits = |m: u64, k: u64, q: u64| cost(params, m, k, q * params.e_n) <= limit;

    let minimum = cost(params, c.d_m, c.d_k, q_min * params.e_n);
    if minimum > limit {
        return Err(StratixError::Infeasible { budget: limit, minimum });
    }

    let mut best: Option<GemmDims> = None;
    let mut m = c.d_m;
    while fits(m, c.d_k, q_min) {
        let mut k = c.d_k;
        while fits(m, k, q_min) {
            // largest q with fits(m, k, q); fits(m, k, q_min) holds
            let mut lo = q_min;
            let mut hi = q_min.max(1) * 2;
            while fits(m, k, hi) {
                lo = hi;
                hi *= 2;
            }
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if fits(m, k, mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let cand = GemmDims::new(m, k, lo * params.e_n);
            if best.is_none_or(|b| key(cand) > key(b)) {
                best = Some(cand);
            }
            k += c.d_k;
        }
        m += c.d_m;
    }

    let native = best.expect("minimum size is feasible");
    Ok(NativeSolution { native, m20ks: cost(params, native.m, native.k, native.n), budget: limit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::DeviceCatalog;

    fn nx() -> StratixDevice {
        DeviceCatalog::bundled().stratix("NX2100").unwrap().clone()
    }

    #[test]
    fn infeasible_when_minimum_exceeds_budget() {
        let params: TbParams = "9x16x5x5".parse().unwrap();
        assert!(matches!(
            solve_native(&params, &nx(), Budget::Absolute(100)),
            Err(StratixError::Infeasible { budget: 100, .. })
        ));
    }

    #[test]
    fn default_budget_is_ninety_percent() {
        assert_eq!(Budget::default().blocks(&nx()).unwrap(), 6162);
        assert!(Budget::Fraction(1.5).blocks(&nx()).is_err());
        assert!(Budget::Fraction(0.0).blocks(&nx()).is_err());
    }

    #[test]
    fn solution_respects_constraints() {
        let params: TbParams = "18x16x4x3".parse().unwrap();
        let sol = solve_native(&params, &nx(), Budget::Absolute(6304)).unwrap();
        params.check_dims(sol.native).unwrap();
        assert!(sol.m20ks <= 6304);
    }

    #[test]
    fn too_many_tensor_blocks() {
        let params: TbParams = "36x16x8x3".parse().unwrap();
        assert!(matches!(solve_native(&params, &nx(), Budget::default()), Err(StratixError::TbOverflow { .. })));
    }
}
