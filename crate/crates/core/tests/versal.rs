use std::collections::BTreeSet;

use gemmforge::versal::{
    bandwidth_requirement, bram_cost, mapping_resources, ram_efficiency, solve_uvw, AieCatalog, AieSolution, Mapping,
    Resource, VersalDesign,
};
use gemmforge::{DeviceCatalog, GemmDims, VersalDevice};
use proptest::prelude::*;

fn vc1902() -> VersalDevice {
    DeviceCatalog::bundled().versal("VC1902").unwrap().clone()
}

fn aie(name: &str) -> AieSolution {
    AieCatalog::bundled().get(name).unwrap().clone()
}

/// Brute force straight from the buffer formulas: every (U, V, W) up to 64
/// and every BRAM/URAM assignment, costs counted in half blocks.
fn brute_force_optima(s: &AieSolution, bram_total: u64, uram_total: u64) -> (u64, BTreeSet<(u64, u64, u64, String)>) {
    let half_blocks = |depth: u64| match depth {
        0..=512 => 4,
        513..=1024 => 8,
        1025..=2048 => 15,
        _ => 30,
    };
    let mut best = 0;
    let mut optima = BTreeSet::new();
    for u in 1..=64u64 {
        for v in 1..=64u64 {
            for w in 1..=64u64 {
                let bufs = [
                    (2 * s.x * s.y, u * v * s.m * s.k),
                    (2 * s.y * s.z, v * w * s.k * s.n),
                    (2 * s.x * s.z, u * w * s.m * s.n),
                ];
                let depths = [bufs[0].1 / 16, bufs[1].1 / 16, bufs[2].1 / 4];
                if !bufs[0].1.is_multiple_of(16) || !bufs[1].1.is_multiple_of(16) || !bufs[2].1.is_multiple_of(4) || depths.iter().any(|&d| d > 4096) {
                    continue;
                }
                for bits in 0..8u32 {
                    let (mut halves, mut urams) = (0, 0);
                    let mut name = String::new();
                    for i in 0..3 {
                        let on_uram = bits & (4 >> i) != 0;
                        if on_uram {
                            urams += 2 * bufs[i].0;
                            name.push('U');
                        } else {
                            halves += half_blocks(depths[i]) * bufs[i].0;
                            name.push('B');
                        }
                    }
                    if halves.div_ceil(2) > bram_total || urams > uram_total {
                        continue;
                    }
                    let p = u * v * w;
                    if p > best {
                        best = p;
                        optima.clear();
                    }
                    if p == best {
                        optima.insert((u, v, w, name));
                    }
                }
            }
        }
    }
    (best, optima)
}

fn solver_optima(s: &AieSolution, dev: &VersalDevice) -> (u64, BTreeSet<(u64, u64, u64, String)>) {
    let all = solve_uvw(s, dev, usize::MAX).unwrap();
    let best = all[0].product();
    let set = all.iter().take_while(|d| d.product() == best).map(|d| (d.u, d.v, d.w, d.mapping.compact())).collect();
    (best, set)
}

#[test]
fn solver_matches_brute_force() {
    let dev = vc1902();
    for name in ["P1", "P2"] {
        let s = aie(name);
        assert_eq!(solver_optima(&s, &dev), brute_force_optima(&s, dev.bram36_total, dev.uram_total), "{name}");
    }
    let s = aie("P1");
    for (brams, urams) in [(700, 300), (500, 463), (967, 200)] {
        let mut tight = dev.clone();
        tight.bram36_total = brams;
        tight.uram_total = urams;
        assert_eq!(solver_optima(&s, &tight), brute_force_optima(&s, brams, urams), "{brams}/{urams}");
    }
    // nothing fits: the single-tile design alone needs more than this
    let mut tiny = dev;
    tiny.bram36_total = 300;
    tiny.uram_total = 120;
    assert_eq!(brute_force_optima(&s, 300, 120).0, 0);
    assert!(solve_uvw(&s, &tiny, 1).is_err());
}

#[test]
fn solver_is_deterministic() {
    let dev = vc1902();
    let s = aie("P2");
    let a = solve_uvw(&s, &dev, 50).unwrap();
    for _ in 0..3 {
        assert_eq!(solve_uvw(&s, &dev, 50).unwrap(), a);
    }
}

#[test]
fn every_solution_rechecks() {
    let dev = vc1902();
    for name in ["P1", "P2"] {
        for d in solve_uvw(&aie(name), &dev, usize::MAX).unwrap() {
            assert!(d.check(&dev).is_ok());
            let e = ram_efficiency(&d);
            assert!(e > 0.0 && e <= 1.0);
        }
    }
}

#[test]
fn full_band_efficiency_is_128_over_144() {
    let s = aie("P1");
    let mut hits = 0;
    for u in 1..=16 {
        for v in 1..=16 {
            for w in 1..=16 {
                for m in Mapping::all() {
                    let Ok(d) = VersalDesign::new(&s, u, v, w, m) else { continue };
                    let g = d.geometry;
                    let full = |r: Resource, depth: u64| match r {
                        Resource::Bram => depth == 1024,
                        Resource::Uram => depth == 4096,
                    };
                    if full(m.a, g.a_depth) && full(m.b, g.b_depth) && full(m.c, g.c_depth) {
                        assert!((ram_efficiency(&d) - 128.0 / 144.0).abs() < 1e-12);
                        hits += 1;
                    }
                }
            }
        }
    }
    assert!(hits >= 2);
}

fn design() -> impl Strategy<Value = (String, u64, u64, u64, Mapping)> {
    (prop::sample::select(vec!["P1", "P2"]), 1u64..=16, 1u64..=16, 1u64..=16, prop::sample::select(Mapping::all().to_vec()))
        .prop_map(|(p, u, v, w, m)| (p.to_string(), u, v, w, m))
}

proptest! {
    #[test]
    fn swap_symmetry((p, u, v, w, m) in design()) {
        let s = aie(&p);
        let Ok(d) = VersalDesign::new(&s, u, v, w, m) else { return Ok(()) };
        let swapped = VersalDesign::new(&s.swapped(), w, v, u, Mapping::new(m.b, m.a, m.c)).unwrap();
        prop_assert_eq!((d.brams_used, d.urams_used), (swapped.brams_used, swapped.urams_used));
        prop_assert_eq!(ram_efficiency(&d), ram_efficiency(&swapped));
    }

    #[test]
    fn resources_are_monotone((p, u, v, w, m) in design(), which in 0usize..3) {
        let s = aie(&p);
        let Ok(d) = VersalDesign::new(&s, u, v, w, m) else { return Ok(()) };
        let mut t = [u, v, w];
        t[which] += 1;
        if let Ok(bigger) = VersalDesign::new(&s, t[0], t[1], t[2], m) {
            prop_assert!(bigger.bram_halves >= d.bram_halves);
            prop_assert!(bigger.urams_used >= d.urams_used);
        }
        // a deeper band never costs less
        let g = d.geometry;
        let mut deeper = g;
        deeper.a_part += 1;
        let r0 = mapping_resources(&g, m).unwrap();
        let r1 = mapping_resources(&deeper, m).unwrap();
        prop_assert!(r1.bram_units >= r0.bram_units && r1.urams >= r0.urams);
    }

    #[test]
    fn bram_cost_is_monotone(d in 1u64..4096) {
        prop_assert!(bram_cost(d + 1).unwrap() >= bram_cost(d).unwrap());
    }

    #[test]
    fn bandwidth_round_trip(m in 1u64..5000, k in 1u64..5000, n in 1u64..5000, tops in 1.0f64..200.0) {
        let dims = GemmDims::new(m, k, n);
        let bw = bandwidth_requirement(dims, tops).unwrap();
        let bytes = bw * (1u64 << 30) as f64 * (2.0 * (m * k * n) as f64) / (tops * 1e12);
        let want = (m * k + k * n + m * n) as f64;
        prop_assert!((bytes - want).abs() <= 1e-9 * want);
    }
}
