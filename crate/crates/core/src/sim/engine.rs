use std::collections::VecDeque;

use super::{ArrayId, Event, Matrix, SimError, SimResult, TbState, TraceRecord, MAX_VOLUME};
use crate::stratix::{TbParams, DOT_LENGTH, ENGINES};
use crate::GemmDims;

const LOAD_CYCLES_PER_TB: u64 = 3;
const CASCADE_CYCLES_PER_TB: u64 = 2;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimOptions {
    pub trace: bool,
}

pub fn simulate(params: &TbParams, a: &Matrix<i8>, b: &Matrix<i8>) -> Result<SimResult, SimError> {
    simulate_with(params, a, b, SimOptions::default())
}

/// Cascade output of one block for one step.
#[derive(Clone, Copy)]
struct Partial {
    step: u64,
    values: [i32; 3],
}

struct Block {
    state: TbState,
    /// Tile held by each bank and how many of its three words have arrived.
    bank_tile: [Option<u64>; 2],
    bank_words: [u8; 2],
    /// Steps processed so far.
    done: u64,
    /// Last few outputs, indexed by step % 4.
    out: [Option<Partial>; 4],
}

struct TreeItem {
    step: u64,
    entered: u64,
    values: Vec<[i32; 3]>,
}

struct Machine<'a> {
    p: TbParams,
    a: &'a Matrix<i8>,
    b: &'a Matrix<i8>,
    d_m: u64,
    d_k: u64,
    tiles_k: u64,
    tiles: u64,
    t_n: u64,
    stream_start: u64,
    blocks: Vec<Block>,
    trees: Vec<VecDeque<TreeItem>>,
    c: Matrix<i32>,
    trace: Option<Vec<TraceRecord>>,
}

pub fn simulate_with(params: &TbParams, a: &Matrix<i8>, b: &Matrix<i8>, opts: SimOptions) -> Result<SimResult, SimError> {
    if a.cols() != b.rows() {
        return Err(SimError::Shape { a: (a.rows(), a.cols()), b: (b.rows(), b.cols()) });
    }
    params.validate()?;
    let dims = GemmDims::new(a.rows() as u64, a.cols() as u64, b.cols() as u64);
    let volume = dims.volume();
    if volume > MAX_VOLUME {
        return Err(SimError::TooLarge { volume });
    }
    params.check_dims(dims)?;
    let mut m = Machine::new(*params, a, b, dims);
    m.trace = opts.trace.then(Vec::new);
    let cycles = m.run()?;
    Ok(SimResult { c: m.c, cycles, trace: m.trace.map(|mut t| {
        t.sort_by_key(|r| r.cycle);
        t
    }) })
}

impl<'a> Machine<'a> {
    fn new(p: TbParams, a: &'a Matrix<i8>, b: &'a Matrix<i8>, dims: GemmDims) -> Self {
        let cd = p.compute_dims();
        let tiles_k = dims.k / cd.d_k;
        let tiles = (dims.m / cd.d_m) * tiles_k;
        let mut blocks = Vec::with_capacity(p.tensor_blocks() as usize);
        for _ in 0..p.e_m * p.e_n {
            for j in 0..p.e_k {
                for t in 0..p.l_a {
                    blocks.push(Block {
                        state: TbState::new(j, t),
                        bank_tile: [None; 2],
                        bank_words: [0; 2],
                        done: 0,
                        out: [None; 4],
                    });
                }
            }
        }
        Self {
            p,
            a,
            b,
            d_m: cd.d_m,
            d_k: cd.d_k,
            tiles_k,
            tiles,
            t_n: dims.n / p.e_n,
            // the loading port plus three cycles for every compute block
            stream_start: LOAD_CYCLES_PER_TB * p.l_a,
            blocks,
            trees: (0..p.e_m * p.e_n).map(|_| VecDeque::new()).collect(),
            c: Matrix::zeros(a.rows(), b.cols()),
            trace: None,
        }
    }

    fn block_index(&self, id: ArrayId, tb: u64) -> usize {
        (((id.n_block * self.p.e_n + id.group) * self.p.e_k + id.array) * self.p.l_a + tb) as usize
    }

    fn arrays(&self) -> impl Iterator<Item = ArrayId> {
        let p = self.p;
        (0..p.e_m).flat_map(move |n_block| {
            (0..p.e_n).flat_map(move |group| (0..p.e_k).map(move |array| ArrayId { n_block, group, array }))
        })
    }

    fn emit(&mut self, cycle: u64, event: Event) {
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceRecord { cycle, event });
        }
    }

    /// First row and first K index of the A slice held by a block for a tile.
    fn slice_origin(&self, id: ArrayId, tb: u64, tile: u64) -> (u64, u64) {
        let (mi, ki) = (tile / self.tiles_k, tile % self.tiles_k);
        let row = mi * self.d_m + ENGINES * id.n_block;
        let k = ki * self.d_k + (id.array * (self.p.l_a - 1) + tb - 1) * DOT_LENGTH;
        (row, k)
    }

    /// Cycle at which the loading port starts pushing A words for `tile`.
    fn load_start(&self, tile: u64) -> u64 {
        if tile == 0 {
            0
        } else {
            self.stream_start + (tile - 1) * self.t_n
        }
    }

    fn run(&mut self) -> Result<u64, SimError> {
        let total_steps = self.tiles * self.t_n;
        let groups = (self.p.e_m * self.p.e_n) as usize;
        let expected_updates = total_steps * groups as u64;
        let mut updates = 0u64;
        let mut last_write = 0u64;
        let mut cycle = 0u64;
        while updates < expected_updates {
            self.load(cycle)?;
            self.compute(cycle, total_steps)?;
            let written = self.reduce(cycle);
            if written > 0 {
                updates += written;
                last_write = cycle;
            }
            cycle += 1;
        }
        Ok(last_write + 1)
    }

    fn load(&mut self, cycle: u64) -> Result<(), SimError> {
        let word_count = LOAD_CYCLES_PER_TB * self.p.l_a;
        let tile = if cycle < self.stream_start {
            0
        } else {
            (cycle - self.stream_start) / self.t_n + 1
        };
        if tile >= self.tiles {
            return Ok(());
        }
        let w = cycle - self.load_start(tile);
        if w >= word_count {
            return Ok(());
        }
        let (tb, reg) = (w / LOAD_CYCLES_PER_TB, (w % LOAD_CYCLES_PER_TB) as u8);
        if tb == 0 {
            // words addressed to the loading port itself carry nothing
            return Ok(());
        }
        let bank = (tile % 2) as u8;
        let ids: Vec<ArrayId> = self.arrays().collect();
        for id in ids {
            let (row0, k0) = self.slice_origin(id, tb, tile);
            let row = row0 + reg as u64;
            let mut word = [0i8; 10];
            for (i, v) in word.iter_mut().enumerate() {
                *v = self.a.get(row as usize, (k0 + i as u64) as usize);
            }
            let idx = self.block_index(id, tb);
            let blk = &mut self.blocks[idx];
            let b = bank as usize;
            if blk.bank_tile[b] != Some(tile) {
                if let Some(old) = blk.bank_tile[b] {
                    // the previous occupant must be fully consumed
                    if blk.done < (old + 1) * self.t_n {
                        return Err(SimError::Hazard {
                            cycle,
                            detail: format!("bank {bank} of block {tb} in {id:?} overwritten while tile {old} is in use"),
                        });
                    }
                }
                blk.bank_tile[b] = Some(tile);
                blk.bank_words[b] = 0;
            }
            blk.state.bank_mut(bank)[reg as usize] = word;
            blk.bank_words[b] += 1;
            self.emit(cycle, Event::LoadWord { array: id, tb, bank, register: reg, tile, row, k_start: k0 });
        }
        Ok(())
    }

    fn compute(&mut self, cycle: u64, total_steps: u64) -> Result<(), SimError> {
        let ids: Vec<ArrayId> = self.arrays().collect();
        for id in ids {
            for tb in 1..self.p.l_a {
                let offset = self.stream_start + CASCADE_CYCLES_PER_TB * (tb - 1);
                if cycle < offset || cycle - offset >= total_steps {
                    continue;
                }
                let step = cycle - offset;
                self.fire(cycle, id, tb, step)?;
            }
        }
        Ok(())
    }

    fn fire(&mut self, cycle: u64, id: ArrayId, tb: u64, step: u64) -> Result<(), SimError> {
        let tile = step / self.t_n;
        let column = (step % self.t_n) * self.p.e_n + id.group;
        let bank = (tile % 2) as u8;
        let idx = self.block_index(id, tb);
        let (_, k0) = self.slice_origin(id, tb, tile);
        {
            let blk = &self.blocks[idx];
            if blk.bank_tile[bank as usize] != Some(tile) || blk.bank_words[bank as usize] != ENGINES as u8 {
                return Err(SimError::Hazard {
                    cycle,
                    detail: format!("block {tb} in {id:?} has not finished loading tile {tile}"),
                });
            }
        }
        let cascade_in = if tb == 1 {
            [0; 3]
        } else {
            match self.blocks[idx - 1].out[(step % 4) as usize] {
                Some(Partial { step: s, values }) if s == step => values,
                _ => {
                    return Err(SimError::Hazard {
                        cycle,
                        detail: format!("cascade input for step {step} missing at block {tb} in {id:?}"),
                    })
                }
            }
        };
        let mut bvec = [0i32; 10];
        for (i, v) in bvec.iter_mut().enumerate() {
            *v = self.b.get((k0 + i as u64) as usize, column as usize) as i32;
        }
        let blk = &mut self.blocks[idx];
        blk.state.active_bank = bank;
        let regs = *blk.state.bank(bank);
        let mut values = [0i32; 3];
        for (e, v) in values.iter_mut().enumerate() {
            // ten 8x8 products fit in 32 bits; only the cascade add can wrap
            let dot: i32 = regs[e].iter().zip(&bvec).map(|(&x, &y)| x as i32 * y).sum();
            *v = cascade_in[e].wrapping_add(dot);
        }
        blk.out[(step % 4) as usize] = Some(Partial { step, values });
        blk.done += 1;
        if tb == self.p.l_a - 1 {
            let ready = cycle + CASCADE_CYCLES_PER_TB;
            let (row0, ks) = self.slice_origin(id, 1, tile);
            let rows = [row0, row0 + 1, row0 + 2];
            self.emit(ready, Event::ArrayOutput {
                array: id,
                step,
                column,
                rows,
                k_start: ks,
                k_len: (self.p.l_a - 1) * DOT_LENGTH,
                values,
            });
            let g = (id.n_block * self.p.e_n + id.group) as usize;
            let queue = &mut self.trees[g];
            match queue.back_mut() {
                Some(item) if item.step == step => item.values.push(values),
                _ => queue.push_back(TreeItem { step, entered: ready, values: vec![values] }),
            }
        }
        Ok(())
    }

    /// Advances every adder tree by one level and writes finished sums into C.
    /// Returns the number of C column updates made this cycle.
    fn reduce(&mut self, cycle: u64) -> u64 {
        let mut written = 0;
        let depth = tree_depth(self.p.e_k);
        for g in 0..self.trees.len() {
            let (n_block, group) = (g as u64 / self.p.e_n, g as u64 % self.p.e_n);
            for item in self.trees[g].iter_mut() {
                if item.entered < cycle && item.values.len() > 1 {
                    item.values = item
                        .values
                        .chunks(2)
                        .map(|pair| match pair {
                            [x, y] => [x[0].wrapping_add(y[0]), x[1].wrapping_add(y[1]), x[2].wrapping_add(y[2])],
                            [x] => *x,
                            _ => unreachable!(),
                        })
                        .collect();
                }
            }
            while self.trees[g].front().is_some_and(|f| f.entered + depth == cycle) {
                let item = self.trees[g].pop_front().expect("front exists");
                debug_assert_eq!(item.values.len(), 1);
                let sum = item.values[0];
                let tile = item.step / self.t_n;
                let column = (item.step % self.t_n) * self.p.e_n + group;
                let row0 = (tile / self.tiles_k) * self.d_m + ENGINES * n_block;
                let rows = [row0, row0 + 1, row0 + 2];
                for (e, &r) in rows.iter().enumerate() {
                    let cur = self.c.get(r as usize, column as usize);
                    self.c.set(r as usize, column as usize, cur.wrapping_add(sum[e]));
                }
                self.emit(cycle, Event::CUpdate { n_block, group, step: item.step, column, rows, sum });
                written += 1;
            }
        }
        written
    }
}

/// Levels of a balanced tree of two-input adders over `n` leaves.
fn tree_depth(n: u64) -> u64 {
    let mut depth = 0;
    let mut width = n;
    while width > 1 {
        width = width.div_ceil(2);
        depth += 1;
    }
    depth
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::sim::reference_gemm;
    use crate::stratix::{latency, StratixError};

    fn random(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<i8> {
        Matrix::from_fn(rows, cols, |_, _| rng.gen())
    }

    fn params(s: &str) -> TbParams {
        s.parse().unwrap()
    }

    #[test]
    fn single_array_cycles() {
        let p = params("4x1x1x1");
        let a = Matrix::zeros(3, 30);
        let b = Matrix::zeros(30, 12);
        let r = simulate(&p, &a, &b).unwrap();
        assert_eq!(r.cycles, 30);
        assert!(r.c.data().iter().all(|&v| v == 0));
    }

    #[test]
    fn matches_reference_and_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (cfg, m, k, n) in [("4x2x2x3", 9, 120, 24), ("2x3x1x1", 6, 60, 6), ("3x1x2x2", 12, 40, 36), ("2x4x3x1", 3, 80, 18)] {
            let p = params(cfg);
            let a = random(&mut rng, m, k);
            let b = random(&mut rng, k, n);
            let r = simulate(&p, &a, &b).unwrap();
            assert_eq!(r.c, reference_gemm(&a, &b).unwrap(), "{cfg}");
            let t = latency(&p, GemmDims::new(m as u64, k as u64, n as u64)).unwrap();
            assert_eq!(r.cycles, t.t_total, "{cfg}");
        }
    }

    #[test]
    fn array_outputs_are_slice_dot_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = params("3x2x2x2");
        let (a, b) = (random(&mut rng, 12, 80), random(&mut rng, 80, 36));
        let r = simulate_with(&p, &a, &b, SimOptions { trace: true }).unwrap();
        let mut seen = 0;
        for rec in r.trace.as_ref().unwrap() {
            if let Event::ArrayOutput { column, rows, k_start, k_len, values, .. } = rec.event {
                for (e, &row) in rows.iter().enumerate() {
                    let want: i32 = (k_start..k_start + k_len)
                        .map(|kk| a.get(row as usize, kk as usize) as i32 * b.get(kk as usize, column as usize) as i32)
                        .sum();
                    assert_eq!(values[e], want);
                }
                seen += 1;
            }
        }
        // one output per array per step: 4 tiles of 18 steps
        assert_eq!(seen, p.arrays() * 4 * 18);
    }

    #[test]
    fn trace_is_deterministic_and_ordered() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = params("2x2x1x1");
        let (a, b) = (random(&mut rng, 6, 40), random(&mut rng, 40, 6));
        let opts = SimOptions { trace: true };
        let r1 = simulate_with(&p, &a, &b, opts).unwrap();
        let r2 = simulate_with(&p, &a, &b, opts).unwrap();
        assert_eq!(r1.trace_jsonl(), r2.trace_jsonl());
        let t = r1.trace.unwrap();
        assert!(t.windows(2).all(|w| w[0].cycle <= w[1].cycle));
        assert!(t.iter().all(|r| r.cycle < r1.cycles));
        assert!(simulate(&p, &a, &b).unwrap().trace.is_none());
    }

    #[test]
    fn constraint_errors() {
        let p = params("4x1x1x1");
        // n below the load-hiding minimum of 12
        let err = simulate(&p, &Matrix::zeros(3, 30), &Matrix::zeros(30, 9)).unwrap_err();
        assert!(matches!(err, SimError::Constraint(StratixError::NTooSmall { n: 9, min: 12 })));
        let err = simulate(&p, &Matrix::zeros(4, 30), &Matrix::zeros(30, 12)).unwrap_err();
        assert!(matches!(err, SimError::Constraint(StratixError::NotMultiple { .. })));
        let err = simulate(&p, &Matrix::zeros(3, 30), &Matrix::zeros(20, 12)).unwrap_err();
        assert!(matches!(err, SimError::Shape { .. }));
    }

    #[test]
    fn scale_guard() {
        let p = params("2x1x1x1");
        // k = 1 keeps the operands small while m·k·n passes 2^32
        let a = Matrix::zeros(1 << 16, 1);
        let b = Matrix::zeros(1, (1 << 16) + 1);
        assert!(matches!(simulate(&p, &a, &b), Err(SimError::TooLarge { .. })));
        let b = Matrix::zeros(1, 1 << 16);
        assert!(matches!(simulate(&p, &a, &b), Err(SimError::Constraint(_))));
    }

    #[test]
    fn tree_depths() {
        assert_eq!([1, 2, 3, 4, 5, 8, 9, 16].map(tree_depth), [0, 1, 2, 2, 3, 3, 4, 4]);
    }
}
