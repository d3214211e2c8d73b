use std::collections::BTreeMap;

use super::{
    tb_id, AdderRole, BufferName, Endpoint, Instance, InstanceKind, M20kConfig, Net, Netlist, Pipeline, TbMode,
    CONTROL_PORTS,
};
use crate::stratix::{buffer_partitioning, StratixError, StratixGeometry, TbParams, ENGINES};
use crate::GemmDims;

const ROWS_PER_BLOCK: u64 = 512;
const CONTROL: &str = "ctrl";

/// Bits needed to address `depth` words.
pub(crate) fn addr_bits(depth: u64) -> u64 {
    (u64::BITS - depth.saturating_sub(1).leading_zeros()).max(1) as u64
}

pub(crate) fn config_for(buffer: BufferName) -> M20kConfig {
    match buffer {
        BufferName::A | BufferName::B => M20kConfig::D512W40,
        BufferName::C => M20kConfig::D512W32,
    }
}

/// (row slices, width slices) of one partition.
pub(crate) fn slices(buffer: BufferName, depth: u64) -> (u64, u64) {
    let cfg = config_for(buffer);
    (depth.div_ceil(ROWS_PER_BLOCK), buffer.width() / cfg.width())
}

pub(crate) fn m20k_id(buffer: BufferName, part: u64, row: u64, w: u64) -> String {
    let b = format!("{buffer:?}").to_lowercase();
    format!("m20k_{b}_p{part}_r{row}_w{w}")
}

struct Builder {
    instances: Vec<Instance>,
    nets: Vec<Net>,
}

impl Builder {
    fn inst(&mut self, id: String, kind: InstanceKind) -> String {
        self.instances.push(Instance { id: id.clone(), kind });
        id
    }

    fn net(&mut self, name: String, width: u64, driver: Endpoint, sinks: Vec<Endpoint>) {
        self.nets.push(Net { name, width, drivers: vec![driver], sinks });
    }

    /// Drives `sinks` from `driver`, through `stages` registers when asked.
    fn piped(&mut self, name: &str, width: u64, driver: Endpoint, stages: u64, sinks: Vec<Endpoint>) {
        let mut src = driver;
        let mut net_name = name.to_string();
        for s in 0..stages {
            let reg = self.inst(format!("preg_{name}_s{s}"), InstanceKind::PipelineReg { width, stage: s });
            self.net(net_name, width, src, vec![Endpoint::new(&reg, "d")]);
            src = Endpoint::new(reg, "q");
            net_name = format!("{name}_s{s}");
        }
        self.net(net_name, width, src, sinks);
    }
}

pub fn generate(params: &TbParams, native: GemmDims, pipeline: Pipeline) -> Result<Netlist, StratixError> {
    params.validate()?;
    let geo = buffer_partitioning(params, native)?;
    let TbParams { l_a, e_k, e_n, e_m } = *params;
    let mut b = Builder { instances: Vec::new(), nets: Vec::new() };
    let arrays = || (0..e_m).flat_map(move |e| (0..e_n).flat_map(move |g| (0..e_k).map(move |j| (e, g, j))));

    for (e, g, j) in arrays() {
        for p in 0..l_a {
            let mode = if p == 0 { TbMode::LoadPort } else { TbMode::Compute };
            b.inst(tb_id(e, g, j, p), InstanceKind::TensorBlock { mode });
        }
    }
    for buffer in [BufferName::A, BufferName::B, BufferName::C] {
        let (parts, depth) = part_depth(&geo, buffer);
        let (rows, widths) = slices(buffer, depth);
        for part in 0..parts {
            for r in 0..rows {
                for w in 0..widths {
                    let kind = InstanceKind::M20k { config: config_for(buffer), buffer, partition: part };
                    b.inst(m20k_id(buffer, part, r, w), kind);
                }
            }
        }
    }

    // A buffer partition e·e_k + j feeds the loading port of array j in every group of N-block e
    let (a_rows, a_widths) = slices(BufferName::A, geo.a_depth);
    for e in 0..e_m {
        for j in 0..e_k {
            let part = e * e_k + j;
            for r in 0..a_rows {
                for w in 0..a_widths {
                    let sinks = (0..e_n).map(|g| Endpoint::new(tb_id(e, g, j, 0), format!("data_in_w{w}_r{r}"))).collect();
                    let id = m20k_id(BufferName::A, part, r, w);
                    b.net(format!("a_q_p{part}_r{r}_w{w}"), 40, Endpoint::new(id, "q"), sinks);
                }
            }
        }
    }

    // B partition (g·e_k + j)·(l_a−1) + p−1 is broadcast to block p of array j of group g in every N-block
    let (b_rows, b_widths) = slices(BufferName::B, geo.b_depth);
    for g in 0..e_n {
        for j in 0..e_k {
            for p in 1..l_a {
                let part = (g * e_k + j) * (l_a - 1) + p - 1;
                let tbs: Vec<String> = (0..e_m).map(|e| tb_id(e, g, j, p)).collect();
                if pipeline.data_stages == 0 {
                    for r in 0..b_rows {
                        for w in 0..b_widths {
                            let sinks = tbs.iter().map(|t| Endpoint::new(t, format!("b_in_w{w}_r{r}"))).collect();
                            let id = m20k_id(BufferName::B, part, r, w);
                            b.net(format!("b_q_p{part}_r{r}_w{w}"), 40, Endpoint::new(id, "q"), sinks);
                        }
                    }
                } else {
                    let first = format!("preg_b_p{part}_s0");
                    for r in 0..b_rows {
                        for w in 0..b_widths {
                            let id = m20k_id(BufferName::B, part, r, w);
                            let sink = Endpoint::new(&first, format!("d_w{w}_r{r}"));
                            b.net(format!("b_q_p{part}_r{r}_w{w}"), 40, Endpoint::new(id, "q"), vec![sink]);
                        }
                    }
                    let mut src = Endpoint::new(b.inst(first, InstanceKind::PipelineReg { width: 80, stage: 0 }), "q");
                    for s in 1..pipeline.data_stages {
                        let reg = b.inst(format!("preg_b_p{part}_s{s}"), InstanceKind::PipelineReg { width: 80, stage: s });
                        b.net(format!("b_p{part}_s{}", s - 1), 80, src, vec![Endpoint::new(&reg, "d")]);
                        src = Endpoint::new(reg, "q");
                    }
                    let sinks = tbs.iter().map(|t| Endpoint::new(t, "b_in")).collect();
                    b.net(format!("b_p{part}_s{}", pipeline.data_stages - 1), 80, src, sinks);
                }
            }
        }
    }

    for (e, g, j) in arrays() {
        let tag = format!("e{e}_n{g}_k{j}");
        for p in 0..l_a - 1 {
            let from = Endpoint::new(tb_id(e, g, j, p), "cascade_data_out");
            let to = Endpoint::new(tb_id(e, g, j, p + 1), "cascade_data_in");
            b.net(format!("casc_{tag}_p{p}"), 80, from, vec![to]);
        }
        for p in 1..l_a - 1 {
            let from = Endpoint::new(tb_id(e, g, j, p), "cascade_acc_out");
            let to = Endpoint::new(tb_id(e, g, j, p + 1), "cascade_acc_in");
            b.net(format!("acc_{tag}_p{p}"), 32 * ENGINES, from, vec![to]);
        }
    }

    let (c_rows, _) = slices(BufferName::C, geo.c_depth);
    for e in 0..e_m {
        for g in 0..e_n {
            for r in 0..ENGINES {
                let mut level: Vec<(String, Endpoint)> = (0..e_k)
                    .map(|j| (format!("out_e{e}_n{g}_k{j}_r{r}"), Endpoint::new(tb_id(e, g, j, l_a - 1), format!("data_out{r}"))))
                    .collect();
                let mut depth = 0;
                while level.len() > 1 {
                    let mut next = Vec::with_capacity(level.len().div_ceil(2));
                    for (i, pair) in level.chunks(2).enumerate() {
                        if let [x, y] = pair {
                            let add = b.inst(
                                format!("add_e{e}_n{g}_r{r}_l{depth}_i{i}"),
                                InstanceKind::SoftAdder { width: 32, role: AdderRole::Tree },
                            );
                            b.net(x.0.clone(), 32, x.1.clone(), vec![Endpoint::new(&add, "a")]);
                            b.net(y.0.clone(), 32, y.1.clone(), vec![Endpoint::new(&add, "b")]);
                            next.push((format!("sum_e{e}_n{g}_r{r}_l{depth}_i{i}"), Endpoint::new(add, "y")));
                        } else {
                            next.push(pair[0].clone());
                        }
                    }
                    level = next;
                    depth += 1;
                }
                let acc = b.inst(
                    format!("acc_e{e}_n{g}_r{r}"),
                    InstanceKind::SoftAdder { width: 32, role: AdderRole::Accumulator },
                );
                let (name, src) = level.pop().expect("e_k >= 1");
                b.net(name, 32, src, vec![Endpoint::new(&acc, "in")]);

                // two C partitions per output row
                let parts = [0, 1].map(|h| ((e * e_n + g) * ENGINES + r) * 2 + h);
                let writes = parts
                    .iter()
                    .flat_map(|&part| (0..c_rows).map(move |row| Endpoint::new(m20k_id(BufferName::C, part, row, 0), "d")))
                    .collect();
                b.net(format!("c_d_e{e}_n{g}_r{r}"), 32, Endpoint::new(&acc, "y"), writes);
                for (h, &part) in parts.iter().enumerate() {
                    for row in 0..c_rows {
                        let sink = Endpoint::new(&acc, format!("c_in_h{h}_r{row}"));
                        b.net(format!("c_q_p{part}_r{row}"), 32, Endpoint::new(m20k_id(BufferName::C, part, row, 0), "q"), vec![sink]);
                    }
                }
            }
        }
    }

    for buffer in [BufferName::A, BufferName::B, BufferName::C] {
        let (parts, depth) = part_depth(&geo, buffer);
        let (rows, widths) = slices(buffer, depth);
        let mut sinks = Vec::new();
        for part in 0..parts {
            for r in 0..rows {
                for w in 0..widths {
                    sinks.push(Endpoint::new(m20k_id(buffer, part, r, w), "addr"));
                }
            }
        }
        let port = format!("addr_{}", format!("{buffer:?}").to_lowercase());
        b.piped(&port, addr_bits(depth), Endpoint::new(CONTROL, &port), pipeline.addr_stages, sinks);
    }
    let compute: Vec<Endpoint> =
        arrays().flat_map(|(e, g, j)| (1..l_a).map(move |p| Endpoint::new(tb_id(e, g, j, p), "bank_sel"))).collect();
    b.net("bank_sel".into(), 1, Endpoint::new(CONTROL, "bank_sel"), compute);
    let ports: Vec<Endpoint> = arrays().map(|(e, g, j)| Endpoint::new(tb_id(e, g, j, 0), "load_en")).collect();
    b.net("load_en".into(), 1, Endpoint::new(CONTROL, "load_en"), ports);
    b.inst(CONTROL.into(), InstanceKind::ControlStub { ports: CONTROL_PORTS.map(String::from).to_vec() });

    let attributes = BTreeMap::from([
        ("params".to_string(), params.to_string()),
        ("native".to_string(), native.to_string()),
        ("addr_stages".to_string(), pipeline.addr_stages.to_string()),
        ("data_stages".to_string(), pipeline.data_stages.to_string()),
    ]);
    Ok(Netlist { name: params.design_name(), instances: b.instances, nets: b.nets, attributes })
}

pub(crate) fn part_depth(geo: &StratixGeometry, buffer: BufferName) -> (u64, u64) {
    match buffer {
        BufferName::A => (geo.a_part, geo.a_depth),
        BufferName::B => (geo.b_part, geo.b_depth),
        BufferName::C => (geo.c_part, geo.c_depth),
    }
}
