use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{tb_id, AdderRole, InstanceKind, Netlist, TbMode};
use crate::stratix::{total_m20k, TbParams, ENGINES};
use crate::GemmDims;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    InstanceCount,
    DuplicateId,
    UnknownEndpoint,
    DriverCount,
    MultiplyDrivenSink,
    ChainLength,
    M20kConfig,
    Attribute,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, detail: impl Into<String>) {
        self.violations.push(Violation { kind, detail: detail.into() });
    }
}

pub fn check(netlist: &Netlist, params: &TbParams, native: GemmDims) -> CheckReport {
    let mut report = CheckReport::default();
    if params.validate().is_err() {
        report.push(ViolationKind::Attribute, format!("invalid parameters {params}"));
        return report;
    }
    let stage = |key: &str, report: &mut CheckReport| match netlist.attributes.get(key).map(|v| v.parse::<u64>()) {
        Some(Ok(v)) => Some(v),
        _ => {
            report.push(ViolationKind::Attribute, format!("attribute {key} missing or not a count"));
            None
        }
    };
    let addr_stages = stage("addr_stages", &mut report);
    let data_stages = stage("data_stages", &mut report);
    for (key, want) in [("params", params.to_string()), ("native", native.to_string())] {
        if netlist.attributes.get(key) != Some(&want) {
            report.push(ViolationKind::Attribute, format!("attribute {key} is {:?}, expected {want}", netlist.attributes.get(key)));
        }
    }

    let geo_parts = crate::stratix::buffer_partitioning(params, native).ok();
    let mut expected: Vec<(&str, u64, u64)> = vec![
        ("tensor_block", params.tensor_blocks(), netlist.tensor_blocks()),
        ("load_port tensor_block", params.arrays(), netlist.load_ports()),
        ("tree soft_adder", (params.e_k - 1) * ENGINES * params.e_n * params.e_m, netlist.adders(AdderRole::Tree)),
        ("accumulator soft_adder", ENGINES * params.e_n * params.e_m, netlist.adders(AdderRole::Accumulator)),
        ("control_stub", 1, netlist.count(|k| matches!(k, InstanceKind::ControlStub { .. }))),
    ];
    match total_m20k(params, native) {
        Ok(n) => expected.push(("m20k", n, netlist.m20ks())),
        Err(e) => report.push(ViolationKind::Attribute, format!("native size rejected: {e}")),
    }
    if let (Some(a), Some(d), Some(geo)) = (addr_stages, data_stages, geo_parts) {
        expected.push(("pipeline_reg", geo.b_part * d + 3 * a, netlist.pipeline_regs()));
    }
    for (what, want, got) in expected {
        if want != got {
            report.push(ViolationKind::InstanceCount, format!("{got} {what} instances, expected {want}"));
        }
    }

    let mut kinds: HashMap<&str, &InstanceKind> = HashMap::new();
    for inst in &netlist.instances {
        if kinds.insert(&inst.id, &inst.kind).is_some() {
            report.push(ViolationKind::DuplicateId, format!("instance id {} used twice", inst.id));
        }
        if let InstanceKind::M20k { config, buffer, .. } = inst.kind {
            if !config.suits(buffer.width()) {
                report.push(
                    ViolationKind::M20kConfig,
                    format!("{}: {config} cannot implement the {}-bit {buffer:?} buffer", inst.id, buffer.width()),
                );
            }
        }
    }

    let mut driven: HashSet<(&str, &str)> = HashSet::new();
    // (instance, output port) -> sink instances
    let mut fanout: HashMap<(&str, &str), Vec<(&str, &str)>> = HashMap::new();
    for net in &netlist.nets {
        if net.drivers.len() != 1 {
            report.push(ViolationKind::DriverCount, format!("net {} has {} drivers", net.name, net.drivers.len()));
        }
        for ep in net.drivers.iter().chain(&net.sinks) {
            if !kinds.contains_key(ep.instance.as_str()) {
                report.push(ViolationKind::UnknownEndpoint, format!("net {} touches unknown instance {}", net.name, ep.instance));
            }
        }
        for s in &net.sinks {
            if !driven.insert((&s.instance, &s.port)) {
                report.push(ViolationKind::MultiplyDrivenSink, format!("{s} is driven by more than one net"));
            }
        }
        for d in &net.drivers {
            fanout.entry((&d.instance, &d.port)).or_default().extend(net.sinks.iter().map(|s| (s.instance.as_str(), s.port.as_str())));
        }
    }

    for e in 0..params.e_m {
        for g in 0..params.e_n {
            for j in 0..params.e_k {
                let chains = [
                    ("cascade data", 0, "cascade_data_out", "cascade_data_in", params.l_a),
                    ("cascade accumulation", 1, "cascade_acc_out", "cascade_acc_in", params.l_a - 1),
                ];
                for (what, start, out, inp, want) in chains {
                    let len = chain_length(&fanout, &kinds, tb_id(e, g, j, start), out, inp);
                    if len != want {
                        report.push(
                            ViolationKind::ChainLength,
                            format!("{what} chain from {} has {len} blocks, expected {want}", tb_id(e, g, j, start)),
                        );
                    }
                }
            }
        }
    }
    report
}

/// Blocks reached by following `out -> inp` links from `start`, or 0 if the
/// walk branches or revisits a block.
fn chain_length(
    fanout: &HashMap<(&str, &str), Vec<(&str, &str)>>,
    kinds: &HashMap<&str, &InstanceKind>,
    start: String,
    out: &str,
    inp: &str,
) -> u64 {
    if !matches!(kinds.get(start.as_str()), Some(InstanceKind::TensorBlock { .. })) {
        return 0;
    }
    let mut seen = BTreeMap::new();
    let mut cur = start;
    loop {
        if seen.insert(cur.clone(), ()).is_some() {
            return 0;
        }
        let next: Vec<_> = fanout.get(&(cur.as_str(), out)).into_iter().flatten().filter(|(_, p)| *p == inp).collect();
        match next.as_slice() {
            [] => return seen.len() as u64,
            [(inst, _)] if matches!(kinds.get(inst), Some(InstanceKind::TensorBlock { mode: TbMode::Compute })) => {
                cur = inst.to_string();
            }
            _ => return 0,
        }
    }
}
