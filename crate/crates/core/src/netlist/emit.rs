use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{InstanceKind, Netlist};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    HdlText,
}

pub fn emit(netlist: &Netlist, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(netlist).expect("netlists serialize");
            s.push('\n');
            s
        }
        Format::HdlText => hdl_text(netlist),
    }
}

fn parameters(kind: &InstanceKind) -> Vec<(&'static str, String)> {
    match kind {
        InstanceKind::TensorBlock { mode } => {
            vec![("MODE", format!("\"{}\"", serde_json::to_value(mode).unwrap().as_str().unwrap()))]
        }
        InstanceKind::M20k { config, buffer, partition } => vec![
            ("CONFIG", format!("\"{config}\"")),
            ("BUFFER", format!("\"{buffer:?}\"")),
            ("PARTITION", partition.to_string()),
        ],
        InstanceKind::SoftAdder { width, role } => {
            vec![("WIDTH", width.to_string()), ("ROLE", format!("\"{}\"", serde_json::to_value(role).unwrap().as_str().unwrap()))]
        }
        InstanceKind::PipelineReg { width, stage } => vec![("WIDTH", width.to_string()), ("STAGE", stage.to_string())],
        InstanceKind::ControlStub { .. } => Vec::new(),
    }
}

fn hdl_text(netlist: &Netlist) -> String {
    let mut out = String::new();
    let attrs: Vec<String> = netlist.attributes.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(out, "// {}", attrs.join(" "));
    let _ = writeln!(out, "module {};", netlist.name);
    for net in &netlist.nets {
        let _ = writeln!(out, "  wire [{}:0] {};", net.width - 1, net.name);
    }
    let mut conns: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
    for net in &netlist.nets {
        for ep in net.drivers.iter().chain(&net.sinks) {
            conns.entry(&ep.instance).or_default().push((&ep.port, &net.name));
        }
    }
    for inst in &netlist.instances {
        let params = parameters(&inst.kind);
        let mut line = format!("  {}", inst.kind.primitive());
        if !params.is_empty() {
            let p: Vec<String> = params.iter().map(|(k, v)| format!(".{k}({v})")).collect();
            let _ = write!(line, " #({})", p.join(", "));
        }
        let mut ports = conns.remove(inst.id.as_str()).unwrap_or_default();
        ports.sort();
        let c: Vec<String> = ports.iter().map(|(p, n)| format!(".{p}({n})")).collect();
        let _ = writeln!(out, "{line} {} ({});", inst.id, c.join(", "));
    }
    out.push_str("endmodule\n");
    out
}
