//! Result tables and the number formatting shared by every report.
//!
//! All rounding for display happens here, so a value printed by the CLI is
//! always the formatted output of the model function that produced it.

use std::fmt::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::{StratixDevice, VersalDevice};
use crate::stratix::{LatencyBreakdown, StratixDesign};
use crate::versal::{VersalDesign, VersalEvaluation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Md,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "md" | "markdown" => Ok(Self::Md),
            _ => Err(format!("unknown format {s:?} (expected csv, json or md)")),
        }
    }
}

pub fn tops(v: f64) -> String {
    format!("{v:.2}")
}

pub fn gibs(v: f64) -> String {
    format!("{v:.1}")
}

pub fn tops_per_watt(v: f64) -> String {
    format!("{v:.3}")
}

pub fn watts(v: f64) -> String {
    format!("{v:.1}")
}

/// A fraction as a percentage with one decimal.
pub fn percent(fraction: f64) -> String {
    format!("{:.1}%", fraction * 100.0)
}

pub fn mhz(hz: f64) -> String {
    format!("{:.0}", hz / 1e6)
}

/// `416 (43%)`.
pub fn resource(used: u64, total: u64) -> String {
    if total == 0 {
        return used.to_string();
    }
    format!("{used} ({:.0}%)", used as f64 * 100.0 / total as f64)
}

fn optional(v: Option<f64>, f: fn(f64) -> String) -> String {
    v.map(f).unwrap_or_else(|| "-".to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Cell by header name.
    pub fn cell(&self, row: usize, header: &str) -> Option<&str> {
        let col = self.headers.iter().position(|h| h == header)?;
        self.rows.get(row).map(|r| r[col].as_str())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
            Format::Md => self.markdown(),
        }
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    fn json(&self) -> String {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|r| self.headers.iter().cloned().zip(r.iter().map(|c| c.clone().into())).collect())
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("strings serialize");
        s.push('\n');
        s
    }

    fn markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "| {} |", self.headers.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(self.headers.len()));
        for r in &self.rows {
            let _ = writeln!(out, "| {} |", r.join(" | "));
        }
        out
    }
}

/// Ranked solver output.
pub fn versal_solutions(designs: &[VersalDesign], device: &VersalDevice) -> Table {
    let mut t = Table::new(&["Rank", "UxVxW (P.)", "Mapping", "Compute GEMM size", "Native buffer size", "BRAMs", "URAMs", "RAM Eff."]);
    for (i, d) in designs.iter().enumerate() {
        t.push(vec![
            (i + 1).to_string(),
            d.label(),
            d.mapping.to_string(),
            d.compute_dims.to_string(),
            d.native_dims.to_string(),
            resource(d.brams_used, device.bram36_total),
            resource(d.urams_used, device.uram_total),
            percent(crate::versal::ram_efficiency(d)),
        ]);
    }
    t
}

pub fn versal_evaluations(evals: &[VersalEvaluation], device: &VersalDevice) -> Table {
    let mut t = Table::new(&[
        "UxVxW (P.)",
        "Compute GEMM size",
        "Native buffer size",
        "BRAMs",
        "URAMs",
        "AIE cores",
        "PL Fq. (MHz)",
        "Thrpt. (TOPs)",
        "Power (W)",
        "En. Eff. (TOPs/W)",
        "RAM Eff.",
        "BW (GiB/s)",
    ]);
    for e in evals {
        let d = &e.design;
        t.push(vec![
            d.label(),
            d.compute_dims.to_string(),
            d.native_dims.to_string(),
            resource(d.brams_used, device.bram36_total),
            resource(d.urams_used, device.uram_total),
            resource(e.aie_cores, device.aie_cores),
            mhz(e.pl_freq),
            tops(e.throughput),
            optional(e.power, watts),
            optional(e.energy_efficiency, tops_per_watt),
            percent(e.ram_efficiency),
            gibs(e.bandwidth),
        ]);
    }
    t
}

pub fn stratix_designs(designs: &[StratixDesign], device: &StratixDevice) -> Table {
    let mut t = Table::new(&[
        "TB config.",
        "Compute GEMM size",
        "Native buffer size",
        "BRAMs",
        "TBs",
        "Freq. (MHz)",
        "Thrpt. (TOPs)",
        "Power (W)",
        "En. Eff. (TOPs/W)",
        "RAM Eff.",
        "BW (GiB/s)",
    ]);
    for d in designs {
        t.push(vec![
            d.params.to_string(),
            d.compute.to_string(),
            d.native.to_string(),
            resource(d.m20ks_used, device.m20k_total),
            resource(d.tbs_used, device.tb_total),
            mhz(d.freq),
            tops(d.throughput),
            optional(d.power, watts),
            optional(d.energy_efficiency, tops_per_watt),
            percent(d.ram_efficiency),
            gibs(d.bandwidth),
        ]);
    }
    t
}

pub fn latency_table(l: &LatencyBreakdown, throughput: f64) -> Table {
    let mut t = Table::new(&["t_load", "t_prop", "t_adder", "tiles", "t_n", "t_total", "Thrpt. (TOPs)"]);
    t.push(vec![
        l.t_load.to_string(),
        l.t_prop.to_string(),
        l.t_adder.to_string(),
        l.tiles.to_string(),
        l.t_n.to_string(),
        l.t_total.to_string(),
        tops(throughput),
    ]);
    t
}

/// Zero-padding sweep: one row per problem size.
pub fn sweep_table(label: &str, native_peak: f64, points: &[(u64, f64)]) -> Table {
    let mut t = Table::new(&["Design", "s", "Thrpt. (TOPs)", "Retained"]);
    for &(s, eff) in points {
        t.push(vec![label.to_string(), s.to_string(), tops(eff), percent(eff / native_peak)]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formats() {
        assert_eq!(tops(67.995), "68.00");
        assert_eq!(gibs(101.44), "101.4");
        assert_eq!(percent(0.8889), "88.9%");
        assert_eq!(tops_per_watt(66.94 / 52.5), "1.275");
        assert_eq!(resource(416, 967), "416 (43%)");
        assert_eq!(resource(390, 400), "390 (98%)");
        assert_eq!(mhz(349e6), "349");
    }

    #[test]
    fn renderings() {
        let mut t = Table::new(&["a", "b,c"]);
        t.push(vec!["1".into(), "x y".into()]);
        assert_eq!(t.render(Format::Csv), "a,\"b,c\"\n1,x y\n");
        assert_eq!(t.render(Format::Md), "| a | b,c |\n|---|---|\n| 1 | x y |\n");
        let v: serde_json::Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(v[0]["b,c"], "x y");
        assert_eq!(t.cell(0, "a"), Some("1"));
        assert_eq!("CSV".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
    }
}
