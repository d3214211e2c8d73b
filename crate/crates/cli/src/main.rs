mod args;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use args::{CatalogCmd, Cli, Command, EmitArg, NetlistCmd, SimCmd, StratixCmd, VersalCmd};
use gemmforge::netlist::{self, Pipeline};
use gemmforge::report::{self, Format, Table};
use gemmforge::sim::{self, Matrix, SimOptions};
use gemmforge::stratix::{self, Grid};
use gemmforge::versal::{self, AieCatalog, DesignPoints};
use gemmforge::DeviceCatalog;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn catalog(cli: &Cli) -> Result<DeviceCatalog> {
    match &cli.catalog {
        Some(p) => DeviceCatalog::load(p).with_context(|| format!("loading catalog {}", p.display())),
        None => Ok(DeviceCatalog::bundled()),
    }
}

fn aie_catalog(path: Option<&Path>) -> Result<AieCatalog> {
    match path {
        Some(p) => AieCatalog::load(p).with_context(|| format!("loading AIE solutions {}", p.display())),
        None => Ok(AieCatalog::bundled()),
    }
}

fn run(cli: &Cli) -> Result<String> {
    let format: Format = cli.format.into();
    match &cli.command {
        Command::Versal(cmd) => versal_cmd(cli, cmd, format),
        Command::Stratix(cmd) => stratix_cmd(cli, cmd, format),
        Command::Sim(cmd) => sim_cmd(cmd, format),
        Command::Netlist(cmd) => netlist_cmd(cmd, format),
        Command::Catalog(CatalogCmd::Validate) => {
            let cat = catalog(cli)?;
            cat.validate()?;
            Ok(format!(
                "catalog ok: {} Versal and {} Stratix devices\n",
                cat.versal_devices.len(),
                cat.stratix_devices.len()
            ))
        }
        Command::Catalog(CatalogCmd::Show) => Ok(catalog(cli)?.to_json()),
    }
}

fn versal_cmd(cli: &Cli, cmd: &VersalCmd, format: Format) -> Result<String> {
    let cat = catalog(cli)?;
    match cmd {
        VersalCmd::Solve { aie, top, hls_out } => {
            let device = cat.versal(&aie.device)?;
            let aies = aie_catalog(aie.aie_catalog.as_deref())?;
            let sol = aies.get(&aie.aie).with_context(|| format!("unknown AIE placement {:?}", aie.aie))?;
            let designs = versal::solve_uvw(sol, device, *top)?;
            if let Some(path) = hls_out {
                fs::write(path, versal::emit_hls_directives(&designs[0]))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(report::versal_solutions(&designs, device).render(format))
        }
        VersalCmd::Report { designs, aie_catalog: aies, device } => {
            let device = cat.versal(device)?;
            let aies = aie_catalog(aies.as_deref())?;
            let points = match designs {
                Some(p) => {
                    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    serde_json::from_str::<DesignPoints>(&text).with_context(|| format!("parsing {}", p.display()))?
                }
                None => DesignPoints::bundled(),
            };
            let evals = points
                .designs
                .iter()
                .map(|p| versal::evaluate(p, &aies, device).with_context(|| format!("{}x{}x{} ({})", p.u, p.v, p.w, p.placement)))
                .collect::<Result<Vec<_>>>()?;
            Ok(report::versal_evaluations(&evals, device).render(format))
        }
        VersalCmd::Sweep { aie, u, v, w, freq, sizes } => {
            let aies = aie_catalog(aie.aie_catalog.as_deref())?;
            let sol = aies.get(&aie.aie).with_context(|| format!("unknown AIE placement {:?}", aie.aie))?;
            let peak = sol.throughput_at(*freq)?;
            let compute = sol.compute_dims();
            let points = positive_sizes(sizes)?.into_iter().map(|s| (s, versal::scalability(peak, compute, s))).collect::<Vec<_>>();
            Ok(report::sweep_table(&format!("{u}x{v}x{w} ({})", sol.placement), peak, &points).render(format))
        }
    }
}

fn positive_sizes(sizes: &[u64]) -> Result<Vec<u64>> {
    if sizes.contains(&0) {
        bail!("sweep sizes must be at least 1");
    }
    Ok(sizes.to_vec())
}

fn stratix_cmd(cli: &Cli, cmd: &StratixCmd, format: Format) -> Result<String> {
    match cmd {
        StratixCmd::Solve { tb, budget, device } => {
            let cat = catalog(cli)?;
            let device = cat.stratix(device)?;
            let params = tb.params();
            let sol = stratix::solve_native(&params, device, budget.budget())?;
            let mut t = Table::new(&["TB config.", "Compute GEMM size", "Native buffer size", "BRAMs", "Budget"]);
            t.push(vec![
                params.to_string(),
                params.compute_dims().to_string(),
                sol.native.to_string(),
                report::resource(sol.m20ks, device.m20k_total),
                sol.budget.to_string(),
            ]);
            Ok(t.render(format))
        }
        StratixCmd::Dse { grid, budget, device } => {
            let cat = catalog(cli)?;
            let device = cat.stratix(device)?;
            let grid = match grid {
                Some(p) => Grid::load(p).with_context(|| format!("loading grid {}", p.display()))?,
                None => Grid::bundled(),
            };
            let r = stratix::dse(&grid.entries, device, budget.budget());
            for f in &r.failures {
                eprintln!("warning: {}: {}", f.config, f.error);
            }
            if r.designs.is_empty() && !r.failures.is_empty() {
                bail!("no design in the grid could be evaluated");
            }
            Ok(report::stratix_designs(&r.designs, device).render(format))
        }
        StratixCmd::Latency { tb, dims, freq } => {
            let params = tb.params();
            let l = stratix::latency(&params, *dims)?;
            let tops = stratix::throughput(&params, *dims, *freq)?;
            Ok(report::latency_table(&l, tops).render(format))
        }
        StratixCmd::Sweep { tb, dims, freq, sizes } => {
            let params = tb.params();
            let peak = stratix::throughput(&params, *dims, *freq)?;
            let points = positive_sizes(sizes)?.into_iter().map(|s| (s, stratix::scalability(&params, peak, s))).collect::<Vec<_>>();
            Ok(report::sweep_table(&params.to_string(), peak, &points).render(format))
        }
    }
}

fn read_i8(path: &Path, rows: u64, cols: u64) -> Result<Matrix<i8>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Matrix::<i8>::read_raw(BufReader::new(f), rows as usize, cols as usize)
        .with_context(|| format!("reading {}x{} int8 matrix from {}", rows, cols, path.display()))
}

fn sim_cmd(cmd: &SimCmd, format: Format) -> Result<String> {
    let SimCmd::Run { tb, dims, a, b, seed, out, trace } = cmd;
    let params = tb.params();
    let (a, b) = match (a, b) {
        (Some(a), Some(b)) => (read_i8(a, dims.m, dims.k)?, read_i8(b, dims.k, dims.n)?),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let a = Matrix::from_fn(dims.m as usize, dims.k as usize, |_, _| rng.gen());
            let b = Matrix::from_fn(dims.k as usize, dims.n as usize, |_, _| rng.gen());
            (a, b)
        }
    };
    let result = sim::simulate_with(&params, &a, &b, SimOptions { trace: trace.is_some() })?;
    let expected = sim::reference_gemm(&a, &b)?;
    let model = stratix::latency(&params, *dims)?.t_total;
    if let Some(path) = out {
        let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        result.c.write_raw(&mut w)?;
        w.flush()?;
    }
    if let Some(path) = trace {
        fs::write(path, result.trace_jsonl()).with_context(|| format!("writing {}", path.display()))?;
    }
    let matches = result.c == expected;
    let mut t = Table::new(&["TB config.", "GEMM size", "Cycles", "t_total", "Matches reference"]);
    t.push(vec![params.to_string(), dims.to_string(), result.cycles.to_string(), model.to_string(), matches.to_string()]);
    if !matches || result.cycles != model {
        bail!("simulation disagrees with the reference\n{}", t.render(format));
    }
    Ok(t.render(format))
}

fn netlist_cmd(cmd: &NetlistCmd, format: Format) -> Result<String> {
    let NetlistCmd::Emit { tb, dims, addr_stages, data_stages, emit, out_dir } = cmd;
    let params = tb.params();
    let pipeline = Pipeline { addr_stages: *addr_stages, data_stages: *data_stages };
    let n = netlist::generate(&params, *dims, pipeline)?;
    let check = netlist::check(&n, &params, *dims);
    if !check.is_clean() {
        let lines: Vec<String> = check.violations.iter().map(|v| format!("{:?}: {}", v.kind, v.detail)).collect();
        bail!("generated netlist failed its checks:\n{}", lines.join("\n"));
    }
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut written = Vec::new();
    if matches!(emit, EmitArg::Json | EmitArg::Both) {
        let path = out_dir.join(format!("{}.netlist.json", n.name));
        fs::write(&path, netlist::emit(&n, netlist::Format::Json)).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    if matches!(emit, EmitArg::Hdl | EmitArg::Both) {
        let path = out_dir.join(format!("{}.v", n.name));
        fs::write(&path, netlist::emit(&n, netlist::Format::HdlText)).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    let mut t = Table::new(&["Design", "TBs", "BRAMs", "Soft adders", "Pipeline regs", "Nets", "Files"]);
    t.push(vec![
        n.name.clone(),
        n.tensor_blocks().to_string(),
        n.m20ks().to_string(),
        (n.adders(netlist::AdderRole::Tree) + n.adders(netlist::AdderRole::Accumulator)).to_string(),
        n.pipeline_regs().to_string(),
        n.nets.len().to_string(),
        written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(" "),
    ]);
    Ok(t.render(format))
}
