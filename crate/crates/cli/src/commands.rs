use std::fs;
use std::path::{Path, PathBuf};

use gridblocks::cluster::{compare_methods, obi_solve, FlowWeights};
use gridblocks::factors::{glodf, influence_graph, lodf_matrix, ptdf_matrix, FactorMatrix, CONDITION_WARN};
use gridblocks::matpower::{parse_matpower, to_matpower};
use gridblocks::network::{rebalance, Injections, LineSet, PowerNetwork};
use gridblocks::report::{block_cut_dot, bridge_block_dot, influence_dot, stats_row};
use gridblocks::spectral::{balance_tolerance, LaplacianSystem};
use gridblocks::switching::{one_shot, recursive_refine};
use gridblocks::{Error, Result};
use serde::Serialize;
use serde_json::Value;

use crate::{Cli, Command, Common, Format, MethodArg, Mode};

pub fn run(cli: &Cli) -> Result<()> {
    let c = &cli.common;
    fs::create_dir_all(&c.out_dir)?;
    match &cli.command {
        Command::Stats { cases } => stats(c, cases),
        Command::Flow { case, outage } => flow(c, case, outage),
        Command::Factors { case, outage } => factors(c, case, outage),
        Command::Influence { case, k_min } => influence(c, case, *k_min),
        Command::Partition { case, b, method } => partition(c, case, b, *method),
        Command::Refine { case, mode, b, i_max, delta, method, tree_cap } => {
            refine(c, case, *mode, *b, *i_max, *delta, *method, *tree_cap)
        }
    }
}

fn case_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "case".into())
}

fn load(path: &Path) -> Result<(PowerNetwork, Injections)> {
    parse_matpower(&fs::read_to_string(path)?)
}

fn balanced(c: &Common, net: &PowerNetwork, p: &Injections) -> Result<Injections> {
    let tol = c.balance_tol.unwrap_or_else(|| balance_tolerance(p));
    rebalance(p, net, c.rebalance, tol)
}

fn wants(c: &Common, f: Format) -> bool {
    c.formats.contains(&f)
}

fn out(c: &Common, name: &str) -> PathBuf {
    c.out_dir.join(name)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn write_csv<R: AsRef<[u8]>>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<R>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Drops wall-clock fields so repeated runs are byte-identical.
fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("runtime_sec");
            m.values_mut().for_each(strip_timings);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

fn write_json<T: Serialize>(c: &Common, name: &str, value: &T) -> Result<()> {
    let mut v = serde_json::to_value(value)?;
    if !c.timings {
        strip_timings(&mut v);
    }
    fs::write(out(c, name), serde_json::to_string_pretty(&v)? + "\n")?;
    Ok(())
}

fn stats(c: &Common, cases: &[PathBuf]) -> Result<()> {
    let mut rows = Vec::new();
    for path in cases {
        let (net, _) = load(path)?;
        let name = case_name(path);
        let row = stats_row(&name, &net);
        if wants(c, Format::Dot) {
            let g = net.graph();
            fs::write(out(c, &format!("{name}_bridge_blocks.dot")), bridge_block_dot(&net, &g.bridge_blocks()))?;
            fs::write(out(c, &format!("{name}_block_cut.dot")), block_cut_dot(&net, &g.blocks()))?;
        }
        rows.push(row);
    }
    println!("{:<20} {:>6} {:>7} {:>8} {:>7}  nontrivial", "network", "edges", "bridges", "%", "blocks");
    for r in &rows {
        let sizes: Vec<String> = r.nontrivial_sizes.iter().map(|s| s.to_string()).collect();
        println!(
            "{:<20} {:>6} {:>7} {:>8.2} {:>7}  {}",
            r.network,
            r.edges,
            r.bridges,
            r.bridge_pct,
            r.bridge_blocks,
            sizes.join(", ")
        );
    }
    if wants(c, Format::Json) {
        write_json(c, "stats.json", &rows)?;
    }
    if wants(c, Format::Csv) {
        let header = ["network", "buses", "edges", "bridges", "bridge_pct", "bridge_blocks", "nontrivial_sizes"];
        write_csv(
            &out(c, "stats.csv"),
            &header,
            rows.iter().map(|r| {
                let sizes: Vec<String> = r.nontrivial_sizes.iter().map(|s| s.to_string()).collect();
                vec![
                    r.network.clone(),
                    r.buses.to_string(),
                    r.edges.to_string(),
                    r.bridges.to_string(),
                    format!("{:.2}", r.bridge_pct),
                    r.bridge_blocks.to_string(),
                    sizes.join(" "),
                ]
            }),
        )?;
    }
    Ok(())
}

fn flow(c: &Common, path: &Path, outage: &[usize]) -> Result<()> {
    let (net, p) = load(path)?;
    check_lines(&net, outage)?;
    let p = balanced(c, &net, &p)?;
    let removed: LineSet = outage.iter().copied().collect();
    let flows = LaplacianSystem::build_without(&net, &removed)?.dc_flow(&p)?;
    let ids = |v: usize| net.buses()[v].original_id.to_string();
    if wants(c, Format::Csv) {
        let header = ["line", "from_bus", "to_bus", "flow_mw", "capacity_mw", "loading", "in_service"];
        write_csv(
            &out(c, "flows.csv"),
            &header,
            net.lines().iter().map(|l| {
                vec![
                    l.id.to_string(),
                    ids(l.from),
                    ids(l.to),
                    format!("{:.6}", flows[l.id]),
                    l.capacity.mw().map_or(String::new(), |m| format!("{m}")),
                    format!("{:.6}", l.capacity.loading(flows[l.id])),
                    (!removed.contains(&l.id)).to_string(),
                ]
            }),
        )?;
    }
    if wants(c, Format::Json) {
        write_json(c, "flows.json", &flows)?;
    }
    Ok(())
}

fn check_lines(net: &PowerNetwork, ids: &[usize]) -> Result<()> {
    match ids.iter().find(|&&id| id >= net.line_count()) {
        Some(id) => Err(Error::InvalidArgument(format!("no line {id} (network has {})", net.line_count()))),
        None => Ok(()),
    }
}

fn matrix_csv(path: &Path, m: &FactorMatrix) -> Result<()> {
    let mut header = vec!["line".to_string()];
    header.extend(m.cols.iter().map(|c| c.to_string()));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(
        path,
        &header,
        m.rows.iter().enumerate().map(|(i, r)| {
            let mut row = vec![r.to_string()];
            row.extend((0..m.cols.len()).map(|j| format!("{:.10}", m.values[(i, j)])));
            row
        }),
    )
}

fn factors(c: &Common, path: &Path, outage: &[usize]) -> Result<()> {
    let (net, _) = load(path)?;
    check_lines(&net, outage)?;
    let sys = LaplacianSystem::build(&net)?;
    let bd = net.graph().blocks();
    if wants(c, Format::Csv) {
        matrix_csv(&out(c, "ptdf.csv"), &ptdf_matrix(&sys))?;
    }
    if outage.is_empty() {
        let k = lodf_matrix(&sys, &bd)?;
        if wants(c, Format::Csv) {
            matrix_csv(&out(c, "lodf.csv"), &k)?;
        }
    } else {
        let set: LineSet = outage.iter().copied().collect();
        let g = glodf(&sys, &set)?;
        if g.condition > CONDITION_WARN {
            tracing::warn!(condition = g.condition, "outage matrix is ill-conditioned");
        }
        if wants(c, Format::Csv) {
            matrix_csv(&out(c, "glodf.csv"), &g.factors)?;
        }
        if wants(c, Format::Json) {
            write_json(c, "glodf.json", &serde_json::json!({ "outage": set, "condition": g.condition }))?;
        }
    }
    Ok(())
}

fn influence(c: &Common, path: &Path, k_min: f64) -> Result<()> {
    if !(k_min >= 0.0) {
        return Err(Error::InvalidArgument(format!("k-min must be non-negative, got {k_min}")));
    }
    let (net, _) = load(path)?;
    let sys = LaplacianSystem::build(&net)?;
    let ig = influence_graph(&sys, &net.graph().blocks(), k_min)?;
    if wants(c, Format::Dot) {
        fs::write(out(c, "influence.dot"), influence_dot(&ig))?;
    }
    if wants(c, Format::Json) {
        let comps = ig.components();
        write_json(
            c,
            "influence.json",
            &serde_json::json!({
                "k_min": k_min,
                "nodes": ig.nodes,
                "edges": ig.edges,
                "components": comps.len(),
                "nontrivial_components": ig.nontrivial_components(),
            }),
        )?;
    }
    Ok(())
}

fn partition(c: &Common, path: &Path, bs: &[usize], method: MethodArg) -> Result<()> {
    let (net, p) = load(path)?;
    let p = balanced(c, &net, &p)?;
    let flows = LaplacianSystem::build(&net)?.dc_flow(&p)?;
    let w = FlowWeights::new(&net, &flows);
    let methods = method.methods();
    let mut results = Vec::new();
    for &b in bs {
        for &m in &methods {
            let r = obi_solve(&w, b, m)?;
            let labelled: Vec<Vec<u64>> =
                r.clusters.iter().map(|cl| cl.iter().map(|&v| net.buses()[v].original_id).collect()).collect();
            results.push(serde_json::json!({ "b": b, "result": r, "bus_ids": labelled }));
        }
    }
    if wants(c, Format::Json) {
        write_json(c, "partition.json", &results)?;
    }
    if wants(c, Format::Csv) {
        let rows = compare_methods(&w, bs, &methods)?;
        let mut header = vec!["method", "b", "q_n", "cross_edge_fraction", "lines_to_switch", "cluster_sizes"];
        if c.timings {
            header.push("runtime_sec");
        }
        write_csv(
            &out(c, "comparison.csv"),
            &header,
            rows.iter().map(|r| {
                let sizes: Vec<String> = r.cluster_sizes.iter().map(|s| s.to_string()).collect();
                let mut row = vec![
                    r.method.name().to_string(),
                    r.b.to_string(),
                    r.q_n.map_or(String::new(), |q| format!("{q:.6e}")),
                    format!("{:.6}", r.cross_edge_fraction),
                    r.lines_to_switch.to_string(),
                    sizes.join(" "),
                ];
                if c.timings {
                    row.push(format!("{:.6}", r.runtime_sec));
                }
                row
            }),
        )?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn refine(
    c: &Common,
    path: &Path,
    mode: Mode,
    b: usize,
    i_max: usize,
    delta: f64,
    method: MethodArg,
    tree_cap: u64,
) -> Result<()> {
    let [method] = method.methods()[..] else {
        return Err(Error::InvalidArgument("refine needs a single clustering method".into()));
    };
    let (net, p) = load(path)?;
    let p = balanced(c, &net, &p)?;
    let switched = match mode {
        Mode::OneShot => {
            let plan = one_shot(&net, &p, b, method, tree_cap)?;
            if wants(c, Format::Json) {
                write_json(c, "plan.json", &plan)?;
            }
            plan.switched_lines
        }
        Mode::Recursive => {
            let trace = recursive_refine(&net, &p, i_max, delta, method)?;
            if wants(c, Format::Json) {
                write_json(c, "trace.json", &trace)?;
            }
            trace.switched_lines
        }
    };
    let removed: LineSet = switched.iter().copied().collect();
    let after = net.with_injections(&p)?.without_lines(&removed)?;
    let name = format!("{}_switched", case_name(path));
    fs::write(out(c, &format!("{name}.m")), to_matpower(&after, &name))?;
    if wants(c, Format::Dot) {
        fs::write(out(c, "bridge_blocks.dot"), bridge_block_dot(&after, &after.graph().bridge_blocks()))?;
    }
    Ok(())
}
