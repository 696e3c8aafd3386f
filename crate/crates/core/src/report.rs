//! Summary rows and Graphviz renderings of the decompositions.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::factors::InfluenceGraph;
use crate::graph::{BlockDecomposition, BridgeBlockDecomposition};
use crate::network::PowerNetwork;

/// Bridge and bridge-block statistics of one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub network: String,
    pub buses: usize,
    /// Branches as listed in the case, parallel circuits counted separately.
    pub edges: usize,
    pub bridges: usize,
    /// Bridges as a percentage of `edges`, rounded to two decimals.
    pub bridge_pct: f64,
    pub bridge_blocks: usize,
    /// Sizes of bridge-blocks with more than two buses, descending.
    pub nontrivial_sizes: Vec<usize>,
    pub blocks: usize,
    pub nontrivial_blocks: usize,
    pub cut_vertices: usize,
}

pub fn stats_row(name: &str, net: &PowerNetwork) -> StatsRow {
    let g = net.graph();
    let bb = g.bridge_blocks();
    let bd = g.blocks();
    let edges = net.branch_count();
    let bridges = bb.bridges.len();
    let pct = if edges == 0 { 0.0 } else { 100.0 * bridges as f64 / edges as f64 };
    StatsRow {
        network: name.to_string(),
        buses: net.bus_count(),
        edges,
        bridges,
        bridge_pct: (pct * 100.0).round() / 100.0,
        bridge_blocks: bb.blocks.len(),
        nontrivial_sizes: bb.nontrivial_sizes(),
        blocks: bd.blocks.len(),
        nontrivial_blocks: bd.nontrivial_count(),
        cut_vertices: bd.cut_vertices.len(),
    }
}

fn bus_label(net: &PowerNetwork, v: usize) -> u64 {
    net.buses()[v].original_id
}

/// Bridge-block tree: one node per bridge-block, one edge per bridge.
pub fn bridge_block_dot(net: &PowerNetwork, bb: &BridgeBlockDecomposition) -> String {
    let mut s = String::from("graph bridge_blocks {\n");
    for (k, c) in bb.blocks.clusters().iter().enumerate() {
        let buses: Vec<String> = c.iter().map(|&v| bus_label(net, v).to_string()).collect();
        let _ = writeln!(s, "  bb{k} [label=\"{}\", size={}, buses=\"{}\"];", c.len(), c.len(), buses.join(" "));
    }
    for &(a, b, line) in &bb.tree.edges {
        let _ = writeln!(s, "  bb{a} -- bb{b} [line={line}];");
    }
    s.push_str("}\n");
    s
}

/// Block–cut tree: block nodes, cut-vertex nodes, and membership edges.
pub fn block_cut_dot(net: &PowerNetwork, bd: &BlockDecomposition) -> String {
    let mut s = String::from("graph block_cut {\n");
    for (k, lines) in bd.blocks.iter().enumerate() {
        let _ = writeln!(s, "  blk{k} [shape=box, label=\"{} lines\"];", lines.len());
    }
    for &c in &bd.cut_vertices {
        let _ = writeln!(s, "  bus{c} [label=\"{}\"];", bus_label(net, c));
    }
    for (k, vs) in bd.vertices.iter().enumerate() {
        for &v in vs.iter().filter(|v| bd.cut_vertices.contains(v)) {
            let _ = writeln!(s, "  blk{k} -- bus{v};");
        }
    }
    s.push_str("}\n");
    s
}

/// Influence graph with one node per line.
pub fn influence_dot(ig: &InfluenceGraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "graph influence {{\n  // k_min = {}", ig.k_min);
    for &n in &ig.nodes {
        let _ = writeln!(s, "  l{n};");
    }
    for &(a, b) in &ig.edges {
        let _ = writeln!(s, "  l{a} -- l{b};");
    }
    s.push_str("}\n");
    s
}

/// Minimal reader for the DOT emitted here: node names and undirected edges.
pub fn parse_dot(text: &str) -> (Vec<String>, Vec<(String, String)>) {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.starts_with("//") || line.ends_with('{') || line == "}" {
            continue;
        }
        let stmt = line.split('[').next().unwrap_or("").trim().trim_end_matches(';').trim();
        if let Some((a, b)) = stmt.split_once("--") {
            edges.push((a.trim().to_string(), b.trim().to_string()));
        } else if !stmt.is_empty() {
            nodes.push(stmt.to_string());
        }
    }
    (nodes, edges)
}
