#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::Path;

use gridblocks::matpower::parse_matpower;
use gridblocks::network::{rebalance, Bus, Capacity, Injections, Line, LineSet, PowerNetwork, RebalanceMode};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const FIXTURES: [&str; 6] =
    ["case14_ieee", "case30_ieee", "case39_epri", "case57_ieee", "case73_ieee_rts", "case118_ieee"];

pub fn fixture_text(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.m"));
    std::fs::read_to_string(path).expect("fixture readable")
}

/// Fixture network with injections rebalanced over the generators.
pub fn fixture(name: &str) -> (PowerNetwork, Injections) {
    let (net, p) = parse_matpower(&fixture_text(name)).expect("fixture parses");
    let p = rebalance(&p, &net, RebalanceMode::ProportionalGenerators, 1e-9).expect("rebalanceable");
    (net, p)
}

pub fn build(n: usize, edges: &[(usize, usize, f64, Capacity)]) -> PowerNetwork {
    let buses = (0..n)
        .map(|i| Bus { id: i, original_id: i as u64 + 1, injection_mw: 0.0, generation_mw: 0.0, is_generator: false })
        .collect();
    let lines = edges
        .iter()
        .enumerate()
        .map(|(k, &(a, b, s, c))| Line { id: k, from: a, to: b, susceptance: s, capacity: c, merged_from: vec![k] })
        .collect();
    PowerNetwork::new(buses, lines).expect("valid network")
}

/// Connected simple graph: a random spanning tree plus `extra` distinct chords.
pub fn random_edges(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for k in 1..n {
        let a = order[k];
        let b = order[rng.gen_range(0..k)];
        seen.insert((a.min(b), a.max(b)));
        edges.push((a, b));
    }
    let mut tries = 0;
    while edges.len() < n - 1 + extra && tries < 1000 {
        tries += 1;
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && seen.insert((a.min(b), a.max(b))) {
            edges.push((a, b));
        }
    }
    edges
}

/// Random connected network with susceptances in [0.5, 5) and optional finite capacities.
pub fn random_network(rng: &mut ChaCha8Rng, n: usize, max_edges: usize, capacities: bool) -> PowerNetwork {
    let max_extra = max_edges.saturating_sub(n - 1).min(n * (n - 1) / 2 - (n - 1));
    let extra = rng.gen_range(0..=max_extra);
    let edges: Vec<_> = random_edges(rng, n, extra)
        .into_iter()
        .map(|(a, b)| {
            let cap = if capacities { Capacity::Finite(rng.gen_range(0.5..3.0)) } else { Capacity::Infinite };
            (a, b, rng.gen_range(0.5..5.0), cap)
        })
        .collect();
    build(n, &edges)
}

/// Zero-sum random injections.
pub fn balanced_injections(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let mean = p.iter().sum::<f64>() / n as f64;
    p.iter_mut().for_each(|x| *x -= mean);
    p
}

/// A random outage set of `size` lines that leaves the graph connected.
pub fn non_cut_outage(rng: &mut ChaCha8Rng, net: &PowerNetwork, size: usize) -> Option<LineSet> {
    for _ in 0..200 {
        let mut ids: Vec<usize> = (0..net.line_count()).collect();
        ids.shuffle(rng);
        let set: LineSet = ids.into_iter().take(size).collect();
        if net.graph_without(&set).is_connected() {
            return Some(set);
        }
    }
    None
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}
