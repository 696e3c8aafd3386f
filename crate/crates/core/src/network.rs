//! Network data model: buses, lines, injections.
//!
//! A [`PowerNetwork`] is immutable once built. Line ids are stable indices
//! into `lines`; derived topologies (outages, switching plans) are expressed
//! as sets of line ids rather than by rebuilding the network, so flows and
//! factors computed on different topologies stay comparable line by line.

use std::collections::BTreeSet;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub type LineSet = BTreeSet<usize>;

/// Thermal rating of a line in MW.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Capacity {
    Finite(f64),
    Infinite,
}

impl Capacity {
    pub fn mw(self) -> Option<f64> {
        match self {
            Capacity::Finite(c) => Some(c),
            Capacity::Infinite => None,
        }
    }

    /// Loading |f|/C; unlimited lines never load.
    pub fn loading(self, flow_mw: f64) -> f64 {
        match self {
            Capacity::Finite(c) => flow_mw.abs() / c,
            Capacity::Infinite => 0.0,
        }
    }

    pub(crate) fn merge(self, other: Capacity) -> Capacity {
        match (self, other) {
            (Capacity::Finite(a), Capacity::Finite(b)) => Capacity::Finite(a + b),
            _ => Capacity::Infinite,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    /// Contiguous 0-based vertex index.
    pub id: usize,
    /// Bus number as it appeared in the source case.
    pub original_id: u64,
    /// Net injection in MW, positive for generation.
    pub injection_mw: f64,
    /// Total in-service generator output at this bus (MW).
    pub generation_mw: f64,
    pub is_generator: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub id: usize,
    /// Orientation: positive flow goes `from -> to`.
    pub from: usize,
    pub to: usize,
    /// Per-unit susceptance, strictly positive.
    pub susceptance: f64,
    pub capacity: Capacity,
    /// Source branch rows merged into this line.
    pub merged_from: Vec<usize>,
}

impl Line {
    pub fn endpoints(&self) -> (usize, usize) {
        (self.from, self.to)
    }

    pub fn other(&self, bus: usize) -> usize {
        if bus == self.from {
            self.to
        } else {
            self.from
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerNetwork {
    buses: Vec<Bus>,
    lines: Vec<Line>,
}

impl PowerNetwork {
    /// Validates ids, endpoints, susceptances and simplicity.
    pub fn new(buses: Vec<Bus>, lines: Vec<Line>) -> Result<Self> {
        for (i, bus) in buses.iter().enumerate() {
            if bus.id != i {
                return Err(Error::Data(format!("bus ids must be contiguous; found {} at {i}", bus.id)));
            }
        }
        let mut seen = BTreeSet::new();
        for (k, line) in lines.iter().enumerate() {
            if line.id != k {
                return Err(Error::Data(format!("line ids must be contiguous; found {} at {k}", line.id)));
            }
            if line.from >= buses.len() || line.to >= buses.len() {
                return Err(Error::Data(format!("line {k} references a missing bus")));
            }
            if line.from == line.to {
                return Err(Error::Data(format!("line {k} is a self-loop at bus {}", line.from)));
            }
            if !(line.susceptance > 0.0) || !line.susceptance.is_finite() {
                return Err(Error::Data(format!("line {k} has non-positive susceptance {}", line.susceptance)));
            }
            if let Capacity::Finite(c) = line.capacity {
                if !(c > 0.0) {
                    return Err(Error::Data(format!("line {k} has non-positive capacity {c}")));
                }
            }
            let key = (line.from.min(line.to), line.from.max(line.to));
            if !seen.insert(key) {
                return Err(Error::Data(format!("line {k} duplicates bus pair {key:?}")));
            }
        }
        Ok(PowerNetwork { buses, lines })
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn line(&self, id: usize) -> &Line {
        &self.lines[id]
    }

    pub fn bus_count(&self) -> usize {
        self.buses.len()
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    /// Number of source branches represented, counting merged parallels.
    pub fn branch_count(&self) -> usize {
        self.lines.iter().map(|l| l.merged_from.len().max(1)).sum()
    }

    pub fn injections(&self) -> Injections {
        Injections(self.buses.iter().map(|b| b.injection_mw).collect())
    }

    pub fn find_line(&self, a: usize, b: usize) -> Option<usize> {
        self.lines
            .iter()
            .position(|l| (l.from == a && l.to == b) || (l.from == b && l.to == a))
    }

    pub fn graph(&self) -> Graph {
        Graph::from_network(self, &LineSet::new())
    }

    pub fn graph_without(&self, removed: &LineSet) -> Graph {
        Graph::from_network(self, removed)
    }

    /// Copy of the network with different bus injections.
    pub fn with_injections(&self, p: &Injections) -> Result<PowerNetwork> {
        if p.len() != self.buses.len() {
            return Err(Error::InvalidArgument(format!(
                "injection vector has {} entries for {} buses",
                p.len(),
                self.buses.len()
            )));
        }
        let mut net = self.clone();
        for (bus, &v) in net.buses.iter_mut().zip(p.iter()) {
            bus.injection_mw = v;
        }
        Ok(net)
    }

    /// Network with the given lines taken out of service; ids are re-packed.
    pub fn without_lines(&self, removed: &LineSet) -> Result<PowerNetwork> {
        let lines = self
            .lines
            .iter()
            .filter(|l| !removed.contains(&l.id))
            .enumerate()
            .map(|(k, l)| Line { id: k, ..l.clone() })
            .collect();
        PowerNetwork::new(self.buses.clone(), lines)
    }

    /// Subnetwork induced by `vertices`, skipping `excluded` lines.
    pub fn induced(&self, vertices: &[usize], excluded: &LineSet) -> SubNetwork {
        let mut local = vec![usize::MAX; self.buses.len()];
        let mut buses = Vec::with_capacity(vertices.len());
        for (k, &v) in vertices.iter().enumerate() {
            local[v] = k;
            buses.push(Bus { id: k, ..self.buses[v].clone() });
        }
        let mut lines = Vec::new();
        let mut line_map = Vec::new();
        for l in &self.lines {
            if excluded.contains(&l.id) {
                continue;
            }
            let (a, b) = (local[l.from], local[l.to]);
            if a != usize::MAX && b != usize::MAX {
                lines.push(Line { id: lines.len(), from: a, to: b, ..l.clone() });
                line_map.push(l.id);
            }
        }
        SubNetwork {
            network: PowerNetwork { buses, lines },
            bus_map: vertices.to_vec(),
            line_map,
        }
    }

    /// Canonical JSON export.
    pub fn to_json(&self) -> String {
        let doc = NetworkDoc {
            buses: self
                .buses
                .iter()
                .map(|b| BusDoc { id: b.id, injection_mw: b.injection_mw, is_generator: b.is_generator })
                .collect(),
            lines: self
                .lines
                .iter()
                .map(|l| LineDoc {
                    id: l.id,
                    from: l.from,
                    to: l.to,
                    susceptance: l.susceptance,
                    capacity_mw: l.capacity.mw(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("network document serializes")
    }

    /// Loads the canonical JSON export. Generator output is not part of the
    /// schema and is taken as the positive part of a generator's injection.
    pub fn from_json(text: &str) -> Result<PowerNetwork> {
        let doc: NetworkDoc = serde_json::from_str(text)?;
        let buses = doc
            .buses
            .into_iter()
            .map(|b| Bus {
                id: b.id,
                original_id: b.id as u64,
                injection_mw: b.injection_mw,
                generation_mw: if b.is_generator { b.injection_mw.max(0.0) } else { 0.0 },
                is_generator: b.is_generator,
            })
            .collect();
        let lines = doc
            .lines
            .into_iter()
            .map(|l| Line {
                id: l.id,
                from: l.from,
                to: l.to,
                susceptance: l.susceptance,
                capacity: l.capacity_mw.map_or(Capacity::Infinite, Capacity::Finite),
                merged_from: vec![l.id],
            })
            .collect();
        PowerNetwork::new(buses, lines)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct NetworkDoc {
    buses: Vec<BusDoc>,
    lines: Vec<LineDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BusDoc {
    id: usize,
    injection_mw: f64,
    is_generator: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineDoc {
    id: usize,
    from: usize,
    to: usize,
    susceptance: f64,
    capacity_mw: Option<f64>,
}

/// A vertex-induced piece of a larger network with the index maps back to it.
#[derive(Debug, Clone)]
pub struct SubNetwork {
    pub network: PowerNetwork,
    /// local bus index -> parent bus index
    pub bus_map: Vec<usize>,
    /// local line index -> parent line id
    pub line_map: Vec<usize>,
}

/// Per-bus net injections in MW.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Injections(pub Vec<f64>);

impl Deref for Injections {
    type Target = Vec<f64>;
    fn deref(&self) -> &Vec<f64> {
        &self.0
    }
}

impl DerefMut for Injections {
    fn deref_mut(&mut self) -> &mut Vec<f64> {
        &mut self.0
    }
}

impl From<Vec<f64>> for Injections {
    fn from(v: Vec<f64>) -> Self {
        Injections(v)
    }
}

/// Island sums of `p`.
pub fn island_sums(p: &[f64], islands: &[Vec<usize>]) -> Vec<f64> {
    islands.iter().map(|isl| isl.iter().map(|&i| p[i]).sum()).collect()
}

/// True iff every island's net injection is within `tol`.
pub fn is_balanced(p: &[f64], islands: &[Vec<usize>], tol: f64) -> bool {
    island_sums(p, islands).iter().all(|s| s.abs() <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RebalanceMode {
    Reject,
    UniformGenerators,
    ProportionalGenerators,
}

impl std::str::FromStr for RebalanceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reject" => Ok(RebalanceMode::Reject),
            "uniform-generators" | "uniform" => Ok(RebalanceMode::UniformGenerators),
            "proportional-generators" | "proportional" => Ok(RebalanceMode::ProportionalGenerators),
            other => Err(Error::InvalidArgument(format!("unknown rebalance mode `{other}`"))),
        }
    }
}

/// Spreads each island's imbalance over its generator buses.
///
/// Islands whose imbalance is within `tol` are left untouched, so balanced
/// input comes back unchanged in every mode. Proportional mode weights by
/// generator output and falls back to an even split when all of an island's
/// generators sit at zero output.
pub fn rebalance(p: &Injections, net: &PowerNetwork, mode: RebalanceMode, tol: f64) -> Result<Injections> {
    let islands = net.graph().components();
    let sums = island_sums(p, &islands);
    if mode == RebalanceMode::Reject {
        let residuals: Vec<(usize, f64)> = sums
            .iter()
            .enumerate()
            .filter(|(_, s)| s.abs() > tol)
            .map(|(k, &s)| (k, s))
            .collect();
        return if residuals.is_empty() { Ok(p.clone()) } else { Err(Error::Unbalanced { residuals }) };
    }
    let mut out = p.clone();
    for (k, (island, &imbalance)) in islands.iter().zip(&sums).enumerate() {
        if imbalance.abs() <= tol {
            continue;
        }
        let gens: Vec<usize> = island.iter().copied().filter(|&i| net.buses()[i].is_generator).collect();
        if gens.is_empty() {
            return Err(Error::Unbalanceable { island: k, imbalance });
        }
        let weights: Vec<f64> = match mode {
            RebalanceMode::ProportionalGenerators => {
                let w: Vec<f64> = gens.iter().map(|&i| net.buses()[i].generation_mw.abs()).collect();
                if w.iter().sum::<f64>() > 0.0 {
                    w
                } else {
                    vec![1.0; gens.len()]
                }
            }
            _ => vec![1.0; gens.len()],
        };
        let total: f64 = weights.iter().sum();
        for (&g, w) in gens.iter().zip(&weights) {
            out[g] -= imbalance * w / total;
        }
        // Put the rounding residue on the last generator so the island sums
        // to zero as closely as floating point allows.
        let residue: f64 = island.iter().map(|&i| out[i]).sum();
        out[*gens.last().unwrap()] -= residue;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn bus(id: usize, p: f64, gen: bool) -> Bus {
        Bus { id, original_id: id as u64 + 1, injection_mw: p, generation_mw: p.max(0.0), is_generator: gen }
    }

    fn line(id: usize, from: usize, to: usize, b: f64) -> Line {
        Line { id, from, to, susceptance: b, capacity: Capacity::Infinite, merged_from: vec![id] }
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        let buses = vec![bus(0, 0.0, false), bus(1, 0.0, false)];
        assert!(PowerNetwork::new(buses.clone(), vec![line(0, 1, 1, 1.0)]).is_err());
        assert!(PowerNetwork::new(buses.clone(), vec![line(0, 0, 1, 1.0), line(1, 1, 0, 1.0)]).is_err());
        assert!(PowerNetwork::new(buses, vec![line(0, 0, 1, -1.0)]).is_err());
    }

    #[test]
    fn balanced_input_is_untouched() {
        let net = PowerNetwork::new(
            vec![bus(0, 1.0, true), bus(1, -1.0, false)],
            vec![line(0, 0, 1, 1.0)],
        )
        .unwrap();
        let p = net.injections();
        for mode in [RebalanceMode::Reject, RebalanceMode::UniformGenerators, RebalanceMode::ProportionalGenerators] {
            assert_eq!(rebalance(&p, &net, mode, 1e-9).unwrap(), p);
        }
    }

    #[test]
    fn surplus_is_removed_at_the_only_generator() {
        let net = PowerNetwork::new(
            vec![bus(0, 2.0, true), bus(1, -1.0, false)],
            vec![line(0, 0, 1, 1.0)],
        )
        .unwrap();
        let out = rebalance(&net.injections(), &net, RebalanceMode::UniformGenerators, 1e-9).unwrap();
        assert_eq!(out.0, vec![1.0, -1.0]);
        assert!(matches!(
            rebalance(&net.injections(), &net, RebalanceMode::Reject, 1e-9),
            Err(Error::Unbalanced { .. })
        ));
    }

    #[test]
    fn even_split_over_two_generators() {
        let net = PowerNetwork::new(
            vec![bus(0, 2.0, true), bus(1, 2.0, true), bus(2, -1.0, false)],
            vec![line(0, 0, 1, 1.0), line(1, 1, 2, 1.0)],
        )
        .unwrap();
        let out = rebalance(&net.injections(), &net, RebalanceMode::UniformGenerators, 1e-9).unwrap();
        assert_eq!(out.0, vec![0.5, 0.5, -1.0]);
    }

    #[test]
    fn island_without_generator_is_unbalanceable() {
        let net = PowerNetwork::new(
            vec![bus(0, 1.0, true), bus(1, -1.0, false), bus(2, -0.5, false)],
            vec![line(0, 0, 1, 1.0)],
        )
        .unwrap();
        let err = rebalance(&net.injections(), &net, RebalanceMode::UniformGenerators, 1e-9).unwrap_err();
        assert!(matches!(err, Error::Unbalanceable { island: 1, .. }));
    }

    #[test]
    fn balance_check_uses_tolerance() {
        let islands = vec![vec![0], vec![1]];
        assert!(is_balanced(&[0.0, 0.0], &islands, 1e-9));
        assert!(!is_balanced(&[0.0, 0.5], &islands, 1e-9));
        assert!(is_balanced(&[1e-10, -1e-10], &islands, 1e-9));
    }

    #[test]
    fn json_round_trip_is_stable() {
        let net = PowerNetwork::new(
            vec![bus(0, 1.5, true), bus(1, -1.5, false)],
            vec![Line { capacity: Capacity::Finite(90.0), ..line(0, 0, 1, 3.25) }],
        )
        .unwrap();
        let text = net.to_json();
        let back = PowerNetwork::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back.lines()[0].capacity, Capacity::Finite(90.0));
    }
}
