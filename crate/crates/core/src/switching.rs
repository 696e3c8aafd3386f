//! Optimal bridge selection and the one-shot / recursive refinement of the
//! bridge-block decomposition by line switching.
//!
//! Candidate switching sets are scored with the outage factors of the
//! network they act on: removing `E` shifts flows by `D_{·,E} (I − D_EE)⁻¹ f_E`,
//! so a candidate costs one small dense solve instead of a full power flow.
//! The selected plan is always re-solved from scratch.

use std::cmp::Ordering;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::{obi_solve, ClusteringMethod, FlowWeights};
use crate::error::{Error, Result};
use crate::factors::ptdf_matrix;
use crate::graph::{
    enumerate_spanning_trees, is_finer, is_tree, reduced_graph, spanning_tree_count, BridgeBlockDecomposition,
    Partition,
};
use crate::network::{LineSet, PowerNetwork};
use crate::spectral::{FlowVector, LaplacianSystem};

/// Default bound on enumerated spanning trees.
pub const DEFAULT_TREE_CAP: u64 = 1_000_000;

const CHUNK: usize = 4096;

/// γ = max |f|/C over in-service lines, and how many exceed 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Loading {
    pub gamma: f64,
    pub congested: usize,
}

impl Loading {
    const NONE: Loading = Loading { gamma: 0.0, congested: 0 };

    fn add(&mut self, ratio: f64) {
        self.gamma = self.gamma.max(ratio);
        if ratio > 1.0 {
            self.congested += 1;
        }
    }

    fn merge(self, other: Loading) -> Loading {
        Loading { gamma: self.gamma.max(other.gamma), congested: self.congested + other.congested }
    }
}

fn loading_of(net: &PowerNetwork, flows: &[f64], out: &LineSet) -> Loading {
    let mut l = Loading::NONE;
    for line in net.lines().iter().filter(|l| !out.contains(&l.id)) {
        l.add(line.capacity.loading(flows[line.id]));
    }
    l
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Congestion {
    pub gamma: f64,
    pub congested: usize,
    pub flows: FlowVector,
}

/// γ(E): flows re-solved with `removed` out of service.
pub fn congestion_level(net: &PowerNetwork, removed: &LineSet, p: &[f64]) -> Result<Congestion> {
    let before = net.graph().component_labels().1;
    let after = net.graph_without(removed).components();
    if after.len() > before {
        return Err(Error::Disconnected(format!("switching {:?} splits the network into {:?}", removed, after)));
    }
    let flows = LaplacianSystem::build_without(net, removed)?.dc_flow(p)?;
    let l = loading_of(net, &flows, removed);
    Ok(Congestion { gamma: l.gamma, congested: l.congested, flows })
}

/// Scores switching sets on one network from its pre-switching flows.
struct Evaluator<'a> {
    net: &'a PowerNetwork,
    flows: Vec<f64>,
    ptdf: DMatrix<f64>,
    /// Loading of lines that the candidates cannot affect.
    outside: Loading,
}

impl<'a> Evaluator<'a> {
    fn new(net: &'a PowerNetwork, p: &[f64], outside: Loading) -> Result<Evaluator<'a>> {
        let sys = LaplacianSystem::build(net)?;
        let flows = sys.dc_flow(p)?.0;
        let ptdf = ptdf_matrix(&sys).values;
        Ok(Evaluator { net, flows, ptdf, outside })
    }

    fn evaluate(&self, e: &[usize]) -> Result<Loading> {
        let k = e.len();
        if k == 0 {
            return Ok(self.outside.merge(loading_of(self.net, &self.flows, &LineSet::new())));
        }
        let m = DMatrix::from_fn(k, k, |a, b| f64::from(a == b) - self.ptdf[(e[a], e[b])]);
        let fe = DVector::from_iterator(k, e.iter().map(|&l| self.flows[l]));
        let x = m.lu().solve(&fe).ok_or_else(|| Error::Conditioning(format!("switching set {e:?} is a cut set")))?;
        let mut l = self.outside;
        for line in self.net.lines() {
            if e.binary_search(&line.id).is_ok() {
                continue;
            }
            let df: f64 = e.iter().zip(x.iter()).map(|(&c, xc)| self.ptdf[(line.id, c)] * xc).sum();
            l.add(line.capacity.loading(self.flows[line.id] + df));
        }
        Ok(l)
    }
}

#[derive(Debug, Clone)]
struct Scored {
    set: Vec<usize>,
    loading: Loading,
}

/// γ first, then congested count, then the lexicographically smaller set.
fn rank(a: &Scored, b: &Scored) -> Ordering {
    a.loading
        .gamma
        .total_cmp(&b.loading.gamma)
        .then(a.loading.congested.cmp(&b.loading.congested))
        .then_with(|| a.set.cmp(&b.set))
}

fn pick_best(ev: &Evaluator, candidates: impl Iterator<Item = Vec<usize>>) -> Result<(Scored, usize)> {
    let mut best: Option<Scored> = None;
    let mut count = 0;
    let mut candidates = candidates.peekable();
    while candidates.peek().is_some() {
        let chunk: Vec<Vec<usize>> = candidates.by_ref().take(CHUNK).collect();
        count += chunk.len();
        let local = chunk
            .into_par_iter()
            .map(|set| ev.evaluate(&set).map(|loading| Scored { set, loading }))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min_by(rank);
        best = match (best, local) {
            (Some(a), Some(b)) => Some(if rank(&b, &a) == Ordering::Less { b } else { a }),
            (a, b) => a.or(b),
        };
    }
    best.map(|b| (b, count)).ok_or_else(|| Error::Degenerate("no switching candidates".into()))
}

/// Lines to switch off, the resulting flows and the new decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct SwitchingPlan {
    pub switched_lines: Vec<usize>,
    pub gamma_before: f64,
    pub gamma: f64,
    pub congested_count: usize,
    /// γ ≥ 1: every admissible choice overloads a line.
    pub congested_plan: bool,
    pub candidates_evaluated: usize,
    pub spanning_trees: u64,
    /// Target partition (bus ids of the analysed network).
    pub partition: Vec<Vec<usize>>,
    pub bridge_block_count: usize,
    pub bridge_block_sizes: Vec<usize>,
    #[serde(skip)]
    pub resulting_bb: BridgeBlockDecomposition,
    pub flows_after: FlowVector,
}

fn sizes_desc(bb: &BridgeBlockDecomposition) -> Vec<usize> {
    let mut s = bb.blocks.sizes();
    s.sort_unstable_by(|a, b| b.cmp(a));
    s
}

fn finish_plan(
    net: &PowerNetwork,
    p: &[f64],
    already_out: &LineSet,
    switched: Vec<usize>,
    partition: &Partition,
    candidates_evaluated: usize,
    spanning_trees: u64,
) -> Result<SwitchingPlan> {
    let base = congestion_level(net, already_out, p)?;
    let mut out = already_out.clone();
    out.extend(switched.iter().copied());
    let after = congestion_level(net, &out, p)?;
    let resulting_bb = net.graph_without(&out).bridge_blocks();
    Ok(SwitchingPlan {
        switched_lines: switched,
        gamma_before: base.gamma,
        gamma: after.gamma,
        congested_count: after.congested,
        congested_plan: after.gamma >= 1.0,
        candidates_evaluated,
        spanning_trees,
        partition: partition.clusters().to_vec(),
        bridge_block_count: resulting_bb.blocks.len(),
        bridge_block_sizes: sizes_desc(&resulting_bb),
        resulting_bb,
        flows_after: after.flows,
    })
}

fn require_connected_clusters(net: &PowerNetwork, partition: &Partition) -> Result<()> {
    if partition.vertex_count() != net.bus_count() {
        return Err(Error::InvalidArgument("partition does not cover the network".into()));
    }
    let g = net.graph();
    if let Some(k) = partition.clusters().iter().position(|c| g.induced_components(c).len() != 1) {
        return Err(Error::Degenerate(format!("cluster {k} does not induce a connected subgraph")));
    }
    Ok(())
}

/// Best switching set E ⊆ E_c(P) with (G^E)_P a tree, by enumeration of the
/// spanning trees of G_P. `net` must have every line in service.
pub fn obs_solve(net: &PowerNetwork, p: &[f64], partition: &Partition, cap: u64) -> Result<SwitchingPlan> {
    let (set, evaluated, trees) = obs_local(net, p, partition, cap, Loading::NONE)?;
    finish_plan(net, p, &LineSet::new(), set, partition, evaluated, trees)
}

fn obs_local(
    net: &PowerNetwork,
    p: &[f64],
    partition: &Partition,
    cap: u64,
    outside: Loading,
) -> Result<(Vec<usize>, usize, u64)> {
    require_connected_clusters(net, partition)?;
    let g = net.graph();
    let rg = reduced_graph(&g, partition);
    if !rg.as_graph().is_connected() {
        return Err(Error::Disconnected("reduced graph of the partition is disconnected".into()));
    }
    if is_tree(&rg) {
        return Ok((Vec::new(), 1, 1));
    }
    let count = spanning_tree_count(&rg);
    let trees = enumerate_spanning_trees(&rg, cap)?;
    let cross = rg.line_ids();
    let ev = Evaluator::new(net, p, outside)?;
    let candidates = trees.map(|t| cross.iter().copied().filter(|c| t.binary_search(c).is_err()).collect());
    let (best, evaluated) = pick_best(&ev, candidates)?;
    let trees = u64::try_from(count).unwrap_or(u64::MAX);
    Ok((best.set, evaluated, trees))
}

/// OBS for two clusters: keep the one cross-edge that minimises γ.
pub fn obs_bipartition(net: &PowerNetwork, p: &[f64], partition: &Partition) -> Result<SwitchingPlan> {
    let (set, evaluated) = obs_bipartition_local(net, p, partition, Loading::NONE)?;
    finish_plan(net, p, &LineSet::new(), set, partition, evaluated, evaluated as u64)
}

fn obs_bipartition_local(
    net: &PowerNetwork,
    p: &[f64],
    partition: &Partition,
    outside: Loading,
) -> Result<(Vec<usize>, usize)> {
    if partition.len() != 2 {
        return Err(Error::InvalidArgument(format!("expected two clusters, got {}", partition.len())));
    }
    require_connected_clusters(net, partition)?;
    let cross = partition.cross_edges(&net.graph());
    if cross.is_empty() {
        return Err(Error::Degenerate("the two clusters share no line".into()));
    }
    let ev = Evaluator::new(net, p, outside)?;
    let candidates = cross.clone().into_iter().map(|keep| cross.iter().copied().filter(|&c| c != keep).collect());
    let (best, evaluated) = pick_best(&ev, candidates)?;
    Ok((best.set, evaluated))
}

/// Injections of the subnetwork induced by `block`, with every in-service
/// line leaving the block replaced by its flow: −f at the sending end, +f at
/// the receiving end.
pub fn boundary_injections(net: &PowerNetwork, block: &[usize], out: &LineSet, p: &[f64], flows: &[f64]) -> Vec<f64> {
    let mut inside = vec![usize::MAX; net.bus_count()];
    for (k, &v) in block.iter().enumerate() {
        inside[v] = k;
    }
    let mut local: Vec<f64> = block.iter().map(|&v| p[v]).collect();
    for l in net.lines().iter().filter(|l| !out.contains(&l.id)) {
        let (a, b) = (inside[l.from], inside[l.to]);
        if a != usize::MAX && b == usize::MAX {
            local[a] -= flows[l.id];
        } else if a == usize::MAX && b != usize::MAX {
            local[b] += flows[l.id];
        }
    }
    local
}

/// Flows after switching `newly_out` inside bridge-block `block`, solving
/// only the block. Lines outside the block keep their prior flows exactly.
pub fn local_flow_update(
    net: &PowerNetwork,
    p: &[f64],
    block: &[usize],
    out_before: &LineSet,
    newly_out: &LineSet,
    prior: &FlowVector,
) -> Result<FlowVector> {
    if newly_out.is_empty() {
        return Ok(prior.clone());
    }
    let mut inside = vec![false; net.bus_count()];
    for &v in block {
        inside[v] = true;
    }
    for &id in newly_out {
        let l = net.line(id);
        if !(inside[l.from] && inside[l.to]) {
            return Err(Error::InvalidArgument(format!("line {id} is not inside the block")));
        }
    }
    let local_p = boundary_injections(net, block, out_before, p, prior);
    let mut out = out_before.clone();
    out.extend(newly_out.iter().copied());
    let sub = net.induced(block, &out);
    let sys = LaplacianSystem::build(&sub.network)?;
    if !sys.is_connected() {
        return Err(Error::Disconnected("switching splits the block".into()));
    }
    let local = sys.dc_flow(&local_p)?;
    let mut flows = prior.clone();
    for &id in newly_out {
        flows.0[id] = 0.0;
    }
    for (k, &g) in sub.line_map.iter().enumerate() {
        flows.0[g] = local[k];
    }
    Ok(flows)
}

/// Isolated view of one bridge-block ready for OBI/OBS.
struct BlockView {
    vertices: Vec<usize>,
    network: PowerNetwork,
    line_map: Vec<usize>,
    injections: Vec<f64>,
    flows: Vec<f64>,
    outside: Loading,
}

fn block_view(net: &PowerNetwork, p: &[f64], out: &LineSet, flows: &[f64], block: &[usize]) -> Result<BlockView> {
    let sub = net.induced(block, out);
    let injections = boundary_injections(net, block, out, p, flows);
    let local = LaplacianSystem::build(&sub.network)?.dc_flow(&injections)?;
    let mut in_block = vec![false; net.bus_count()];
    for &v in block {
        in_block[v] = true;
    }
    let mut outside = Loading::NONE;
    for l in net.lines() {
        if !out.contains(&l.id) && !(in_block[l.from] && in_block[l.to]) {
            outside.add(l.capacity.loading(flows[l.id]));
        }
    }
    Ok(BlockView {
        vertices: block.to_vec(),
        network: sub.network,
        line_map: sub.line_map,
        injections,
        flows: local.0,
        outside,
    })
}

impl BlockView {
    fn to_global_lines(&self, local: &[usize]) -> Vec<usize> {
        let mut ids: Vec<usize> = local.iter().map(|&k| self.line_map[k]).collect();
        ids.sort_unstable();
        ids
    }

    /// Clusters of the block lifted to the whole network: block clusters plus
    /// every other bus as a cluster of the current bridge-block partition.
    fn lift(&self, local: &Partition, bb: &BridgeBlockDecomposition) -> Partition {
        let mut labels: Vec<usize> = bb.blocks.labels().iter().map(|&b| b + local.len()).collect();
        for (k, &v) in self.vertices.iter().enumerate() {
            labels[v] = local.cluster_of(k);
        }
        Partition::from_labels(&labels)
    }
}

/// Algorithm 1: split the largest bridge-block into `b` clusters and switch
/// off the best cross-edge set.
pub fn one_shot(net: &PowerNetwork, p: &[f64], b: usize, method: ClusteringMethod, cap: u64) -> Result<SwitchingPlan> {
    if b < 2 {
        return Err(Error::InvalidArgument(format!("b must be at least 2, got {b}")));
    }
    let none = LineSet::new();
    let flows = LaplacianSystem::build(net)?.dc_flow(p)?;
    let bb = net.graph().bridge_blocks();
    let largest = bb.largest();
    let block = bb.blocks.clusters()[largest].clone();
    if block.len() < 3 {
        tracing::info!("no bridge-block with a cycle; nothing to switch");
        return finish_plan(net, p, &none, Vec::new(), &bb.blocks, 0, 1);
    }
    let b_eff = b.min(block.len());
    if b_eff < b {
        tracing::warn!(b, block = block.len(), "largest bridge-block is smaller than b; using its size");
    }
    let view = block_view(net, p, &none, &flows, &block)?;
    let weights = FlowWeights::new(&view.network, &view.flows);
    let clusters = obi_solve(&weights, b_eff, method)?;
    let (local_set, evaluated, trees) =
        obs_local(&view.network, &view.injections, &clusters.partition, cap, view.outside)?;
    let switched = view.to_global_lines(&local_set);
    let partition = view.lift(&clusters.partition, &bb);
    finish_plan(net, p, &none, switched, &partition, evaluated, trees)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIters,
    CongestionThreshold,
    NoSplittableBlock,
}

#[derive(Debug, Clone, Serialize)]
pub struct Iteration {
    pub switched: Vec<usize>,
    pub gamma: f64,
    pub congested_count: usize,
    pub split_block_size: usize,
    pub cluster_sizes: Vec<usize>,
    pub bridge_block_sizes: Vec<usize>,
    pub runtime_sec: f64,
    /// max |local update − global re-solve| over all lines, MW.
    pub flow_check: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementTrace {
    pub gamma_initial: f64,
    pub iterations: Vec<Iteration>,
    pub stop_reason: StopReason,
    pub switched_lines: Vec<usize>,
    pub bridge_block_sizes: Vec<usize>,
    pub flows_after: FlowVector,
}

/// Algorithm 2: repeatedly bipartition the largest splittable bridge-block
/// while γ < δ and fewer than `i_max` splits were made.
pub fn recursive_refine(
    net: &PowerNetwork,
    p: &[f64],
    i_max: usize,
    delta: f64,
    method: ClusteringMethod,
) -> Result<RefinementTrace> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let start = congestion_level(net, &LineSet::new(), p)?;
    let mut flows = start.flows.clone();
    let mut gamma = start.gamma;
    let mut out = LineSet::new();
    let mut iterations = Vec::new();
    let mut stop = StopReason::MaxIters;
    while iterations.len() < i_max {
        if gamma >= delta {
            stop = StopReason::CongestionThreshold;
            break;
        }
        let t0 = Instant::now();
        let bb = net.graph_without(&out).bridge_blocks();
        let mut order: Vec<usize> = (0..bb.blocks.len()).filter(|&k| bb.blocks.clusters()[k].len() >= 3).collect();
        order.sort_by_key(|&k| (std::cmp::Reverse(bb.blocks.clusters()[k].len()), k));
        let mut applied = None;
        for k in order {
            let block = bb.blocks.clusters()[k].clone();
            let view = block_view(net, p, &out, &flows, &block)?;
            let weights = FlowWeights::new(&view.network, &view.flows);
            let clusters = match obi_solve(&weights, 2, method) {
                Ok(c) if c.partition.len() >= 2 => c,
                Ok(_) => {
                    tracing::warn!(block = k, "bipartition collapsed to one cluster; trying the next block");
                    continue;
                }
                Err(e) => {
                    tracing::warn!(block = k, error = %e, "could not bipartition block; trying the next block");
                    continue;
                }
            };
            let local = if clusters.partition.len() == 2 {
                obs_bipartition_local(&view.network, &view.injections, &clusters.partition, view.outside)?.0
            } else {
                obs_local(&view.network, &view.injections, &clusters.partition, DEFAULT_TREE_CAP, view.outside)?.0
            };
            let switched = view.to_global_lines(&local);
            applied = Some((block, switched, clusters.partition.sizes()));
            break;
        }
        let Some((block, switched, cluster_sizes)) = applied else {
            stop = StopReason::NoSplittableBlock;
            break;
        };
        let newly: LineSet = switched.iter().copied().collect();
        let updated = local_flow_update(net, p, &block, &out, &newly, &flows)?;
        out.extend(newly);
        let global = LaplacianSystem::build_without(net, &out)?.dc_flow(p)?;
        let flow_check = updated.iter().zip(global.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        flows = updated;
        let l = loading_of(net, &flows, &out);
        gamma = l.gamma;
        let new_bb = net.graph_without(&out).bridge_blocks();
        iterations.push(Iteration {
            switched,
            gamma,
            congested_count: l.congested,
            split_block_size: block.len(),
            cluster_sizes,
            bridge_block_sizes: sizes_desc(&new_bb),
            runtime_sec: t0.elapsed().as_secs_f64(),
            flow_check,
        });
    }
    if iterations.len() == i_max && stop == StopReason::MaxIters && gamma >= delta && i_max > 0 {
        stop = StopReason::CongestionThreshold;
    }
    let final_bb = net.graph_without(&out).bridge_blocks();
    Ok(RefinementTrace {
        gamma_initial: start.gamma,
        iterations,
        stop_reason: stop,
        switched_lines: out.into_iter().collect(),
        bridge_block_sizes: sizes_desc(&final_bb),
        flows_after: flows,
    })
}

/// Violated plan invariants (empty when the plan is sound): the switched
/// network keeps its islands, (G^E)_P is a tree, and BB(G^E) refines P.
pub fn plan_violations(net: &PowerNetwork, partition: &Partition, switched: &[usize]) -> Vec<String> {
    let out: LineSet = switched.iter().copied().collect();
    let g = net.graph_without(&out);
    let mut issues = Vec::new();
    if g.component_labels().1 != net.graph().component_labels().1 {
        issues.push("switched network lost connectivity".to_string());
    }
    if !is_tree(&reduced_graph(&g, partition)) {
        issues.push("reduced graph of the partition is not a tree".to_string());
    }
    if !is_finer(&g.bridge_blocks().blocks, partition) {
        issues.push("bridge-block decomposition is not finer than the partition".to_string());
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Bus, Capacity, Line};

    fn net(n: usize, lines: &[(usize, usize, f64, Option<f64>)]) -> PowerNetwork {
        let buses = (0..n)
            .map(|i| Bus { id: i, original_id: i as u64, injection_mw: 0.0, generation_mw: 0.0, is_generator: i == 0 })
            .collect();
        let lines = lines
            .iter()
            .enumerate()
            .map(|(k, &(a, b, s, c))| Line {
                id: k,
                from: a,
                to: b,
                susceptance: s,
                capacity: c.map_or(Capacity::Infinite, Capacity::Finite),
                merged_from: vec![k],
            })
            .collect();
        PowerNetwork::new(buses, lines).unwrap()
    }

    #[test]
    fn congestion_examples() {
        let path = net(3, &[(0, 1, 1.0, Some(2.0)), (1, 2, 1.0, Some(2.0))]);
        let c = congestion_level(&path, &LineSet::new(), &[1.0, 0.0, -1.0]).unwrap();
        assert!((c.gamma - 0.5).abs() < 1e-12);
        assert_eq!(c.congested, 0);
        let free = net(3, &[(0, 1, 1.0, None), (1, 2, 1.0, None)]);
        assert_eq!(congestion_level(&free, &LineSet::new(), &[1.0, 0.0, -1.0]).unwrap().gamma, 0.0);
        assert!(congestion_level(&path, &LineSet::from([0]), &[1.0, 0.0, -1.0]).is_err());
    }

    /// Two triangles linked by three lines (2,3), (1,4), (0,5).
    fn linked_triangles() -> PowerNetwork {
        net(
            6,
            &[
                (0, 1, 1.0, Some(3.0)),
                (1, 2, 1.0, Some(3.0)),
                (2, 0, 1.0, Some(3.0)),
                (3, 4, 1.0, Some(3.0)),
                (4, 5, 1.0, Some(3.0)),
                (5, 3, 1.0, Some(3.0)),
                (2, 3, 2.0, Some(2.5)),
                (1, 4, 1.0, Some(1.0)),
                (0, 5, 0.5, Some(4.0)),
            ],
        )
    }

    #[test]
    fn bipartition_picks_the_best_kept_line() {
        let n = linked_triangles();
        let p = [2.0, 0.5, 0.0, -1.0, -0.5, -1.0];
        let part = Partition::from_clusters(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let plan = obs_bipartition(&n, &p, &part).unwrap();
        assert_eq!(plan.switched_lines.len(), 2);
        assert_eq!(plan.candidates_evaluated, 3);
        let mut best = f64::INFINITY;
        for keep in [6, 7, 8] {
            let e: LineSet = [6, 7, 8].into_iter().filter(|&c| c != keep).collect();
            best = best.min(congestion_level(&n, &e, &p).unwrap().gamma);
        }
        assert!((plan.gamma - best).abs() < 1e-12);
        assert!(plan_violations(&n, &part, &plan.switched_lines).is_empty());
        // the same answer through spanning-tree enumeration
        let general = obs_solve(&n, &p, &part, DEFAULT_TREE_CAP).unwrap();
        assert_eq!(general.switched_lines, plan.switched_lines);
    }

    #[test]
    fn tree_reduced_graph_means_no_switching() {
        let n = net(4, &[(0, 1, 1.0, None), (1, 2, 1.0, None), (2, 0, 1.0, None), (2, 3, 1.0, None)]);
        let part = Partition::from_clusters(4, vec![vec![0, 1, 2], vec![3]]).unwrap();
        let plan = obs_solve(&n, &[1.0, 0.0, 0.0, -1.0], &part, 10).unwrap();
        assert!(plan.switched_lines.is_empty());
        let single = obs_bipartition(&n, &[1.0, 0.0, 0.0, -1.0], &part).unwrap();
        assert!(single.switched_lines.is_empty());
    }

    #[test]
    fn degenerate_bipartition() {
        let n = net(4, &[(0, 1, 1.0, None), (2, 3, 1.0, None)]);
        let part = Partition::from_clusters(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(matches!(obs_bipartition(&n, &[0.0; 4], &part), Err(Error::Degenerate(_))));
    }

    #[test]
    fn one_shot_on_a_cycle() {
        let ring = net(
            5,
            &[(0, 1, 1.0, Some(2.0)), (1, 2, 1.0, Some(2.0)), (2, 3, 1.0, Some(2.0)), (3, 4, 1.0, Some(2.0)), (4, 0, 1.0, Some(2.0))],
        );
        let p = [1.0, 0.5, -0.5, -1.5, 0.5];
        let plan = one_shot(&ring, &p, 2, ClusteringMethod::FastGreedy, DEFAULT_TREE_CAP).unwrap();
        assert_eq!(plan.switched_lines.len(), 1);
        assert_eq!(plan.bridge_block_count, 5);
        let best = (0..5)
            .map(|l| congestion_level(&ring, &LineSet::from([l]), &p).unwrap().gamma)
            .filter(|_| true)
            .fold(f64::INFINITY, f64::min);
        assert!(plan.gamma >= best - 1e-12);
    }

    #[test]
    fn one_shot_on_a_tree_is_a_no_op() {
        let path = net(3, &[(0, 1, 1.0, None), (1, 2, 1.0, None)]);
        let plan = one_shot(&path, &[1.0, 0.0, -1.0], 2, ClusteringMethod::FastGreedy, 10).unwrap();
        assert!(plan.switched_lines.is_empty());
    }

    fn two_triangles() -> PowerNetwork {
        net(
            6,
            &[
                (0, 1, 1.0, None),
                (1, 2, 1.0, None),
                (2, 0, 1.0, None),
                (2, 3, 1.0, None),
                (3, 4, 1.0, None),
                (4, 5, 1.0, None),
                (5, 3, 1.0, None),
            ],
        )
    }

    #[test]
    fn local_update_leaves_other_blocks_alone() {
        let n = two_triangles();
        let p = [1.0, 0.5, -0.2, 0.3, -1.0, -0.6];
        let prior = LaplacianSystem::build(&n).unwrap().dc_flow(&p).unwrap();
        let same = local_flow_update(&n, &p, &[0, 1, 2], &LineSet::new(), &LineSet::new(), &prior).unwrap();
        assert_eq!(same, prior);
        let after = local_flow_update(&n, &p, &[0, 1, 2], &LineSet::new(), &LineSet::from([0]), &prior).unwrap();
        for l in 3..7 {
            assert_eq!(after[l].to_bits(), prior[l].to_bits());
        }
        let global = LaplacianSystem::build_without(&n, &LineSet::from([0])).unwrap().dc_flow(&p).unwrap();
        for l in 0..7 {
            assert!((after[l] - global[l]).abs() < 1e-12);
        }
        let local = boundary_injections(&n, &[0, 1, 2], &LineSet::new(), &p, &prior);
        assert!(local.iter().sum::<f64>().abs() < 1e-12);
        assert!(local_flow_update(&n, &p, &[0, 1, 2], &LineSet::new(), &LineSet::from([3]), &prior).is_err());
    }

    #[test]
    fn recursive_basics() {
        let n = two_triangles();
        let p = [1.0, 0.5, -0.2, 0.3, -1.0, -0.6];
        let empty = recursive_refine(&n, &p, 0, 1.0, ClusteringMethod::FastGreedy).unwrap();
        assert!(empty.iterations.is_empty());
        let path = net(3, &[(0, 1, 1.0, None), (1, 2, 1.0, None)]);
        let t = recursive_refine(&path, &[1.0, 0.0, -1.0], 3, 1.0, ClusteringMethod::FastGreedy).unwrap();
        assert!(t.iterations.is_empty());
        assert_eq!(t.stop_reason, StopReason::NoSplittableBlock);

        let t = recursive_refine(&n, &p, 2, 1.0, ClusteringMethod::FastGreedy).unwrap();
        assert_eq!(t.iterations.len(), 2);
        let mut blocks = 2;
        for it in &t.iterations {
            assert!(it.flow_check < 1e-10);
            assert!(it.bridge_block_sizes.len() > blocks);
            blocks = it.bridge_block_sizes.len();
        }
        assert_eq!(t.stop_reason, StopReason::MaxIters);
    }
}
