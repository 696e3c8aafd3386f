//! Flow-weighted modularity and the clustering methods used to pick
//! candidate bridge-blocks.
//!
//! Edge weights are absolute line flows. Modularity sums over ordered vertex
//! pairs, diagonal included:
//! `Q = (1/2M) Σ_r Σ_{i,j∈V_r} (|f_ij| − F_i F_j / 2M)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::network::PowerNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedEdge {
    pub a: usize,
    pub b: usize,
    pub line: usize,
    pub weight: f64,
}

/// |f| per line, node strengths F and total weight M.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowWeights {
    pub edges: Vec<WeightedEdge>,
    pub strength: Vec<f64>,
    pub total: f64,
}

impl FlowWeights {
    /// Weights from a flow vector indexed by line id.
    pub fn new(net: &PowerNetwork, flows: &[f64]) -> FlowWeights {
        let edges = net
            .lines()
            .iter()
            .map(|l| WeightedEdge { a: l.from, b: l.to, line: l.id, weight: flows[l.id].abs() })
            .collect();
        FlowWeights::from_edges(net.bus_count(), edges)
    }

    pub fn from_edges(n: usize, edges: Vec<WeightedEdge>) -> FlowWeights {
        let mut strength = vec![0.0; n];
        for e in &edges {
            strength[e.a] += e.weight;
            strength[e.b] += e.weight;
        }
        let total = edges.iter().map(|e| e.weight).sum();
        FlowWeights { edges, strength, total }
    }

    pub fn vertex_count(&self) -> usize {
        self.strength.len()
    }

    /// The underlying graph, zero-weight edges included.
    pub fn graph(&self) -> Graph {
        Graph::new(self.vertex_count(), self.edges.iter().map(|e| (e.a, e.b, e.line)).collect())
    }

    fn require_flow(&self) -> Result<f64> {
        if self.total > 0.0 {
            Ok(2.0 * self.total)
        } else {
            Err(Error::UndefinedObjective("total flow weight M is zero".into()))
        }
    }
}

/// Per cluster: (weight of internal edges, volume).
fn cluster_sums(w: &FlowWeights, p: &Partition) -> Vec<(f64, f64)> {
    let mut sums = vec![(0.0, 0.0); p.len()];
    for e in &w.edges {
        let (ca, cb) = (p.cluster_of(e.a), p.cluster_of(e.b));
        if ca == cb {
            sums[ca].0 += e.weight;
        }
    }
    for (v, &f) in w.strength.iter().enumerate() {
        sums[p.cluster_of(v)].1 += f;
    }
    sums
}

pub fn modularity(w: &FlowWeights, p: &Partition) -> Result<f64> {
    let two_m = w.require_flow()?;
    let q: f64 = cluster_sums(w, p).iter().map(|&(inner, vol)| 2.0 * inner - vol * vol / two_m).sum();
    Ok(q / two_m)
}

/// Q_n = (1/2M) Σ_r (1/Vol_r) Σ_{i,j∈V_r} (|f_ij| − F_i F_j / 2M).
pub fn normalized_modularity(w: &FlowWeights, p: &Partition) -> Result<f64> {
    let two_m = w.require_flow()?;
    let mut q = 0.0;
    for (k, (inner, vol)) in cluster_sums(w, p).into_iter().enumerate() {
        if vol <= 0.0 {
            return Err(Error::UndefinedObjective(format!("cluster {k} has zero strength")));
        }
        q += (2.0 * inner - vol * vol / two_m) / vol;
    }
    Ok(q / two_m)
}

/// Total weight of edges leaving `cluster`.
pub fn cut_value(w: &FlowWeights, cluster: &[usize]) -> f64 {
    let mut inside = vec![false; w.vertex_count()];
    for &v in cluster {
        inside[v] = true;
    }
    w.edges.iter().filter(|e| inside[e.a] != inside[e.b]).map(|e| e.weight).sum()
}

pub fn volume(w: &FlowWeights, cluster: &[usize]) -> f64 {
    cluster.iter().map(|&v| w.strength[v]).sum()
}

/// Σ_r Cut(V_r)/Vol(V_r) for any number of clusters.
pub fn normalized_cut_sum(w: &FlowWeights, p: &Partition) -> Result<f64> {
    let mut total = 0.0;
    for (k, c) in p.clusters().iter().enumerate() {
        let vol = volume(w, c);
        if vol <= 0.0 {
            return Err(Error::UndefinedObjective(format!("cluster {k} has zero volume")));
        }
        total += cut_value(w, c) / vol;
    }
    Ok(total)
}

/// NCut(V, Vᶜ) = Cut/Vol(V) + Cut/Vol(Vᶜ) of a bipartition.
pub fn ncut(w: &FlowWeights, p: &Partition) -> Result<f64> {
    if p.len() != 2 {
        return Err(Error::InvalidArgument(format!("NCut needs a bipartition, got {} clusters", p.len())));
    }
    normalized_cut_sum(w, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ClusteringMethod {
    #[serde(rename = "fastgreedy")]
    FastGreedy,
    #[serde(rename = "spectral_Ln")]
    SpectralLn,
    #[serde(rename = "spectral_Bn")]
    SpectralBn,
}

impl ClusteringMethod {
    pub const ALL: [ClusteringMethod; 3] =
        [ClusteringMethod::FastGreedy, ClusteringMethod::SpectralLn, ClusteringMethod::SpectralBn];

    pub fn name(self) -> &'static str {
        match self {
            ClusteringMethod::FastGreedy => "fastgreedy",
            ClusteringMethod::SpectralLn => "spectral_Ln",
            ClusteringMethod::SpectralBn => "spectral_Bn",
        }
    }
}

impl fmt::Display for ClusteringMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClusteringMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "fastgreedy" | "fast-greedy" => Ok(ClusteringMethod::FastGreedy),
            "spectral-ln" | "ln" => Ok(ClusteringMethod::SpectralLn),
            "spectral-bn" | "bn" => Ok(ClusteringMethod::SpectralBn),
            _ => Err(Error::InvalidArgument(format!("unknown clustering method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusteringResult {
    #[serde(skip)]
    pub partition: Partition,
    pub clusters: Vec<Vec<usize>>,
    pub method: ClusteringMethod,
    pub q: f64,
    /// Absent when some cluster carries no flow.
    pub q_n: Option<f64>,
}

impl ClusteringResult {
    fn new(w: &FlowWeights, partition: Partition, method: ClusteringMethod) -> Result<ClusteringResult> {
        let q = modularity(w, &partition)?;
        let q_n = normalized_modularity(w, &partition).ok();
        Ok(ClusteringResult { clusters: partition.clusters().to_vec(), partition, method, q, q_n })
    }
}

fn check_b(n: usize, b: usize) -> Result<()> {
    if b == 0 || b > n {
        return Err(Error::InvalidArgument(format!("target cluster count {b} outside 1..={n}")));
    }
    Ok(())
}

/// One FastGreedy merge: the clusters joined (by index = smallest vertex) and the gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub gain: f64,
    /// Largest gain over all adjacent pairs at that step.
    pub best_available: f64,
}

/// Weighted CNM agglomeration stopped at `b` clusters, with its merge log.
pub fn fastgreedy_trace(w: &FlowWeights, b: usize) -> Result<(Partition, Vec<Merge>)> {
    let n = w.vertex_count();
    check_b(n, b)?;
    let two_m = w.require_flow()?;
    // cluster index = smallest vertex; links keyed (low, high)
    let mut label: Vec<usize> = (0..n).collect();
    let mut members: BTreeMap<usize, Vec<usize>> = (0..n).map(|v| (v, vec![v])).collect();
    let mut share: BTreeMap<usize, f64> = (0..n).map(|v| (v, w.strength[v] / two_m)).collect();
    let mut links: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for e in &w.edges {
        let key = (e.a.min(e.b), e.a.max(e.b));
        *links.entry(key).or_insert(0.0) += e.weight / two_m;
    }
    let mut merges = Vec::new();
    while members.len() > b {
        let mut best: Option<((usize, usize), f64)> = None;
        for (&(x, y), &wxy) in &links {
            let gain = 2.0 * (wxy - share[&x] * share[&y]);
            if best.is_none_or(|(_, g)| gain > g + 1e-15) {
                best = Some(((x, y), gain));
            }
        }
        let Some(((x, y), gain)) = best else {
            return Err(Error::Degenerate(format!(
                "graph splits into {} unlinked pieces, cannot reach {b} clusters",
                members.len()
            )));
        };
        merges.push(Merge { left: x, right: y, gain, best_available: gain });
        // y is absorbed into x (x < y keeps the smaller index)
        let moved = members.remove(&y).unwrap();
        for &v in &moved {
            label[v] = x;
        }
        members.get_mut(&x).unwrap().extend(moved);
        let sy = share.remove(&y).unwrap();
        *share.get_mut(&x).unwrap() += sy;
        let old = std::mem::take(&mut links);
        for ((a, c), wt) in old {
            let a = if a == y { x } else { a };
            let c = if c == y { x } else { c };
            if a == c {
                continue;
            }
            *links.entry((a.min(c), a.max(c))).or_insert(0.0) += wt;
        }
    }
    Ok((Partition::from_labels(&label), merges))
}

pub fn fastgreedy(w: &FlowWeights, b: usize) -> Result<ClusteringResult> {
    let (p, _) = fastgreedy_trace(w, b)?;
    ClusteringResult::new(w, p, ClusteringMethod::FastGreedy)
}

/// Spectral clustering on L_n = W^{-1/2} L W^{-1/2} (eigenvectors 2..b) or on
/// B_n = W^{-1/2} B W^{-1/2} (the b−1 leading eigenvectors), W = diag(F).
/// Vertices without flow are attached afterwards to the cluster of the
/// nearest flow-carrying vertex by hop count.
pub fn spectral_cluster(w: &FlowWeights, b: usize, method: ClusteringMethod) -> Result<ClusteringResult> {
    let n = w.vertex_count();
    check_b(n, b)?;
    let two_m = w.require_flow()?;
    if method == ClusteringMethod::FastGreedy {
        return Err(Error::InvalidArgument("fastgreedy is not a spectral method".into()));
    }
    if b == 1 {
        return ClusteringResult::new(w, Partition::whole(n), method);
    }
    if b == n {
        return ClusteringResult::new(w, Partition::singletons(n), method);
    }
    let active: Vec<usize> = (0..n).filter(|&v| w.strength[v] > 0.0).collect();
    if active.len() < b {
        return Err(Error::Degenerate(format!("only {} buses carry flow, fewer than b = {b}", active.len())));
    }
    let mut local = vec![usize::MAX; n];
    for (k, &v) in active.iter().enumerate() {
        local[v] = k;
    }
    let na = active.len();
    let mut adj = DMatrix::<f64>::zeros(na, na);
    for e in &w.edges {
        let (a, c) = (local[e.a], local[e.b]);
        if a != usize::MAX && c != usize::MAX {
            adj[(a, c)] += e.weight;
            adj[(c, a)] += e.weight;
        }
    }
    let f: Vec<f64> = active.iter().map(|&v| w.strength[v]).collect();
    let inv_sqrt: Vec<f64> = f.iter().map(|x| 1.0 / x.sqrt()).collect();
    let matrix = DMatrix::from_fn(na, na, |i, j| {
        let base = match method {
            ClusteringMethod::SpectralLn => (if i == j { f[i] } else { 0.0 }) - adj[(i, j)],
            _ => adj[(i, j)] - f[i] * f[j] / two_m,
        };
        inv_sqrt[i] * base * inv_sqrt[j]
    });
    let eig = SymmetricEigen::try_new(matrix, 1e-14, 10_000)
        .ok_or_else(|| Error::Numeric("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..na).collect();
    order.sort_by(|&x, &y| f64::total_cmp(&eig.eigenvalues[x], &eig.eigenvalues[y]).then(x.cmp(&y)));
    let picked: Vec<usize> = match method {
        ClusteringMethod::SpectralLn => order[1..b].to_vec(),
        _ => {
            // B_n always has eigenvalue 0 with eigenvector W^{1/2}1; it carries
            // no partition information, so it is never selected.
            let norm = f.iter().sum::<f64>().sqrt();
            let alignment = |k: usize| (0..na).map(|i| eig.eigenvectors[(i, k)] * f[i].sqrt()).sum::<f64>().abs() / norm;
            let trivial = (0..na).max_by(|&x, &y| alignment(x).total_cmp(&alignment(y))).unwrap_or(0);
            order.iter().rev().filter(|&&k| k != trivial).take(b - 1).copied().collect()
        }
    };
    let embedding: Vec<Vec<f64>> = {
        let cols: Vec<Vec<f64>> = picked
            .iter()
            .map(|&k| {
                let mut v: Vec<f64> = (0..na).map(|i| eig.eigenvectors[(i, k)] * inv_sqrt[i]).collect();
                fix_sign(&mut v);
                v
            })
            .collect();
        (0..na).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
    };
    let labels_active = if b == 2 { sign_split(&embedding) } else { kmeans(&embedding, b) };
    let mut labels = vec![usize::MAX; n];
    for (k, &v) in active.iter().enumerate() {
        labels[v] = labels_active[k];
    }
    attach_by_hops(&w.graph(), &mut labels);
    ClusteringResult::new(w, Partition::from_labels(&labels), method)
}

/// Largest-magnitude entry made positive (first such entry on ties).
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (k, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = k;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Entries at or above zero go one side, negatives the other; values within
/// 1e-10 of the largest magnitude count as zero.
fn sign_split(embedding: &[Vec<f64>]) -> Vec<usize> {
    let scale = embedding.iter().map(|r| r[0].abs()).fold(0.0, f64::max);
    embedding.iter().map(|r| usize::from(r[0] < -1e-10 * scale)).collect()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's k-means with farthest-point seeding from the largest-norm row.
fn kmeans(rows: &[Vec<f64>], k: usize) -> Vec<usize> {
    let norm = |r: &Vec<f64>| r.iter().map(|x| x * x).sum::<f64>();
    let mut first = 0;
    for (i, r) in rows.iter().enumerate() {
        if norm(r) > norm(&rows[first]) {
            first = i;
        }
    }
    let mut centers = vec![rows[first].clone()];
    while centers.len() < k {
        let mut pick = 0;
        let mut far = -1.0;
        for (i, r) in rows.iter().enumerate() {
            let d = centers.iter().map(|c| dist2(r, c)).fold(f64::INFINITY, f64::min);
            if d > far {
                far = d;
                pick = i;
            }
        }
        centers.push(rows[pick].clone());
    }
    let nearest = |r: &Vec<f64>, centers: &[Vec<f64>]| {
        let mut best = 0;
        for (c, center) in centers.iter().enumerate() {
            if dist2(r, center) < dist2(r, &centers[best]) {
                best = c;
            }
        }
        best
    };
    let mut labels: Vec<usize> = rows.iter().map(|r| nearest(r, &centers)).collect();
    for _ in 0..100 {
        let dim = rows[0].len();
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (r, &l) in rows.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(r) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        let next: Vec<usize> = rows.iter().map(|r| nearest(r, &centers)).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    labels
}

/// Fills `usize::MAX` labels from the closest labelled vertex (hop count,
/// then smallest label). Unreachable vertices get a fresh label each.
fn attach_by_hops(g: &Graph, labels: &mut [usize]) {
    let unlabelled: Vec<usize> = (0..labels.len()).filter(|&v| labels[v] == usize::MAX).collect();
    if unlabelled.is_empty() {
        return;
    }
    let known = labels.to_vec();
    let mut fresh: usize = known.iter().filter(|&&l| l != usize::MAX).max().map_or(0, |m| m + 1);
    for v in unlabelled {
        let dist = g.hop_distances(&[v]);
        let best = (0..known.len())
            .filter(|&u| known[u] != usize::MAX && dist[u] != usize::MAX)
            .min_by_key(|&u| (dist[u], known[u]));
        labels[v] = match best {
            Some(u) => known[u],
            None => {
                fresh += 1;
                fresh - 1
            }
        };
    }
}

/// OBI-b: cluster, then split clusters that are not connected in the
/// underlying graph so every cluster induces a connected subgraph.
pub fn obi_solve(w: &FlowWeights, b: usize, method: ClusteringMethod) -> Result<ClusteringResult> {
    check_b(w.vertex_count(), b)?;
    let raw = match method {
        ClusteringMethod::FastGreedy => fastgreedy(w, b)?,
        _ => spectral_cluster(w, b, method)?,
    };
    let refined = raw.partition.refine_connected(&w.graph());
    if refined.len() != raw.partition.len() {
        tracing::debug!(before = raw.partition.len(), after = refined.len(), "split disconnected clusters");
    }
    ClusteringResult::new(w, refined, method)
}

/// One row of the method comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub method: ClusteringMethod,
    pub runtime_sec: f64,
    pub b: usize,
    pub q_n: Option<f64>,
    pub cross_edge_fraction: f64,
    pub lines_to_switch: usize,
    pub cluster_sizes: Vec<usize>,
}

/// Runs each method for each b concurrently; rows come back in
/// (b, method) order.
pub fn compare_methods(w: &FlowWeights, bs: &[usize], methods: &[ClusteringMethod]) -> Result<Vec<ComparisonRow>> {
    let g = w.graph();
    let jobs: Vec<(usize, ClusteringMethod)> =
        bs.iter().flat_map(|&b| methods.iter().map(move |&m| (b, m))).collect();
    jobs.par_iter()
        .map(|&(b, method)| {
            let start = Instant::now();
            let result = obi_solve(w, b, method)?;
            let runtime_sec = start.elapsed().as_secs_f64();
            let cross = result.partition.cross_edges(&g).len();
            let mut cluster_sizes = result.partition.sizes();
            cluster_sizes.sort_unstable_by(|a, b| b.cmp(a));
            Ok(ComparisonRow {
                method,
                runtime_sec,
                b,
                q_n: result.q_n,
                cross_edge_fraction: cross as f64 / g.edge_count().max(1) as f64,
                lines_to_switch: cross.saturating_sub(result.partition.len() - 1),
                cluster_sizes,
            })
        })
        .collect()
}
