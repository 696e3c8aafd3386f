//! Combinatorial structure of a network: islands, bridges, blocks,
//! bridge-blocks, partitions and their reduced multigraphs, spanning trees.
//!
//! [`Graph`] is an undirected multigraph whose edges carry the id of the
//! line they came from, so every result is reported in line ids of the
//! originating [`PowerNetwork`] regardless of which lines were removed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::network::{LineSet, PowerNetwork};

const NONE: usize = usize::MAX;

/// Largest edge count accepted by the exhaustive two-tree forest scan.
pub const MAX_FOREST_EDGES: usize = 16;

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    /// (a, b, line id) per edge index
    edges: Vec<(usize, usize, usize)>,
    /// (neighbour, edge index)
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize, usize)>) -> Graph {
        let mut adj = vec![Vec::new(); n];
        for (k, &(a, b, _)) in edges.iter().enumerate() {
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        Graph { n, edges, adj }
    }

    pub fn from_network(net: &PowerNetwork, removed: &LineSet) -> Graph {
        let edges = net
            .lines()
            .iter()
            .filter(|l| !removed.contains(&l.id))
            .map(|l| (l.from, l.to, l.id))
            .collect();
        Graph::new(net.bus_count(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// (a, b, line id) triples.
    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    pub fn line_ids(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.2).collect()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&(w, _)| w)
    }

    /// Component label per vertex; labels ordered by smallest member.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let mut label = vec![NONE; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if label[s] != NONE {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for &(w, _) in &self.adj[v] {
                    if label[w] == NONE {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Connected components (islands), each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let (label, count) = self.component_labels();
        let mut comps = vec![Vec::new(); count];
        for (v, &c) in label.iter().enumerate() {
            comps[c].push(v);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.component_labels().1 == 1
    }

    /// Connected pieces of the subgraph induced by `vertices`.
    pub fn induced_components(&self, vertices: &[usize]) -> Vec<Vec<usize>> {
        let mut inside = vec![false; self.n];
        for &v in vertices {
            inside[v] = true;
        }
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        for &s in &sorted {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &(w, _) in &self.adj[v] {
                    if inside[w] && !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// BFS hop distances from `sources` (NONE when unreachable).
    pub fn hop_distances(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![NONE; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &self.adj[v] {
                if dist[w] == NONE {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// One iterative low-link DFS yielding bridges, blocks and cut vertices.
    fn lowlink(&self) -> LowLink {
        let n = self.n;
        let mut disc = vec![NONE; n];
        let mut low = vec![0; n];
        let mut time = 0;
        let mut bridges = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut cut = BTreeSet::new();
        let mut edge_stack: Vec<usize> = Vec::new();
        let mut stack: Vec<(usize, usize, usize)> = Vec::new();

        for root in 0..n {
            if disc[root] != NONE {
                continue;
            }
            disc[root] = time;
            low[root] = time;
            time += 1;
            let mut root_children = 0;
            stack.push((root, NONE, 0));
            while let Some(top) = stack.last_mut() {
                let (v, parent_edge, pos) = *top;
                if pos < self.adj[v].len() {
                    top.2 += 1;
                    let (w, e) = self.adj[v][pos];
                    if e == parent_edge {
                        continue;
                    }
                    if disc[w] == NONE {
                        if v == root {
                            root_children += 1;
                        }
                        edge_stack.push(e);
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        stack.push((w, e, 0));
                    } else if disc[w] < disc[v] {
                        edge_stack.push(e);
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(u, _, _)) = stack.last() {
                        low[u] = low[u].min(low[v]);
                        if low[v] >= disc[u] {
                            if u != root {
                                cut.insert(u);
                            }
                            let mut block = Vec::new();
                            while let Some(e) = edge_stack.pop() {
                                block.push(e);
                                if e == parent_edge {
                                    break;
                                }
                            }
                            blocks.push(block);
                        }
                        if low[v] > disc[u] {
                            bridges.push(parent_edge);
                        }
                    }
                }
            }
            if root_children >= 2 {
                cut.insert(root);
            }
        }
        LowLink { bridges, blocks, cut }
    }

    /// Bridge line ids, sorted.
    pub fn bridges(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.lowlink().bridges.into_iter().map(|e| self.edges[e].2).collect();
        ids.sort_unstable();
        ids
    }

    pub fn bridge_blocks(&self) -> BridgeBlockDecomposition {
        let bridges: BTreeSet<usize> = self.bridges().into_iter().collect();
        let kept = self.edges.iter().copied().filter(|e| !bridges.contains(&e.2)).collect();
        let labels = Graph::new(self.n, kept).component_labels().0;
        let blocks = Partition::from_labels(&labels);
        let tree = reduced_graph(self, &blocks);
        BridgeBlockDecomposition { blocks, bridges, tree }
    }

    pub fn blocks(&self) -> BlockDecomposition {
        let ll = self.lowlink();
        let mut blocks: Vec<Vec<usize>> = ll
            .blocks
            .into_iter()
            .map(|b| {
                let mut ids: Vec<usize> = b.into_iter().map(|e| self.edges[e].2).collect();
                ids.sort_unstable();
                ids
            })
            .collect();
        blocks.sort();
        let by_id: BTreeMap<usize, (usize, usize)> = self.edges.iter().map(|&(a, b, id)| (id, (a, b))).collect();
        let mut block_of_line = BTreeMap::new();
        let mut vertices = Vec::with_capacity(blocks.len());
        for (k, block) in blocks.iter().enumerate() {
            let mut vs = BTreeSet::new();
            for id in block {
                block_of_line.insert(*id, k);
                let (a, b) = by_id[id];
                vs.insert(a);
                vs.insert(b);
            }
            vertices.push(vs.into_iter().collect());
        }
        BlockDecomposition { blocks, vertices, cut_vertices: ll.cut, block_of_line }
    }
}

struct LowLink {
    bridges: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    cut: BTreeSet<usize>,
}

/// A vertex partition; clusters sorted internally and ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    clusters: Vec<Vec<usize>>,
    cluster_of: Vec<usize>,
}

impl Partition {
    pub fn from_clusters(n: usize, clusters: Vec<Vec<usize>>) -> Result<Partition> {
        let mut labels = vec![NONE; n];
        for (k, cluster) in clusters.iter().enumerate() {
            if cluster.is_empty() {
                return Err(Error::InvalidArgument("partition has an empty cluster".into()));
            }
            for &v in cluster {
                if v >= n {
                    return Err(Error::InvalidArgument(format!("vertex {v} out of range")));
                }
                if labels[v] != NONE {
                    return Err(Error::InvalidArgument(format!("vertex {v} appears in two clusters")));
                }
                labels[v] = k;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == NONE) {
            return Err(Error::InvalidArgument(format!("vertex {v} is not covered")));
        }
        Ok(Partition::from_labels(&labels))
    }

    /// Groups vertices by label; cluster order follows smallest member.
    pub fn from_labels(labels: &[usize]) -> Partition {
        let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
        let mut cluster_of = Vec::with_capacity(labels.len());
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for (v, &l) in labels.iter().enumerate() {
            let k = *remap.entry(l).or_insert_with(|| {
                clusters.push(Vec::new());
                clusters.len() - 1
            });
            clusters[k].push(v);
            cluster_of.push(k);
        }
        Partition { clusters, cluster_of }
    }

    pub fn singletons(n: usize) -> Partition {
        Partition::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn whole(n: usize) -> Partition {
        Partition::from_labels(&vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.cluster_of[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.cluster_of
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }

    /// Line ids of edges joining different clusters, in edge order.
    pub fn cross_edges(&self, g: &Graph) -> Vec<usize> {
        g.edges()
            .iter()
            .filter(|&&(a, b, _)| self.cluster_of[a] != self.cluster_of[b])
            .map(|e| e.2)
            .collect()
    }

    /// Every cluster induces a connected subgraph.
    pub fn clusters_connected(&self, g: &Graph) -> bool {
        self.clusters.iter().all(|c| g.induced_components(c).len() == 1)
    }

    /// Splits every cluster into its connected pieces.
    pub fn refine_connected(&self, g: &Graph) -> Partition {
        let mut labels = vec![0; self.vertex_count()];
        let mut next = 0;
        for c in &self.clusters {
            for piece in g.induced_components(c) {
                for v in piece {
                    labels[v] = next;
                }
                next += 1;
            }
        }
        Partition::from_labels(&labels)
    }
}

/// True iff every cluster of `fine` lies inside one cluster of `coarse`.
pub fn is_finer(fine: &Partition, coarse: &Partition) -> bool {
    fine.vertex_count() == coarse.vertex_count()
        && fine.clusters().iter().all(|c| {
            let target = coarse.cluster_of(c[0]);
            c.iter().all(|&v| coarse.cluster_of(v) == target)
        })
}

/// Clusters as nodes, one edge per cross edge (parallel edges kept).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedMultigraph {
    pub node_count: usize,
    /// (cluster a, cluster b, line id)
    pub edges: Vec<(usize, usize, usize)>,
}

impl ReducedMultigraph {
    pub fn as_graph(&self) -> Graph {
        Graph::new(self.node_count, self.edges.clone())
    }

    pub fn line_ids(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.2).collect()
    }
}

pub fn reduced_graph(g: &Graph, p: &Partition) -> ReducedMultigraph {
    let edges = g
        .edges()
        .iter()
        .filter_map(|&(a, b, id)| {
            let (ca, cb) = (p.cluster_of(a), p.cluster_of(b));
            (ca != cb).then_some((ca, cb, id))
        })
        .collect();
    ReducedMultigraph { node_count: p.len(), edges }
}

/// Connected with exactly `nodes - 1` edges, parallel edges counted.
pub fn is_tree(rg: &ReducedMultigraph) -> bool {
    rg.node_count >= 1 && rg.edges.len() + 1 == rg.node_count && rg.as_graph().is_connected()
}

#[derive(Debug, Clone)]
pub struct BridgeBlockDecomposition {
    pub blocks: Partition,
    pub bridges: BTreeSet<usize>,
    /// One node per bridge-block, one edge per bridge.
    pub tree: ReducedMultigraph,
}

impl BridgeBlockDecomposition {
    /// Block sizes with more than two buses, descending.
    pub fn nontrivial_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.blocks.sizes().into_iter().filter(|&s| s > 2).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    /// Index of the largest block (smallest index on ties).
    pub fn largest(&self) -> usize {
        let sizes = self.blocks.sizes();
        let max = *sizes.iter().max().unwrap_or(&0);
        sizes.iter().position(|&s| s == max).unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    /// Line ids of each biconnected component.
    pub blocks: Vec<Vec<usize>>,
    /// Vertices of each block.
    pub vertices: Vec<Vec<usize>>,
    pub cut_vertices: BTreeSet<usize>,
    pub block_of_line: BTreeMap<usize, usize>,
}

impl BlockDecomposition {
    pub fn is_nontrivial(&self, block: usize) -> bool {
        self.blocks[block].len() > 1
    }

    pub fn nontrivial_count(&self) -> usize {
        (0..self.blocks.len()).filter(|&b| self.is_nontrivial(b)).count()
    }

    /// Both lines lie in one nontrivial block, i.e. on a common simple cycle.
    pub fn share_simple_cycle(&self, a: usize, b: usize) -> bool {
        match (self.block_of_line.get(&a), self.block_of_line.get(&b)) {
            (Some(x), Some(y)) => x == y && self.is_nontrivial(*x),
            _ => false,
        }
    }

    /// Whether some simple `j`-`k` path uses line `line`: the line's block lies
    /// on the block-cut tree path between `j` and `k`.
    pub fn on_simple_path(&self, line: usize, j: usize, k: usize) -> bool {
        if j == k {
            return false;
        }
        let Some(&target) = self.block_of_line.get(&line) else { return false };
        match self.block_path(j, k) {
            Some(path) => path.contains(&target),
            None => false,
        }
    }

    /// Blocks on the block-cut tree path between two vertices.
    pub fn block_path(&self, j: usize, k: usize) -> Option<Vec<usize>> {
        let nb = self.blocks.len();
        let cuts: Vec<usize> = self.cut_vertices.iter().copied().collect();
        let cut_index: BTreeMap<usize, usize> = cuts.iter().enumerate().map(|(i, &c)| (c, nb + i)).collect();
        let mut adj = vec![Vec::new(); nb + cuts.len()];
        for (b, vs) in self.vertices.iter().enumerate() {
            for v in vs {
                if let Some(&c) = cut_index.get(v) {
                    adj[b].push(c);
                    adj[c].push(b);
                }
            }
        }
        let node_of = |v: usize| -> Option<usize> {
            cut_index
                .get(&v)
                .copied()
                .or_else(|| self.vertices.iter().position(|vs| vs.binary_search(&v).is_ok()))
        };
        let (s, t) = (node_of(j)?, node_of(k)?);
        let mut prev = vec![NONE; adj.len()];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            if x == t {
                break;
            }
            for &y in &adj[x] {
                if prev[y] == NONE {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if prev[t] == NONE {
            return None;
        }
        let mut path = Vec::new();
        let mut x = t;
        loop {
            if x < nb {
                path.push(x);
            }
            if x == s {
                break;
            }
            x = prev[x];
        }
        path.reverse();
        Some(path)
    }
}

/// Number of spanning trees by the matrix-tree theorem, exactly.
pub fn spanning_tree_count(rg: &ReducedMultigraph) -> BigUint {
    let n = rg.node_count;
    if n <= 1 {
        return BigUint::one();
    }
    if !rg.as_graph().is_connected() {
        return BigUint::zero();
    }
    let size = n - 1;
    let mut m = vec![vec![BigInt::zero(); size]; size];
    for &(a, b, _) in &rg.edges {
        if a == b {
            continue;
        }
        if a < size {
            m[a][a] += 1;
        }
        if b < size {
            m[b][b] += 1;
        }
        if a < size && b < size {
            m[a][b] -= 1;
            m[b][a] -= 1;
        }
    }
    bareiss_determinant(m).magnitude().clone()
}

/// Fraction-free Gaussian elimination; exact for integer matrices.
fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Lazily enumerates spanning trees of a reduced multigraph as sorted line-id
/// sets, lexicographically ordered.
pub fn enumerate_spanning_trees(rg: &ReducedMultigraph, cap: u64) -> Result<SpanningTrees> {
    let count = spanning_tree_count(rg);
    if count > BigUint::from(cap) {
        return Err(Error::EnumerationCap { count, cap });
    }
    Ok(SpanningTrees::new(rg))
}

/// Include/exclude recursion over edges sorted by line id. Including first
/// yields lexicographic order; exclusion is only explored while the remaining
/// edges still connect the graph, so every leaf is a spanning tree.
pub struct SpanningTrees {
    nodes: usize,
    edges: Vec<(usize, usize, usize)>,
    stack: Vec<TreeFrame>,
}

#[derive(Clone)]
struct TreeFrame {
    next: usize,
    stage: u8,
    parent: Vec<usize>,
    chosen: Vec<usize>,
    excluded: Vec<bool>,
}

impl SpanningTrees {
    fn new(rg: &ReducedMultigraph) -> SpanningTrees {
        let mut edges: Vec<(usize, usize, usize)> = rg.edges.iter().copied().filter(|e| e.0 != e.1).collect();
        edges.sort_by_key(|e| e.2);
        let connected = rg.node_count <= 1 || rg.as_graph().is_connected();
        let stack = if connected {
            vec![TreeFrame {
                next: 0,
                stage: 0,
                parent: (0..rg.node_count).collect(),
                chosen: Vec::new(),
                excluded: vec![false; edges.len()],
            }]
        } else {
            Vec::new()
        };
        SpanningTrees { nodes: rg.node_count, edges, stack }
    }

    fn still_connected(&self, excluded: &[bool]) -> bool {
        let mut parent: Vec<usize> = (0..self.nodes).collect();
        let mut comps = self.nodes;
        for (k, &(a, b, _)) in self.edges.iter().enumerate() {
            if excluded[k] {
                continue;
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                comps -= 1;
            }
        }
        comps <= 1
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl Iterator for SpanningTrees {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let target = self.nodes.saturating_sub(1);
        loop {
            let frame = self.stack.last_mut()?;
            if frame.chosen.len() == target {
                let tree = frame.chosen.iter().map(|&k| self.edges[k].2).collect();
                self.stack.pop();
                return Some(tree);
            }
            if frame.next >= self.edges.len() {
                self.stack.pop();
                continue;
            }
            let k = frame.next;
            match frame.stage {
                0 => {
                    frame.stage = 1;
                    let (a, b, _) = self.edges[k];
                    let mut parent = frame.parent.clone();
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra] = rb;
                        let mut child = frame.clone();
                        child.parent = parent;
                        child.chosen.push(k);
                        child.next = k + 1;
                        child.stage = 0;
                        self.stack.push(child);
                    }
                }
                1 => {
                    frame.stage = 2;
                    let mut excluded = frame.excluded.clone();
                    excluded[k] = true;
                    if self.still_connected(&excluded) {
                        let frame = self.stack.last().unwrap();
                        let child = TreeFrame {
                            next: k + 1,
                            stage: 0,
                            parent: frame.parent.clone(),
                            chosen: frame.chosen.clone(),
                            excluded,
                        };
                        self.stack.push(child);
                    }
                }
                _ => {
                    self.stack.pop();
                }
            }
        }
    }
}

/// Spanning forests with exactly two trees, one holding `v1` and the other
/// `v2`, by exhaustive subset scan. Exponential; meant for small test graphs.
pub fn enumerate_two_tree_forests(g: &Graph, v1: &[usize], v2: &[usize]) -> Result<Vec<Vec<usize>>> {
    if g.edge_count() > MAX_FOREST_EDGES {
        return Err(Error::InvalidArgument(format!(
            "two-tree forest scan is limited to {MAX_FOREST_EDGES} edges, graph has {}",
            g.edge_count()
        )));
    }
    let n = g.vertex_count();
    let disjoint = v1.iter().all(|v| !v2.contains(v));
    if v1.is_empty() || v2.is_empty() || !disjoint || n < 2 {
        return Ok(Vec::new());
    }
    let size = n - 2;
    let m = g.edge_count();
    if size > m {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let mut parent: Vec<usize> = (0..n).collect();
        let mut acyclic = true;
        for &k in &idx {
            let (a, b, _) = g.edges()[k];
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                acyclic = false;
                break;
            }
            parent[ra] = rb;
        }
        if acyclic {
            let r1 = find(&mut parent, v1[0]);
            let r2 = find(&mut parent, v2[0]);
            let ok = r1 != r2
                && v1.iter().all(|&v| find(&mut parent, v) == r1)
                && v2.iter().all(|&v| find(&mut parent, v) == r2);
            if ok {
                let mut ids: Vec<usize> = idx.iter().map(|&k| g.edges()[k].2).collect();
                ids.sort_unstable();
                out.push(ids);
            }
        }
        let mut i = size;
        while i > 0 && idx[i - 1] == i - 1 + m - size {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out.sort();
    Ok(out)
}

/// Product of susceptances (1 for the empty tree or forest).
pub fn beta_weight(net: &PowerNetwork, lines: &[usize]) -> f64 {
    lines.iter().map(|&id| net.line(id).susceptance).product()
}

/// Float approximation of a big count (for reporting).
pub fn count_as_f64(c: &BigUint) -> f64 {
    c.to_f64().unwrap_or(f64::INFINITY)
}
