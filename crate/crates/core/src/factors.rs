//! Power transfer and line outage distribution factors.
//!
//! Every factor is expressed through the pseudo-inverse:
//! `D_{ℓ,st} = b_ℓ (L†_is + L†_jt − L†_it − L†_js)` for `ℓ = (i, j)`.
//! Outage sets are line-id sets of the network the [`LaplacianSystem`] was
//! built from.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    beta_weight, enumerate_spanning_trees, enumerate_two_tree_forests, reduced_graph, BlockDecomposition, Graph,
    Partition,
};
use crate::network::{LineSet, PowerNetwork};
use crate::spectral::{ActiveLine, LaplacianSystem};

/// Absolute threshold below which a factor counts as zero.
pub const ZERO_TOL: f64 = 1e-9;

/// Condition estimate above which (I − D_EE) is reported as ill-conditioned.
pub const CONDITION_WARN: f64 = 1e8;

/// Dense factor matrix with rows and columns labelled by line id (ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct FactorMatrix {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub values: DMatrix<f64>,
}

impl FactorMatrix {
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let r = self.rows.binary_search(&row).ok()?;
        let c = self.cols.binary_search(&col).ok()?;
        Some(self.values[(r, c)])
    }

    pub fn column(&self, col: usize) -> Option<Vec<f64>> {
        let c = self.cols.binary_search(&col).ok()?;
        Some(self.values.column(c).iter().copied().collect())
    }
}

fn line_of(sys: &LaplacianSystem, id: usize) -> Result<ActiveLine> {
    let lines = sys.active_lines();
    lines
        .binary_search_by_key(&id, |l| l.id)
        .map(|k| lines[k])
        .map_err(|_| Error::InvalidArgument(format!("line {id} is not in service")))
}

fn pair_factor(sys: &LaplacianSystem, l: &ActiveLine, s: usize, t: usize) -> f64 {
    if s == t {
        return 0.0;
    }
    let (i, j) = (l.from, l.to);
    l.susceptance * (sys.pinv(i, s) + sys.pinv(j, t) - sys.pinv(i, t) - sys.pinv(j, s))
}

/// Flow change on line `line` per unit injected at `s` and withdrawn at `t`.
pub fn ptdf_pair(sys: &LaplacianSystem, line: usize, s: usize, t: usize) -> Result<f64> {
    let l = line_of(sys, line)?;
    if s >= sys.bus_count() || t >= sys.bus_count() {
        return Err(Error::InvalidArgument(format!("bus pair ({s}, {t}) out of range")));
    }
    Ok(pair_factor(sys, &l, s, t))
}

/// D_{rows, (s,t) pairs}.
fn ptdf_block(sys: &LaplacianSystem, rows: &[ActiveLine], pairs: &[(usize, usize)]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), pairs.len(), |r, c| pair_factor(sys, &rows[r], pairs[c].0, pairs[c].1))
}

/// D = B Cᵀ L† C over the in-service lines. Entries across islands are 0
/// because L† has no cross-island coupling.
pub fn ptdf_matrix(sys: &LaplacianSystem) -> FactorMatrix {
    let lines = sys.active_lines();
    let n = sys.bus_count();
    let pinv = sys.pseudo_inverse();
    // X = L† C, one column per line
    let x = DMatrix::from_fn(n, lines.len(), |v, c| pinv[(v, lines[c].from)] - pinv[(v, lines[c].to)]);
    let values = DMatrix::from_fn(lines.len(), lines.len(), |r, c| {
        let l = &lines[r];
        l.susceptance * (x[(l.from, c)] - x[(l.to, c)])
    });
    let ids: Vec<usize> = lines.iter().map(|l| l.id).collect();
    FactorMatrix { rows: ids.clone(), cols: ids, values }
}

/// The spanning-forest expression of the PTDF, evaluated by enumeration.
/// Exponential in the edge count; exists to cross-check the matrix formula.
pub struct ForestPtdf<'a> {
    net: &'a PowerNetwork,
    graph: Graph,
    tree_weight: f64,
}

impl<'a> ForestPtdf<'a> {
    pub fn new(net: &'a PowerNetwork) -> Result<ForestPtdf<'a>> {
        let graph = net.graph();
        if !graph.is_connected() {
            return Err(Error::Disconnected("forest formula needs a connected network".into()));
        }
        let rg = reduced_graph(&graph, &Partition::singletons(net.bus_count()));
        let tree_weight = enumerate_spanning_trees(&rg, u64::MAX)?.map(|t| beta_weight(net, &t)).sum();
        Ok(ForestPtdf { net, graph, tree_weight })
    }

    /// Σ_T β over spanning trees.
    pub fn tree_weight(&self) -> f64 {
        self.tree_weight
    }

    fn forest_weight(&self, v1: &[usize], v2: &[usize]) -> Result<f64> {
        Ok(enumerate_two_tree_forests(&self.graph, v1, v2)?.iter().map(|f| beta_weight(self.net, f)).sum())
    }

    /// b_ℓ (Σ β over T({i,s},{j,t}) − Σ β over T({i,t},{j,s})) / Σ_T β.
    pub fn ptdf(&self, line: usize, s: usize, t: usize) -> Result<f64> {
        if s == t {
            return Ok(0.0);
        }
        let l = self.net.line(line);
        let set = |a: usize, b: usize| if a == b { vec![a] } else { vec![a, b] };
        let plus = self.forest_weight(&set(l.from, s), &set(l.to, t))?;
        let minus = self.forest_weight(&set(l.from, t), &set(l.to, s))?;
        Ok(l.susceptance * (plus - minus) / self.tree_weight)
    }
}

/// Topological certificate that D_{ℓℓ̂} = 0 for every choice of susceptances:
/// true when the lines share no simple cycle. False means "no certificate".
pub fn zero_ptdf_by_cycle(bd: &BlockDecomposition, line: usize, other: usize) -> bool {
    !bd.share_simple_cycle(line, other)
}

fn is_bridge(bd: &BlockDecomposition, line: usize) -> bool {
    match bd.block_of_line.get(&line) {
        Some(&b) => !bd.is_nontrivial(b),
        None => false,
    }
}

/// K_{ℓℓ̂} = D_{ℓℓ̂} / (1 − D_{ℓ̂ℓ̂}) for a non-bridge outage ℓ̂.
pub fn lodf(sys: &LaplacianSystem, bd: &BlockDecomposition, line: usize, outage: usize) -> Result<f64> {
    if line == outage {
        return Err(Error::InvalidArgument("monitored and outaged line coincide".into()));
    }
    if is_bridge(bd, outage) {
        return Err(Error::BridgeOutage { line: outage });
    }
    let l = line_of(sys, line)?;
    let o = line_of(sys, outage)?;
    let d = pair_factor(sys, &l, o.from, o.to);
    let dd = pair_factor(sys, &o, o.from, o.to);
    Ok(d / (1.0 - dd))
}

/// Effective-resistance expression of the LODF,
/// b_ℓ (R_it − R_is + R_js − R_jt) / (2 (1 − b_ℓ̂ R_st)).
pub fn lodf_by_resistance(sys: &LaplacianSystem, line: usize, outage: usize) -> Result<f64> {
    let l = line_of(sys, line)?;
    let o = line_of(sys, outage)?;
    let r = |a: usize, b: usize| sys.effective_resistance(a, b).unwrap_or(0.0);
    let (i, j, s, t) = (l.from, l.to, o.from, o.to);
    if sys.island_of(i) != sys.island_of(s) {
        return Ok(0.0);
    }
    let num = l.susceptance * (r(i, t) - r(i, s) + r(j, s) - r(j, t));
    Ok(num / (2.0 * (1.0 - o.susceptance * r(s, t))))
}

fn outage_lines(sys: &LaplacianSystem, outage: &LineSet) -> Result<(Vec<ActiveLine>, Vec<ActiveLine>)> {
    if outage.is_empty() {
        return Err(Error::InvalidArgument("outage set is empty".into()));
    }
    let out: Vec<ActiveLine> = outage.iter().map(|&id| line_of(sys, id)).collect::<Result<_>>()?;
    let rest = sys.active_lines().iter().copied().filter(|l| !outage.contains(&l.id)).collect();
    Ok((out, rest))
}

/// Components of the in-service graph once `outage` is removed.
fn survivors(sys: &LaplacianSystem, outage: &LineSet) -> Vec<Vec<usize>> {
    let edges = sys
        .active_lines()
        .iter()
        .filter(|l| !outage.contains(&l.id))
        .map(|l| (l.from, l.to, l.id))
        .collect();
    Graph::new(sys.bus_count(), edges).components()
}

/// Generalized LODF of a non-cut outage set.
#[derive(Debug, Clone)]
pub struct Glodf {
    /// K^E, rows = surviving lines, cols = E.
    pub factors: FactorMatrix,
    /// 1-norm condition estimate of I − D_EE.
    pub condition: f64,
}

impl Glodf {
    /// Δf indexed by line id: K^E f_E on survivors and −f_E on the outaged lines.
    pub fn flow_change(&self, pre: &[f64]) -> Vec<f64> {
        let fe = nalgebra::DVector::from_iterator(self.factors.cols.len(), self.factors.cols.iter().map(|&c| pre[c]));
        let df = &self.factors.values * fe;
        let mut out = vec![0.0; pre.len()];
        for (k, &r) in self.factors.rows.iter().enumerate() {
            out[r] = df[k];
        }
        for &c in &self.factors.cols {
            out[c] = -pre[c];
        }
        out
    }
}

/// K^E = D_{−E,E} (I − D_EE)⁻¹ for an outage set that keeps every island whole.
pub fn glodf(sys: &LaplacianSystem, outage: &LineSet) -> Result<Glodf> {
    let (out, rest) = outage_lines(sys, outage)?;
    let after = survivors(sys, outage);
    if after.len() > sys.islands().len() {
        return Err(Error::CutSet { islands: after });
    }
    let pairs: Vec<(usize, usize)> = out.iter().map(|l| (l.from, l.to)).collect();
    let d_ee = ptdf_block(sys, &out, &pairs);
    let d_re = ptdf_block(sys, &rest, &pairs);
    let m = DMatrix::identity(out.len(), out.len()) - d_ee;
    let inv = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("I − D_EE is singular".into()))?;
    let condition = one_norm(&m) * one_norm(&inv);
    if !condition.is_finite() {
        return Err(Error::Conditioning("I − D_EE is numerically singular".into()));
    }
    if condition > CONDITION_WARN {
        tracing::warn!(condition, "I − D_EE is ill-conditioned");
    }
    let values = d_re * inv;
    Ok(Glodf {
        factors: FactorMatrix {
            rows: rest.iter().map(|l| l.id).collect(),
            cols: out.iter().map(|l| l.id).collect(),
            values,
        },
        condition,
    })
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// K_{−EE} = D_{−EE} (I − diag D_EE)⁻¹: each column is the single-outage LODF.
pub fn lodf_submatrix(sys: &LaplacianSystem, bd: &BlockDecomposition, outage: &LineSet) -> Result<FactorMatrix> {
    if let Some(&b) = outage.iter().find(|&&l| is_bridge(bd, l)) {
        return Err(Error::BridgeOutage { line: b });
    }
    let (out, rest) = outage_lines(sys, outage)?;
    let pairs: Vec<(usize, usize)> = out.iter().map(|l| (l.from, l.to)).collect();
    let mut values = ptdf_block(sys, &rest, &pairs);
    for (c, o) in out.iter().enumerate() {
        let scale = 1.0 - pair_factor(sys, o, o.from, o.to);
        values.column_mut(c).scale_mut(1.0 / scale);
    }
    Ok(FactorMatrix { rows: rest.iter().map(|l| l.id).collect(), cols: out.iter().map(|l| l.id).collect(), values })
}

/// Single-outage LODF of every active line (rows) for every non-bridge
/// outage (columns); the outaged line itself carries −1.
pub fn lodf_matrix(sys: &LaplacianSystem, bd: &BlockDecomposition) -> Result<FactorMatrix> {
    let rows: Vec<usize> = sys.active_lines().iter().map(|l| l.id).collect();
    let cols: Vec<usize> = rows.iter().copied().filter(|&l| !is_bridge(bd, l)).collect();
    let mut values = DMatrix::zeros(rows.len(), cols.len());
    for (j, &o) in cols.iter().enumerate() {
        let sub = lodf_submatrix(sys, bd, &LineSet::from([o]))?;
        for (i, &r) in rows.iter().enumerate() {
            values[(i, j)] = if r == o { -1.0 } else { sub.get(r, o).unwrap_or(0.0) };
        }
    }
    Ok(FactorMatrix { rows, cols, values })
}

/// Participation factors α of a proportional control rule, one per bus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProportionalControl {
    pub alpha: Vec<f64>,
}

impl ProportionalControl {
    pub fn new(alpha: Vec<f64>) -> ProportionalControl {
        ProportionalControl { alpha }
    }

    /// All weight on one bus.
    pub fn at(n: usize, bus: usize) -> ProportionalControl {
        let mut alpha = vec![0.0; n];
        alpha[bus] = 1.0;
        ProportionalControl { alpha }
    }

    /// Checks α ≥ 0, support inside `island`, and Σ α = 1.
    pub fn validate(&self, n: usize, island: &[usize]) -> Result<()> {
        if self.alpha.len() != n {
            return Err(Error::Control(format!("{} participation factors for {n} buses", self.alpha.len())));
        }
        if let Some(k) = self.alpha.iter().position(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::Control(format!("negative or non-finite factor at bus {k}")));
        }
        let inside: BTreeSet<usize> = island.iter().copied().collect();
        if let Some(k) = (0..n).find(|k| self.alpha[*k] > 0.0 && !inside.contains(k)) {
            return Err(Error::Control(format!("bus {k} participates but lies outside the island")));
        }
        let total: f64 = island.iter().map(|&k| self.alpha[k]).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Control(format!("factors sum to {total} on the island, expected 1")));
        }
        Ok(())
    }

    fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.alpha.iter().copied().enumerate().filter(|(_, a)| *a > 0.0)
    }
}

/// Tie lines of an island after removing `cut`, with their pre-outage flow
/// oriented into the island and the endpoint inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TieLine {
    pub id: usize,
    pub inner: usize,
    pub flow_in: f64,
}

fn check_island(net: &PowerNetwork, cut: &LineSet, island: &[usize]) -> Result<Vec<usize>> {
    let mut sorted = island.to_vec();
    sorted.sort_unstable();
    if net.graph_without(cut).components().iter().any(|c| c == &sorted) {
        Ok(sorted)
    } else {
        Err(Error::NotAnIsland)
    }
}

fn tie_lines(net: &PowerNetwork, island: &[usize], f_pre: &[f64]) -> Vec<TieLine> {
    let mut inside = vec![false; net.bus_count()];
    for &v in island {
        inside[v] = true;
    }
    net.lines()
        .iter()
        .filter(|l| inside[l.from] != inside[l.to])
        .map(|l| {
            if inside[l.to] {
                TieLine { id: l.id, inner: l.to, flow_in: f_pre[l.id] }
            } else {
                TieLine { id: l.id, inner: l.from, flow_in: -f_pre[l.id] }
            }
        })
        .collect()
}

/// Island imbalance by the two routes: Σ_{i∈I} p_i and −Σ_tie f_in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IslandImbalance {
    pub direct: f64,
    pub from_ties: f64,
}

pub fn island_imbalance(
    net: &PowerNetwork,
    p: &[f64],
    f_pre: &[f64],
    cut: &LineSet,
    island: &[usize],
) -> Result<IslandImbalance> {
    let island = check_island(net, cut, island)?;
    let direct = island.iter().map(|&v| p[v]).sum();
    let from_ties = -tie_lines(net, &island, f_pre).iter().map(|t| t.flow_in).sum::<f64>();
    Ok(IslandImbalance { direct, from_ties })
}

/// Flow change inside island `I` when the internal lines `e_int` and the tie
/// lines `e_tie` trip together and the island's imbalance is absorbed by α:
///
/// Δf_{−int} = K^{E_int} f_int + Σ_tie f_in Σ_k α_k (D_{−int,k j} + K^{E_int} D_{int,k j}),
///
/// with D and K taken on the subnetwork induced by `I`. The result is indexed
/// by line id: surviving lines of `I` carry their change, lines of `e_int`
/// carry −f, all other entries are 0.
pub fn cutset_flow_change(
    net: &PowerNetwork,
    island: &[usize],
    e_int: &LineSet,
    e_tie: &LineSet,
    alpha: &ProportionalControl,
    f_pre: &[f64],
) -> Result<Vec<f64>> {
    let cut: LineSet = e_int.union(e_tie).copied().collect();
    let island = check_island(net, &cut, island)?;
    alpha.validate(net.bus_count(), &island)?;
    let ties = tie_lines(net, &island, f_pre);
    if ties.iter().any(|t| !e_tie.contains(&t.id)) || ties.len() != e_tie.len() {
        return Err(Error::InvalidArgument("tie set does not match the lines leaving the island".into()));
    }
    let sub = net.induced(&island, &LineSet::new());
    let local_bus = |v: usize| island.binary_search(&v).expect("bus inside island");
    let to_local: std::collections::BTreeMap<usize, usize> =
        sub.line_map.iter().enumerate().map(|(k, &g)| (g, k)).collect();
    let mut int_local = LineSet::new();
    for id in e_int {
        match to_local.get(id) {
            Some(&k) => {
                int_local.insert(k);
            }
            None => return Err(Error::InvalidArgument(format!("line {id} is not inside the island"))),
        }
    }
    let sys = LaplacianSystem::build(&sub.network)?;
    let all = sys.active_lines().to_vec();
    let rest: Vec<ActiveLine> = all.iter().copied().filter(|l| !int_local.contains(&l.id)).collect();
    let int: Vec<ActiveLine> = all.iter().copied().filter(|l| int_local.contains(&l.id)).collect();

    // Injection shift Σ_tie f_in (α − e_j) expressed as weighted (k, j) pairs.
    let mut pairs = Vec::new();
    let mut weights = Vec::new();
    for tie in &ties {
        for (k, a) in alpha.support() {
            pairs.push((local_bus(k), local_bus(tie.inner)));
            weights.push(tie.flow_in * a);
        }
    }
    let w = nalgebra::DVector::from_vec(weights);
    let mut delta = if pairs.is_empty() {
        nalgebra::DVector::zeros(rest.len())
    } else {
        ptdf_block(&sys, &rest, &pairs) * &w
    };
    if !int.is_empty() {
        let k = glodf(&sys, &int_local)?;
        let f_int = nalgebra::DVector::from_iterator(int.len(), int.iter().map(|l| f_pre[sub.line_map[l.id]]));
        let shift = if pairs.is_empty() {
            nalgebra::DVector::zeros(int.len())
        } else {
            ptdf_block(&sys, &int, &pairs) * &w
        };
        delta += &k.factors.values * (f_int + shift);
    }
    let mut out = vec![0.0; net.line_count()];
    for (r, l) in rest.iter().enumerate() {
        out[sub.line_map[l.id]] = delta[r];
    }
    for id in e_int {
        out[*id] = -f_pre[*id];
    }
    Ok(out)
}

/// Flow change on `line` per unit of pre-outage flow on bridge `outage`
/// (signed by the bridge's orientation) when the bridge trips and the side
/// holding `line` is rebalanced by α: ±Σ_k α_k D_{ℓ,k ĵ}, with ĵ the bridge
/// endpoint on that side.
pub fn bridge_outage_lodf(
    sys: &LaplacianSystem,
    line: usize,
    outage: usize,
    alpha: &ProportionalControl,
    f_pre: &[f64],
) -> Result<f64> {
    let l = line_of(sys, line)?;
    let o = line_of(sys, outage)?;
    let removed = LineSet::from([outage]);
    let after = survivors(sys, &removed);
    if after.len() == sys.islands().len() {
        return Err(Error::InvalidArgument(format!("line {outage} is not a bridge")));
    }
    if f_pre[outage].abs() <= ZERO_TOL {
        return Err(Error::UndefinedRatio { line: outage });
    }
    let side = after.iter().find(|c| c.binary_search(&l.from).is_ok()).expect("every bus has a component");
    let (inner, sign) = if side.binary_search(&o.to).is_ok() {
        (o.to, 1.0)
    } else if side.binary_search(&o.from).is_ok() {
        (o.from, -1.0)
    } else {
        return Err(Error::InvalidArgument(format!("line {line} is not adjacent to the islands of bridge {outage}")));
    };
    alpha.validate(sys.bus_count(), side)?;
    let k: f64 = alpha.support().map(|(k, a)| a * pair_factor(sys, &l, k, inner)).sum();
    Ok(sign * k)
}

/// Line-adjacency graph keeping pairs whose LODF exceeds a threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceGraph {
    pub nodes: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub k_min: f64,
}

impl InfluenceGraph {
    /// Connected components as sorted line-id lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let index = |id: usize| self.nodes.binary_search(&id).expect("edge endpoint is a node");
        let g = Graph::new(
            self.nodes.len(),
            self.edges.iter().enumerate().map(|(k, &(a, b))| (index(a), index(b), k)).collect(),
        );
        g.components().into_iter().map(|c| c.into_iter().map(|k| self.nodes[k]).collect()).collect()
    }

    /// Components with at least one edge.
    pub fn nontrivial_components(&self) -> Vec<Vec<usize>> {
        self.components().into_iter().filter(|c| c.len() > 1).collect()
    }
}

/// Edge ℓ–ℓ̂ whenever max(|K_{ℓℓ̂}|, |K_{ℓ̂ℓ}|) > K_min; bridges never act as
/// the outaged line.
pub fn influence_graph(sys: &LaplacianSystem, bd: &BlockDecomposition, k_min: f64) -> Result<InfluenceGraph> {
    if !(k_min > 0.0) {
        return Err(Error::InvalidArgument(format!("K_min must be positive, got {k_min}")));
    }
    let d = ptdf_matrix(sys);
    let m = d.rows.len();
    let bridge: Vec<bool> = d.rows.iter().map(|&id| is_bridge(bd, id)).collect();
    let k = |r: usize, c: usize| -> f64 {
        if bridge[c] {
            0.0
        } else {
            d.values[(r, c)] / (1.0 - d.values[(c, c)])
        }
    };
    let mut edges = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            if k(a, b).abs().max(k(b, a).abs()) > k_min {
                edges.push((d.rows[a], d.rows[b]));
            }
        }
    }
    Ok(InfluenceGraph { nodes: d.rows, edges, k_min })
}

/// Why a GLODF entry K^E_{ℓℓ̂} vanishes, when that can be decided from topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroCertificate {
    /// ℓ and ℓ̂ share no simple cycle, so D_{ℓℓ̂} = 0 and K^E_{ℓℓ̂} = 0.
    CertifiedZero,
    /// They share cycles in G, but each one runs through another line of E,
    /// so K^E_{ℓℓ̂} = 0 even though D_{ℓℓ̂} may not be.
    CycleBlocked,
    Unknown,
}

pub fn zero_glodf_conditions(
    net: &PowerNetwork,
    bd: &BlockDecomposition,
    outage: &LineSet,
    line: usize,
    outaged: usize,
) -> ZeroCertificate {
    if !bd.share_simple_cycle(line, outaged) {
        return ZeroCertificate::CertifiedZero;
    }
    let others: LineSet = outage.iter().copied().filter(|&l| l != outaged).collect();
    if others.is_empty() {
        return ZeroCertificate::Unknown;
    }
    if net.graph_without(&others).blocks().share_simple_cycle(line, outaged) {
        ZeroCertificate::Unknown
    } else {
        ZeroCertificate::CycleBlocked
    }
}
