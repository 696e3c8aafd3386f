mod common;

use std::collections::BTreeSet;

use common::max_abs;
use gridblocks::cluster::{
    fastgreedy_trace, modularity, normalized_modularity, spectral_cluster, ClusteringMethod, FlowWeights, WeightedEdge,
};
use gridblocks::factors::{lodf, ptdf_pair, zero_glodf_conditions, zero_ptdf_by_cycle, glodf, ForestPtdf, ZeroCertificate};
use gridblocks::graph::{is_finer, is_tree, reduced_graph, Graph, Partition};
use gridblocks::matpower::{parse_matpower, to_matpower};
use gridblocks::network::{
    is_balanced, rebalance, Bus, Capacity, Injections, Line, LineSet, PowerNetwork, RebalanceMode,
};
use gridblocks::spectral::LaplacianSystem;
use gridblocks::switching::{local_flow_update, obs_bipartition, one_shot, plan_violations, recursive_refine};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::sample::Index;

#[derive(Debug, Clone)]
struct Spec {
    n: usize,
    edges: Vec<(usize, usize, f64, Option<f64>)>,
    gens: Vec<bool>,
    p: Vec<f64>,
}

impl Spec {
    fn network(&self) -> PowerNetwork {
        let buses = (0..self.n)
            .map(|i| Bus {
                id: i,
                original_id: 3 * i as u64 + 1,
                injection_mw: self.p[i],
                generation_mw: if self.gens[i] { self.p[i].max(0.0) + 1.0 } else { 0.0 },
                is_generator: self.gens[i],
            })
            .collect();
        let lines = self
            .edges
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
        PowerNetwork::new(buses, lines).expect("valid network")
    }

    /// Injections made zero-sum on each island.
    fn balanced(&self, net: &PowerNetwork) -> Vec<f64> {
        let mut p = self.p.clone();
        for island in net.graph().components() {
            let mean = island.iter().map(|&v| p[v]).sum::<f64>() / island.len() as f64;
            island.iter().for_each(|&v| p[v] -= mean);
        }
        p
    }
}

/// Connected simple graphs: a random tree plus up to `chords` extra edges.
fn connected(max_n: usize, chords: usize) -> impl Strategy<Value = Spec> {
    (2..=max_n).prop_flat_map(move |n| {
        (
            Just(n),
            proptest::collection::vec(any::<Index>(), n - 1),
            proptest::collection::vec((0..n, 0..n), 0..=chords),
            proptest::collection::vec((0.1..10.0f64, proptest::option::weighted(0.8, 0.3..3.0f64)), n - 1 + chords),
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(-2.0..2.0f64, n),
        )
            .prop_map(|(n, parents, extra, weights, mut gens, p)| {
                let mut seen = BTreeSet::new();
                let mut pairs = Vec::new();
                for (k, parent) in parents.iter().enumerate() {
                    let (a, b) = (k + 1, parent.index(k + 1));
                    seen.insert((b, a));
                    pairs.push((a, b));
                }
                for (a, b) in extra {
                    if a != b && seen.insert((a.min(b), a.max(b))) {
                        pairs.push((a, b));
                    }
                }
                gens[0] = true;
                let edges = pairs.into_iter().zip(weights).map(|((a, b), (s, c))| (a, b, s, c)).collect();
                Spec { n, edges, gens, p }
            })
    })
}

/// Two disjoint connected pieces, or one.
fn maybe_split(max_n: usize, chords: usize) -> impl Strategy<Value = Spec> {
    (connected(max_n, chords), proptest::option::of(connected(4, 2))).prop_map(|(a, b)| match b {
        None => a,
        Some(b) => {
            let shift = a.n;
            let mut edges = a.edges;
            edges.extend(b.edges.into_iter().map(|(x, y, s, c)| (x + shift, y + shift, s, c)));
            Spec {
                n: a.n + b.n,
                edges,
                gens: a.gens.into_iter().chain(b.gens).collect(),
                p: a.p.into_iter().chain(b.p).collect(),
            }
        }
    })
}

fn labels_strategy(n: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..k, n)
}

/// Every edge set forming one simple cycle, by brute force over subsets.
fn simple_cycles(g: &Graph) -> Vec<Vec<usize>> {
    let edges = g.edges();
    let m = edges.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        let chosen: Vec<usize> = (0..m).filter(|k| mask & (1 << k) != 0).collect();
        if chosen.len() < 2 {
            continue;
        }
        let mut deg = vec![0; g.vertex_count()];
        for &k in &chosen {
            deg[edges[k].0] += 1;
            deg[edges[k].1] += 1;
        }
        if deg.iter().any(|&d| d != 0 && d != 2) {
            continue;
        }
        let sub = Graph::new(g.vertex_count(), chosen.iter().map(|&k| edges[k]).collect());
        let touched = deg.iter().filter(|&&d| d > 0).count();
        let (labels, _) = sub.component_labels();
        let first = (0..g.vertex_count()).find(|&v| deg[v] > 0).unwrap();
        if (0..g.vertex_count()).filter(|&v| deg[v] > 0 && labels[v] == labels[first]).count() == touched {
            out.push(chosen.iter().map(|&k| edges[k].2).collect());
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matpower_and_json_round_trip(spec in maybe_split(8, 6)) {
        let net = spec.network();
        let (back, _) = parse_matpower(&to_matpower(&net, "roundtrip")).unwrap();
        // injection is rebuilt as generation minus load, so it may move by an ulp of the generation
        for (a, b) in back.buses().iter().zip(net.buses()) {
            let ulp = 2.0 * f64::EPSILON * b.generation_mw.abs().max(b.injection_mw.abs());
            prop_assert!((a.injection_mw - b.injection_mw).abs() <= ulp);
            prop_assert_eq!((a.id, a.original_id, a.generation_mw, a.is_generator), (b.id, b.original_id, b.generation_mw, b.is_generator));
        }
        prop_assert_eq!(back.bus_count(), net.bus_count());
        prop_assert_eq!(back.line_count(), net.line_count());
        // susceptance travels as reactance, and not every float is a reciprocal of one
        for (a, b) in back.lines().iter().zip(net.lines()) {
            prop_assert!((a.susceptance - b.susceptance).abs() <= 2.0 * f64::EPSILON * b.susceptance.abs());
            prop_assert_eq!((a.from, a.to, a.capacity, &a.merged_from), (b.from, b.to, b.capacity, &b.merged_from));
        }
        // the JSON schema carries topology and injections only, so it is a fixed point
        let json = net.to_json();
        let reloaded = PowerNetwork::from_json(&json).unwrap();
        prop_assert_eq!(reloaded.to_json(), json);
        prop_assert_eq!(reloaded.lines(), net.lines());
    }

    #[test]
    fn parallel_branches_merge_by_summing_susceptance(xs in proptest::collection::vec(0.01..2.0f64, 1..6)) {
        let mut text = String::from("function mpc = par\nmpc.baseMVA = 100;\nmpc.bus = [\n 1 3 0 0 0 0 1 1 0 1 1 1.1 0.9;\n 2 1 10 0 0 0 1 1 0 1 1 1.1 0.9;\n];\nmpc.gen = [\n 1 10 0 0 0 1 100 1 100 0;\n];\nmpc.branch = [\n");
        for (k, x) in xs.iter().enumerate() {
            let (f, t) = if k % 2 == 0 { (1, 2) } else { (2, 1) };
            text.push_str(&format!(" {f} {t} 0 {x} 0 0 0 0 0 0 1 -360 360;\n"));
        }
        text.push_str("];\n");
        let (net, _) = parse_matpower(&text).unwrap();
        prop_assert_eq!(net.line_count(), 1);
        prop_assert_eq!(net.branch_count(), xs.len());
        let expected: f64 = xs.iter().map(|x| 1.0 / x).sum();
        prop_assert!((net.lines()[0].susceptance - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn rebalance_balances_every_island(spec in maybe_split(8, 4), proportional in any::<bool>()) {
        let net = spec.network();
        let mode = if proportional { RebalanceMode::ProportionalGenerators } else { RebalanceMode::UniformGenerators };
        let out = rebalance(&Injections(spec.p.clone()), &net, mode, 1e-9).unwrap();
        prop_assert!(is_balanced(&out, &net.graph().components(), 1e-9));
    }

    #[test]
    fn laplacian_identities(spec in maybe_split(8, 6), xs in proptest::collection::vec(-1.0..1.0f64, 12)) {
        let net = spec.network();
        let n = net.bus_count();
        let sys = LaplacianSystem::build(&net).unwrap();
        let l = sys.laplacian();
        let x = DVector::from_iterator(n, (0..n).map(|i| xs[i]));
        let quad = (x.transpose() * l * &x)[(0, 0)];
        let direct: f64 = net.lines().iter().map(|e| e.susceptance * (x[e.from] - x[e.to]).powi(2)).sum();
        prop_assert!(quad >= -1e-12);
        prop_assert!((quad - direct).abs() <= 1e-9 * direct.max(1.0));

        let eig = l.clone().symmetric_eigen();
        let top = eig.eigenvalues.max();
        let rank = eig.eigenvalues.iter().filter(|&&e| e > 1e-9 * top).count();
        prop_assert_eq!(rank, n - sys.islands().len());

        let lp = sys.pseudo_inverse();
        for r in 0..n {
            prop_assert!(lp.row(r).sum().abs() < 1e-9);
        }
        prop_assert!(lp.clone().symmetric_eigen().eigenvalues.min() > -1e-9);
    }

    #[test]
    fn dc_flow_matches_grounded_solve(spec in maybe_split(8, 6)) {
        let net = spec.network();
        let p = spec.balanced(&net);
        let flows = LaplacianSystem::build(&net).unwrap().dc_flow(&p).unwrap();
        let n = net.bus_count();
        let mut theta = vec![0.0; n];
        for island in net.graph().components() {
            let rest = &island[1..];
            let index = |v: usize| rest.iter().position(|&w| w == v);
            let mut b = DMatrix::zeros(rest.len(), rest.len());
            for e in net.lines() {
                let (i, j) = (index(e.from), index(e.to));
                if let Some(i) = i { b[(i, i)] += e.susceptance; }
                if let Some(j) = j { b[(j, j)] += e.susceptance; }
                if let (Some(i), Some(j)) = (i, j) {
                    b[(i, j)] -= e.susceptance;
                    b[(j, i)] -= e.susceptance;
                }
            }
            let rhs = DVector::from_iterator(rest.len(), rest.iter().map(|&v| p[v]));
            if let Some(sol) = b.lu().solve(&rhs) {
                for (k, &v) in rest.iter().enumerate() {
                    theta[v] = sol[k];
                }
            }
        }
        for e in net.lines() {
            let expected = e.susceptance * (theta[e.from] - theta[e.to]);
            prop_assert!((flows[e.id] - expected).abs() < 1e-8 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn removing_lines_refines_bridge_blocks(spec in maybe_split(8, 6), pick in proptest::collection::vec(any::<bool>(), 24)) {
        let net = spec.network();
        let removed: LineSet = (0..net.line_count()).filter(|&k| pick.get(k).copied().unwrap_or(false)).collect();
        prop_assert!(is_finer(&net.graph_without(&removed).bridge_blocks().blocks, &net.graph().bridge_blocks().blocks));
    }

    #[test]
    fn reduced_graph_characterization(spec in connected(8, 6), labels in labels_strategy(8, 4)) {
        let net = spec.network();
        let g = net.graph();
        let n = net.bus_count();
        let p = Partition::from_labels(&labels[..n]).refine_connected(&g);
        let rg = reduced_graph(&g, &p);
        prop_assert!(rg.as_graph().is_connected());
        prop_assert_eq!(is_finer(&g.bridge_blocks().blocks, &p), is_tree(&rg));
    }

    #[test]
    fn simple_cycle_criterion_matches_brute_force(spec in connected(7, 5)) {
        let net = spec.network();
        let g = net.graph();
        let bd = g.blocks();
        let cycles = simple_cycles(&g);
        for a in 0..net.line_count() {
            for b in 0..net.line_count() {
                if a == b { continue; }
                let brute = cycles.iter().any(|c| c.contains(&a) && c.contains(&b));
                prop_assert_eq!(bd.share_simple_cycle(a, b), brute, "lines {} {}", a, b);
            }
        }
    }

    #[test]
    fn weighted_matrix_tree(spec in connected(7, 5)) {
        let net = spec.network();
        let forest = ForestPtdf::new(&net).unwrap();
        let l = LaplacianSystem::build(&net).unwrap().laplacian().clone();
        let n = net.bus_count();
        let minor = l.view((1, 1), (n - 1, n - 1)).clone_owned();
        let det = if n == 1 { 1.0 } else { minor.determinant() };
        prop_assert!((forest.tree_weight() - det).abs() <= 1e-9 * det.abs().max(1.0));
    }

    #[test]
    fn ptdf_and_lodf_vanish_together(spec in connected(8, 6)) {
        let net = spec.network();
        let sys = LaplacianSystem::build(&net).unwrap();
        let bd = net.graph().blocks();
        let bridges = net.graph().bridges();
        for o in net.lines().iter().filter(|o| bridges.binary_search(&o.id).is_err()) {
            for l in net.lines().iter().filter(|l| l.id != o.id) {
                let d = ptdf_pair(&sys, l.id, o.from, o.to).unwrap();
                let k = lodf(&sys, &bd, l.id, o.id).unwrap();
                prop_assert_eq!(d.abs() < 1e-9, k.abs() < 1e-9);
                if zero_ptdf_by_cycle(&bd, l.id, o.id) {
                    prop_assert!(d.abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn zero_certificates_are_sound(spec in connected(8, 6), pick in proptest::collection::vec(any::<Index>(), 1..4)) {
        let net = spec.network();
        let m = net.line_count();
        let outage: LineSet = pick.iter().map(|i| i.index(m)).collect();
        prop_assume!(net.graph_without(&outage).is_connected());
        let sys = LaplacianSystem::build(&net).unwrap();
        let bd = net.graph().blocks();
        let k = glodf(&sys, &outage).unwrap();
        for &o in &outage {
            for l in (0..m).filter(|l| !outage.contains(l)) {
                if zero_glodf_conditions(&net, &bd, &outage, l, o) != ZeroCertificate::Unknown {
                    prop_assert!(k.factors.get(l, o).unwrap().abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn ptdf_does_not_depend_on_injections(spec in connected(8, 6)) {
        let net = spec.network();
        let sys = LaplacianSystem::build(&net).unwrap();
        let before: Vec<f64> = net.lines().iter().map(|l| ptdf_pair(&sys, l.id, 0, net.bus_count() - 1).unwrap()).collect();
        let _ = sys.dc_flow(&spec.balanced(&net)).unwrap();
        let after: Vec<f64> = net.lines().iter().map(|l| ptdf_pair(&sys, l.id, 0, net.bus_count() - 1).unwrap()).collect();
        prop_assert_eq!(before.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), after.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
    }
}

fn unit_weights(spec: &Spec, scale: &[f64]) -> FlowWeights {
    let edges = spec
        .edges
        .iter()
        .enumerate()
        .map(|(k, &(a, b, s, _))| WeightedEdge { a, b, line: k, weight: s * scale[k % scale.len()] })
        .collect();
    FlowWeights::from_edges(spec.n, edges)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn modularity_argmax_is_scale_invariant(spec in connected(8, 6), c in 0.01..100.0f64) {
        let w = unit_weights(&spec, &[1.0]);
        let scaled = unit_weights(&spec, &[c]);
        let n = spec.n;
        let mut best = (f64::NEG_INFINITY, 0u32);
        let mut best_scaled = (f64::NEG_INFINITY, 0u32);
        for mask in 1u32..(1 << (n - 1)) {
            let first: Vec<usize> = (0..n - 1).filter(|v| mask & (1 << v) != 0).collect();
            let second: Vec<usize> = (0..n).filter(|v| !first.contains(v)).collect();
            let p = Partition::from_clusters(n, vec![first, second]).unwrap();
            let q = modularity(&w, &p).unwrap();
            let qs = modularity(&scaled, &p).unwrap();
            prop_assert!((q - qs).abs() < 1e-12);
            if q > best.0 + 1e-12 { best = (q, mask); }
            if qs > best_scaled.0 + 1e-12 { best_scaled = (qs, mask); }
        }
        prop_assert_eq!(best.1, best_scaled.1);
    }

    #[test]
    fn normalized_modularity_matches_ncut(spec in connected(8, 6), labels in labels_strategy(8, 2)) {
        let w = unit_weights(&spec, &[1.0, 2.5, 0.5]);
        let p = Partition::from_labels(&labels[..spec.n]);
        prop_assume!(p.len() == 2);
        let total: f64 = w.edges.iter().map(|e| e.weight).sum();
        let mut ncut = 0.0;
        for c in p.clusters() {
            let cut: f64 = w.edges.iter().filter(|e| c.contains(&e.a) != c.contains(&e.b)).map(|e| e.weight).sum();
            let vol: f64 = w.edges.iter().map(|e| e.weight * (f64::from(c.contains(&e.a)) + f64::from(c.contains(&e.b)))).sum();
            ncut += cut / vol;
        }
        let q_n = normalized_modularity(&w, &p).unwrap();
        prop_assert!((q_n - (1.0 - ncut) / (2.0 * total)).abs() < 1e-10);
    }

    #[test]
    fn fastgreedy_takes_the_best_merge(spec in connected(8, 6)) {
        let w = unit_weights(&spec, &[1.0, 3.0]);
        let (part, merges) = fastgreedy_trace(&w, 1).unwrap();
        prop_assert_eq!(part.len(), 1);
        let mut sum = 0.0;
        for m in &merges {
            prop_assert!(m.gain >= m.best_available - 1e-12);
            sum += m.gain;
        }
        let q0 = modularity(&w, &Partition::singletons(spec.n)).unwrap();
        let q1 = modularity(&w, &part).unwrap();
        prop_assert!((q1 - q0 - sum).abs() < 1e-9);
    }

    #[test]
    fn spectral_is_deterministic(spec in connected(8, 6), b in 2usize..4) {
        prop_assume!(b <= spec.n);
        let w = unit_weights(&spec, &[1.0, 2.0]);
        for method in [ClusteringMethod::SpectralLn, ClusteringMethod::SpectralBn] {
            let a = spectral_cluster(&w, b, method).unwrap();
            let again = spectral_cluster(&w, b, method).unwrap();
            prop_assert_eq!(a.clusters, again.clusters);
        }
    }
}

fn with_capacities(mut spec: Spec) -> Spec {
    for e in &mut spec.edges {
        e.3 = Some(e.3.unwrap_or(1.0));
    }
    spec
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bipartition_plans_keep_one_cross_edge(spec in connected(8, 6), labels in labels_strategy(8, 2)) {
        let spec = with_capacities(spec);
        let net = spec.network();
        let g = net.graph();
        let p = Partition::from_labels(&labels[..spec.n]);
        prop_assume!(p.len() == 2 && p.clusters_connected(&g));
        let p_vec = spec.balanced(&net);
        let plan = obs_bipartition(&net, &p_vec, &p).unwrap();
        prop_assert_eq!(plan.switched_lines.len(), p.cross_edges(&g).len() - 1);
        prop_assert!(plan_violations(&net, &p, &plan.switched_lines).is_empty());
    }

    #[test]
    fn one_shot_switches_all_but_a_spanning_tree(spec in connected(8, 7), b in 2usize..4) {
        let spec = with_capacities(spec);
        let net = spec.network();
        let p = spec.balanced(&net);
        let plan = one_shot(&net, &p, b, ClusteringMethod::FastGreedy, 100_000).unwrap();
        let partition = Partition::from_clusters(net.bus_count(), plan.partition.clone()).unwrap();
        let cross = partition.cross_edges(&net.graph()).len();
        prop_assert_eq!(plan.switched_lines.len(), cross - (partition.len() - 1));
        prop_assert!(plan_violations(&net, &partition, &plan.switched_lines).is_empty());
    }

    #[test]
    fn recursive_refinement_grows_the_block_count(spec in connected(8, 7)) {
        let spec = with_capacities(spec);
        let net = spec.network();
        let p = spec.balanced(&net);
        let trace = recursive_refine(&net, &p, 3, 1e6, ClusteringMethod::FastGreedy).unwrap();
        let mut blocks = net.graph().bridge_blocks().blocks.len();
        for it in &trace.iterations {
            prop_assert!(it.bridge_block_sizes.len() > blocks);
            prop_assert!(it.flow_check < 1e-8);
            blocks = it.bridge_block_sizes.len();
        }
        prop_assert!(net.graph_without(&trace.switched_lines.iter().copied().collect()).is_connected());
    }

    #[test]
    fn local_update_equals_global_solve(spec in maybe_split(8, 6), pick in any::<Index>()) {
        let net = spec.network();
        let p = spec.balanced(&net);
        let bb = net.graph().bridge_blocks();
        let block = bb.blocks.clusters()[bb.largest()].clone();
        let sub = net.induced(&block, &LineSet::new());
        prop_assume!(sub.network.line_count() > 0);
        let target = sub.line_map[pick.index(sub.line_map.len())];
        let newly = LineSet::from([target]);
        prop_assume!(net.graph_without(&newly).component_labels().1 == net.graph().component_labels().1);
        let prior = LaplacianSystem::build(&net).unwrap().dc_flow(&p).unwrap();
        let updated = local_flow_update(&net, &p, &block, &LineSet::new(), &newly, &prior).unwrap();
        let global = LaplacianSystem::build_without(&net, &newly).unwrap().dc_flow(&p).unwrap();
        prop_assert!(max_abs(updated.iter().zip(global.iter()).map(|(a, b)| a - b)) < 1e-8);
        for l in net.lines().iter().filter(|l| !sub.line_map.contains(&l.id)) {
            prop_assert_eq!(updated[l.id].to_bits(), prior[l.id].to_bits());
        }
    }
}
