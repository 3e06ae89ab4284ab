//! Aspect-ratio reduction: the laminar family of contracted nodes, the star
//! set `S`, relevant scales and the per-scale contracted graphs `G_k`.
//!
//! With `ε = a/b`, every derived weight lives on the grid with denominator
//! `D = n·b`, where the padding `(ε/n)·2^k·s` has numerator `a·2^k·s`.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::Serialize;

use crate::explore::WeightedGraph;
use crate::graph::{Graph, VertexId};
use crate::weight::Weight;

/// Smallest `k` with `(ε/n)·2^k > w`, i.e. the first scale at which an edge
/// of weight `w` is contracted.
pub fn contraction_scale(w: u64, n: usize, eps: Ratio<u64>) -> u32 {
    let lhs = BigUint::from(w) * BigUint::from(n) * BigUint::from(*eps.denom());
    let a = BigUint::from(*eps.numer());
    let mut k = 0u32;
    while &a << k as usize <= lhs {
        k += 1;
    }
    k
}

/// Scales `k >= 1` for which some edge weight lies in `[2^k/n, 2^{k+1}]`.
pub fn relevant_scales(graph: &Graph) -> Vec<u32> {
    let n = graph.n() as u128;
    let mut out = BTreeSet::new();
    for e in graph.edges() {
        let w = e.w as u128;
        // lowest k >= 1 with 2^{k+1} >= w
        let mut lo = 1u32;
        while (1u128 << (lo + 1)) < w {
            lo += 1;
        }
        // highest k with 2^k <= w·n
        let top = w * n;
        let hi = 127 - top.leading_zeros();
        out.extend(lo..=hi);
    }
    out.into_iter().collect()
}

/// One union performed while sweeping edges by weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MergeEvent {
    pub scale: u32,
    /// Center of the surviving (larger) node; becomes the center of the union.
    pub survivor: VertexId,
    /// Center of the absorbed node.
    pub absorbed: VertexId,
    /// Id of the contracted graph edge.
    pub edge: u32,
    /// Size of the union.
    pub size: u32,
    pub absorbed_members: Vec<VertexId>,
}

/// Nested node structure of every `G_k`.
#[derive(Clone, Debug)]
pub struct LaminarFamily {
    n: usize,
    eps: Ratio<u64>,
    /// Per vertex: `(scale, center)` pairs, strictly increasing in scale,
    /// starting with `(0, x)`.
    merge_lists: Vec<Vec<(u32, VertexId)>>,
    merges: Vec<MergeEvent>,
    /// Contracted edges forming the spanning forest, with their merge scale.
    tree_edges: Vec<(u32, u32)>,
    forest_parent: Vec<Option<(VertexId, u32)>>,
    forest_depth: Vec<u32>,
}

/// Builds the laminar family by a single sweep over the edges in weight
/// order, using union by size. Equal sizes keep the node with the lower
/// center id.
pub fn build_laminar(graph: &Graph, eps: Ratio<u64>) -> LaminarFamily {
    let n = graph.n();
    let mut order: Vec<u32> = (0..graph.m() as u32).collect();
    order.sort_unstable_by_key(|&i| (graph.edge(i).w, i));

    let mut parent: Vec<VertexId> = (0..n as VertexId).collect();
    let mut members: Vec<Vec<VertexId>> = (0..n as VertexId).map(|v| vec![v]).collect();
    let center: Vec<VertexId> = (0..n as VertexId).collect();
    let mut merge_lists: Vec<Vec<(u32, VertexId)>> =
        (0..n as VertexId).map(|v| vec![(0, v)]).collect();
    let mut merges = Vec::new();
    let mut tree_edges = Vec::new();

    fn find(parent: &mut [VertexId], mut x: VertexId) -> VertexId {
        let mut root = x;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        while parent[x as usize] != root {
            let next = parent[x as usize];
            parent[x as usize] = root;
            x = next;
        }
        root
    }

    let mut cached: Option<(u64, u32)> = None;
    for id in order {
        let e = graph.edge(id);
        let (mut x, mut y) = (find(&mut parent, e.u), find(&mut parent, e.v));
        if x == y {
            continue;
        }
        let k = match cached {
            Some((w, k)) if w == e.w => k,
            _ => {
                let k = contraction_scale(e.w, n, eps);
                cached = Some((e.w, k));
                k
            }
        };
        let (sx, sy) = (members[x as usize].len(), members[y as usize].len());
        if sy > sx || (sy == sx && center[y as usize] < center[x as usize]) {
            std::mem::swap(&mut x, &mut y);
        }
        let survivor = center[x as usize];
        let absorbed_members = std::mem::take(&mut members[y as usize]);
        for &z in &absorbed_members {
            let list = &mut merge_lists[z as usize];
            match list.last_mut() {
                Some(last) if last.0 == k => last.1 = survivor,
                _ => list.push((k, survivor)),
            }
        }
        members[x as usize].extend_from_slice(&absorbed_members);
        parent[y as usize] = x;
        merges.push(MergeEvent {
            scale: k,
            survivor,
            absorbed: center[y as usize],
            edge: id,
            size: members[x as usize].len() as u32,
            absorbed_members,
        });
        tree_edges.push((id, k));
    }

    // Root the spanning forest for path queries.
    let mut adj: Vec<Vec<(VertexId, u32)>> = vec![Vec::new(); n];
    for &(id, _) in &tree_edges {
        let e = graph.edge(id);
        adj[e.u as usize].push((e.v, id));
        adj[e.v as usize].push((e.u, id));
    }
    let mut forest_parent = vec![None; n];
    let mut forest_depth = vec![0u32; n];
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    for s in 0..n as VertexId {
        if seen[s as usize] {
            continue;
        }
        seen[s as usize] = true;
        stack.push(s);
        while let Some(x) = stack.pop() {
            for &(y, id) in &adj[x as usize] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    forest_parent[y as usize] = Some((x, id));
                    forest_depth[y as usize] = forest_depth[x as usize] + 1;
                    stack.push(y);
                }
            }
        }
    }

    LaminarFamily {
        n,
        eps,
        merge_lists,
        merges,
        tree_edges,
        forest_parent,
        forest_depth,
    }
}

/// A star edge from a node center to a vertex absorbed into its node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarEdge {
    pub center: VertexId,
    pub member: VertexId,
    pub scale: u32,
    /// `(ε/n)·2^k·|U|` on the grid with denominator [`LaminarFamily::denominator`].
    pub w: Weight,
}

impl LaminarFamily {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps(&self) -> Ratio<u64> {
        self.eps
    }

    /// Grid denominator `n·b` for `ε = a/b`.
    pub fn denominator(&self) -> u128 {
        self.n as u128 * *self.eps.denom() as u128
    }

    /// Numerator of `(ε/n)·2^k·s` on the grid.
    pub fn padding(&self, k: u32, s: u64) -> Weight {
        Weight((*self.eps.numer() as u128) << k as u128).mul_small(s)
    }

    pub fn merge_list(&self, x: VertexId) -> &[(u32, VertexId)] {
        &self.merge_lists[x as usize]
    }

    pub fn merges(&self) -> &[MergeEvent] {
        &self.merges
    }

    /// Contracted edges `(edge id, merge scale)` of the spanning forest.
    pub fn tree_edges(&self) -> &[(u32, u32)] {
        &self.tree_edges
    }

    /// Center of the node containing `x` in `G_k`.
    pub fn center_at(&self, x: VertexId, k: u32) -> VertexId {
        let list = &self.merge_lists[x as usize];
        let idx = list.partition_point(|&(s, _)| s <= k);
        list[idx.saturating_sub(1)].1
    }

    /// Members of the node centered at `center` in `G_k`.
    pub fn node_members(&self, center: VertexId, k: u32) -> Vec<VertexId> {
        (0..self.n as VertexId)
            .filter(|&x| self.center_at(x, k) == center)
            .collect()
    }

    /// Edge ids of the spanning tree of the node containing `x` in `G_k`.
    pub fn node_tree(&self, x: VertexId, graph: &Graph, k: u32) -> Vec<u32> {
        let c = self.center_at(x, k);
        self.tree_edges
            .iter()
            .filter(|&&(id, s)| s <= k && self.center_at(graph.edge(id).u, k) == c)
            .map(|&(id, _)| id)
            .collect()
    }

    /// The star set `S`: for every merge, one edge from the surviving center
    /// to each absorbed vertex.
    pub fn star_edges(&self) -> Vec<StarEdge> {
        let mut out = Vec::new();
        for m in &self.merges {
            let w = self.padding(m.scale, m.size as u64);
            out.extend(m.absorbed_members.iter().map(|&z| StarEdge {
                center: m.survivor,
                member: z,
                scale: m.scale,
                w,
            }));
        }
        out
    }

    /// Vertex sequence of the unique spanning-forest path from `a` to `b`.
    pub fn forest_path(&self, a: VertexId, b: VertexId) -> Option<Vec<VertexId>> {
        let (mut x, mut y) = (a, b);
        let mut left = vec![x];
        let mut right = vec![y];
        while x != y {
            let (dx, dy) = (self.forest_depth[x as usize], self.forest_depth[y as usize]);
            if dx >= dy {
                x = self.forest_parent[x as usize]?.0;
                left.push(x);
            } else {
                y = self.forest_parent[y as usize]?.0;
                right.push(y);
            }
        }
        right.pop();
        left.extend(right.into_iter().rev());
        Some(left)
    }
}

impl Weight {
    #[inline]
    pub(crate) fn mul_small(self, s: u64) -> Weight {
        Weight(self.0 * s as u128)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScaleNode {
    pub center: VertexId,
    pub size: u32,
    pub degree: u32,
}

/// An edge of `G_k` between node indices `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScaleGraphEdge {
    pub a: u32,
    pub b: u32,
    /// Lightest input edge joining the two nodes.
    pub rep: u32,
    pub w: Weight,
}

/// The contracted graph `G_k`.
#[derive(Clone, Debug)]
pub struct ScaleGraph {
    pub scale: u32,
    /// All nodes, sorted by center.
    pub nodes: Vec<ScaleNode>,
    pub edges: Vec<ScaleGraphEdge>,
    /// Node index of every vertex.
    pub node_of: Vec<u32>,
    pub active_count: usize,
}

/// Builds `G_k`: edges of weight at most `2^{k+2}` between distinct nodes,
/// one per node pair (the lightest), weighted
/// `ω(x,y) + (ε/n)·2^k·(|X|+|Y|)`.
pub fn materialize_scale_graph(graph: &Graph, laminar: &LaminarFamily, k: u32) -> ScaleGraph {
    let n = graph.n();
    let denom = laminar.denominator();
    let mut index_of_center: HashMap<VertexId, u32> = HashMap::new();
    let mut centers: Vec<VertexId> = (0..n as VertexId)
        .map(|x| laminar.center_at(x, k))
        .collect();
    let mut uniq = centers.clone();
    uniq.sort_unstable();
    uniq.dedup();
    let mut nodes: Vec<ScaleNode> = uniq
        .iter()
        .map(|&c| ScaleNode {
            center: c,
            size: 0,
            degree: 0,
        })
        .collect();
    for (i, &c) in uniq.iter().enumerate() {
        index_of_center.insert(c, i as u32);
    }
    let node_of: Vec<u32> = centers.drain(..).map(|c| index_of_center[&c]).collect();
    for &i in &node_of {
        nodes[i as usize].size += 1;
    }

    let cutoff: Option<u128> = 1u128.checked_shl(k + 2);
    let mut best: HashMap<(u32, u32), (u64, u32)> = HashMap::new();
    for (id, e) in graph.edges().iter().enumerate() {
        if cutoff.is_some_and(|c| e.w as u128 > c) {
            continue;
        }
        let (x, y) = (node_of[e.u as usize], node_of[e.v as usize]);
        if x == y {
            continue;
        }
        let key = (x.min(y), x.max(y));
        let cand = (e.w, id as u32);
        best.entry(key)
            .and_modify(|cur| *cur = (*cur).min(cand))
            .or_insert(cand);
    }
    let mut edges: Vec<ScaleGraphEdge> = best
        .into_iter()
        .map(|((a, b), (w, rep))| {
            let pad = laminar.padding(
                k,
                nodes[a as usize].size as u64 + nodes[b as usize].size as u64,
            );
            ScaleGraphEdge {
                a,
                b,
                rep,
                w: Weight(w as u128 * denom) + pad,
            }
        })
        .collect();
    edges.sort_unstable_by_key(|e| (e.a, e.b));
    for e in &edges {
        nodes[e.a as usize].degree += 1;
        nodes[e.b as usize].degree += 1;
    }
    let active_count = nodes.iter().filter(|x| x.degree > 0).count();
    ScaleGraph {
        scale: k,
        nodes,
        edges,
        node_of,
        active_count,
    }
}

impl ScaleGraph {
    /// The subgraph on active nodes with compact ids in center order,
    /// together with the node index of every compact id. Arc `Base(j)` of
    /// the result is `self.edges[j]`.
    pub fn active_graph(&self) -> (WeightedGraph, Vec<u32>) {
        let mut compact = vec![u32::MAX; self.nodes.len()];
        let mut back = Vec::with_capacity(self.active_count);
        for (i, node) in self.nodes.iter().enumerate() {
            if node.degree > 0 {
                compact[i] = back.len() as u32;
                back.push(i as u32);
            }
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| (compact[e.a as usize], compact[e.b as usize], e.w))
            .collect();
        (WeightedGraph::new(back.len(), &edges, &[]), back)
    }

    /// `G_k` over all nodes (isolated ones included), indexed like `nodes`.
    pub fn full_graph(&self) -> WeightedGraph {
        let edges: Vec<_> = self.edges.iter().map(|e| (e.a, e.b, e.w)).collect();
        WeightedGraph::new(self.nodes.len(), &edges, &[])
    }
}

/// Per-scale active node counts and how many scales each node is active in.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ActivityReport {
    pub per_scale: Vec<(u32, usize)>,
    pub total_active: usize,
    pub max_scales_per_node: usize,
    /// `(center, size, scales)` for the node attaining the maximum.
    pub busiest_node: Option<(VertexId, u32, usize)>,
}

/// Activity over the given scales. A node is identified by `(center, size)`:
/// nodes only grow, so the pair names one set of the laminar family.
pub fn activity(graph: &Graph, laminar: &LaminarFamily, scales: &[u32]) -> ActivityReport {
    let mut count: HashMap<(VertexId, u32), usize> = HashMap::new();
    let mut per_scale = Vec::with_capacity(scales.len());
    for &k in scales {
        let g = materialize_scale_graph(graph, laminar, k);
        per_scale.push((k, g.active_count));
        for node in g.nodes.iter().filter(|x| x.degree > 0) {
            *count.entry((node.center, node.size)).or_default() += 1;
        }
    }
    let busiest = count
        .iter()
        .max_by_key(|(&(c, s), &v)| (v, std::cmp::Reverse((c, s))))
        .map(|(&(c, s), &v)| (c, s, v));
    ActivityReport {
        total_active: per_scale.iter().map(|&(_, a)| a).sum(),
        max_scales_per_node: busiest.map_or(0, |b| b.2),
        busiest_node: busiest,
        per_scale,
    }
}

/// `log2(n/ε) + 2`, the per-node activity budget.
pub fn activity_budget(n: usize, eps: Ratio<u64>) -> f64 {
    let ratio = n as f64 * *eps.denom() as f64 / *eps.numer() as f64;
    ratio.log2() + 2.0
}

/// `n·log2(n)`, the star-set size bound.
pub fn star_budget(n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    n as f64 * (n as f64).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_graph, GraphModel};

    fn eps(a: u64, b: u64) -> Ratio<u64> {
        Ratio::new(a, b)
    }

    #[test]
    fn relevant_scales_single_edge() {
        let g = Graph::from_edges(2, [(0, 1, 5)]).unwrap();
        assert_eq!(relevant_scales(&g), vec![2, 3]);
    }

    #[test]
    fn relevant_scales_unit_weights() {
        for n in [2usize, 5, 8, 9, 33] {
            let edges: Vec<_> = (0..n as u32 - 1).map(|i| (i, i + 1, 1)).collect();
            let g = Graph::from_edges(n, edges).unwrap();
            let want: Vec<u32> = (1..64).filter(|&k| (1u128 << k) <= n as u128).collect();
            assert_eq!(relevant_scales(&g), want, "n = {n}");
        }
        assert!(relevant_scales(&Graph::empty(4)).is_empty());
    }

    #[test]
    fn relevant_scales_match_definition() {
        let g = generate_graph(
            &GraphModel::Er {
                n: 20,
                p: 0.3,
                wmin: 1,
                wmax: 5000,
            },
            4,
        )
        .unwrap();
        let n = g.n() as u128;
        let want: Vec<u32> = (1..80u32)
            .filter(|&k| {
                g.edges().iter().any(|e| {
                    let w = e.w as u128;
                    (1u128 << k) <= w * n && w <= (1u128 << (k + 1))
                })
            })
            .collect();
        assert_eq!(relevant_scales(&g), want);
    }

    #[test]
    fn two_vertices_merge_at_threshold() {
        let g = Graph::from_edges(2, [(0, 1, 1)]).unwrap();
        let lam = build_laminar(&g, eps(1, 4));
        assert_eq!(contraction_scale(1, 2, eps(1, 4)), 4);
        assert_eq!(lam.merges().len(), 1);
        assert_eq!(lam.merges()[0].scale, 4);
        assert_eq!(lam.center_at(1, 3), 1);
        assert_eq!(lam.center_at(1, 4), 0);
    }

    #[test]
    fn unit_triangle_forms_one_node_with_two_tree_edges() {
        let g = Graph::from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let lam = build_laminar(&g, eps(1, 4));
        let k = lam.merges().iter().map(|m| m.scale).max().unwrap();
        let c = lam.center_at(0, k);
        assert_eq!(lam.node_members(c, k), vec![0, 1, 2]);
        assert_eq!(lam.node_tree(0, &g, k).len(), 2);
    }

    #[test]
    fn equal_size_merge_keeps_lower_center() {
        let g = Graph::from_edges(4, [(0, 1, 1), (2, 3, 1), (1, 3, 2)]).unwrap();
        let lam = build_laminar(&g, eps(1, 4));
        let last = lam.merges().last().unwrap();
        assert_eq!(last.survivor, 0);
        assert_eq!(last.absorbed, 2);
        assert_eq!(last.size, 4);
        for x in 0..4 {
            assert_eq!(lam.center_at(x, last.scale), 0);
        }
        assert_eq!(lam.merge_list(3).len(), 3);
        assert_eq!(lam.merge_list(1).len(), 2);
    }

    #[test]
    fn star_edge_for_single_merge() {
        let g = Graph::from_edges(2, [(0, 1, 1)]).unwrap();
        let lam = build_laminar(&g, eps(1, 4));
        let s = lam.star_edges();
        assert_eq!(s.len(), 1);
        // (ε/n)·2^k·2 = (1/8)·16·2 = 4 → numerator 4·D = 4·8
        assert_eq!(lam.denominator(), 8);
        assert_eq!(s[0].w, Weight(32));
        assert_eq!((s[0].center, s[0].member, s[0].scale), (0, 1, 4));
    }

    #[test]
    fn star_set_on_unit_path_is_within_bound() {
        let edges: Vec<_> = (0..7u32).map(|i| (i, i + 1, 1)).collect();
        let g = Graph::from_edges(8, edges).unwrap();
        let lam = build_laminar(&g, eps(1, 10));
        assert!(lam.star_edges().len() <= 24);
    }

    #[test]
    fn no_merges_no_stars() {
        let g = Graph::empty(5);
        assert!(build_laminar(&g, eps(1, 10)).star_edges().is_empty());
    }

    #[test]
    fn scale_graph_two_vertices() {
        let g = Graph::from_edges(2, [(0, 1, 5)]).unwrap();
        let lam = build_laminar(&g, eps(1, 4));
        let sg = materialize_scale_graph(&g, &lam, 2);
        assert_eq!(sg.nodes.len(), 2);
        assert_eq!(sg.edges.len(), 1);
        // 5 + (ε/2)·4·2 = 5 + 4ε = 6 on denominator 8
        assert_eq!(sg.edges[0].w, Weight(48));
        assert_eq!(sg.active_count, 2);
    }

    #[test]
    fn scale_graph_padding_with_node_sizes() {
        // nodes {0,1} and {2,3,4} at scale 6; min inter-edge weight 7; ε = 1/4, n = 10.
        let mut edges = vec![(0, 1, 1), (2, 3, 1), (3, 4, 1), (1, 2, 7), (0, 4, 9)];
        edges.extend((5..9u32).map(|i| (i, i + 1, 1000)));
        let g = Graph::from_edges(10, edges).unwrap();
        let lam = build_laminar(&g, eps(1, 4));
        assert_eq!(contraction_scale(1, 10, eps(1, 4)), 6);
        assert!(contraction_scale(7, 10, eps(1, 4)) > 6);
        let sg = materialize_scale_graph(&g, &lam, 6);
        let x = sg.node_of[0];
        let y = sg.node_of[2];
        assert_eq!(sg.nodes[x as usize].size, 2);
        assert_eq!(sg.nodes[y as usize].size, 3);
        let e = sg
            .edges
            .iter()
            .find(|e| (e.a, e.b) == (x.min(y), x.max(y)))
            .unwrap();
        // W = 7 + (0.25/10)·64·5 = 15
        assert_eq!(e.w, Weight(15 * lam.denominator()));
        assert_eq!(
            e.rep,
            g.edges().iter().position(|f| f.w == 7).unwrap() as u32
        );
    }

    #[test]
    fn heavy_edges_are_cut() {
        let g = Graph::from_edges(2, [(0, 1, 1 << 5)]).unwrap();
        let lam = build_laminar(&g, eps(1, 4));
        assert!(materialize_scale_graph(&g, &lam, 2).edges.is_empty());
        assert_eq!(materialize_scale_graph(&g, &lam, 3).edges.len(), 1);
    }

    #[test]
    fn forest_path_walks_tree_edges() {
        let edges: Vec<_> = (0..5u32).map(|i| (i, i + 1, 1)).collect();
        let g = Graph::from_edges(6, edges).unwrap();
        let lam = build_laminar(&g, eps(1, 4));
        assert_eq!(lam.forest_path(4, 1).unwrap(), vec![4, 3, 2, 1]);
        assert_eq!(lam.forest_path(2, 2).unwrap(), vec![2]);
        let g2 = Graph::from_edges(3, [(0, 1, 1)]).unwrap();
        let lam2 = build_laminar(&g2, eps(1, 4));
        assert!(lam2.forest_path(0, 2).is_none());
    }
}
