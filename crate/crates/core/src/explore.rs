//! Exploration primitives: depth-bounded (multi-source) Dijkstra and exact
//! hop-limited Bellman-Ford.
//!
//! Both run on [`WeightedGraph`], a compact adjacency structure whose arcs
//! carry exact [`Weight`]s and an [`EdgeRef`] naming the edge they came from.
//! The same structure serves the input graph, a contracted scale graph and
//! the union of a graph with hopset edges.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::graph::{Graph, VertexId};
use crate::weight::Weight;

/// Origin of an arc. `Base` edges sort before `Extra` edges, which fixes the
/// predecessor tie-break in Bellman-Ford.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeRef {
    Base(u32),
    Extra(u32),
}

impl EdgeRef {
    #[inline]
    fn kind_rank(self) -> u8 {
        match self {
            EdgeRef::Base(_) => 0,
            EdgeRef::Extra(_) => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub to: VertexId,
    pub w: Weight,
    pub edge: EdgeRef,
}

/// Undirected graph in CSR form with exact weights.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    n: usize,
    offsets: Vec<usize>,
    arcs: Vec<Arc>,
    base_ends: Vec<(VertexId, VertexId)>,
    extra_ends: Vec<(VertexId, VertexId)>,
}

impl WeightedGraph {
    /// Builds from base and extra undirected edge lists.
    pub fn new(
        n: usize,
        base: &[(VertexId, VertexId, Weight)],
        extra: &[(VertexId, VertexId, Weight)],
    ) -> Self {
        let mut degree = vec![0usize; n + 1];
        for &(u, v, _) in base.iter().chain(extra) {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let placeholder = Arc {
            to: 0,
            w: Weight::ZERO,
            edge: EdgeRef::Base(0),
        };
        let mut arcs = vec![placeholder; offsets[n]];
        let tagged = base
            .iter()
            .enumerate()
            .map(|(i, e)| (e, EdgeRef::Base(i as u32)))
            .chain(
                extra
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (e, EdgeRef::Extra(i as u32))),
            );
        for (&(u, v, w), edge) in tagged {
            arcs[fill[u as usize]] = Arc { to: v, w, edge };
            fill[u as usize] += 1;
            arcs[fill[v as usize]] = Arc { to: u, w, edge };
            fill[v as usize] += 1;
        }
        for i in 0..n {
            arcs[offsets[i]..offsets[i + 1]].sort_unstable_by_key(|a| (a.to, a.edge));
        }
        WeightedGraph {
            n,
            offsets,
            arcs,
            base_ends: base.iter().map(|&(u, v, _)| (u, v)).collect(),
            extra_ends: extra.iter().map(|&(u, v, _)| (u, v)).collect(),
        }
    }

    /// The input graph with every integer weight multiplied by `denom`.
    pub fn from_graph(graph: &Graph, denom: u128) -> Self {
        Self::union(graph, denom, &[])
    }

    /// `graph` (scaled by `denom`) plus `extra` edges already on that grid.
    pub fn union(graph: &Graph, denom: u128, extra: &[(VertexId, VertexId, Weight)]) -> Self {
        let base: Vec<_> = graph
            .edges()
            .iter()
            .map(|e| (e.u, e.v, Weight(e.w as u128 * denom)))
            .collect();
        Self::new(graph.n(), &base, extra)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn arcs(&self, v: VertexId) -> &[Arc] {
        &self.arcs[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    pub fn endpoints(&self, edge: EdgeRef) -> (VertexId, VertexId) {
        match edge {
            EdgeRef::Base(i) => self.base_ends[i as usize],
            EdgeRef::Extra(i) => self.extra_ends[i as usize],
        }
    }
}

/// Result of one bounded multi-source Dijkstra.
#[derive(Clone, Debug)]
pub struct ExplorationForest {
    /// `Weight::INFINITY` for vertices the exploration did not reach.
    pub dist: Vec<Weight>,
    pub root: Vec<Option<VertexId>>,
    /// Predecessor vertex and the arc used to enter each reached non-root.
    pub parent: Vec<Option<(VertexId, EdgeRef)>>,
}

impl ExplorationForest {
    pub fn is_reached(&self, v: VertexId) -> bool {
        self.root[v as usize].is_some()
    }

    /// Edges from `root[v]` down to `v`, in path order.
    pub fn path_to(&self, v: VertexId) -> Vec<EdgeRef> {
        let mut out = Vec::new();
        let mut x = v;
        while let Some((p, e)) = self.parent[x as usize] {
            out.push(e);
            x = p;
        }
        out.reverse();
        out
    }
}

/// Dijkstra from every vertex of `roots` at once, settling only vertices at
/// distance `<= depth` from the root set.
///
/// A vertex equidistant from several roots belongs to the lowest root id.
pub fn bounded_multisource_dijkstra(
    graph: &WeightedGraph,
    roots: &[VertexId],
    depth: Weight,
) -> ExplorationForest {
    let n = graph.n();
    let mut dist = vec![Weight::INFINITY; n];
    let mut root: Vec<Option<VertexId>> = vec![None; n];
    let mut parent = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut roots = roots.to_vec();
    roots.sort_unstable();
    roots.dedup();
    for r in roots {
        dist[r as usize] = Weight::ZERO;
        root[r as usize] = Some(r);
        heap.push(Reverse((Weight::ZERO, r, r)));
    }
    while let Some(Reverse((d, r, v))) = heap.pop() {
        if done[v as usize] || (d, r) != (dist[v as usize], root[v as usize].unwrap_or(u32::MAX)) {
            continue;
        }
        done[v as usize] = true;
        for arc in graph.arcs(v) {
            let cand = d.saturating_add(arc.w);
            if cand > depth {
                continue;
            }
            let t = arc.to as usize;
            if done[t] {
                continue;
            }
            let better = match root[t] {
                None => true,
                Some(rt) => (cand, r) < (dist[t], rt),
            };
            if better {
                dist[t] = cand;
                root[t] = Some(r);
                parent[t] = Some((v, arc.edge));
                heap.push(Reverse((cand, r, arc.to)));
            }
        }
    }
    ExplorationForest { dist, root, parent }
}

/// Reusable state for many single-source bounded explorations on one graph.
///
/// Only the entries touched by the previous run are reset, so a sequence of
/// small explorations costs time proportional to what they visit.
#[derive(Debug)]
pub struct Explorer {
    dist: Vec<Weight>,
    parent: Vec<Option<(VertexId, EdgeRef)>>,
    settled: Vec<bool>,
    touched: Vec<VertexId>,
    reached: Vec<(VertexId, Weight)>,
    heap: BinaryHeap<Reverse<(Weight, VertexId)>>,
}

impl Explorer {
    pub fn new(n: usize) -> Self {
        Explorer {
            dist: vec![Weight::INFINITY; n],
            parent: vec![None; n],
            settled: vec![false; n],
            touched: Vec::new(),
            reached: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v as usize] = Weight::INFINITY;
            self.parent[v as usize] = None;
            self.settled[v as usize] = false;
        }
        self.touched.clear();
        self.reached.clear();
        self.heap.clear();
    }

    /// Settles every vertex within `depth` of `source` (inclusive) and returns
    /// them in settle order. When `visits` is given, each reached vertex has
    /// its counter incremented once.
    pub fn explore(
        &mut self,
        graph: &WeightedGraph,
        source: VertexId,
        depth: Weight,
        mut visits: Option<&mut [u64]>,
    ) -> &[(VertexId, Weight)] {
        self.reset();
        self.dist[source as usize] = Weight::ZERO;
        self.touched.push(source);
        self.heap.push(Reverse((Weight::ZERO, source)));
        while let Some(Reverse((d, v))) = self.heap.pop() {
            if self.settled[v as usize] || d != self.dist[v as usize] {
                continue;
            }
            self.settled[v as usize] = true;
            self.reached.push((v, d));
            if let Some(counter) = visits.as_deref_mut() {
                counter[v as usize] += 1;
            }
            for arc in graph.arcs(v) {
                let cand = d.saturating_add(arc.w);
                let t = arc.to as usize;
                if cand > depth || self.settled[t] {
                    continue;
                }
                if cand < self.dist[t] {
                    if !self.dist[t].is_finite() {
                        self.touched.push(arc.to);
                    }
                    self.dist[t] = cand;
                    self.parent[t] = Some((v, arc.edge));
                    self.heap.push(Reverse((cand, arc.to)));
                }
            }
        }
        &self.reached
    }

    /// Edges from the last source to `v`; empty if `v` is the source.
    pub fn path_to(&self, v: VertexId) -> Vec<EdgeRef> {
        let mut out = Vec::new();
        let mut x = v;
        while let Some((p, e)) = self.parent[x as usize] {
            out.push(e);
            x = p;
        }
        out.reverse();
        out
    }

    pub fn dist(&self, v: VertexId) -> Weight {
        self.dist[v as usize]
    }
}

/// Exact distances from `source` to every vertex within `depth`.
pub fn bounded_dijkstra_single(
    graph: &WeightedGraph,
    source: VertexId,
    depth: Weight,
    visits: &mut [u64],
) -> BTreeMap<VertexId, Weight> {
    let mut ex = Explorer::new(graph.n());
    ex.explore(graph, source, depth, Some(visits))
        .iter()
        .copied()
        .collect()
}

/// Unbounded single-source Dijkstra.
pub fn dijkstra(graph: &WeightedGraph, source: VertexId) -> Vec<Weight> {
    let mut ex = Explorer::new(graph.n());
    ex.explore(graph, source, Weight(u128::MAX - 1), None);
    ex.dist.clone()
}

/// `t`-limited distances from one source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopRow {
    pub source: VertexId,
    /// Hop budget this row is exact for.
    pub budget: u64,
    pub dist: Vec<Weight>,
    /// Last arc of the path realising `dist[v]`.
    pub pred: Vec<Option<(VertexId, EdgeRef)>>,
    /// Rounds actually executed; fewer than `budget` once values stabilise.
    pub rounds: u64,
}

/// Exact hop-limited distances for a set of sources.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopLimitedTable {
    pub rows: Vec<HopRow>,
}

impl HopLimitedTable {
    pub fn row(&self, source: VertexId) -> Option<&HopRow> {
        self.rows.iter().find(|r| r.source == source)
    }

    /// `d^{(t)}(source, v)`; `None` when no path of at most `t` edges exists.
    pub fn get(&self, source: VertexId, v: VertexId) -> Option<Weight> {
        self.row(source)
            .map(|r| r.dist[v as usize])
            .filter(|d| d.is_finite())
    }
}

/// Bellman-Ford from `source` limited to `budget` rounds.
///
/// Round `j` reads only values produced by round `j - 1`, so after `j`
/// rounds `dist[v]` is the minimum over paths with at most `j` edges. Stops
/// early once a round changes nothing. `on_round` sees the distance vector
/// after every executed round together with the vertices it changed.
pub fn hop_limited_row_with<F>(
    graph: &WeightedGraph,
    source: VertexId,
    budget: u64,
    mut on_round: F,
) -> HopRow
where
    F: FnMut(u64, &[Weight], &[VertexId]),
{
    let n = graph.n();
    let mut dist = vec![Weight::INFINITY; n];
    let mut pred: Vec<Option<(VertexId, EdgeRef)>> = vec![None; n];
    let mut staged = vec![Weight::INFINITY; n];
    let mut staged_pred: Vec<Option<(VertexId, EdgeRef)>> = vec![None; n];
    let mut stamp = vec![0u64; n];
    dist[source as usize] = Weight::ZERO;
    let mut frontier = vec![source];
    let mut changed = Vec::new();
    let mut round = 0u64;
    while round < budget && !frontier.is_empty() {
        round += 1;
        changed.clear();
        for &u in &frontier {
            let du = dist[u as usize];
            for arc in graph.arcs(u) {
                let v = arc.to as usize;
                let cand = du.saturating_add(arc.w);
                let fresh = stamp[v] == round;
                let current = if fresh { staged[v] } else { dist[v] };
                let wins = cand < current
                    || (fresh
                        && cand == current
                        && staged_pred[v].is_some_and(|(pu, pe)| {
                            (u, arc.edge.kind_rank()) < (pu, pe.kind_rank())
                        }));
                if wins {
                    if !fresh {
                        stamp[v] = round;
                        changed.push(arc.to);
                    }
                    staged[v] = cand;
                    staged_pred[v] = Some((u, arc.edge));
                }
            }
        }
        for &v in &changed {
            dist[v as usize] = staged[v as usize];
            pred[v as usize] = staged_pred[v as usize];
        }
        changed.sort_unstable();
        on_round(round, &dist, &changed);
        std::mem::swap(&mut frontier, &mut changed);
    }
    HopRow {
        source,
        budget,
        dist,
        pred,
        rounds: round,
    }
}

pub fn hop_limited_row(graph: &WeightedGraph, source: VertexId, budget: u64) -> HopRow {
    hop_limited_row_with(graph, source, budget, |_, _, _| {})
}

/// Exact `t`-limited distances from each of `sources` in `base ∪ extra`.
///
/// `base` weights are scaled by `denom`; `extra` weights must already be on
/// that grid.
pub fn hop_limited_bellman_ford(
    base: &Graph,
    denom: u128,
    extra: &[(VertexId, VertexId, Weight)],
    sources: &[VertexId],
    t: u64,
) -> HopLimitedTable {
    let graph = WeightedGraph::union(base, denom, extra);
    HopLimitedTable {
        rows: sources
            .iter()
            .map(|&s| hop_limited_row(&graph, s, t))
            .collect(),
    }
}
