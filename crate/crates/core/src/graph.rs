//! Undirected graphs with positive integer edge weights.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type VertexId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub w: u64,
}

impl Edge {
    /// The endpoint opposite to `x`.
    #[inline]
    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Immutable weighted undirected graph. Vertices are `0..n`.
///
/// Edges are stored once with `u < v`; the adjacency of every vertex is
/// sorted by neighbour id and refers back into the edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(VertexId, u32)>>,
}

impl Graph {
    /// Builds a graph from raw `(u, v, w)` triples.
    ///
    /// Self-loops are dropped and parallel edges collapse to the lightest
    /// one. Weights below 1 and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (VertexId, VertexId, u64)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "{n} vertices exceed the u32 id space"
            )));
        }
        let mut best: HashMap<(VertexId, VertexId), u64> = HashMap::new();
        for (u, v, w) in edges {
            for x in [u, v] {
                if x as usize >= n {
                    return Err(Error::VertexOutOfRange {
                        line: 0,
                        vertex: x as u64 + 1,
                        n,
                    });
                }
            }
            if w < 1 {
                return Err(Error::NonPositiveWeight {
                    line: 0,
                    weight: w as i128,
                });
            }
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            best.entry(key)
                .and_modify(|cur| *cur = (*cur).min(w))
                .or_insert(w);
        }
        let mut edges: Vec<Edge> = best
            .into_iter()
            .map(|((u, v), w)| Edge { u, v, w })
            .collect();
        edges.sort_unstable_by_key(|e| (e.u, e.v));
        Ok(Self::from_normalized(n, edges))
    }

    fn from_normalized(n: usize, edges: Vec<Edge>) -> Graph {
        let mut adj = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            adj[e.u as usize].push((e.v, i as u32));
            adj[e.v as usize].push((e.u, i as u32));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Graph {
        Self::from_normalized(n, Vec::new())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, id: u32) -> Edge {
        self.edges[id as usize]
    }

    /// `(neighbour, edge id)` pairs of `v`, sorted by neighbour.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, u32)] {
        &self.adj[v as usize]
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<Edge> {
        let list = self.adj.get(u as usize)?;
        list.binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| self.edges[list[i].1 as usize])
    }

    pub fn max_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.w).max().unwrap_or(0)
    }

    /// Sum of the `n - 1` heaviest edge weights: an upper bound on every
    /// finite distance that needs no shortest-path computation.
    pub fn distance_upper_bound(&self) -> u128 {
        let mut ws: Vec<u64> = self.edges.iter().map(|e| e.w).collect();
        ws.sort_unstable_by(|a, b| b.cmp(a));
        ws.iter()
            .take(self.n.saturating_sub(1))
            .map(|&w| w as u128)
            .sum()
    }

    /// Hex SHA-256 over the canonical `(n, sorted edges)` encoding.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("n {}\n", self.n).as_bytes());
        for e in &self.edges {
            hasher.update(format!("{} {} {}\n", e.u, e.v, e.w).as_bytes());
        }
        hex::encode(hasher.finalize())
    }

    /// Connected-component label per vertex (labels are the smallest vertex id).
    pub fn components(&self) -> Vec<VertexId> {
        let mut label = vec![u32::MAX; self.n];
        let mut stack = Vec::new();
        for s in 0..self.n as u32 {
            if label[s as usize] != u32::MAX {
                continue;
            }
            label[s as usize] = s;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(y, _) in self.neighbors(x) {
                    if label[y as usize] == u32::MAX {
                        label[y as usize] = s;
                        stack.push(y);
                    }
                }
            }
        }
        label
    }

    /// Checks every structural invariant and reports each breach.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.adj.len() != self.n {
            out.push(Violation::AdjacencyLength {
                expected: self.n,
                found: self.adj.len(),
            });
        }
        let mut seen: HashMap<(VertexId, VertexId), usize> = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.w < 1 {
                out.push(Violation::WeightPositivity {
                    edge: i,
                    weight: e.w,
                });
            }
            if e.u as usize >= self.n || e.v as usize >= self.n {
                out.push(Violation::VertexRange { edge: i });
                continue;
            }
            if e.u == e.v {
                out.push(Violation::SelfLoop {
                    edge: i,
                    vertex: e.u,
                });
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            if let Some(&first) = seen.get(&key) {
                out.push(Violation::ParallelEdge { first, second: i });
            } else {
                seen.insert(key, i);
            }
            for (x, y) in [(e.u, e.v), (e.v, e.u)] {
                let present = self
                    .adj
                    .get(x as usize)
                    .is_some_and(|list| list.contains(&(y, i as u32)));
                if !present {
                    out.push(Violation::AdjacencyConsistency { vertex: x, edge: i });
                }
            }
        }
        for (x, list) in self.adj.iter().enumerate() {
            for &(y, id) in list {
                let ok = self.edges.get(id as usize).is_some_and(|e| {
                    (e.u == x as u32 && e.v == y) || (e.v == x as u32 && e.u == y)
                });
                if !ok {
                    out.push(Violation::AdjacencyConsistency {
                        vertex: x as u32,
                        edge: id as usize,
                    });
                }
            }
        }
        out
    }
}

/// One broken invariant found by [`Graph::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    WeightPositivity { edge: usize, weight: u64 },
    VertexRange { edge: usize },
    SelfLoop { edge: usize, vertex: VertexId },
    ParallelEdge { first: usize, second: usize },
    AdjacencyConsistency { vertex: VertexId, edge: usize },
    AdjacencyLength { expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WeightPositivity { edge, weight } => {
                write!(f, "edge {edge}: weight {weight} < 1")
            }
            Violation::VertexRange { edge } => write!(f, "edge {edge}: endpoint out of range"),
            Violation::SelfLoop { edge, vertex } => write!(f, "edge {edge}: self-loop at {vertex}"),
            Violation::ParallelEdge { first, second } => {
                write!(f, "edges {first} and {second} join the same pair")
            }
            Violation::AdjacencyConsistency { vertex, edge } => {
                write!(f, "vertex {vertex}: adjacency disagrees with edge {edge}")
            }
            Violation::AdjacencyLength { expected, found } => {
                write!(f, "adjacency has {found} lists for {expected} vertices")
            }
        }
    }
}
