//! Single-scale hopset construction: alternating superclustering and
//! interconnection phases over a cluster partition.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::explore::{bounded_multisource_dijkstra, EdgeRef, Explorer, WeightedGraph};
use crate::graph::VertexId;
use crate::hopset::EdgeKind;
use crate::schedule::PhaseSchedule;
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub center: VertexId,
    pub members: Vec<VertexId>,
}

/// Clusters entering a phase, sorted by center id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterPartition {
    pub phase: usize,
    pub clusters: Vec<Cluster>,
}

impl ClusterPartition {
    pub fn singletons(n: usize) -> Self {
        ClusterPartition {
            phase: 0,
            clusters: (0..n as VertexId)
                .map(|v| Cluster {
                    center: v,
                    members: vec![v],
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// A hopset edge produced inside one scale graph. `path` walks from `u` to
/// `v` in that graph when paths are recorded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub w: Weight,
    pub kind: EdgeKind,
    pub phase: usize,
    pub path: Vec<EdgeRef>,
}

#[derive(Clone, Debug)]
pub struct SuperclusterOutcome {
    pub next: ClusterPartition,
    pub star_edges: Vec<ScaleEdge>,
    /// Clusters neither sampled nor reached.
    pub unclustered: Vec<Cluster>,
}

/// Draws the sampled clusters. Randomness is consumed once per cluster in
/// ascending center order.
pub fn sample_clusters(
    partition: &ClusterPartition,
    probability: f64,
    rng: &mut impl Rng,
) -> Vec<bool> {
    partition
        .clusters
        .iter()
        .map(|_| rng.gen::<f64>() < probability)
        .collect()
}

/// One superclustering step given the sampled mask.
pub fn supercluster_phase(
    graph: &WeightedGraph,
    partition: &ClusterPartition,
    sampled: &[bool],
    depth: Weight,
    record_paths: bool,
) -> SuperclusterOutcome {
    let phase = partition.phase;
    let roots: Vec<VertexId> = partition
        .clusters
        .iter()
        .zip(sampled)
        .filter(|(_, &s)| s)
        .map(|(c, _)| c.center)
        .collect();
    let forest = bounded_multisource_dijkstra(graph, &roots, depth);

    let mut slot_of_root = std::collections::HashMap::with_capacity(roots.len());
    let mut next: Vec<Cluster> = Vec::with_capacity(roots.len());
    for (c, &s) in partition.clusters.iter().zip(sampled) {
        if s {
            slot_of_root.insert(c.center, next.len());
            next.push(c.clone());
        }
    }
    let mut star_edges = Vec::new();
    let mut unclustered = Vec::new();
    for (c, &s) in partition.clusters.iter().zip(sampled) {
        if s {
            continue;
        }
        match forest.root[c.center as usize] {
            Some(r) => {
                next[slot_of_root[&r]].members.extend_from_slice(&c.members);
                star_edges.push(ScaleEdge {
                    u: r,
                    v: c.center,
                    w: forest.dist[c.center as usize],
                    kind: EdgeKind::Star,
                    phase,
                    path: if record_paths {
                        forest.path_to(c.center)
                    } else {
                        Vec::new()
                    },
                });
            }
            None => unclustered.push(c.clone()),
        }
    }
    for c in &mut next {
        c.members.sort_unstable();
    }
    SuperclusterOutcome {
        next: ClusterPartition {
            phase: phase + 1,
            clusters: next,
        },
        star_edges,
        unclustered,
    }
}

/// Connects every pair of `unclustered` centers within `depth` of each
/// other by an exact-distance edge, emitted once per unordered pair.
/// `visits[v]` counts the explorations that reached `v`.
pub fn interconnect_phase(
    graph: &WeightedGraph,
    unclustered: &[Cluster],
    phase: usize,
    depth: Weight,
    visits: &mut [u64],
    explorer: &mut Explorer,
    record_paths: bool,
) -> Vec<ScaleEdge> {
    let mut is_center = vec![false; graph.n()];
    for c in unclustered {
        is_center[c.center as usize] = true;
    }
    let mut edges = Vec::new();
    for c in unclustered {
        let src = c.center;
        let reached: Vec<(VertexId, Weight)> = explorer
            .explore(graph, src, depth, Some(&mut *visits))
            .iter()
            .filter(|&&(v, _)| v > src && is_center[v as usize])
            .copied()
            .collect();
        for (v, w) in reached {
            edges.push(ScaleEdge {
                u: src,
                v,
                w,
                kind: EdgeKind::Interconnect,
                phase,
                path: if record_paths {
                    explorer.path_to(v)
                } else {
                    Vec::new()
                },
            });
        }
    }
    edges
}

/// Per-phase accounting.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PhaseStats {
    pub phase: usize,
    pub clusters: usize,
    pub sampled: usize,
    pub superclustered: usize,
    pub unclustered: usize,
    pub star_edges: usize,
    pub interconnect_edges: usize,
    /// `None` for the concluding phase, which does not sample.
    pub deg: Option<f64>,
    pub visits_total: u64,
    pub visits_max: u64,
    /// `visits_total / n`.
    pub visits_mean: f64,
}

#[derive(Clone, Debug)]
pub struct SingleScaleHopset {
    pub scale: u32,
    pub edges: Vec<ScaleEdge>,
    pub phases: Vec<PhaseStats>,
    /// Partitions entering each phase, when requested.
    pub partitions: Vec<ClusterPartition>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    pub record_paths: bool,
    pub keep_partitions: bool,
}

/// Independent random stream for scale `k` under `seed`.
pub fn scale_rng(seed: u64, k: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

/// Runs phases `0..ell` (superclustering then interconnection) and the
/// interconnection-only phase `ell` on `graph`. Thresholds are placed on the
/// weight grid with denominator `denom`.
pub fn build_single_scale(
    graph: &WeightedGraph,
    schedule: &PhaseSchedule,
    denom: u128,
    scale: u32,
    rng: &mut impl Rng,
    options: BuildOptions,
) -> SingleScaleHopset {
    let n = graph.n();
    let mut partition = ClusterPartition::singletons(n);
    let mut explorer = Explorer::new(n);
    let mut edges = Vec::new();
    let mut phases = Vec::with_capacity(schedule.ell + 1);
    let mut partitions = Vec::new();
    for i in 0..=schedule.ell {
        if options.keep_partitions {
            partitions.push(partition.clone());
        }
        let mut stats = PhaseStats {
            phase: i,
            clusters: partition.len(),
            ..Default::default()
        };
        let (unclustered, next) = if i < schedule.ell {
            let p = schedule.sample_probability(i);
            let sampled = sample_clusters(&partition, p, rng);
            let out = supercluster_phase(
                graph,
                &partition,
                &sampled,
                schedule.depth(i, denom),
                options.record_paths,
            );
            stats.deg = Some(schedule.deg[i]);
            stats.sampled = sampled.iter().filter(|&&s| s).count();
            stats.superclustered = out.star_edges.len();
            stats.star_edges = out.star_edges.len();
            edges.extend(out.star_edges);
            (out.unclustered, Some(out.next))
        } else {
            (std::mem::take(&mut partition.clusters), None)
        };
        stats.unclustered = unclustered.len();
        let mut visits = vec![0u64; n];
        let inter = interconnect_phase(
            graph,
            &unclustered,
            i,
            schedule.half_depth(i, denom),
            &mut visits,
            &mut explorer,
            options.record_paths,
        );
        stats.interconnect_edges = inter.len();
        stats.visits_total = visits.iter().sum();
        stats.visits_max = visits.iter().copied().max().unwrap_or(0);
        stats.visits_mean = if n == 0 {
            0.0
        } else {
            stats.visits_total as f64 / n as f64
        };
        edges.extend(inter);
        phases.push(stats);
        match next {
            Some(p) => partition = p,
            None => break,
        }
    }
    SingleScaleHopset {
        scale,
        edges,
        phases,
        partitions,
    }
}
