//! Oracle checks of the `(β, ε)` contract and size accounting.

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::explore::{dijkstra, hop_limited_row_with, WeightedGraph};
use crate::graph::{Graph, VertexId};
use crate::hopset::{EdgeKind, Hopset};
use crate::single_scale::PhaseStats;
use crate::weight::{format_ratio, ratio_to_f64, Weight};

/// Largest graph accepted by all-pairs checks.
pub const N_MAX_ALLPAIRS: usize = 500;

pub const REPORT_VERSION: u32 = 1;

/// Exact all-pairs distances; `Weight::INFINITY` marks unreachable pairs.
pub fn exact_apsp(graph: &Graph) -> Result<Vec<Vec<Weight>>> {
    if graph.n() > N_MAX_ALLPAIRS {
        return Err(Error::TooLarge {
            n: graph.n(),
            max: N_MAX_ALLPAIRS,
        });
    }
    let g = WeightedGraph::from_graph(graph, 1);
    Ok((0..graph.n() as VertexId)
        .into_par_iter()
        .map(|s| dijkstra(&g, s))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairMode {
    All,
    /// `m` ordered pairs drawn uniformly among pairs with finite distance.
    Sample {
        m: usize,
        seed: u64,
    },
    /// Pairs with `d_G ∈ (2^k, 2^{k+1}]`.
    Band(u32),
}

impl std::fmt::Display for PairMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PairMode::All => write!(f, "all"),
            PairMode::Sample { m, seed } => write!(f, "sample:{m}:{seed}"),
            PairMode::Band(k) => write!(f, "band:{k}"),
        }
    }
}

impl std::str::FromStr for PairMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidParameter(format!(
                "pair mode `{s}` (expected all, sample:M[:SEED] or band:K)"
            ))
        };
        let mut parts = s.split(':');
        match parts.next() {
            Some("all") if parts.next().is_none() => Ok(PairMode::All),
            Some("sample") => {
                let m = parts.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
                let seed = match parts.next() {
                    Some(x) => x.parse().map_err(|_| bad())?,
                    None => 0,
                };
                Ok(PairMode::Sample { m, seed })
            }
            Some("band") => Ok(PairMode::Band(
                parts.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?,
            )),
            _ => Err(bad()),
        }
    }
}

pub fn in_band(d: u128, k: u32) -> bool {
    let lo = 1u128.checked_shl(k).unwrap_or(u128::MAX);
    let hi = 1u128.checked_shl(k + 1).unwrap_or(u128::MAX);
    d > lo && d <= hi
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub u: VertexId,
    pub v: VertexId,
    pub d_g: String,
    /// `None` when no path of at most `effective_beta` edges exists.
    pub d_limited: Option<String>,
    pub stretch: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SizeStats {
    pub total: usize,
    pub per_scale: BTreeMap<u32, usize>,
    pub per_kind: BTreeMap<EdgeKind, usize>,
    pub s_edges: usize,
    /// `n·log2 n`.
    pub s_bound: f64,
    /// `|H| / (n^{1+1/κ}·ln n)`.
    pub normalized: f64,
}

pub fn size_stats(hopset: &Hopset, n: usize, kappa: u32) -> SizeStats {
    let mut per_kind = BTreeMap::new();
    for e in &hopset.edges {
        *per_kind.entry(e.kind).or_default() += 1;
    }
    let nf = n as f64;
    let scale = if n < 2 {
        0.0
    } else {
        nf.powf(1.0 + 1.0 / kappa as f64) * nf.ln()
    };
    SizeStats {
        total: hopset.len(),
        per_scale: hopset.per_scale_counts(),
        s_edges: hopset.count_kind(EdgeKind::Node),
        per_kind,
        s_bound: crate::laminar::star_budget(n),
        normalized: if scale > 0.0 {
            hopset.len() as f64 / scale
        } else {
            0.0
        },
    }
}

/// Interconnection load of one phase, aggregated over every built scale.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PhaseLoad {
    pub scale: u32,
    pub phase: usize,
    pub visits_mean: f64,
    pub visits_max: u64,
    pub deg: Option<f64>,
}

pub fn load_stats<'a>(scales: impl IntoIterator<Item = (u32, &'a [PhaseStats])>) -> Vec<PhaseLoad> {
    let mut out = Vec::new();
    for (k, phases) in scales {
        out.extend(phases.iter().map(|p| PhaseLoad {
            scale: k,
            phase: p.phase,
            visits_mean: p.visits_mean,
            visits_max: p.visits_max,
            deg: p.deg,
        }));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub version: u32,
    pub pair_mode: String,
    pub effective_beta: u64,
    pub effective_eps: String,
    pub pairs_checked: usize,
    /// `None` when nothing was checked; `"inf"` when some pair had no
    /// `effective_beta`-hop path.
    pub max_stretch: Option<String>,
    #[serde(skip)]
    pub max_stretch_exact: Option<Ratio<u128>>,
    pub unbounded_pairs: usize,
    pub violations: Vec<Violation>,
    /// Smallest hop budget at which every checked pair meets the contract;
    /// `None` if `effective_beta` hops do not suffice.
    pub empirical_hopbound: Option<u64>,
    pub sizes: SizeStats,
    pub exploration_load: Option<Vec<PhaseLoad>>,
    pub wall_time_ms: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_stretch_f64(&self) -> Option<f64> {
        if self.unbounded_pairs > 0 {
            return Some(f64::INFINITY);
        }
        self.max_stretch_exact.as_ref().map(ratio_to_f64)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct SourceOutcome {
    checked: usize,
    max: Option<Ratio<u128>>,
    unbounded: usize,
    violations: Vec<Violation>,
    hopbound: Option<u64>,
}

/// Checks `d_G ≤ d^{(β)}_{G∪H} ≤ (1+ε)·d_G` in exact arithmetic with
/// `β = hopset.effective_beta` and `ε = hopset.effective_eps`.
pub fn verify_stretch(
    graph: &Graph,
    hopset: &Hopset,
    mode: PairMode,
) -> Result<VerificationReport> {
    verify_stretch_at(
        graph,
        hopset,
        mode,
        hopset.effective_beta,
        hopset.effective_eps,
    )
}

/// [`verify_stretch`] against an explicit `(t, ε)` contract.
pub fn verify_stretch_at(
    graph: &Graph,
    hopset: &Hopset,
    mode: PairMode,
    t: u64,
    eps: Ratio<u64>,
) -> Result<VerificationReport> {
    let started = Instant::now();
    if hopset.n != graph.n() {
        return Err(Error::Mismatch(format!(
            "hopset has {} vertices, graph has {}",
            hopset.n,
            graph.n()
        )));
    }
    if let Some(e) = hopset
        .edges
        .iter()
        .find(|e| e.u as usize >= graph.n() || e.v as usize >= graph.n())
    {
        return Err(Error::Mismatch(format!(
            "hopset edge ({}, {}) outside the graph",
            e.u, e.v
        )));
    }
    if mode == PairMode::All && graph.n() > N_MAX_ALLPAIRS {
        return Err(Error::TooLarge {
            n: graph.n(),
            max: N_MAX_ALLPAIRS,
        });
    }
    let n = graph.n();
    let targets: BTreeMap<VertexId, Option<Vec<VertexId>>> = match mode {
        PairMode::All | PairMode::Band(_) => (0..n as VertexId).map(|s| (s, None)).collect(),
        PairMode::Sample { m, seed } => sample_pairs(graph, m, seed),
    };
    let band = match mode {
        PairMode::Band(k) => Some(k),
        _ => None,
    };
    let denom = hopset.denom;
    let limit = Ratio::new(
        *eps.numer() as u128 + *eps.denom() as u128,
        *eps.denom() as u128,
    );
    let exact = WeightedGraph::from_graph(graph, 1);
    let union = hopset.union_graph(graph);

    let sources: Vec<_> = targets.into_iter().collect();
    let outcomes: Vec<SourceOutcome> = sources
        .par_iter()
        .map(|(s, picked)| {
            let d = dijkstra(&exact, *s);
            let wanted: Vec<VertexId> = match picked {
                Some(list) => list.clone(),
                None => (0..n as VertexId)
                    .filter(|&v| v != *s && d[v as usize].is_finite())
                    .filter(|&v| band.is_none_or(|k| in_band(d[v as usize].0, k)))
                    .collect(),
            };
            let ok = |v: VertexId, est: Weight| -> bool {
                let dg = d[v as usize].0;
                est.is_finite() && est.0 >= dg * denom && Ratio::new(est.0, dg * denom) <= limit
            };
            let mut hopbound = if wanted.is_empty() { Some(0) } else { None };
            let mut pending: Vec<VertexId> = wanted.clone();
            let row = hop_limited_row_with(&union, *s, t, |round, dist, _| {
                if hopbound.is_none() {
                    pending.retain(|&v| !ok(v, dist[v as usize]));
                    if pending.is_empty() {
                        hopbound = Some(round);
                    }
                }
            });
            let mut out = SourceOutcome {
                checked: wanted.len(),
                max: None,
                unbounded: 0,
                violations: Vec::new(),
                hopbound,
            };
            for &v in &wanted {
                let dg = d[v as usize].0;
                let est = row.dist[v as usize];
                if !est.is_finite() {
                    out.unbounded += 1;
                    out.violations.push(Violation {
                        u: *s,
                        v,
                        d_g: dg.to_string(),
                        d_limited: None,
                        stretch: None,
                    });
                    continue;
                }
                let stretch = Ratio::new(est.0, dg * denom);
                if out.max.is_none_or(|m| stretch > m) {
                    out.max = Some(stretch);
                }
                if !ok(v, est) {
                    out.violations.push(Violation {
                        u: *s,
                        v,
                        d_g: dg.to_string(),
                        d_limited: Some(format_ratio(&est.to_ratio(denom))),
                        stretch: Some(format_ratio(&stretch)),
                    });
                }
            }
            out
        })
        .collect();

    let mut report = VerificationReport {
        version: REPORT_VERSION,
        pair_mode: mode.to_string(),
        effective_beta: t,
        effective_eps: format_ratio(&eps),
        pairs_checked: 0,
        max_stretch: None,
        max_stretch_exact: None,
        unbounded_pairs: 0,
        violations: Vec::new(),
        empirical_hopbound: Some(0),
        sizes: size_stats(
            hopset,
            n,
            hopset.provenance.as_ref().map_or(2, |p| p.params.kappa),
        ),
        exploration_load: None,
        wall_time_ms: 0.0,
    };
    for o in outcomes {
        report.pairs_checked += o.checked;
        report.unbounded_pairs += o.unbounded;
        report.violations.extend(o.violations);
        if let Some(m) = o.max {
            if report.max_stretch_exact.is_none_or(|cur| m > cur) {
                report.max_stretch_exact = Some(m);
            }
        }
        report.empirical_hopbound = match (report.empirical_hopbound, o.hopbound) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
    }
    report.max_stretch = if report.unbounded_pairs > 0 {
        Some("inf".into())
    } else {
        report.max_stretch_exact.as_ref().map(format_ratio)
    };
    report.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// Uniform ordered pairs `(s, v)`, `s ≠ v`, in the same component, grouped
/// by source. Drawing is with replacement.
fn sample_pairs(graph: &Graph, m: usize, seed: u64) -> BTreeMap<VertexId, Option<Vec<VertexId>>> {
    let n = graph.n();
    let comp = graph.components();
    let mut sizes: BTreeMap<VertexId, u64> = BTreeMap::new();
    for &c in &comp {
        *sizes.entry(c).or_default() += 1;
    }
    let mut out: BTreeMap<VertexId, Option<Vec<VertexId>>> = BTreeMap::new();
    if sizes.values().all(|&s| s < 2) {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drawn = 0;
    while drawn < m {
        let s = rng.gen_range(0..n) as VertexId;
        let v = rng.gen_range(0..n) as VertexId;
        if s == v || comp[s as usize] != comp[v as usize] {
            continue;
        }
        out.entry(s)
            .or_insert_with(|| Some(Vec::new()))
            .as_mut()
            .unwrap()
            .push(v);
        drawn += 1;
    }
    out
}
