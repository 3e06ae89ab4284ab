//! Full hopsets: a union of single-scale hopsets over `G` itself (direct
//! mode) or over the contracted graphs `G_k` plus the star set (reduced
//! mode), with optional witness paths.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explore::{EdgeRef, WeightedGraph};
use crate::graph::{Graph, VertexId};
use crate::laminar::{
    build_laminar, materialize_scale_graph, relevant_scales, star_budget, LaminarFamily,
};
use crate::schedule::{compute_schedule, hop_bounds, phase_counts, DegreeMode};
use crate::single_scale::{build_single_scale, scale_rng, BuildOptions, PhaseStats, ScaleEdge};
use crate::weight::{floor_u64, format_ratio, parse_ratio, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// Supercluster edge from a sampled center to an absorbed center.
    Star,
    /// Interconnection edge between two unclustered centers.
    #[serde(rename = "inter")]
    Interconnect,
    /// Star-set edge from a laminar node's center to one of its members.
    Node,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::Star => "star",
            EdgeKind::Interconnect => "inter",
            EdgeKind::Node => "node",
        })
    }
}

impl FromStr for EdgeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "star" => Ok(EdgeKind::Star),
            "inter" => Ok(EdgeKind::Interconnect),
            "node" => Ok(EdgeKind::Node),
            other => Err(Error::InvalidParameter(format!(
                "unknown edge kind `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Direct,
    #[default]
    Reduced,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Direct => "direct",
            Mode::Reduced => "reduced",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Mode::Direct),
            "reduced" => Ok(Mode::Reduced),
            other => Err(Error::InvalidParameter(format!(
                "unknown mode `{other}` (expected direct or reduced)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HopsetParams {
    pub kappa: u32,
    #[serde(serialize_with = "ser_ratio")]
    pub rho: Ratio<u64>,
    /// Target stretch slack `ε` of the finished hopset.
    #[serde(serialize_with = "ser_ratio")]
    pub eps: Ratio<u64>,
    pub seed: u64,
    pub mode: Mode,
    pub degree_mode: DegreeMode,
    pub path_reporting: bool,
    /// Upper bound on any finite distance; direct mode only.
    pub lambda_hint: Option<u128>,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
}

impl Default for HopsetParams {
    fn default() -> Self {
        HopsetParams {
            kappa: 2,
            rho: Ratio::new(1, 2),
            eps: Ratio::new(3, 10),
            seed: 0,
            mode: Mode::Reduced,
            degree_mode: DegreeMode::Basic,
            path_reporting: false,
            lambda_hint: None,
        }
    }
}

impl HopsetParams {
    pub fn validate(&self) -> Result<()> {
        phase_counts(self.kappa, self.rho, self.degree_mode)?;
        let limit = match self.mode {
            Mode::Direct => Ratio::from_integer(1),
            Mode::Reduced => Ratio::new(1, 2),
        };
        let ok = !self.eps.is_zero()
            && match self.mode {
                Mode::Direct => self.eps <= limit,
                Mode::Reduced => self.eps < limit,
            };
        if !ok {
            let range = if self.mode == Mode::Direct {
                "(0, 1]"
            } else {
                "(0, 1/2)"
            };
            return Err(Error::InvalidParameter(format!(
                "eps must lie in {range} in {} mode, got {}",
                self.mode,
                format_ratio(&self.eps)
            )));
        }
        Ok(())
    }

    /// One-line `key=value` form used in provenance headers.
    pub fn to_header(&self) -> String {
        format!(
            "kappa={} rho={} eps={} mode={} degree={} paths={} lambda={} seed={}",
            self.kappa,
            format_ratio(&self.rho),
            format_ratio(&self.eps),
            self.mode,
            self.degree_mode,
            self.path_reporting,
            self.lambda_hint
                .map_or_else(|| "-".to_string(), |l| l.to_string()),
            self.seed
        )
    }

    pub fn from_header(text: &str) -> Result<Self> {
        let mut p = HopsetParams::default();
        for tok in text.split_whitespace() {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("malformed parameter `{tok}`")))?;
            let bad = |_| Error::InvalidParameter(format!("bad value for {key}: `{value}`"));
            match key {
                "kappa" => p.kappa = value.parse().map_err(bad)?,
                "rho" => p.rho = parse_ratio(value)?,
                "eps" => p.eps = parse_ratio(value)?,
                "mode" => p.mode = value.parse()?,
                "degree" => p.degree_mode = value.parse()?,
                "paths" => {
                    p.path_reporting = value
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("bad paths flag `{value}`")))?
                }
                "lambda" => {
                    p.lambda_hint = if value == "-" {
                        None
                    } else {
                        Some(value.parse().map_err(bad)?)
                    }
                }
                "seed" => p.seed = value.parse().map_err(bad)?,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown parameter `{key}`"
                    )))
                }
            }
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalePlan {
    pub k: u32,
    /// `2^{k+1} <= effective_beta`: every pair in this band is already served
    /// by a shortest path of at most `effective_beta` unit-or-heavier edges.
    pub trivial: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub mode: Mode,
    /// Slack each single-scale hopset is built for (`ε` or `ε/6`).
    pub eps_scale: Ratio<u64>,
    /// Internal slack fed to the phase schedule, `eps_scale / (32(ℓ+1))`.
    pub eps_int: Ratio<u64>,
    pub ell: usize,
    pub h: Vec<BigRational>,
    /// Single-scale hopbound `2h_ℓ+1`.
    pub beta: u64,
    pub effective_beta: u64,
    pub effective_eps: Ratio<u64>,
    /// Weight grid denominator: 1 in direct mode, `n·b` for `ε/6 = a/b`.
    pub denom: u128,
    pub scales: Vec<ScalePlan>,
}

impl Plan {
    pub fn nontrivial_scales(&self) -> impl Iterator<Item = u32> + '_ {
        self.scales.iter().filter(|s| !s.trivial).map(|s| s.k)
    }

    pub fn is_trivial(&self, k: u32) -> bool {
        !pow2_gt(k + 1, self.effective_beta as u128)
    }
}

fn pow2_gt(k: u32, x: u128) -> bool {
    k >= 128 || (1u128 << k) > x
}

/// Scalar part of the plan. Direct-mode scales are enumerated when
/// `lambda_hint` bounds the largest distance; reduced-mode scales depend on
/// the graph, see [`plan_for_graph`].
pub fn plan(params: &HopsetParams, n: usize, lambda_hint: Option<u128>) -> Result<Plan> {
    params.validate()?;
    let (_, _, ell) = phase_counts(params.kappa, params.rho, params.degree_mode)?;
    let eps_scale = match params.mode {
        Mode::Direct => params.eps,
        Mode::Reduced => params.eps / 6,
    };
    let eps_int = eps_scale / (32 * (ell as u64 + 1));
    let h = hop_bounds(eps_int, ell);
    let beta = floor_u64(
        &(BigRational::from_integer(BigInt::from(2)) * &h[ell]
            + BigRational::from_integer(1.into())),
    );
    let effective_beta = match params.mode {
        Mode::Direct => beta,
        Mode::Reduced => beta.saturating_mul(6).saturating_add(5),
    };
    let denom = match params.mode {
        Mode::Direct => 1,
        Mode::Reduced => n.max(1) as u128 * *eps_scale.denom() as u128,
    };
    let mut out = Plan {
        mode: params.mode,
        eps_scale,
        eps_int,
        ell,
        h,
        beta,
        effective_beta,
        effective_eps: params.eps,
        denom,
        scales: Vec::new(),
    };
    if let (Mode::Direct, Some(u)) = (params.mode, lambda_hint) {
        out.scales = direct_scales(u, effective_beta);
    }
    Ok(out)
}

/// Scales `k >= 0` with `2^k < upper`.
fn direct_scales(upper: u128, effective_beta: u64) -> Vec<ScalePlan> {
    (0u32..128)
        .take_while(|&k| (1u128 << k) < upper)
        .map(|k| ScalePlan {
            k,
            trivial: !pow2_gt(k + 1, effective_beta as u128),
        })
        .collect()
}

pub fn plan_for_graph(params: &HopsetParams, graph: &Graph) -> Result<Plan> {
    let mut p = plan(params, graph.n(), None)?;
    p.scales = match params.mode {
        Mode::Direct => direct_scales(
            params
                .lambda_hint
                .unwrap_or_else(|| graph.distance_upper_bound()),
            p.effective_beta,
        ),
        Mode::Reduced => relevant_scales(graph)
            .into_iter()
            .map(|k| ScalePlan {
                k,
                trivial: p.is_trivial(k),
            })
            .collect(),
    };
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopsetEdge {
    pub u: VertexId,
    pub v: VertexId,
    /// Numerator over [`Hopset::denom`].
    pub w: Weight,
    pub scale: u32,
    pub kind: EdgeKind,
    /// Vertex sequence of a `G`-path from `u` to `v`.
    pub witness: Option<Vec<VertexId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub params: HopsetParams,
    pub graph_digest: String,
}

/// Raw material for a witness: start at `start`, take the listed `G`-edges
/// in order, end at `end`; gaps are bridged inside laminar nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawWitness {
    pub start: VertexId,
    pub hops: Vec<(VertexId, VertexId)>,
    pub end: VertexId,
}

impl RawWitness {
    fn reversed(self) -> RawWitness {
        RawWitness {
            start: self.end,
            hops: self.hops.into_iter().rev().map(|(x, y)| (y, x)).collect(),
            end: self.start,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hopset {
    pub n: usize,
    /// Common denominator of every edge weight.
    pub denom: u128,
    pub edges: Vec<HopsetEdge>,
    pub effective_beta: u64,
    pub effective_eps: Ratio<u64>,
    pub provenance: Option<Provenance>,
    pub recording: Option<Vec<RawWitness>>,
}

impl Hopset {
    pub fn empty(n: usize, effective_beta: u64, effective_eps: Ratio<u64>) -> Hopset {
        Hopset {
            n,
            denom: 1,
            edges: Vec::new(),
            effective_beta,
            effective_eps,
            provenance: None,
            recording: None,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Every edge carries a witness.
    pub fn is_path_reporting(&self) -> bool {
        self.edges.iter().all(|e| e.witness.is_some())
    }

    /// Edges as `(u, v, w)` triples on the hopset grid.
    pub fn extra_edges(&self) -> Vec<(VertexId, VertexId, Weight)> {
        self.edges.iter().map(|e| (e.u, e.v, e.w)).collect()
    }

    /// `G ∪ H` on the hopset grid; `EdgeRef::Extra(j)` is `self.edges[j]`.
    pub fn union_graph(&self, graph: &Graph) -> WeightedGraph {
        WeightedGraph::union(graph, self.denom, &self.extra_edges())
    }

    pub fn per_scale_counts(&self) -> BTreeMap<u32, usize> {
        let mut out = BTreeMap::new();
        for e in &self.edges {
            *out.entry(e.scale).or_default() += 1;
        }
        out
    }

    pub fn count_kind(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ScaleReport {
    pub k: u32,
    pub trivial: bool,
    /// Vertices (direct) or active nodes (reduced) the scale was built on.
    pub nodes: usize,
    pub graph_edges: usize,
    pub edges: usize,
    pub beta: u64,
    pub phases: Vec<PhaseStats>,
    pub build_ms: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BuildReport {
    pub mode: Option<Mode>,
    pub ell: usize,
    pub beta: u64,
    pub effective_beta: u64,
    pub eps_int: String,
    pub denom: String,
    pub scales: Vec<ScaleReport>,
    pub s_edges: usize,
    pub s_bound: f64,
    pub total_edges: usize,
    pub build_ms: f64,
}

struct ScaleOutput {
    report: ScaleReport,
    edges: Vec<(HopsetEdge, Option<RawWitness>)>,
}

/// Builds a hopset for `graph`. Deterministic for a fixed seed: every
/// scale draws from its own stream of the seeded generator.
pub fn build_hopset(graph: &Graph, params: &HopsetParams) -> Result<Hopset> {
    build_hopset_with_report(graph, params).map(|(h, _)| h)
}

pub fn build_hopset_with_report(
    graph: &Graph,
    params: &HopsetParams,
) -> Result<(Hopset, BuildReport)> {
    let started = Instant::now();
    let plan = plan_for_graph(params, graph)?;
    let n = graph.n();
    let record = params.path_reporting;
    let options = BuildOptions {
        record_paths: record,
        keep_partitions: false,
    };

    let laminar = match params.mode {
        Mode::Reduced => Some(build_laminar(graph, plan.eps_scale)),
        Mode::Direct => None,
    };
    let base = match params.mode {
        Mode::Direct => Some(WeightedGraph::from_graph(graph, 1)),
        Mode::Reduced => None,
    };

    let outputs: Vec<Result<ScaleOutput>> = plan
        .scales
        .par_iter()
        .map(|sp| {
            if sp.trivial {
                return Ok(ScaleOutput {
                    report: ScaleReport {
                        k: sp.k,
                        trivial: true,
                        ..Default::default()
                    },
                    edges: Vec::new(),
                });
            }
            match (&base, &laminar) {
                (Some(g), _) => direct_scale(graph, g, &plan, params, sp.k, options),
                (None, Some(lam)) => reduced_scale(graph, lam, &plan, params, sp.k, options),
                _ => unreachable!(),
            }
        })
        .collect();

    let mut report = BuildReport {
        mode: Some(params.mode),
        ell: plan.ell,
        beta: plan.beta,
        effective_beta: plan.effective_beta,
        eps_int: format_ratio(&plan.eps_int),
        denom: plan.denom.to_string(),
        s_bound: star_budget(n),
        ..Default::default()
    };
    let mut collected: Vec<(HopsetEdge, Option<RawWitness>)> = Vec::new();
    for out in outputs {
        let out = out?;
        report.scales.push(out.report);
        collected.extend(out.edges);
    }
    if let Some(lam) = &laminar {
        for s in lam.star_edges() {
            let raw = record.then_some(RawWitness {
                start: s.center,
                hops: Vec::new(),
                end: s.member,
            });
            collected.push((
                HopsetEdge {
                    u: s.center,
                    v: s.member,
                    w: s.w,
                    scale: s.scale,
                    kind: EdgeKind::Node,
                    witness: None,
                },
                raw,
            ));
            report.s_edges += 1;
        }
    }
    for (e, raw) in &mut collected {
        if e.u > e.v {
            std::mem::swap(&mut e.u, &mut e.v);
            if let Some(r) = raw.take() {
                *raw = Some(r.reversed());
            }
        }
    }
    collected.sort_by(|a, b| {
        let ka = (a.0.scale, a.0.u, a.0.v, a.0.kind, a.0.w);
        let kb = (b.0.scale, b.0.u, b.0.v, b.0.kind, b.0.w);
        ka.cmp(&kb)
    });
    let (edges, raws): (Vec<_>, Vec<_>) = collected.into_iter().unzip();
    let mut hopset = Hopset {
        n,
        denom: plan.denom,
        edges,
        effective_beta: plan.effective_beta,
        effective_eps: plan.effective_eps,
        provenance: Some(Provenance {
            params: params.clone(),
            graph_digest: graph.digest(),
        }),
        recording: if record {
            Some(raws.into_iter().map(|r| r.expect("recorded")).collect())
        } else {
            None
        },
    };
    if record {
        attach_witness_paths(graph, laminar.as_ref(), &mut hopset)?;
    }
    report.total_edges = hopset.len();
    report.build_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok((hopset, report))
}

fn rhat(k: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(1u8) << (k as usize + 1))
}

fn direct_scale(
    graph: &Graph,
    g: &WeightedGraph,
    plan: &Plan,
    params: &HopsetParams,
    k: u32,
    options: BuildOptions,
) -> Result<ScaleOutput> {
    let started = Instant::now();
    let schedule = compute_schedule(
        graph.n(),
        params.kappa,
        params.rho,
        plan.eps_int,
        rhat(k),
        params.degree_mode,
    )?;
    let mut rng = scale_rng(params.seed, k);
    let built = build_single_scale(g, &schedule, 1, k, &mut rng, options);
    let edges = built
        .edges
        .into_iter()
        .map(|e| {
            let raw = options.record_paths.then(|| direct_witness(graph, &e));
            (
                HopsetEdge {
                    u: e.u,
                    v: e.v,
                    w: e.w,
                    scale: k,
                    kind: e.kind,
                    witness: None,
                },
                raw,
            )
        })
        .collect::<Vec<_>>();
    Ok(ScaleOutput {
        report: ScaleReport {
            k,
            trivial: false,
            nodes: graph.n(),
            graph_edges: graph.m(),
            edges: edges.len(),
            beta: schedule.beta,
            phases: built.phases,
            build_ms: started.elapsed().as_secs_f64() * 1e3,
        },
        edges,
    })
}

fn direct_witness(graph: &Graph, e: &ScaleEdge) -> RawWitness {
    let mut cur = e.u;
    let mut hops = Vec::with_capacity(e.path.len());
    for r in &e.path {
        if let EdgeRef::Base(id) = r {
            let next = graph.edge(*id).other(cur);
            hops.push((cur, next));
            cur = next;
        }
    }
    RawWitness {
        start: e.u,
        hops,
        end: e.v,
    }
}

fn reduced_scale(
    graph: &Graph,
    lam: &LaminarFamily,
    plan: &Plan,
    params: &HopsetParams,
    k: u32,
    options: BuildOptions,
) -> Result<ScaleOutput> {
    let started = Instant::now();
    let sg = materialize_scale_graph(graph, lam, k);
    let (active, back) = sg.active_graph();
    let mut report = ScaleReport {
        k,
        nodes: active.n(),
        graph_edges: sg.edges.len(),
        ..Default::default()
    };
    if active.n() < 2 {
        return Ok(ScaleOutput {
            report,
            edges: Vec::new(),
        });
    }
    let schedule = compute_schedule(
        active.n(),
        params.kappa,
        params.rho,
        plan.eps_int,
        rhat(k),
        params.degree_mode,
    )?;
    let mut rng = scale_rng(params.seed, k);
    let built = build_single_scale(&active, &schedule, plan.denom, k, &mut rng, options);
    let center = |c: VertexId| sg.nodes[back[c as usize] as usize].center;
    let edges: Vec<_> = built
        .edges
        .into_iter()
        .map(|e| {
            let raw = options.record_paths.then(|| {
                let mut node = back[e.u as usize];
                let mut hops = Vec::with_capacity(e.path.len());
                for r in &e.path {
                    if let EdgeRef::Base(j) = r {
                        let ge = &sg.edges[*j as usize];
                        let next = if ge.a == node { ge.b } else { ge.a };
                        let rep = graph.edge(ge.rep);
                        let (x, y) = if sg.node_of[rep.u as usize] == node {
                            (rep.u, rep.v)
                        } else {
                            (rep.v, rep.u)
                        };
                        hops.push((x, y));
                        node = next;
                    }
                }
                RawWitness {
                    start: center(e.u),
                    hops,
                    end: center(e.v),
                }
            });
            (
                HopsetEdge {
                    u: center(e.u),
                    v: center(e.v),
                    w: e.w,
                    scale: k,
                    kind: e.kind,
                    witness: None,
                },
                raw,
            )
        })
        .collect();
    report.edges = edges.len();
    report.beta = schedule.beta;
    report.phases = built.phases;
    report.build_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(ScaleOutput { report, edges })
}

/// The single-scale hopset `H_k` built on `G` alone, for the band
/// `(2^k, 2^{k+1}]`. Its declared contract is `(2h_ℓ+1, ζ)` with
/// `ζ = 32(ℓ+1)·ε_int`, which equals `params.eps`.
pub fn build_scale_hopset(
    graph: &Graph,
    params: &HopsetParams,
    k: u32,
) -> Result<(Hopset, ScaleReport)> {
    let direct = HopsetParams {
        mode: Mode::Direct,
        ..params.clone()
    };
    let plan = plan(&direct, graph.n(), None)?;
    let g = WeightedGraph::from_graph(graph, 1);
    let options = BuildOptions {
        record_paths: params.path_reporting,
        keep_partitions: false,
    };
    let out = direct_scale(graph, &g, &plan, &direct, k, options)?;
    let mut edges: Vec<_> = out.edges;
    for (e, raw) in &mut edges {
        if e.u > e.v {
            std::mem::swap(&mut e.u, &mut e.v);
            *raw = raw.take().map(RawWitness::reversed);
        }
    }
    edges.sort_by_key(|e| (e.0.u, e.0.v, e.0.kind, e.0.w));
    let (edges, raws): (Vec<_>, Vec<_>) = edges.into_iter().unzip();
    let mut hopset = Hopset {
        n: graph.n(),
        denom: 1,
        edges,
        effective_beta: plan.beta,
        effective_eps: plan.eps_scale,
        provenance: None,
        recording: params
            .path_reporting
            .then(|| raws.into_iter().map(|r| r.expect("recorded")).collect()),
    };
    if params.path_reporting {
        attach_witness_paths(graph, None, &mut hopset)?;
    }
    Ok((hopset, out.report))
}

/// Rebuilds a hopset from its recorded provenance.
pub fn rebuild(graph: &Graph, hopset: &Hopset) -> Result<Hopset> {
    let p = hopset
        .provenance
        .as_ref()
        .ok_or_else(|| Error::Mismatch("hopset carries no provenance".into()))?;
    if p.graph_digest != graph.digest() {
        return Err(Error::Mismatch(
            "graph digest differs from the recorded one".into(),
        ));
    }
    build_hopset(graph, &p.params)
}

/// Expands recorded witnesses into `G`-paths. Gaps between consecutive
/// recorded edges are bridged by spanning-tree paths inside laminar nodes.
pub fn attach_witness_paths(
    graph: &Graph,
    laminar: Option<&LaminarFamily>,
    hopset: &mut Hopset,
) -> Result<()> {
    let raws = hopset.recording.as_ref().ok_or(Error::MissingRecording)?;
    if raws.len() != hopset.edges.len() {
        return Err(Error::Mismatch(format!(
            "{} recorded witnesses for {} edges",
            raws.len(),
            hopset.edges.len()
        )));
    }
    let paths: Vec<Vec<VertexId>> = raws
        .par_iter()
        .map(|r| expand_witness(graph, laminar, r))
        .collect::<Result<_>>()?;
    for (e, p) in hopset.edges.iter_mut().zip(paths) {
        e.witness = Some(p);
    }
    Ok(())
}

fn expand_witness(
    graph: &Graph,
    laminar: Option<&LaminarFamily>,
    raw: &RawWitness,
) -> Result<Vec<VertexId>> {
    let mut out = vec![raw.start];
    let bridge = |out: &mut Vec<VertexId>, to: VertexId| -> Result<()> {
        let from = *out.last().expect("non-empty");
        if from == to {
            return Ok(());
        }
        if graph.edge_between(from, to).is_some() && laminar.is_none() {
            out.push(to);
            return Ok(());
        }
        let lam = laminar.ok_or_else(|| {
            Error::Mismatch(format!(
                "witness gap {from} -> {to} without a laminar family"
            ))
        })?;
        let p = lam
            .forest_path(from, to)
            .ok_or_else(|| Error::Mismatch(format!("no node path between {from} and {to}")))?;
        out.extend_from_slice(&p[1..]);
        Ok(())
    };
    for &(x, y) in &raw.hops {
        bridge(&mut out, x)?;
        out.push(y);
    }
    bridge(&mut out, raw.end)?;
    Ok(out)
}

/// A defect found while checking witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessIssue {
    Missing {
        edge: usize,
    },
    Endpoints {
        edge: usize,
    },
    NotAnEdge {
        edge: usize,
        at: VertexId,
        next: VertexId,
    },
    TooHeavy {
        edge: usize,
        witness: String,
        weight: String,
    },
}

/// Total `G`-weight of a vertex sequence, or the first non-adjacent step.
pub fn path_weight(
    graph: &Graph,
    path: &[VertexId],
) -> std::result::Result<u128, (VertexId, VertexId)> {
    let mut total = 0u128;
    for w in path.windows(2) {
        match graph.edge_between(w[0], w[1]) {
            Some(e) => total += e.w as u128,
            None => return Err((w[0], w[1])),
        }
    }
    Ok(total)
}

/// Checks every witness for continuity, endpoints and `weight <= w`.
pub fn validate_witnesses(graph: &Graph, hopset: &Hopset) -> Vec<WitnessIssue> {
    let mut issues = Vec::new();
    for (i, e) in hopset.edges.iter().enumerate() {
        let Some(p) = &e.witness else {
            issues.push(WitnessIssue::Missing { edge: i });
            continue;
        };
        if p.first() != Some(&e.u) || p.last() != Some(&e.v) {
            issues.push(WitnessIssue::Endpoints { edge: i });
            continue;
        }
        match path_weight(graph, p) {
            Err((at, next)) => issues.push(WitnessIssue::NotAnEdge { edge: i, at, next }),
            Ok(total) => {
                let scaled = total.checked_mul(hopset.denom);
                if scaled.is_none_or(|s| s > e.w.0) {
                    issues.push(WitnessIssue::TooHeavy {
                        edge: i,
                        witness: total.to_string(),
                        weight: format_ratio(&e.w.to_ratio(hopset.denom)),
                    });
                }
            }
        }
    }
    issues
}

/// Edge indices whose weight undercuts the true distance `d_G(u, v)`.
pub fn lower_bound_violations(graph: &Graph, hopset: &Hopset) -> Vec<usize> {
    let g = WeightedGraph::from_graph(graph, hopset.denom);
    let mut by_source: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    for (i, e) in hopset.edges.iter().enumerate() {
        by_source.entry(e.u).or_default().push(i);
    }
    let groups: Vec<_> = by_source.into_iter().collect();
    let mut out: Vec<usize> = groups
        .par_iter()
        .flat_map_iter(|(s, ids)| {
            let d = crate::explore::dijkstra(&g, *s);
            ids.iter()
                .copied()
                .filter(|&i| hopset.edges[i].w < d[hopset.edges[i].v as usize])
                .collect::<Vec<_>>()
        })
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_plan_reference() {
        let p = HopsetParams {
            mode: Mode::Direct,
            eps: Ratio::new(96, 100),
            ..Default::default()
        };
        let plan = plan(&p, 100, Some(1 << 15)).unwrap();
        assert_eq!(plan.ell, 2);
        assert_eq!(plan.eps_int, Ratio::new(1, 100));
        let h: Vec<_> = plan.h.iter().map(|x| x.to_integer()).collect();
        assert_eq!(h, vec![1.into(), 209.into(), 21427.into()]);
        assert_eq!(plan.beta, 42855);
        assert_eq!(plan.effective_beta, 42855);
        assert_eq!(plan.effective_eps, Ratio::new(24, 25));
        assert!(plan.scales.iter().all(|s| s.trivial));
    }

    #[test]
    fn reduced_plan_multiplies_hopbound() {
        let p = HopsetParams {
            eps: Ratio::new(3, 10),
            ..Default::default()
        };
        let plan = plan(&p, 50, None).unwrap();
        assert_eq!(plan.eps_scale, Ratio::new(1, 20));
        assert_eq!(plan.eps_int, Ratio::new(1, 1920));
        assert_eq!(plan.effective_beta, 6 * plan.beta + 5);
        assert_eq!(plan.denom, 50 * 20);
    }

    #[test]
    fn parameter_rejections() {
        let bad_rho = HopsetParams {
            rho: Ratio::new(1, 4),
            ..Default::default()
        };
        assert!(matches!(
            plan(&bad_rho, 10, None),
            Err(Error::InvalidParameter(_))
        ));
        let bad_eps = HopsetParams {
            eps: Ratio::new(1, 2),
            ..Default::default()
        };
        assert!(plan(&bad_eps, 10, None).is_err());
        let direct_one = HopsetParams {
            eps: Ratio::new(1, 1),
            mode: Mode::Direct,
            ..Default::default()
        };
        assert!(plan(&direct_one, 10, None).is_ok());
    }

    #[test]
    fn trivial_scales_follow_effective_beta() {
        let p = HopsetParams {
            mode: Mode::Direct,
            eps: Ratio::new(1, 1),
            ..Default::default()
        };
        let plan = plan(&p, 8, Some(1u128 << 40)).unwrap();
        for s in &plan.scales {
            assert_eq!(
                s.trivial,
                (1u128 << (s.k + 1)) <= plan.effective_beta as u128
            );
        }
        assert!(plan.scales.iter().any(|s| !s.trivial));
    }

    #[test]
    fn params_header_round_trip() {
        let p = HopsetParams {
            seed: 99,
            lambda_hint: Some(1234),
            path_reporting: true,
            ..Default::default()
        };
        assert_eq!(HopsetParams::from_header(&p.to_header()).unwrap(), p);
    }

    #[test]
    fn two_vertex_graph_gets_star_only() {
        let g = Graph::from_edges(2, [(0, 1, 1)]).unwrap();
        let p = HopsetParams {
            path_reporting: true,
            ..Default::default()
        };
        let h = build_hopset(&g, &p).unwrap();
        assert!(h.edges.iter().all(|e| e.kind == EdgeKind::Node));
        assert!(validate_witnesses(&g, &h).is_empty());
        assert!(lower_bound_violations(&g, &h).is_empty());
    }

    #[test]
    fn missing_recording_is_an_error() {
        let g = Graph::from_edges(2, [(0, 1, 1)]).unwrap();
        let mut h = build_hopset(&g, &HopsetParams::default()).unwrap();
        assert!(matches!(
            attach_witness_paths(&g, None, &mut h),
            Err(Error::MissingRecording)
        ));
    }

    #[test]
    fn direct_mode_with_heavy_weights_builds_exact_witnesses() {
        let edges: Vec<_> = (0..15u32).map(|i| (i, i + 1, 1u64 << 40)).collect();
        let g = Graph::from_edges(16, edges).unwrap();
        let p = HopsetParams {
            mode: Mode::Direct,
            eps: Ratio::new(1, 1),
            path_reporting: true,
            seed: 3,
            ..Default::default()
        };
        let h = build_hopset(&g, &p).unwrap();
        assert!(!h.is_empty());
        assert!(validate_witnesses(&g, &h).is_empty());
        for e in &h.edges {
            let wt = path_weight(&g, e.witness.as_ref().unwrap()).unwrap();
            assert_eq!(Weight(wt), e.w);
        }
        assert!(lower_bound_violations(&g, &h).is_empty());
    }

    #[test]
    fn sorted_and_deterministic() {
        let edges: Vec<_> = (0..20u32)
            .map(|i| (i, (i * 7 + 3) % 21, 1 + (i as u64 * 7919) % 5000))
            .collect();
        let g = Graph::from_edges(21, edges).unwrap();
        let p = HopsetParams {
            seed: 5,
            ..Default::default()
        };
        let a = build_hopset(&g, &p).unwrap();
        let b = build_hopset(&g, &p).unwrap();
        assert_eq!(a, b);
        let keys: Vec<_> = a
            .edges
            .iter()
            .map(|e| (e.scale, e.u, e.v, e.kind))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(a.edges.iter().all(|e| e.u < e.v));
    }
}
