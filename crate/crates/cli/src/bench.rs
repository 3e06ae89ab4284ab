//! Parameter sweeps driven by a TOML file.
//!
//! ```toml
//! [graph]
//! model = "er"        # er | path | grid
//! avg_degree = 8.0    # er: p = avg_degree / n (or give `p`)
//! wmin = 1
//! wmax = 4294967296
//!
//! [grid]
//! n = [128, 256]
//! kappa = [2]
//! rho = ["1/2"]
//! eps = ["0.3"]
//! mode = ["reduced"]
//! seeds = [1, 2, 3]
//!
//! [verify]
//! pairs = "sample:2000:1"   # or "all", or "none"
//! ```

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use hopset_core::{
    build_hopset_with_report, generate_graph, parse_ratio, verify_stretch, GraphModel,
    HopsetParams, PairMode,
};
use serde::Deserialize;

use crate::{Failure, EXIT_IO, EXIT_PARAM};

pub const COLUMNS: &str =
    "n,m,kappa,rho,eps,mode,seed,ell,beta,hopset_edges,s_edges,build_ms,verify_max_stretch";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    graph: GraphSection,
    grid: Grid,
    #[serde(default)]
    verify: VerifySection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSection {
    model: String,
    avg_degree: Option<f64>,
    p: Option<f64>,
    #[serde(default = "one")]
    wmin: u64,
    #[serde(default = "one")]
    wmax: u64,
    base: Option<String>,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Grid {
    n: Vec<usize>,
    kappa: Vec<u32>,
    rho: Vec<String>,
    eps: Vec<String>,
    #[serde(default = "default_modes")]
    mode: Vec<String>,
    seeds: Vec<u64>,
}

fn default_modes() -> Vec<String> {
    vec!["reduced".into()]
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifySection {
    pairs: Option<String>,
}

fn model_for(g: &GraphSection, n: usize) -> Result<GraphModel, Failure> {
    Ok(match g.model.as_str() {
        "er" => {
            let p = match (g.p, g.avg_degree) {
                (Some(p), _) => p,
                (None, Some(d)) => (d / n as f64).min(1.0),
                (None, None) => {
                    return Err(Failure::new(EXIT_PARAM, "er needs `p` or `avg_degree`"))
                }
            };
            GraphModel::Er {
                n,
                p,
                wmin: g.wmin,
                wmax: g.wmax,
            }
        }
        "path" => GraphModel::Path {
            n,
            base: parse_ratio(g.base.as_deref().unwrap_or("1"))?,
        },
        "grid" => {
            let side = (n as f64).sqrt().round().max(1.0) as usize;
            GraphModel::Grid {
                rows: side,
                cols: n.div_ceil(side),
                wmin: g.wmin,
                wmax: g.wmax,
            }
        }
        other => return Err(Failure::new(EXIT_PARAM, format!("unknown model `{other}`"))),
    })
}

pub fn run(config: &Path, mut out: Box<dyn Write>) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", config.display())))?;
    let cfg: Config = toml::from_str(&text)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", config.display())))?;
    let pairs: Option<PairMode> = match cfg.verify.pairs.as_deref() {
        None | Some("none") => None,
        Some(p) => Some(p.parse()?),
    };
    let w = |out: &mut Box<dyn Write>, line: String| {
        writeln!(out, "{line}").map_err(|e| Failure::new(EXIT_IO, format!("write failed: {e}")))
    };
    w(&mut out, format!("# config {}", config.display()))?;
    w(&mut out, COLUMNS.to_string())?;
    let mut violated = false;
    for &n in &cfg.grid.n {
        for &seed in &cfg.grid.seeds {
            let model = model_for(&cfg.graph, n)?;
            let g = generate_graph(&model, seed)?;
            for &kappa in &cfg.grid.kappa {
                for rho in &cfg.grid.rho {
                    for eps in &cfg.grid.eps {
                        for mode in &cfg.grid.mode {
                            let params = HopsetParams {
                                kappa,
                                rho: parse_ratio(rho)?,
                                eps: parse_ratio(eps)?,
                                seed,
                                mode: mode.parse()?,
                                ..Default::default()
                            };
                            let started = Instant::now();
                            let (h, report) = build_hopset_with_report(&g, &params)?;
                            let build_ms = started.elapsed().as_secs_f64() * 1e3;
                            let stretch = match pairs {
                                Some(pm) => {
                                    let r = verify_stretch(&g, &h, pm)?;
                                    violated |= !r.passed();
                                    r.max_stretch_f64().map_or("".into(), |s| format!("{s:.6}"))
                                }
                                None => String::new(),
                            };
                            w(
                                &mut out,
                                format!(
                                    "{n},{},{kappa},{rho},{eps},{mode},{seed},{},{},{},{},{build_ms:.3},{stretch}",
                                    g.m(),
                                    report.ell,
                                    report.beta,
                                    h.len(),
                                    report.s_edges
                                ),
                            )?;
                        }
                    }
                }
            }
        }
    }
    out.flush()
        .map_err(|e| Failure::new(EXIT_IO, format!("write failed: {e}")))?;
    Ok(if violated { crate::EXIT_VIOLATION } else { 0 })
}
