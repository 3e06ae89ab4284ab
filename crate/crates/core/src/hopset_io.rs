//! Text format for hopsets.
//!
//! ```text
//! h 1 <n> <effective_beta> <eps_num>/<eps_den>
//! c params kappa=2 rho=1/2 eps=3/10 mode=reduced ...
//! c graph <sha256 hex>
//! e <u> <v> <w_num>/<w_den> <scale> <star|inter|node>
//! p <edge-index> <v1> <v2> ...
//! ```
//!
//! Vertices and edge indices are 1-based. Weights are written in lowest
//! terms, so a write/read/write cycle is byte-identical.

use std::io::{BufRead, Write};

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::hopset::{EdgeKind, Hopset, HopsetEdge, HopsetParams, Provenance};
use crate::weight::{format_ratio, parse_ratio, Weight};

pub const FORMAT_VERSION: u32 = 1;

pub fn write_hopset<W: Write>(hopset: &Hopset, mut out: W) -> Result<()> {
    writeln!(
        out,
        "h {FORMAT_VERSION} {} {} {}",
        hopset.n,
        hopset.effective_beta,
        format_ratio(&hopset.effective_eps)
    )?;
    if let Some(p) = &hopset.provenance {
        writeln!(out, "c params {}", p.params.to_header())?;
        writeln!(out, "c graph {}", p.graph_digest)?;
    }
    for e in &hopset.edges {
        writeln!(
            out,
            "e {} {} {} {} {}",
            e.u + 1,
            e.v + 1,
            format_ratio(&e.w.to_ratio(hopset.denom)),
            e.scale,
            e.kind
        )?;
    }
    for (i, e) in hopset.edges.iter().enumerate() {
        if let Some(p) = &e.witness {
            write!(out, "p {}", i + 1)?;
            for v in p {
                write!(out, " {}", v + 1)?;
            }
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn parse_u128_ratio(text: &str, line: usize) -> Result<Ratio<u128>> {
    let bad = || Error::Parse {
        line,
        msg: format!("bad weight `{text}`"),
    };
    let (a, b) = text.split_once('/').unwrap_or((text, "1"));
    let a: u128 = a.parse().map_err(|_| bad())?;
    let b: u128 = b.parse().map_err(|_| bad())?;
    if b == 0 || a == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(a, b))
}

pub fn read_hopset<R: BufRead>(reader: R) -> Result<Hopset> {
    let mut header: Option<(usize, u64, Ratio<u64>)> = None;
    let mut params: Option<HopsetParams> = None;
    let mut digest: Option<String> = None;
    let mut raw_edges: Vec<(u32, u32, Ratio<u128>, u32, EdgeKind)> = Vec::new();
    let mut witnesses: Vec<(usize, Vec<u32>, usize)> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let mut tok = line.split_whitespace();
        let Some(tag) = tok.next() else { continue };
        let perr = |msg: String| Error::Parse { line: lineno, msg };
        let num = |t: Option<&str>, what: &str| -> Result<u64> {
            t.ok_or_else(|| perr(format!("missing {what}")))?
                .parse::<u64>()
                .map_err(|_| perr(format!("bad {what}")))
        };
        match tag {
            "h" => {
                if header.is_some() {
                    return Err(perr("duplicate header".into()));
                }
                let version = num(tok.next(), "version")?;
                if version != FORMAT_VERSION as u64 {
                    return Err(perr(format!("unsupported format version {version}")));
                }
                let n = num(tok.next(), "vertex count")? as usize;
                let beta = num(tok.next(), "hopbound")?;
                let eps = parse_ratio(tok.next().ok_or_else(|| perr("missing eps".into()))?)
                    .map_err(|e| perr(e.to_string()))?;
                header = Some((n, beta, eps));
            }
            "c" => match tok.next() {
                Some("params") => {
                    let rest: Vec<&str> = tok.collect();
                    params = Some(
                        HopsetParams::from_header(&rest.join(" "))
                            .map_err(|e| perr(e.to_string()))?,
                    );
                }
                Some("graph") => digest = tok.next().map(str::to_string),
                _ => {}
            },
            "e" => {
                let (n, _, _) = header.ok_or_else(|| perr("edge before header".into()))?;
                let vertex = |t: Option<&str>| -> Result<u32> {
                    let v = num(t, "vertex")?;
                    if v == 0 || v > n as u64 {
                        return Err(Error::VertexOutOfRange {
                            line: lineno,
                            vertex: v,
                            n,
                        });
                    }
                    Ok(v as u32 - 1)
                };
                let u = vertex(tok.next())?;
                let v = vertex(tok.next())?;
                let w = parse_u128_ratio(
                    tok.next().ok_or_else(|| perr("missing weight".into()))?,
                    lineno,
                )?;
                let scale = num(tok.next(), "scale")? as u32;
                let kind: EdgeKind = tok
                    .next()
                    .ok_or_else(|| perr("missing kind".into()))?
                    .parse()
                    .map_err(|e: Error| perr(e.to_string()))?;
                raw_edges.push((u, v, w, scale, kind));
            }
            "p" => {
                let (n, _, _) = header.ok_or_else(|| perr("path before header".into()))?;
                let edge = num(tok.next(), "edge index")? as usize;
                let mut path = Vec::new();
                for t in tok {
                    let v: u64 = t.parse().map_err(|_| perr(format!("bad vertex `{t}`")))?;
                    if v == 0 || v > n as u64 {
                        return Err(Error::VertexOutOfRange {
                            line: lineno,
                            vertex: v,
                            n,
                        });
                    }
                    path.push(v as u32 - 1);
                }
                witnesses.push((edge, path, lineno));
            }
            other => return Err(perr(format!("unknown line type `{other}`"))),
        }
    }

    let (n, effective_beta, effective_eps) = header.ok_or_else(|| Error::Parse {
        line: 0,
        msg: "missing `h` header".into(),
    })?;
    let denom = raw_edges.iter().fold(1u128, |d, e| d.lcm(e.2.denom()));
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (u, v, w, scale, kind) in raw_edges {
        let num = w.numer().checked_mul(denom / w.denom()).ok_or_else(|| {
            Error::Overflow(format!(
                "weight {} on denominator {denom}",
                format_ratio(&w)
            ))
        })?;
        edges.push(HopsetEdge {
            u,
            v,
            w: Weight(num),
            scale,
            kind,
            witness: None,
        });
    }
    for (idx, path, lineno) in witnesses {
        let slot = idx
            .checked_sub(1)
            .and_then(|i| edges.get_mut(i))
            .ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("witness for unknown edge {idx}"),
            })?;
        slot.witness = Some(path);
    }
    let provenance = match (params, digest) {
        (Some(params), Some(graph_digest)) => Some(Provenance {
            params,
            graph_digest,
        }),
        _ => None,
    };
    Ok(Hopset {
        n,
        denom,
        edges,
        effective_beta,
        effective_eps,
        provenance,
        recording: None,
    })
}
