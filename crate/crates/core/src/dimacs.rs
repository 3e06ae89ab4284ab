//! DIMACS shortest-path `.gr` reader and writer.
//!
//! Vertices are 1-based on disk and 0-based in memory. Arc pairs `(u,v)` and
//! `(v,u)` become one undirected edge carrying the smaller weight.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub fn load_graph<R: BufRead>(reader: R) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut arcs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let mut tok = line.split_whitespace();
        let Some(tag) = tok.next() else { continue };
        match tag {
            "c" => {}
            "p" => {
                if n.is_some() {
                    return Err(parse_err(lineno, "duplicate problem line"));
                }
                if tok.next() != Some("sp") {
                    return Err(parse_err(lineno, "expected `p sp <n> <m>`"));
                }
                let nv: usize = field(&mut tok, lineno, "vertex count")?;
                let _m: usize = field(&mut tok, lineno, "arc count")?;
                n = Some(nv);
            }
            "a" => {
                let nv = n.ok_or_else(|| parse_err(lineno, "arc before problem line"))?;
                let u: u64 = field(&mut tok, lineno, "tail")?;
                let v: u64 = field(&mut tok, lineno, "head")?;
                let w: i128 = field(&mut tok, lineno, "weight")?;
                for x in [u, v] {
                    if x == 0 || x > nv as u64 {
                        return Err(Error::VertexOutOfRange {
                            line: lineno,
                            vertex: x,
                            n: nv,
                        });
                    }
                }
                if w < 1 {
                    return Err(Error::NonPositiveWeight {
                        line: lineno,
                        weight: w,
                    });
                }
                let w =
                    u64::try_from(w).map_err(|_| parse_err(lineno, "weight exceeds 64 bits"))?;
                arcs.push(((u - 1) as u32, (v - 1) as u32, w));
            }
            other => return Err(parse_err(lineno, &format!("unknown line tag {other:?}"))),
        }
    }
    let n = n.ok_or_else(|| parse_err(0, "missing problem line"))?;
    Graph::from_edges(n, arcs)
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse {
        line,
        msg: msg.to_string(),
    }
}

fn field<'a, T: std::str::FromStr>(
    tok: &mut impl Iterator<Item = &'a str>,
    line: usize,
    what: &str,
) -> Result<T> {
    tok.next()
        .ok_or_else(|| parse_err(line, &format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line, &format!("malformed {what}")))
}

/// Writes `graph` with one `a` line per undirected edge (`u < v`), preceded
/// by `c` lines carrying `comments`.
pub fn write_graph<W: Write>(graph: &Graph, comments: &[String], mut out: W) -> Result<()> {
    for c in comments {
        writeln!(out, "c {c}")?;
    }
    writeln!(out, "p sp {} {}", graph.n(), graph.m())?;
    for e in graph.edges() {
        writeln!(out, "a {} {} {}", e.u + 1, e.v + 1, e.w)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<Graph> {
        load_graph(text.as_bytes())
    }

    #[test]
    fn single_edge_file() {
        let g = load("p sp 2 1\na 1 2 5\n").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.edge(0).w, 5);
    }

    #[test]
    fn opposite_arcs_merge_to_minimum() {
        let g = load("c test\np sp 2 2\na 1 2 3\na 2 1 7\n").unwrap();
        assert_eq!(g.m(), 1);
        assert_eq!(g.edge(0).w, 3);
    }

    #[test]
    fn zero_weight_is_rejected_with_line() {
        match load("p sp 2 1\na 1 2 0\n") {
            Err(Error::NonPositiveWeight { line, weight }) => {
                assert_eq!(line, 2);
                assert_eq!(weight, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_vertex() {
        assert!(matches!(
            load("p sp 2 1\na 1 3 4\n"),
            Err(Error::VertexOutOfRange {
                line: 2,
                vertex: 3,
                n: 2
            })
        ));
        assert!(matches!(
            load("p sp 2 1\na 0 1 4\n"),
            Err(Error::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        assert!(matches!(
            load("p sp 2 1\na 1 x 4\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load("a 1 2 4\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(load("q\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load("c only\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn write_then_load() {
        let g = Graph::from_edges(4, [(0, 1, 2), (3, 1, 9), (2, 3, 1)]).unwrap();
        let mut buf = Vec::new();
        write_graph(&g, &["seed=1".to_string()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("c seed=1\np sp 4 3\n"));
        assert!(text.contains("a 2 4 9\n"));
        assert_eq!(load_graph(&buf[..]).unwrap(), g);
    }
}
