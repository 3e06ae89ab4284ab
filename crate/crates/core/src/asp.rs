//! `S × V` approximate shortest paths through a hopset.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::explore::{hop_limited_row, EdgeRef, HopRow};
use crate::graph::{Graph, VertexId};
use crate::hopset::Hopset;
use crate::weight::Weight;

/// Hop-limited estimates from each source over `G ∪ H`, on the hopset's
/// weight grid.
#[derive(Clone, Debug)]
pub struct AspResult {
    pub sources: Vec<VertexId>,
    pub denom: u128,
    pub rows: Vec<HopRow>,
}

impl AspResult {
    pub fn row(&self, s: VertexId) -> Option<&HopRow> {
        self.sources
            .iter()
            .position(|&x| x == s)
            .map(|i| &self.rows[i])
    }

    pub fn estimate(&self, s: VertexId, v: VertexId) -> Option<Weight> {
        self.row(s).map(|r| r.dist[v as usize])
    }
}

fn check_inputs(graph: &Graph, hopset: &Hopset, sources: &[VertexId]) -> Result<()> {
    if hopset.n != graph.n() {
        return Err(Error::Mismatch(format!(
            "hopset has {} vertices, graph has {}",
            hopset.n,
            graph.n()
        )));
    }
    if let Some(&s) = sources.iter().find(|&&s| s as usize >= graph.n()) {
        return Err(Error::InvalidParameter(format!(
            "source {} outside [1, {}]",
            s as u64 + 1,
            graph.n()
        )));
    }
    Ok(())
}

/// Runs `effective_beta`-limited Bellman-Ford from every source.
pub fn asp_estimates(graph: &Graph, hopset: &Hopset, sources: &[VertexId]) -> Result<AspResult> {
    check_inputs(graph, hopset, sources)?;
    let union = hopset.union_graph(graph);
    let rows = sources
        .par_iter()
        .map(|&s| hop_limited_row(&union, s, hopset.effective_beta))
        .collect();
    Ok(AspResult {
        sources: sources.to_vec(),
        denom: hopset.denom,
        rows,
    })
}

/// Streams one row per source without keeping the whole table.
pub fn asp_for_each<F>(graph: &Graph, hopset: &Hopset, sources: &[VertexId], mut f: F) -> Result<()>
where
    F: FnMut(&HopRow) -> Result<()>,
{
    check_inputs(graph, hopset, sources)?;
    let union = hopset.union_graph(graph);
    for &s in sources {
        f(&hop_limited_row(&union, s, hopset.effective_beta))?;
    }
    Ok(())
}

/// Expands the predecessor chain of `v` in `row` into a `G`-path.
///
/// Returns the vertex sequence and its weight on the hopset grid. The path
/// may use more than `effective_beta` edges once hopset edges are replaced
/// by their witnesses.
pub fn extract_path_from_row(
    graph: &Graph,
    hopset: &Hopset,
    row: &HopRow,
    v: VertexId,
) -> Result<(Vec<VertexId>, Weight)> {
    if !hopset.is_path_reporting() {
        return Err(Error::NotPathReporting);
    }
    if !row.dist[v as usize].is_finite() {
        return Err(Error::Unreachable {
            from: row.source,
            to: v,
        });
    }
    let mut reversed = vec![v];
    let mut x = v;
    while let Some((p, e)) = row.pred[x as usize] {
        match e {
            EdgeRef::Base(_) => reversed.push(p),
            EdgeRef::Extra(j) => {
                let edge = &hopset.edges[j as usize];
                let w = edge.witness.as_ref().ok_or(Error::NotPathReporting)?;
                // walk the witness from x back to p
                if edge.v == x {
                    reversed.extend(w.iter().rev().skip(1));
                } else {
                    reversed.extend(w.iter().skip(1));
                }
            }
        }
        x = p;
        if reversed.len() > graph.n().saturating_mul(graph.n().max(1)) + hopset.len() * graph.n() {
            return Err(Error::Mismatch(
                "predecessor chain does not terminate".into(),
            ));
        }
    }
    if x != row.source {
        return Err(Error::Mismatch(format!(
            "predecessor chain ends at {x}, not at source {}",
            row.source
        )));
    }
    reversed.reverse();
    let total = crate::hopset::path_weight(graph, &reversed).map_err(|(a, b)| {
        Error::Mismatch(format!("extracted path steps over non-edge ({a}, {b})"))
    })?;
    Ok((reversed, Weight(total * hopset.denom)))
}

pub fn extract_path(
    graph: &Graph,
    hopset: &Hopset,
    result: &AspResult,
    s: VertexId,
    v: VertexId,
) -> Result<(Vec<VertexId>, Weight)> {
    let row = result.row(s).ok_or_else(|| {
        Error::InvalidParameter(format!("{} is not a query source", s as u64 + 1))
    })?;
    extract_path_from_row(graph, hopset, row, v)
}

pub const CSV_HEADER: &str = "source,vertex,estimate_num,estimate_den";

/// Writes the rows of one source; unreachable vertices are omitted.
pub fn write_csv_row<W: Write>(row: &HopRow, denom: u128, out: &mut W) -> Result<()> {
    for (v, d) in row.dist.iter().enumerate() {
        if d.is_finite() {
            let r = d.to_ratio(denom);
            writeln!(
                out,
                "{},{},{},{}",
                row.source + 1,
                v + 1,
                r.numer(),
                r.denom()
            )?;
        }
    }
    Ok(())
}

pub fn write_csv<W: Write>(result: &AspResult, mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in &result.rows {
        write_csv_row(row, result.denom, &mut out)?;
    }
    out.flush()?;
    Ok(())
}

/// One whitespace-separated, 1-based vertex sequence per line.
pub fn write_path<W: Write>(path: &[VertexId], out: &mut W) -> Result<()> {
    let line: Vec<String> = path.iter().map(|v| (v + 1).to_string()).collect();
    writeln!(out, "{}", line.join(" "))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopset::{EdgeKind, HopsetEdge};
    use num_rational::Ratio;

    fn unit_path(n: usize) -> Graph {
        Graph::from_edges(n, (0..n as u32 - 1).map(|i| (i, i + 1, 1))).unwrap()
    }

    #[test]
    fn isolated_source() {
        let g = Graph::from_edges(3, [(1, 2, 4)]).unwrap();
        let h = Hopset::empty(3, 5, Ratio::new(1, 2));
        let r = asp_estimates(&g, &h, &[0]).unwrap();
        assert_eq!(r.estimate(0, 0), Some(Weight(0)));
        assert!(!r.estimate(0, 1).unwrap().is_finite());
        let mut csv = Vec::new();
        write_csv(&r, &mut csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            format!("{CSV_HEADER}\n1,1,0,1\n")
        );
    }

    #[test]
    fn exact_on_path_with_enough_hops() {
        let g = unit_path(7);
        let h = Hopset::empty(7, 6, Ratio::new(1, 2));
        let r = asp_estimates(&g, &h, &[6]).unwrap();
        for v in 0..7u32 {
            assert_eq!(r.estimate(6, v), Some(Weight(6 - v as u128)));
        }
        let (p, w) = extract_path(&g, &h, &r, 6, 1).unwrap();
        assert_eq!(p, vec![6, 5, 4, 3, 2, 1]);
        assert_eq!(w, Weight(5));
    }

    #[test]
    fn hopset_edge_expands_to_witness() {
        let g = unit_path(6);
        let mut h = Hopset::empty(6, 2, Ratio::new(1, 2));
        h.edges.push(HopsetEdge {
            u: 0,
            v: 4,
            w: Weight(4),
            scale: 2,
            kind: EdgeKind::Interconnect,
            witness: Some(vec![0, 1, 2, 3, 4]),
        });
        let r = asp_estimates(&g, &h, &[5]).unwrap();
        assert_eq!(r.estimate(5, 0), Some(Weight(5)));
        let (p, w) = extract_path(&g, &h, &r, 5, 0).unwrap();
        assert_eq!(p, vec![5, 4, 3, 2, 1, 0]);
        assert_eq!(w, Weight(5));
    }

    #[test]
    fn errors() {
        let g = unit_path(4);
        let mut h = Hopset::empty(4, 1, Ratio::new(1, 2));
        let r = asp_estimates(&g, &h, &[0]).unwrap();
        assert!(matches!(
            extract_path(&g, &h, &r, 0, 3),
            Err(Error::Unreachable { .. })
        ));
        h.edges.push(HopsetEdge {
            u: 0,
            v: 3,
            w: Weight(3),
            scale: 1,
            kind: EdgeKind::Star,
            witness: None,
        });
        let r = asp_estimates(&g, &h, &[0]).unwrap();
        assert!(matches!(
            extract_path(&g, &h, &r, 0, 3),
            Err(Error::NotPathReporting)
        ));
        assert!(asp_estimates(&g, &h, &[9]).is_err());
    }
}
