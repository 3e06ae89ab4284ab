//! Seeded synthetic graphs.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::weight::big;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum GraphModel {
    /// Erdős–Rényi: every pair independently with probability `p`, weight
    /// uniform in `[wmin, wmax]`.
    Er {
        n: usize,
        p: f64,
        wmin: u64,
        wmax: u64,
    },
    /// Path `0 - 1 - ... - n-1` whose edge `i` weighs `max(1, floor(base^i))`.
    Path { n: usize, base: Ratio<u64> },
    /// 4-neighbour grid with uniform weights in `[wmin, wmax]`.
    Grid {
        rows: usize,
        cols: usize,
        wmin: u64,
        wmax: u64,
    },
}

impl GraphModel {
    pub fn describe(&self) -> String {
        match self {
            GraphModel::Er { n, p, wmin, wmax } => {
                format!("er(n={n},p={p},wmin={wmin},wmax={wmax})")
            }
            GraphModel::Path { n, base } => {
                format!("path(n={n},base={}/{})", base.numer(), base.denom())
            }
            GraphModel::Grid {
                rows,
                cols,
                wmin,
                wmax,
            } => {
                format!("grid(rows={rows},cols={cols},wmin={wmin},wmax={wmax})")
            }
        }
    }
}

fn check_range(wmin: u64, wmax: u64) -> Result<()> {
    if wmin < 1 || wmin > wmax {
        return Err(Error::InvalidParameter(format!(
            "weights need 1 <= wmin <= wmax, got [{wmin}, {wmax}]"
        )));
    }
    Ok(())
}

/// Deterministic in `(model, seed)`.
pub fn generate_graph(model: &GraphModel, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *model {
        GraphModel::Er { n, p, wmin, wmax } => {
            if n < 2 {
                return Err(Error::InvalidParameter("er needs n >= 2".into()));
            }
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "er needs 0 < p <= 1, got {p}"
                )));
            }
            check_range(wmin, wmax)?;
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    if rng.gen_bool(p) {
                        edges.push((u, v, rng.gen_range(wmin..=wmax)));
                    }
                }
            }
            Graph::from_edges(n, edges)
        }
        GraphModel::Path { n, base } => {
            if n < 2 {
                return Err(Error::InvalidParameter("path needs n >= 2".into()));
            }
            if base < Ratio::one() {
                return Err(Error::InvalidParameter("path needs base >= 1".into()));
            }
            let weights = path_weights(n, base)?;
            Graph::from_edges(
                n,
                weights
                    .into_iter()
                    .enumerate()
                    .map(|(i, w)| (i as u32, i as u32 + 1, w)),
            )
        }
        GraphModel::Grid {
            rows,
            cols,
            wmin,
            wmax,
        } => {
            if rows == 0 || cols == 0 || rows * cols < 2 {
                return Err(Error::InvalidParameter(
                    "grid needs at least 2 cells".into(),
                ));
            }
            check_range(wmin, wmax)?;
            let id = |r: usize, c: usize| (r * cols + c) as u32;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1), rng.gen_range(wmin..=wmax)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c), rng.gen_range(wmin..=wmax)));
                    }
                }
            }
            Graph::from_edges(rows * cols, edges)
        }
    }
}

/// Edge weights of `path(n, base)`.
pub fn path_weights(n: usize, base: Ratio<u64>) -> Result<Vec<u64>> {
    let b = big(base);
    let mut power = BigRational::one();
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        let floor = power.floor().to_integer();
        let w = floor
            .to_u64()
            .ok_or_else(|| Error::Overflow(format!("path edge {i} weight exceeds 64 bits")))?;
        out.push(w.max(1));
        power *= &b;
    }
    debug_assert!(out.iter().all(|&w| BigInt::from(w) >= BigInt::one()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_base_path() {
        let g = generate_graph(
            &GraphModel::Path {
                n: 3,
                base: Ratio::from_integer(1),
            },
            0,
        )
        .unwrap();
        assert_eq!(
            g.edges().iter().map(|e| e.w).collect::<Vec<_>>(),
            vec![1, 1]
        );
    }

    #[test]
    fn geometric_path() {
        let g = generate_graph(
            &GraphModel::Path {
                n: 4,
                base: Ratio::from_integer(2),
            },
            0,
        )
        .unwrap();
        assert_eq!(
            g.edges().iter().map(|e| e.w).collect::<Vec<_>>(),
            vec![1, 2, 4]
        );
    }

    #[test]
    fn fractional_base_floors() {
        let w = path_weights(5, Ratio::new(3, 2)).unwrap();
        assert_eq!(w, vec![1, 1, 2, 3]);
    }

    #[test]
    fn er_is_deterministic() {
        let m = GraphModel::Er {
            n: 100,
            p: 0.1,
            wmin: 1,
            wmax: 1000,
        };
        let a = generate_graph(&m, 7).unwrap();
        let b = generate_graph(&m, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_graph(&m, 8).unwrap());
        assert!(a.edges().iter().all(|e| (1..=1000).contains(&e.w)));
    }

    #[test]
    fn grid_shape() {
        let g = generate_graph(
            &GraphModel::Grid {
                rows: 3,
                cols: 4,
                wmin: 2,
                wmax: 2,
            },
            1,
        )
        .unwrap();
        assert_eq!(g.n(), 12);
        assert_eq!(g.m(), 3 * 3 + 2 * 4);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_graph(
            &GraphModel::Er {
                n: 1,
                p: 0.5,
                wmin: 1,
                wmax: 1
            },
            0
        )
        .is_err());
        assert!(generate_graph(
            &GraphModel::Er {
                n: 5,
                p: 0.0,
                wmin: 1,
                wmax: 1
            },
            0
        )
        .is_err());
        assert!(generate_graph(
            &GraphModel::Er {
                n: 5,
                p: 0.5,
                wmin: 3,
                wmax: 2
            },
            0
        )
        .is_err());
        assert!(generate_graph(
            &GraphModel::Path {
                n: 5,
                base: Ratio::new(1, 2)
            },
            0
        )
        .is_err());
    }
}
