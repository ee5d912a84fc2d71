//! Uniform random orientations and their agreement with `p = 1/2` percolation.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{input, Result};
use crate::exact::{check_cutoff, eval_counts, Enumerator};
use crate::graph::BaseGraph;
use crate::percolation::PercolationParams;
use crate::ratio::{format_ratio, Rational};

/// Direction of every edge of a base graph: bit set means `min -> max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Orientation {
    bits: u64,
    len: usize,
}

impl Orientation {
    pub fn new(g: &BaseGraph, bits: u64) -> Result<Self> {
        let len = g.edge_count();
        if len > 64 || (len < 64 && bits >> len != 0) {
            return input(format!("orientation bits do not fit {len} edges"));
        }
        Ok(Self { bits, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Whether a directed path runs from `from` to `to`.
    pub fn reaches(&self, g: &BaseGraph, from: usize, to: usize) -> bool {
        let out = out_neighbours(g, self.bits);
        reaches(
            &out,
            from,
            to,
            &mut vec![false; g.n_vertices()],
            &mut Vec::new(),
        )
    }
}

fn out_neighbours(g: &BaseGraph, bits: u64) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); g.n_vertices()];
    for (j, &(u, v)) in g.edges().iter().enumerate() {
        if bits >> j & 1 == 1 {
            out[u].push(v);
        } else {
            out[v].push(u);
        }
    }
    out
}

fn reaches(
    out: &[Vec<usize>],
    from: usize,
    to: usize,
    seen: &mut [bool],
    queue: &mut Vec<usize>,
) -> bool {
    if from == to {
        return true;
    }
    seen.fill(false);
    queue.clear();
    seen[from] = true;
    queue.push(from);
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for &y in &out[x] {
            if y == to {
                return true;
            }
            if !seen[y] {
                seen[y] = true;
                queue.push(y);
            }
        }
    }
    false
}

/// Probability over the `2^|E|` equally likely orientations that a directed
/// path runs from `v` to `w`.
pub fn orientation_connection_probability(g: &BaseGraph, v: usize, w: usize) -> Result<Rational> {
    orientation_probability_with(g, v, w, &Enumerator::default())
}

pub fn orientation_probability_with(
    g: &BaseGraph,
    v: usize,
    w: usize,
    enumerator: &Enumerator,
) -> Result<Rational> {
    let n = g.n_vertices();
    if v >= n || w >= n {
        return input(format!("vertex pair ({v},{w}) outside 0..{n}"));
    }
    let m = g.edge_count();
    check_cutoff(m, enumerator.cutoff())?;
    let chunk_bits = 10.min(m);
    let hits: u64 = (0..1u64 << (m - chunk_bits))
        .into_par_iter()
        .map_init(
            || (vec![false; n], Vec::with_capacity(n)),
            |(seen, queue), chunk| {
                let start = chunk << chunk_bits;
                (start..start + (1u64 << chunk_bits))
                    .filter(|&bits| reaches(&out_neighbours(g, bits), v, w, seen, queue))
                    .count() as u64
            },
        )
        .sum();
    Ok(BigRational::new(
        BigInt::from(hits),
        BigInt::from(1u64) << m,
    ))
}

/// Orientation and `p = 1/2` percolation probabilities side by side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub graph_hash: String,
    pub v: usize,
    pub w: usize,
    pub orientation_prob: String,
    pub percolation_half_prob: String,
    pub equal: bool,
}

pub fn check_orientation_equivalence(
    g: &BaseGraph,
    v: usize,
    w: usize,
) -> Result<EquivalenceReport> {
    check_equivalence_with(g, v, w, &Enumerator::default())
}

pub fn check_equivalence_with(
    g: &BaseGraph,
    v: usize,
    w: usize,
    enumerator: &Enumerator,
) -> Result<EquivalenceReport> {
    let oriented = orientation_probability_with(g, v, w, enumerator)?;
    let counts = enumerator.graph_connection_polynomial(g, v, w)?;
    let half = PercolationParams::rational(1, 2)?;
    let percolated = eval_counts(&counts, &half);
    Ok(EquivalenceReport {
        graph_hash: format!("{:016x}", g.fingerprint()),
        v,
        w,
        orientation_prob: format_ratio(&oriented),
        percolation_half_prob: format_ratio(&percolated),
        equal: oriented == percolated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rational;
    use num_traits::{One, Zero};

    #[test]
    fn trivial_cases() {
        let k3 = BaseGraph::complete(3).unwrap();
        assert_eq!(
            orientation_connection_probability(&k3, 1, 1).unwrap(),
            Rational::one()
        );
        let edge = BaseGraph::complete(2).unwrap();
        assert_eq!(
            orientation_connection_probability(&edge, 0, 1).unwrap(),
            rational(1, 2)
        );
        assert!(orientation_connection_probability(&edge, 0, 2).is_err());
    }

    #[test]
    fn triangle_by_hand() {
        // Orientations of K_3 with a directed 0 -> 1 path: the edge 0->1 (4 of 8),
        // or 1->0 together with 0->2->1 (1 of 8). Total 5/8.
        // Subgraphs connecting 0 and 1: {01} plus anything (4), or {02,12} without 01 (1). Total 5/8.
        let k3 = BaseGraph::complete(3).unwrap();
        assert_eq!(
            orientation_connection_probability(&k3, 0, 1).unwrap(),
            rational(5, 8)
        );
        let report = check_orientation_equivalence(&k3, 0, 1).unwrap();
        assert!(report.equal);
        assert_eq!(report.percolation_half_prob, "5/8");
    }

    #[test]
    fn path_and_edgeless() {
        let path = BaseGraph::path(3).unwrap();
        let report = check_orientation_equivalence(&path, 0, 2).unwrap();
        assert_eq!(
            (
                report.orientation_prob.as_str(),
                report.percolation_half_prob.as_str()
            ),
            ("1/4", "1/4")
        );
        let edgeless = BaseGraph::new(3, &[]).unwrap();
        let report = check_orientation_equivalence(&edgeless, 0, 2).unwrap();
        assert_eq!(report.orientation_prob, "0/1");
        assert!(report.equal);
    }

    #[test]
    fn explicit_orientation() {
        let path = BaseGraph::path(3).unwrap();
        let forward = Orientation::new(&path, 0b11).unwrap();
        assert!(forward.reaches(&path, 0, 2));
        assert!(!forward.reaches(&path, 2, 0));
        assert!(Orientation::new(&path, 0b100).is_err());
    }

    fn distance(g: &BaseGraph, from: usize, to: usize) -> Option<usize> {
        let mut dist = vec![usize::MAX; g.n_vertices()];
        let mut queue = std::collections::VecDeque::from([from]);
        dist[from] = 0;
        while let Some(x) = queue.pop_front() {
            for &(a, b) in g.edges() {
                let y = if a == x {
                    b
                } else if b == x {
                    a
                } else {
                    continue;
                };
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        (dist[to] != usize::MAX).then_some(dist[to])
    }

    #[test]
    fn reversal_symmetry_and_shortest_path_bound() {
        // Reversing every edge maps v -> w orientations onto w -> v ones, and
        // orienting a shortest path forwards already succeeds.
        let disjoint = BaseGraph::new(4, &[(0, 1), (2, 3)]).unwrap();
        for g in [
            BaseGraph::cycle(5).unwrap(),
            BaseGraph::wheel(4).unwrap(),
            BaseGraph::path(4).unwrap(),
            disjoint,
        ] {
            for v in 0..g.n_vertices() {
                for w in 0..g.n_vertices() {
                    let there = orientation_connection_probability(&g, v, w).unwrap();
                    let back = orientation_connection_probability(&g, w, v).unwrap();
                    assert_eq!(there, back);
                    match distance(&g, v, w) {
                        Some(d) => assert!(there >= rational(1, 1 << d)),
                        None => assert_eq!(there, Rational::zero()),
                    }
                }
            }
        }
    }
}
