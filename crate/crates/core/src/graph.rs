//! Base graphs, bunkbed construction and the canonical edge ordering.
//!
//! A [`BaseGraph`] stores its edges as `(u, v)` pairs with `u < v`, sorted
//! lexicographically; the position of an edge in that list is its index.
//! [`BunkbedGraph`] places two copies of the base graph on top of each other
//! and joins the copies of every post vertex. The lower copy of base edge `j`
//! is random edge `j`, the upper copy is random edge `|E| + j`. Posts are
//! always open and carry no bit.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{input, Result};
use crate::rng::{mix64, SplitMix64};

/// A finite simple undirected graph on vertices `0..n_vertices`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BaseGraph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl BaseGraph {
    /// Builds a graph from an arbitrary edge list.
    ///
    /// Pairs are normalized to `(min, max)` and sorted, so any permutation of
    /// the same list yields the same edge indices. Parallel edges are rejected.
    pub fn new(n_vertices: usize, edge_list: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(u, v) in edge_list {
            if u >= n_vertices || v >= n_vertices {
                return input(format!(
                    "edge ({u},{v}) references a vertex outside 0..{n_vertices}"
                ));
            }
            if u == v {
                return input(format!("self-loop at vertex {u}"));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return input(format!(
                    "duplicate edge ({u},{v}); only simple graphs are supported"
                ));
            }
        }
        Ok(Self {
            n_vertices,
            edges: set.into_iter().collect(),
        })
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self> {
        if n == 0 {
            return input("complete graph needs at least one vertex");
        }
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Ok(Self {
            n_vertices: n,
            edges,
        })
    }

    /// Wheel with hub `0` and rim `1..=n_rim`.
    pub fn wheel(n_rim: usize) -> Result<Self> {
        if n_rim < 3 {
            return input(format!(
                "wheel needs a rim of at least 3 vertices, got {n_rim}"
            ));
        }
        let mut edges: Vec<_> = (1..=n_rim).map(|r| (0, r)).collect();
        edges.extend((1..=n_rim).map(|r| (r, r % n_rim + 1)));
        Self::new(n_rim + 1, &edges)
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return input(format!("cycle needs at least 3 vertices, got {n}"));
        }
        let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Self::new(n, &edges)
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Result<Self> {
        if n == 0 {
            return input("path needs at least one vertex");
        }
        let edges: Vec<_> = (1..n).map(|u| (u - 1, u)).collect();
        Self::new(n, &edges)
    }

    /// Erdős–Rényi draw `G(n, edge_prob)`, a pure function of `seed`.
    pub fn random(n: usize, edge_prob: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&edge_prob) {
            return input(format!("edge probability {edge_prob} outside [0,1]"));
        }
        let mut rng = SplitMix64::new(mix64(seed));
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let draw = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
                if draw < edge_prob {
                    edges.push((u, v));
                }
            }
        }
        Ok(Self {
            n_vertices: n,
            edges,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Edges in canonical order; the index of an edge is its position here.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    pub fn is_complete(&self) -> bool {
        let n = self.n_vertices;
        self.edges.len() == n * n.saturating_sub(1) / 2
    }

    /// Stable 64-bit digest of the vertex count and edge list.
    pub fn fingerprint(&self) -> u64 {
        let mut h = mix64(self.n_vertices as u64 ^ 0xB5AD_4ECE_DA1C_E2A9);
        for &(u, v) in &self.edges {
            h = mix64(h ^ ((u as u64) << 32 | v as u64));
        }
        h
    }

    /// Parses the edge-list text format.
    ///
    /// ```text
    /// # a triangle
    /// vertices 3
    /// 0 1
    /// 1 2
    /// 0 2
    /// ```
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let n = match lines.next() {
            Some((lineno, header)) => {
                let mut parts = header.split_whitespace();
                match (
                    parts.next(),
                    parts.next().map(str::parse::<usize>),
                    parts.next(),
                ) {
                    (Some("vertices"), Some(Ok(n)), None) => n,
                    _ => return input(format!("line {lineno}: expected `vertices N`")),
                }
            }
            None => return input("empty graph file: expected `vertices N`"),
        };
        let mut edges = Vec::new();
        for (lineno, line) in lines {
            let mut parts = line.split_whitespace().map(str::parse::<usize>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => return input(format!("line {lineno}: expected `u v`, got `{line}`")),
            }
        }
        Self::new(n, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("vertices {}\n", self.n_vertices);
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Which copy of the base graph a bunkbed vertex lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Layer {
    Lower,
    Upper,
}

impl Layer {
    pub fn flip(self) -> Self {
        match self {
            Layer::Lower => Layer::Upper,
            Layer::Upper => Layer::Lower,
        }
    }
}

/// A bunkbed vertex: base vertex `base` in layer `layer`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BBVertex {
    pub base: usize,
    pub layer: Layer,
}

impl BBVertex {
    pub fn lower(base: usize) -> Self {
        Self {
            base,
            layer: Layer::Lower,
        }
    }

    pub fn upper(base: usize) -> Self {
        Self {
            base,
            layer: Layer::Upper,
        }
    }

    /// The same base vertex in the other layer.
    pub fn mirror(self) -> Self {
        Self {
            base: self.base,
            layer: self.layer.flip(),
        }
    }
}

impl fmt::Display for BBVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.layer {
            Layer::Lower => '-',
            Layer::Upper => '+',
        };
        write!(f, "{}{}", self.base, sign)
    }
}

/// Two layered copies of a base graph joined by always-open posts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BunkbedGraph {
    base: BaseGraph,
    posts: Vec<usize>,
    is_post: Vec<bool>,
    fingerprint: u64,
}

impl BunkbedGraph {
    pub fn new(base: BaseGraph, posts: &[usize]) -> Result<Self> {
        let n = base.n_vertices();
        let mut is_post = vec![false; n];
        for &h in posts {
            if h >= n {
                return input(format!("post vertex {h} outside 0..{n}"));
            }
            is_post[h] = true;
        }
        let posts: Vec<usize> = (0..n).filter(|&v| is_post[v]).collect();
        let mut fingerprint = base.fingerprint();
        for &h in &posts {
            fingerprint = mix64(fingerprint ^ (h as u64).wrapping_add(0x1234_5678));
        }
        Ok(Self {
            base,
            posts,
            is_post,
            fingerprint,
        })
    }

    pub fn base(&self) -> &BaseGraph {
        &self.base
    }

    pub fn n_vertices(&self) -> usize {
        self.base.n_vertices()
    }

    /// The post set `H`, sorted ascending.
    pub fn posts(&self) -> &[usize] {
        &self.posts
    }

    pub fn is_post(&self, v: usize) -> bool {
        self.is_post.get(v).copied().unwrap_or(false)
    }

    /// Number of random (non-post) edges, `2·|E|`.
    pub fn random_edge_count(&self) -> usize {
        2 * self.base.edge_count()
    }

    /// Total vertex count of the bunkbed, `2·n`.
    pub fn node_count(&self) -> usize {
        2 * self.n_vertices()
    }

    /// Identity used to tie configurations to the graph they belong to.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Dense node index: lower copies first, then upper copies.
    #[inline]
    pub fn node(&self, x: BBVertex) -> usize {
        match x.layer {
            Layer::Lower => x.base,
            Layer::Upper => self.n_vertices() + x.base,
        }
    }

    pub fn vertex_of_node(&self, node: usize) -> BBVertex {
        let n = self.n_vertices();
        if node < n {
            BBVertex::lower(node)
        } else {
            BBVertex::upper(node - n)
        }
    }

    pub fn check_vertex(&self, x: BBVertex) -> Result<()> {
        if x.base >= self.n_vertices() {
            return input(format!("vertex {x} outside 0..{}", self.n_vertices()));
        }
        Ok(())
    }

    /// Bit index of the copy of base edge `edge` in `layer`.
    pub fn bit_of(&self, layer: Layer, edge: usize) -> usize {
        match layer {
            Layer::Lower => edge,
            Layer::Upper => self.base.edge_count() + edge,
        }
    }

    /// Inverse of [`Self::bit_of`].
    pub fn edge_of_bit(&self, bit: usize) -> (Layer, usize) {
        let e = self.base.edge_count();
        if bit < e {
            (Layer::Lower, bit)
        } else {
            (Layer::Upper, bit - e)
        }
    }

    /// Endpoints (as dense nodes) of every random edge, in bit order.
    pub fn random_edge_nodes(&self) -> Vec<(usize, usize)> {
        let n = self.n_vertices();
        let lower = self.base.edges().iter().copied();
        let upper = self.base.edges().iter().map(|&(u, v)| (u + n, v + n));
        lower.chain(upper).collect()
    }

    /// Endpoints (as dense nodes) of the always-open posts.
    pub fn post_nodes(&self) -> Vec<(usize, usize)> {
        let n = self.n_vertices();
        self.posts.iter().map(|&h| (h, h + n)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_edge() {
        let g = BaseGraph::new(2, &[(0, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(g.edge_index(1, 0), Some(0));
    }

    #[test]
    fn lexicographic_normalization() {
        let g = BaseGraph::new(3, &[(2, 1), (0, 1), (0, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn rejects_self_loop_and_out_of_range() {
        assert!(BaseGraph::new(3, &[(0, 0)]).is_err());
        assert!(BaseGraph::new(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn rejects_parallel_edges() {
        assert!(BaseGraph::new(3, &[(0, 1), (1, 0)]).is_err());
        assert!(BaseGraph::parse_edge_list("vertices 2\n0 1\n0 1\n").is_err());
    }

    #[test]
    fn complete_graphs() {
        assert!(BaseGraph::complete(0).is_err());
        assert_eq!(BaseGraph::complete(1).unwrap().edge_count(), 0);
        assert_eq!(
            BaseGraph::complete(3).unwrap().edges(),
            &[(0, 1), (0, 2), (1, 2)]
        );
        assert_eq!(BaseGraph::complete(5).unwrap().edge_count(), 10);
        assert!(BaseGraph::complete(5).unwrap().is_complete());
    }

    #[test]
    fn wheels() {
        assert_eq!(
            BaseGraph::wheel(3).unwrap(),
            BaseGraph::complete(4).unwrap()
        );
        let w4 = BaseGraph::wheel(4).unwrap();
        assert_eq!(w4.edge_count(), 8);
        assert_eq!(w4.degree(0), 4);
        assert!(BaseGraph::wheel(2).is_err());
    }

    #[test]
    fn bunkbed_sizes() {
        let bb = BunkbedGraph::new(BaseGraph::complete(2).unwrap(), &[]).unwrap();
        assert_eq!(bb.random_edge_count(), 2);
        assert!(bb.posts().is_empty());
        let bb = BunkbedGraph::new(BaseGraph::complete(3).unwrap(), &[0]).unwrap();
        assert_eq!(bb.random_edge_count(), 6);
        assert_eq!(bb.posts(), &[0]);
        let bb = BunkbedGraph::new(BaseGraph::complete(5).unwrap(), &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(bb.random_edge_count(), 20);
        assert_eq!(bb.post_nodes().len(), 5);
        assert!(BunkbedGraph::new(BaseGraph::complete(2).unwrap(), &[2]).is_err());
    }

    #[test]
    fn bit_index_bijection() {
        let bb = BunkbedGraph::new(BaseGraph::complete(4).unwrap(), &[1]).unwrap();
        let m = bb.random_edge_count();
        let mut seen = vec![false; m];
        for layer in [Layer::Lower, Layer::Upper] {
            for e in 0..bb.base().edge_count() {
                let bit = bb.bit_of(layer, e);
                assert!(!seen[bit]);
                seen[bit] = true;
                assert_eq!(bb.edge_of_bit(bit), (layer, e));
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn edge_list_round_trip() {
        let text = "# comment\nvertices 4\n\n2 1\n0 1\n# another\n3 0\n";
        let g = BaseGraph::parse_edge_list(text).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 3), (1, 2)]);
        assert_eq!(BaseGraph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
        assert!(BaseGraph::parse_edge_list("vertices x\n").is_err());
        assert!(BaseGraph::parse_edge_list("vertices 2\n0 1 2\n").is_err());
        assert!(BaseGraph::parse_edge_list("vertices 2\n0 2\n").is_err());
        assert!(BaseGraph::parse_edge_list("").is_err());
    }

    proptest! {
        #[test]
        fn edge_order_is_permutation_invariant(
            raw in proptest::collection::vec((0usize..7, 0usize..7), 0..20),
            rot in 0usize..20,
        ) {
            let distinct: BTreeSet<_> = raw.into_iter().filter(|(u, v)| u != v).map(|(u, v)| (u.min(v), u.max(v))).collect();
            let edges: Vec<_> = distinct.into_iter().collect();
            let g = BaseGraph::new(7, &edges).unwrap();
            // Reverse, rotate and flip every other pair.
            let mut shuffled: Vec<_> = edges.iter().enumerate().map(|(i, &(u, v))| if i % 2 == 0 { (v, u) } else { (u, v) }).collect();
            shuffled.reverse();
            if !shuffled.is_empty() {
                let k = rot % shuffled.len();
                shuffled.rotate_left(k);
            }
            let h = BaseGraph::new(7, &shuffled).unwrap();
            prop_assert_eq!(g.edges(), h.edges());
            prop_assert!(g.edges().windows(2).all(|w| w[0] < w[1]));
        }
    }
}
