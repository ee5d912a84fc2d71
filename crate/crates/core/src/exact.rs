//! Exact connection probabilities by exhaustive enumeration.
//!
//! Every configuration index `0..2^m` is visited once, connectivity is
//! resolved with union-find and the connected configurations are bucketed by
//! their number of open edges. The resulting [`ReliabilityCounts`] describe
//! `p -> P_p(a <-> b)` completely, so one enumeration serves a whole grid of
//! `p` values.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dsu::DisjointSets;
use crate::error::{input, Error, Result};
use crate::graph::{BBVertex, BaseGraph, BunkbedGraph};
use crate::percolation::PercolationParams;
use crate::ratio::Rational;

/// Default limit on the number of random edges enumerated (`2^26` configurations).
pub const DEFAULT_CUTOFF: usize = 26;

/// Masks are `u64`, so no override may exceed this.
pub const MAX_CUTOFF: usize = 40;

/// Exact probabilities are carried as reduced big rationals.
pub type ExactProbability = Rational;

/// `counts[k]` = number of configurations with exactly `k` open random
/// edges in which the queried event holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReliabilityCounts {
    m: usize,
    counts: Vec<BigUint>,
}

impl ReliabilityCounts {
    pub fn new(counts: Vec<BigUint>) -> Result<Self> {
        if counts.is_empty() {
            return input("reliability counts need at least N_0");
        }
        let m = counts.len() - 1;
        let mut binom = BigUint::one();
        for (k, n) in counts.iter().enumerate() {
            if n > &binom {
                return input(format!("N_{k} = {n} exceeds C({m},{k}) = {binom}"));
            }
            binom = binom * BigUint::from(m - k) / BigUint::from(k + 1);
        }
        Ok(Self { m, counts })
    }

    pub fn from_u64(counts: &[u64]) -> Result<Self> {
        Self::new(counts.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// Total number of configurations in which the event holds.
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

#[derive(Serialize, Deserialize)]
struct CountsJson {
    m: usize,
    counts: Vec<String>,
}

impl Serialize for ReliabilityCounts {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CountsJson {
            m: self.m,
            counts: self.counts.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ReliabilityCounts {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CountsJson::deserialize(d)?;
        let counts = raw
            .counts
            .iter()
            .map(|c| c.parse::<BigUint>().map_err(D::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        if counts.len() != raw.m + 1 {
            return Err(D::Error::custom(format!(
                "expected {} counts, got {}",
                raw.m + 1,
                counts.len()
            )));
        }
        ReliabilityCounts::new(counts).map_err(D::Error::custom)
    }
}

/// `sum_k N_k a^k (b-a)^(m-k) / b^m` for `p = a/b`.
pub fn eval_counts(counts: &ReliabilityCounts, params: &PercolationParams) -> ExactProbability {
    let (a, b) = (params.p().numer().clone(), params.p().denom().clone());
    let c = &b - &a;
    let m = counts.m;
    // Horner in p/q: sum_k N_k a^k c^(m-k).
    let mut a_pow = BigInt::one();
    let mut c_pows = Vec::with_capacity(m + 1);
    let mut acc = BigInt::one();
    for _ in 0..=m {
        c_pows.push(acc.clone());
        acc *= &c;
    }
    let mut numer = BigInt::zero();
    for (k, n) in counts.counts.iter().enumerate() {
        if !n.is_zero() {
            numer += BigInt::from(n.clone()) * &a_pow * &c_pows[m - k];
        }
        a_pow *= &a;
    }
    BigRational::new(numer, num_traits::pow(b, m))
}

/// Floating-point evaluation of the connection polynomial.
pub fn eval_counts_f64(counts: &ReliabilityCounts, p: f64) -> f64 {
    let q = 1.0 - p;
    let m = counts.m as i32;
    counts
        .counts
        .iter()
        .enumerate()
        .map(|(k, n)| {
            let n: f64 = n.to_string().parse().unwrap_or(f64::INFINITY);
            n * p.powi(k as i32) * q.powi(m - k as i32)
        })
        .sum()
}

/// A query evaluated on every configuration, in dense node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Event {
    /// `a <-> b`.
    Connected(usize, usize),
    /// `from <-> to` and not `from <-> avoid`.
    ConnectedAvoiding {
        from: usize,
        to: usize,
        avoid: usize,
    },
}

/// Nodes, random edges (one bit each) and always-open edges.
#[derive(Debug, Clone)]
pub(crate) struct EdgeSpace {
    pub nodes: usize,
    pub random: Vec<(usize, usize)>,
    pub fixed: Vec<(usize, usize)>,
}

impl EdgeSpace {
    pub fn bunkbed(bb: &BunkbedGraph) -> Self {
        Self {
            nodes: bb.node_count(),
            random: bb.random_edge_nodes(),
            fixed: bb.post_nodes(),
        }
    }

    pub fn base(g: &BaseGraph) -> Self {
        Self {
            nodes: g.n_vertices(),
            random: g.edges().to_vec(),
            fixed: Vec::new(),
        }
    }
}

/// Masks per parallel work unit.
const CHUNK_BITS: usize = 12;

/// Enumerates all `2^m` configurations of `space` and returns, per event,
/// the number of configurations satisfying it bucketed by open-edge count.
pub(crate) fn tally(space: &EdgeSpace, events: &[Event], cutoff: usize) -> Result<Vec<Vec<u64>>> {
    let m = space.random.len();
    check_cutoff(m, cutoff)?;
    let width = m + 1;
    let chunk_bits = CHUNK_BITS.min(m);
    let chunks = 1u64 << (m - chunk_bits);
    let flat = (0..chunks)
        .into_par_iter()
        .map_init(
            || (DisjointSets::new(space.nodes), vec![0usize; space.nodes]),
            |(sets, roots), chunk| {
                let mut acc = vec![0u64; events.len() * width];
                let start = chunk << chunk_bits;
                for mask in start..start + (1u64 << chunk_bits) {
                    sets.reset();
                    for &(a, b) in &space.fixed {
                        sets.union(a, b);
                    }
                    for (bit, &(a, b)) in space.random.iter().enumerate() {
                        if mask >> bit & 1 == 1 {
                            sets.union(a, b);
                        }
                    }
                    for (x, r) in roots.iter_mut().enumerate() {
                        *r = sets.find(x);
                    }
                    let k = mask.count_ones() as usize;
                    for (i, ev) in events.iter().enumerate() {
                        let hit = match *ev {
                            Event::Connected(a, b) => roots[a] == roots[b],
                            Event::ConnectedAvoiding { from, to, avoid } => {
                                roots[from] == roots[to] && roots[from] != roots[avoid]
                            }
                        };
                        acc[i * width + k] += hit as u64;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; events.len() * width],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(flat.chunks(width).map(<[u64]>::to_vec).collect())
}

pub(crate) fn check_cutoff(m: usize, cutoff: usize) -> Result<()> {
    if m > cutoff.min(MAX_CUTOFF) {
        return Err(Error::Capacity {
            m,
            cutoff: cutoff.min(MAX_CUTOFF),
        });
    }
    Ok(())
}

fn to_counts(raw: Vec<u64>) -> ReliabilityCounts {
    ReliabilityCounts {
        m: raw.len() - 1,
        counts: raw.into_iter().map(BigUint::from).collect(),
    }
}

/// Exhaustive enumerator with a configurable size limit.
#[derive(Debug, Clone, Copy)]
pub struct Enumerator {
    cutoff: usize,
}

impl Default for Enumerator {
    fn default() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

impl Enumerator {
    /// Enumerator refusing spaces with more than `cutoff` random edges.
    pub fn with_cutoff(cutoff: usize) -> Result<Self> {
        if cutoff > MAX_CUTOFF {
            return input(format!(
                "cutoff {cutoff} exceeds the hard limit {MAX_CUTOFF}"
            ));
        }
        Ok(Self { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Reliability counts of the event `a <-> b` on `bb`.
    pub fn connection_polynomial(
        &self,
        bb: &BunkbedGraph,
        a: BBVertex,
        b: BBVertex,
    ) -> Result<ReliabilityCounts> {
        Ok(self.connection_polynomials(bb, &[(a, b)])?.remove(0))
    }

    /// Counts for several pairs from a single enumeration.
    pub fn connection_polynomials(
        &self,
        bb: &BunkbedGraph,
        pairs: &[(BBVertex, BBVertex)],
    ) -> Result<Vec<ReliabilityCounts>> {
        let mut events = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            bb.check_vertex(a)?;
            bb.check_vertex(b)?;
            events.push(Event::Connected(bb.node(a), bb.node(b)));
        }
        let raw = tally(&EdgeSpace::bunkbed(bb), &events, self.cutoff)?;
        Ok(raw.into_iter().map(to_counts).collect())
    }

    /// Reliability counts of `v <-> w` on a plain graph, every edge random.
    pub fn graph_connection_polynomial(
        &self,
        g: &BaseGraph,
        v: usize,
        w: usize,
    ) -> Result<ReliabilityCounts> {
        let n = g.n_vertices();
        if v >= n || w >= n {
            return input(format!("vertex pair ({v},{w}) outside 0..{n}"));
        }
        let raw = tally(&EdgeSpace::base(g), &[Event::Connected(v, w)], self.cutoff)?;
        Ok(to_counts(raw.into_iter().next().expect("one event")))
    }

    /// Both connection polynomials for every ordered pair `(v, w)`.
    pub fn gap_table(&self, bb: &BunkbedGraph) -> Result<GapTable> {
        let n = bb.n_vertices();
        let mut pairs = Vec::with_capacity(2 * n * n);
        for v in 0..n {
            for w in 0..n {
                pairs.push((BBVertex::lower(v), BBVertex::lower(w)));
                pairs.push((BBVertex::lower(v), BBVertex::upper(w)));
            }
        }
        let mut polys = self.connection_polynomials(bb, &pairs)?.into_iter();
        let mut same = Vec::with_capacity(n * n);
        let mut cross = Vec::with_capacity(n * n);
        while let (Some(s), Some(c)) = (polys.next(), polys.next()) {
            same.push(s);
            cross.push(c);
        }
        Ok(GapTable { n, same, cross })
    }

    /// `P_p(v- <-> w-) - P_p(v- <-> w+)` as an exact signed rational.
    pub fn exact_gap(
        &self,
        bb: &BunkbedGraph,
        v: usize,
        w: usize,
        params: &PercolationParams,
    ) -> Result<Rational> {
        let pairs = [
            (BBVertex::lower(v), BBVertex::lower(w)),
            (BBVertex::lower(v), BBVertex::upper(w)),
        ];
        let polys = self.connection_polynomials(bb, &pairs)?;
        Ok(eval_counts(&polys[0], params) - eval_counts(&polys[1], params))
    }

    /// Average of [`Self::exact_gap`] over `v` uniform on all vertices except `w`.
    pub fn exact_gap_uniform_v(
        &self,
        bb: &BunkbedGraph,
        w: usize,
        params: &PercolationParams,
    ) -> Result<Rational> {
        let n = bb.n_vertices();
        if n < 2 {
            return input("uniform-v gap needs at least two vertices");
        }
        bb.check_vertex(BBVertex::lower(w))?;
        let mut pairs = Vec::new();
        for v in (0..n).filter(|&v| v != w) {
            pairs.push((BBVertex::lower(v), BBVertex::lower(w)));
            pairs.push((BBVertex::lower(v), BBVertex::upper(w)));
        }
        let polys = self.connection_polynomials(bb, &pairs)?;
        let mut total = Rational::zero();
        for pair in polys.chunks(2) {
            total += eval_counts(&pair[0], params) - eval_counts(&pair[1], params);
        }
        Ok(total / BigInt::from(n - 1))
    }
}

/// Connection polynomials of `(v-, w-)` and `(v-, w+)` for every ordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapTable {
    n: usize,
    same: Vec<ReliabilityCounts>,
    cross: Vec<ReliabilityCounts>,
}

impl GapTable {
    pub fn n_vertices(&self) -> usize {
        self.n
    }

    /// Counts of `v- <-> w-`.
    pub fn same_layer(&self, v: usize, w: usize) -> &ReliabilityCounts {
        &self.same[v * self.n + w]
    }

    /// Counts of `v- <-> w+`.
    pub fn cross_layer(&self, v: usize, w: usize) -> &ReliabilityCounts {
        &self.cross[v * self.n + w]
    }

    pub fn gap(&self, v: usize, w: usize, params: &PercolationParams) -> Rational {
        eval_counts(self.same_layer(v, w), params) - eval_counts(self.cross_layer(v, w), params)
    }

    pub fn uniform_v_gap(&self, w: usize, params: &PercolationParams) -> Rational {
        let total: Rational = (0..self.n)
            .filter(|&v| v != w)
            .map(|v| self.gap(v, w, params))
            .sum();
        total / BigInt::from(self.n - 1)
    }
}

/// [`Enumerator::connection_polynomial`] with the default cutoff.
pub fn connection_polynomial(
    bb: &BunkbedGraph,
    a: BBVertex,
    b: BBVertex,
) -> Result<ReliabilityCounts> {
    Enumerator::default().connection_polynomial(bb, a, b)
}

/// [`Enumerator::exact_gap`] with the default cutoff.
pub fn exact_gap(
    bb: &BunkbedGraph,
    v: usize,
    w: usize,
    params: &PercolationParams,
) -> Result<Rational> {
    Enumerator::default().exact_gap(bb, v, w, params)
}

/// [`Enumerator::exact_gap_uniform_v`] with the default cutoff.
pub fn exact_gap_uniform_v(
    bb: &BunkbedGraph,
    w: usize,
    params: &PercolationParams,
) -> Result<Rational> {
    Enumerator::default().exact_gap_uniform_v(bb, w, params)
}
