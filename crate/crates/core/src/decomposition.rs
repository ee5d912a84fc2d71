//! The component decomposition behind the complete-graph bunkbed inequality.
//!
//! Fix the target vertex `w` of `K_{n+1}` (with `w` not a post) and let `O`
//! be the open subgraph spanned by the other `2n` bunkbed vertices. Given
//! `O`, the edges from `w-` and `w+` into `O` are still independent:
//! `w-` misses a component with `c-` lower vertices with probability `q^c-`,
//! and `w+` misses one with `c+` upper vertices with probability `q^c+`.
//! Choosing `v` uniformly from the `n` other vertices turns the bunkbed gap
//! into an expectation over `O` of
//!
//! ```text
//! sum_i (c_i- / n) (q^c_i+ - q^c_i-) prod_{j != i} [1 - (1 - q^c_j-)(1 - q^c_j+)]
//! ```
//!
//! and averaging with the layer-swapped expression gives the symmetrized
//! summands `(1/2n)(c_i- - c_i+)(q^c_i+ - q^c_i-) * (...)`, each of which is
//! nonnegative. This module evaluates both forms by enumerating every
//! configuration of `O` and compares them against full enumeration.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dsu::DisjointSets;
use crate::error::{input, Error, Result};
use crate::exact::{
    check_cutoff, eval_counts, tally, EdgeSpace, Enumerator, Event, ReliabilityCounts,
};
use crate::graph::{BBVertex, BunkbedGraph};
use crate::percolation::PercolationParams;
use crate::ratio::{format_ratio, Rational};

/// The random edges of a complete-graph bunkbed that avoid both copies of `w`.
///
/// Bit `j` is the lower copy of the `j`-th base edge not incident to `w`
/// (in canonical order); bit `E_O + j` is its upper copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OSpace {
    w: usize,
    /// Base vertex of each compact index `0..n`.
    others: Vec<usize>,
    /// O-edges as compact vertex pairs.
    edges: Vec<(usize, usize)>,
    /// Compact indices of the posts.
    posts: Vec<usize>,
    owner: u64,
}

impl OSpace {
    pub fn new(bb: &BunkbedGraph, w: usize) -> Result<Self> {
        check_complete(bb)?;
        bb.check_vertex(BBVertex::lower(w))?;
        if bb.is_post(w) {
            return Err(Error::Precondition(format!(
                "w = {w} is a post; the gap is then identically zero"
            )));
        }
        let others: Vec<usize> = (0..bb.n_vertices()).filter(|&u| u != w).collect();
        let compact = |u: usize| if u < w { u } else { u - 1 };
        let edges = bb
            .base()
            .edges()
            .iter()
            .filter(|&&(a, b)| a != w && b != w)
            .map(|&(a, b)| (compact(a), compact(b)))
            .collect();
        let posts = bb.posts().iter().map(|&h| compact(h)).collect();
        Ok(Self {
            w,
            others,
            edges,
            posts,
            owner: bb.fingerprint(),
        })
    }

    pub fn w(&self) -> usize {
        self.w
    }

    /// Number of non-`w` base vertices, `n`.
    pub fn n(&self) -> usize {
        self.others.len()
    }

    /// Number of random O-edges, `2 * C(n, 2)`.
    pub fn random_edge_count(&self) -> usize {
        2 * self.edges.len()
    }

    /// Nodes are `0..n` for lower copies and `n..2n` for upper copies.
    fn edge_space(&self) -> EdgeSpace {
        let n = self.n();
        let lower = self.edges.iter().copied();
        let upper = self.edges.iter().map(|&(a, b)| (a + n, b + n));
        EdgeSpace {
            nodes: 2 * n,
            random: lower.chain(upper).collect(),
            fixed: self.posts.iter().map(|&h| (h, h + n)).collect(),
        }
    }

    fn vertex_of_node(&self, node: usize) -> BBVertex {
        let n = self.n();
        if node < n {
            BBVertex::lower(self.others[node])
        } else {
            BBVertex::upper(self.others[node - n])
        }
    }
}

fn check_complete(bb: &BunkbedGraph) -> Result<()> {
    if !bb.base().is_complete() {
        return input("the decomposition applies to complete base graphs only");
    }
    if bb.n_vertices() < 2 {
        return input("the decomposition needs at least two base vertices");
    }
    Ok(())
}

/// A configuration of the O-edges of one bunkbed, for one choice of `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OConfiguration {
    bits: u64,
    m: usize,
    w: usize,
    owner: u64,
}

impl OConfiguration {
    pub fn new(space: &OSpace, bits: u64) -> Result<Self> {
        let m = space.random_edge_count();
        check_cutoff(m, 63)?;
        if m < 64 && bits >> m != 0 {
            return input(format!("O-configuration has bits beyond m = {m}"));
        }
        Ok(Self {
            bits,
            m,
            w: space.w,
            owner: space.owner,
        })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }
}

/// Sizes of one component of `O` in each layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentProfile {
    pub lower_count: usize,
    pub upper_count: usize,
    members: Vec<BBVertex>,
}

impl ComponentProfile {
    pub fn new(lower_count: usize, upper_count: usize) -> Self {
        Self {
            lower_count,
            upper_count,
            members: Vec::new(),
        }
    }

    pub fn contains(&self, x: BBVertex) -> bool {
        self.members.contains(&x)
    }

    pub fn members(&self) -> &[BBVertex] {
        &self.members
    }
}

/// The connected components of `O`, in order of their smallest node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    pub components: Vec<ComponentProfile>,
}

impl ComponentPartition {
    pub fn from_profiles(profiles: &[(usize, usize)]) -> Self {
        Self {
            components: profiles
                .iter()
                .map(|&(a, b)| ComponentProfile::new(a, b))
                .collect(),
        }
    }

    /// Number of components, `k`.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    fn profiles(&self) -> Vec<(usize, usize)> {
        self.components
            .iter()
            .map(|c| (c.lower_count, c.upper_count))
            .collect()
    }
}

/// Splits `O` into connected components, posts included.
pub fn o_components(
    bb: &BunkbedGraph,
    w: usize,
    config: &OConfiguration,
) -> Result<ComponentPartition> {
    let space = OSpace::new(bb, w)?;
    if config.owner != space.owner || config.w != w || config.m != space.random_edge_count() {
        return Err(Error::Mismatch);
    }
    let es = space.edge_space();
    let mut sets = DisjointSets::new(es.nodes);
    let labels = component_labels(&es, config.bits, &mut sets);
    let k = labels.iter().copied().max().map_or(0, |x| x + 1);
    let n = space.n();
    let mut components: Vec<ComponentProfile> =
        (0..k).map(|_| ComponentProfile::new(0, 0)).collect();
    for (node, &label) in labels.iter().enumerate() {
        let c = &mut components[label];
        if node < n {
            c.lower_count += 1;
        } else {
            c.upper_count += 1;
        }
        c.members.push(space.vertex_of_node(node));
    }
    Ok(ComponentPartition { components })
}

fn component_labels(es: &EdgeSpace, bits: u64, sets: &mut DisjointSets) -> Vec<usize> {
    sets.reset();
    for &(a, b) in &es.fixed {
        sets.union(a, b);
    }
    for (bit, &(a, b)) in es.random.iter().enumerate() {
        if bits >> bit & 1 == 1 {
            sets.union(a, b);
        }
    }
    sets.labels().0
}

/// Powers `q^0 ..= q^max`.
fn q_powers(params: &PercolationParams, max: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = Rational::one();
    for _ in 0..=max {
        out.push(acc.clone());
        acc *= params.q();
    }
    out
}

fn q_pow(params: &PercolationParams, k: usize) -> Rational {
    num_traits::pow(params.q().clone(), k)
}

/// `(1/n)(c- - c+)(q^c+ - q^c-)`, nonnegative for every profile.
pub fn term_factor(
    profile: &ComponentProfile,
    params: &PercolationParams,
    n: usize,
) -> Result<Rational> {
    if n == 0 {
        return input("term factor needs n >= 1");
    }
    let (a, b) = (profile.lower_count, profile.upper_count);
    let diff = Rational::from_integer(BigInt::from(a as i64 - b as i64));
    Ok(diff * (q_pow(params, b) - q_pow(params, a)) / BigInt::from(n))
}

/// Probability that no component other than `skip` is joined to both `w-` and `w+`.
pub fn bridge_avoidance(
    partition: &ComponentPartition,
    skip: usize,
    params: &PercolationParams,
) -> Result<Rational> {
    if skip >= partition.len() {
        return input(format!(
            "component index {skip} outside 0..{}",
            partition.len()
        ));
    }
    let one = Rational::one();
    let mut product = Rational::one();
    for (j, c) in partition.components.iter().enumerate() {
        if j != skip {
            let touch_lower = &one - q_pow(params, c.lower_count);
            let touch_upper = &one - q_pow(params, c.upper_count);
            product *= &one - touch_lower * touch_upper;
        }
    }
    Ok(product)
}

/// `P(A | O) - P(B | O)` for `v` uniform over the `n` non-`w` vertices.
///
/// The plain form uses `P(v- in c_i) = c_i-/n`; the symmetrized form is the
/// average with the layer-swapped expression.
pub fn conditional_gap(
    partition: &ComponentPartition,
    params: &PercolationParams,
    n: usize,
    symmetrized: bool,
) -> Rational {
    let max = partition
        .components
        .iter()
        .map(|c| c.lower_count.max(c.upper_count))
        .max()
        .unwrap_or(0);
    let qp = q_powers(params, max);
    conditional_gap_terms(&partition.profiles(), &qp, n, symmetrized)
        .into_iter()
        .sum()
}

/// Per-component summands of [`conditional_gap`].
fn conditional_gap_terms(
    profiles: &[(usize, usize)],
    qp: &[Rational],
    n: usize,
    symmetrized: bool,
) -> Vec<Rational> {
    let one = Rational::one();
    let avoid: Vec<Rational> = profiles
        .iter()
        .map(|&(a, b)| &one - (&one - &qp[a]) * (&one - &qp[b]))
        .collect();
    let n = BigInt::from(n);
    profiles
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let bridge: Rational = avoid
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, x)| x.clone())
                .product();
            let miss_diff = &qp[b] - &qp[a];
            let weight = if symmetrized {
                Rational::new(BigInt::from(a as i64 - b as i64), BigInt::from(2) * &n)
            } else {
                Rational::new(BigInt::from(a), n.clone())
            };
            weight * miss_diff * bridge
        })
        .collect()
}

/// Every O-configuration, grouped by open-edge count and multiset of profiles.
///
/// The conditional gap depends on an O-configuration only through its
/// component profiles, and its weight only through its open-edge count, so
/// one enumeration serves every `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionTable {
    n: usize,
    m: usize,
    groups: BTreeMap<(usize, Vec<(usize, usize)>), u64>,
}

impl DecompositionTable {
    pub fn build(bb: &BunkbedGraph, w: usize, enumerator: &Enumerator) -> Result<Self> {
        let space = OSpace::new(bb, w)?;
        let es = space.edge_space();
        let m = es.random.len();
        check_cutoff(m, enumerator.cutoff())?;
        let n = space.n();
        let chunk_bits = 10.min(m);
        let groups = (0..1u64 << (m - chunk_bits))
            .into_par_iter()
            .map_init(
                || DisjointSets::new(es.nodes),
                |sets, chunk| {
                    let mut local: BTreeMap<(usize, Vec<(usize, usize)>), u64> = BTreeMap::new();
                    let start = chunk << chunk_bits;
                    for bits in start..start + (1u64 << chunk_bits) {
                        let labels = component_labels(&es, bits, sets);
                        let k = labels.iter().copied().max().map_or(0, |x| x + 1);
                        let mut profiles = vec![(0usize, 0usize); k];
                        for (node, &l) in labels.iter().enumerate() {
                            if node < n {
                                profiles[l].0 += 1;
                            } else {
                                profiles[l].1 += 1;
                            }
                        }
                        profiles.sort_unstable();
                        *local
                            .entry((bits.count_ones() as usize, profiles))
                            .or_default() += 1;
                    }
                    local
                },
            )
            .reduce(BTreeMap::new, |mut a, b| {
                for (key, count) in b {
                    *a.entry(key).or_default() += count;
                }
                a
            });
        Ok(Self { n, m, groups })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of distinct (open-edge count, profile multiset) classes.
    pub fn class_count(&self) -> usize {
        self.groups.len()
    }

    /// Every profile multiset occurring in some O-configuration.
    pub fn partitions(&self) -> impl Iterator<Item = ComponentPartition> + '_ {
        self.groups
            .keys()
            .map(|(_, profiles)| ComponentPartition::from_profiles(profiles))
    }

    /// `E_p[P(A | O) - P(B | O)]`.
    pub fn expectation(&self, params: &PercolationParams, symmetrized: bool) -> Rational {
        let qp = q_powers(params, self.n);
        let p_pows = q_powers_of(params.p(), self.m);
        let q_pows = q_powers_of(params.q(), self.m);
        let mut total = Rational::zero();
        for ((k, profiles), &count) in &self.groups {
            let weight = &p_pows[*k] * &q_pows[self.m - k] * BigInt::from(count);
            if weight.is_zero() {
                continue;
            }
            let gap: Rational = conditional_gap_terms(profiles, &qp, self.n, symmetrized)
                .into_iter()
                .sum();
            total += weight * gap;
        }
        total
    }

    /// Smallest symmetrized summand over every O-configuration and component.
    pub fn min_term(&self, params: &PercolationParams) -> Rational {
        let qp = q_powers(params, self.n);
        self.groups
            .keys()
            .flat_map(|(_, profiles)| conditional_gap_terms(profiles, &qp, self.n, true))
            .min()
            .unwrap_or_else(Rational::zero)
    }
}

fn q_powers_of(x: &Rational, max: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = Rational::one();
    for _ in 0..=max {
        out.push(acc.clone());
        acc *= x;
    }
    out
}

/// `E_p[P(A | O) - P(B | O)]` with `v` uniform over the vertices other than `w`.
pub fn decomposition_expectation(
    bb: &BunkbedGraph,
    w: usize,
    params: &PercolationParams,
    symmetrized: bool,
) -> Result<Rational> {
    Ok(DecompositionTable::build(bb, w, &Enumerator::default())?.expectation(params, symmetrized))
}

/// Reliability counts of the events `A_v` and `B_v` for every `v != w`.
///
/// `A_v = {w- <-> v- and not v- <-> w+}`, `B_v = {w+ <-> v- and not v- <-> w-}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbTable {
    a: Vec<ReliabilityCounts>,
    b: Vec<ReliabilityCounts>,
}

impl AbTable {
    /// `(P(A), P(B))` with `v` uniform over the vertices other than `w`.
    pub fn probabilities(&self, params: &PercolationParams) -> (Rational, Rational) {
        let n = BigInt::from(self.a.len());
        let pa: Rational = self.a.iter().map(|c| eval_counts(c, params)).sum();
        let pb: Rational = self.b.iter().map(|c| eval_counts(c, params)).sum();
        (pa / &n, pb / n)
    }
}

impl Enumerator {
    /// Counts the events `A_v` and `B_v` over all configurations of the bunkbed.
    pub fn ab_table(&self, bb: &BunkbedGraph, w: usize) -> Result<AbTable> {
        // Validates completeness and w not being a post.
        OSpace::new(bb, w)?;
        let (wl, wu) = (bb.node(BBVertex::lower(w)), bb.node(BBVertex::upper(w)));
        let mut events = Vec::new();
        for v in (0..bb.n_vertices()).filter(|&v| v != w) {
            let vl = bb.node(BBVertex::lower(v));
            events.push(Event::ConnectedAvoiding {
                from: vl,
                to: wl,
                avoid: wu,
            });
            events.push(Event::ConnectedAvoiding {
                from: vl,
                to: wu,
                avoid: wl,
            });
        }
        let raw = tally(&EdgeSpace::bunkbed(bb), &events, self.cutoff())?;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, counts) in raw.into_iter().enumerate() {
            let c = ReliabilityCounts::from_u64(&counts)?;
            if i % 2 == 0 {
                a.push(c)
            } else {
                b.push(c)
            }
        }
        Ok(AbTable { a, b })
    }
}

/// `(P(A), P(B))` by full enumeration, `v` uniform over the vertices other than `w`.
pub fn exact_ab_probabilities(
    bb: &BunkbedGraph,
    w: usize,
    params: &PercolationParams,
) -> Result<(Rational, Rational)> {
    Ok(Enumerator::default().ab_table(bb, w)?.probabilities(params))
}

/// Outcome of comparing the decomposition against full enumeration at one `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    /// Vertex count of the complete base graph.
    pub n: usize,
    #[serde(rename = "H")]
    pub posts: Vec<usize>,
    pub p: String,
    /// Symmetrized decomposition expectation.
    pub lhs: String,
    /// Uniform-`v` gap by full enumeration.
    pub rhs: String,
    pub equal: bool,
    pub min_term: String,
}

impl VerificationReport {
    /// The identity holds and every symmetrized summand is nonnegative.
    pub fn passed(&self) -> bool {
        self.equal && !self.min_term.starts_with('-')
    }
}

/// Checks the decomposition identity on `bb` for every `p` in `grid`.
///
/// Both forms of the decomposition, the event probabilities `P(A) - P(B)`
/// and the uniform-`v` gap must agree exactly for `equal` to be set.
pub fn verify_decomposition(
    bb: &BunkbedGraph,
    w: usize,
    grid: &[PercolationParams],
    enumerator: &Enumerator,
) -> Result<Vec<VerificationReport>> {
    let table = DecompositionTable::build(bb, w, enumerator)?;
    let gaps = enumerator.gap_table(bb)?;
    let ab = enumerator.ab_table(bb, w)?;
    Ok(grid
        .iter()
        .map(|params| {
            let lhs = table.expectation(params, true);
            let plain = table.expectation(params, false);
            let rhs = gaps.uniform_v_gap(w, params);
            let (pa, pb) = ab.probabilities(params);
            let equal = lhs == rhs && plain == rhs && pa - pb == rhs;
            VerificationReport {
                n: bb.n_vertices(),
                posts: bb.posts().to_vec(),
                p: format_ratio(params.p()),
                lhs: format_ratio(&lhs),
                rhs: format_ratio(&rhs),
                equal,
                min_term: format_ratio(&table.min_term(params)),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exact_gap_uniform_v;
    use crate::graph::BaseGraph;
    use crate::ratio::rational;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn kbb(n: usize, posts: &[usize]) -> BunkbedGraph {
        BunkbedGraph::new(BaseGraph::complete(n).unwrap(), posts).unwrap()
    }

    fn p(a: u64, b: u64) -> PercolationParams {
        PercolationParams::rational(a, b).unwrap()
    }

    #[test]
    fn components_of_extreme_configurations() {
        // K_4 with w = 3: n = 3, six O-edges per layer pair.
        let g = kbb(4, &[]);
        let space = OSpace::new(&g, 3).unwrap();
        assert_eq!(space.random_edge_count(), 6);
        let empty = OConfiguration::new(&space, 0).unwrap();
        let part = o_components(&g, 3, &empty).unwrap();
        assert_eq!(part.len(), 6);
        assert!(part
            .components
            .iter()
            .all(|c| (c.lower_count, c.upper_count) == (1, 0)
                || (c.lower_count, c.upper_count) == (0, 1)));

        let posted = kbb(4, &[0, 1, 2]);
        let space = OSpace::new(&posted, 3).unwrap();
        let part = o_components(&posted, 3, &OConfiguration::new(&space, 0).unwrap()).unwrap();
        assert_eq!(part.len(), 3);
        assert!(part
            .components
            .iter()
            .all(|c| (c.lower_count, c.upper_count) == (1, 1)));
        assert!(part.components[0].contains(BBVertex::upper(0)));

        let full = OConfiguration::new(&space, 0b111111).unwrap();
        let part = o_components(&posted, 3, &full).unwrap();
        assert_eq!(part.len(), 1);
        assert_eq!(
            (
                part.components[0].lower_count,
                part.components[0].upper_count
            ),
            (3, 3)
        );
    }

    #[test]
    fn preconditions() {
        let g = kbb(4, &[3]);
        assert!(matches!(OSpace::new(&g, 3), Err(Error::Precondition(_))));
        let cycle = BunkbedGraph::new(BaseGraph::cycle(4).unwrap(), &[]).unwrap();
        assert!(OSpace::new(&cycle, 0).is_err());
        assert!(exact_ab_probabilities(&g, 3, &p(1, 2)).is_err());
        let space = OSpace::new(&kbb(4, &[]), 3).unwrap();
        assert!(OConfiguration::new(&space, 1 << 6).is_err());
        let other = OConfiguration::new(&OSpace::new(&kbb(4, &[0]), 3).unwrap(), 0).unwrap();
        assert_eq!(o_components(&kbb(4, &[]), 3, &other), Err(Error::Mismatch));
    }

    #[test]
    fn term_factor_examples() {
        let half = p(1, 2);
        assert!(term_factor(&ComponentProfile::new(3, 3), &half, 4)
            .unwrap()
            .is_zero());
        assert_eq!(
            term_factor(&ComponentProfile::new(2, 0), &half, 2).unwrap(),
            rational(3, 4)
        );
        assert!(term_factor(&ComponentProfile::new(5, 1), &p(0, 1), 6)
            .unwrap()
            .is_zero());
        assert!(term_factor(&ComponentProfile::new(1, 0), &half, 0).is_err());
    }

    #[test]
    fn bridge_avoidance_examples() {
        let half = p(1, 2);
        let single = ComponentPartition::from_profiles(&[(2, 2)]);
        assert_eq!(
            bridge_avoidance(&single, 0, &half).unwrap(),
            Rational::one()
        );
        let two = ComponentPartition::from_profiles(&[(1, 1), (1, 1)]);
        assert_eq!(bridge_avoidance(&two, 0, &half).unwrap(), rational(3, 4));
        assert_eq!(
            bridge_avoidance(&two, 1, &p(0, 1)).unwrap(),
            Rational::one()
        );
        assert!(bridge_avoidance(&two, 2, &half).is_err());
    }

    #[test]
    fn conditional_gap_examples() {
        let half = p(1, 2);
        let symmetric = ComponentPartition::from_profiles(&[(1, 1), (2, 2)]);
        assert!(conditional_gap(&symmetric, &half, 3, true).is_zero());
        let lopsided = ComponentPartition::from_profiles(&[(2, 0), (0, 2)]);
        for sym in [false, true] {
            assert!(conditional_gap(&lopsided, &p(0, 1), 2, sym).is_zero());
        }
        assert!(conditional_gap(
            &ComponentPartition::from_profiles(&[(3, 3)]),
            &half,
            3,
            true
        )
        .is_zero());
        // Each summand is (2/4)(1 - 1/4) times a bridge factor of 1, i.e. 3/8.
        assert_eq!(conditional_gap(&lopsided, &half, 2, true), rational(3, 4));
    }

    #[test]
    fn expectation_at_extremes() {
        let g = kbb(4, &[0]);
        for sym in [false, true] {
            assert!(decomposition_expectation(&g, 3, &p(0, 1), sym)
                .unwrap()
                .is_zero());
            assert!(decomposition_expectation(&g, 3, &p(1, 1), sym)
                .unwrap()
                .is_zero());
        }
        assert_eq!(
            exact_ab_probabilities(&g, 3, &p(0, 1)).unwrap(),
            (Rational::zero(), Rational::zero())
        );
    }

    #[test]
    fn identity_on_k4_with_one_post() {
        let g = kbb(4, &[0]);
        let half = p(1, 2);
        let rhs = exact_gap_uniform_v(&g, 3, &half).unwrap();
        assert_eq!(decomposition_expectation(&g, 3, &half, true).unwrap(), rhs);
        assert_eq!(decomposition_expectation(&g, 3, &half, false).unwrap(), rhs);
    }

    #[test]
    fn event_difference_on_k3() {
        let g = kbb(3, &[]);
        let half = p(1, 2);
        let (a, b) = exact_ab_probabilities(&g, 2, &half).unwrap();
        assert!(!a.is_negative() && a <= Rational::one());
        assert!(!b.is_negative() && b <= Rational::one());
        assert_eq!(a - b, exact_gap_uniform_v(&g, 2, &half).unwrap());
    }

    #[test]
    fn identity_for_w_not_last() {
        let g = kbb(4, &[2]);
        let params = p(2, 5);
        let reports = verify_decomposition(&g, 0, &[params], &Enumerator::default()).unwrap();
        assert!(reports[0].passed(), "{:?}", reports[0]);
    }

    #[test]
    fn profile_conservation() {
        for posts in [vec![], vec![0], vec![1, 3], vec![0, 1, 2, 3]] {
            let g = kbb(5, &posts);
            let table = DecompositionTable::build(&g, 4, &Enumerator::default()).unwrap();
            for part in table.partitions() {
                let lower: usize = part.components.iter().map(|c| c.lower_count).sum();
                let upper: usize = part.components.iter().map(|c| c.upper_count).sum();
                assert_eq!((lower, upper), (4, 4));
                assert!(part
                    .components
                    .iter()
                    .all(|c| c.lower_count + c.upper_count >= 1));
            }
        }
    }

    #[test]
    fn closed_form_miss_probability() {
        // 1 - q^c equals the enumerated probability that one of c independent edges opens.
        for c in 0..=10usize {
            for (a, b) in [(1u64, 4u64), (1, 2), (2, 3)] {
                let params = p(a, b);
                let mut hit = Rational::zero();
                for mask in 0u32..1 << c {
                    if mask != 0 {
                        let k = mask.count_ones() as usize;
                        hit += num_traits::pow(params.p().clone(), k)
                            * num_traits::pow(params.q().clone(), c - k);
                    }
                }
                assert_eq!(hit, Rational::one() - q_pow(&params, c));
            }
        }
    }

    #[test]
    fn termwise_nonnegative_exhaustive() {
        for a in 0..=6 {
            for b in 0..=6 {
                for (num, den) in [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)] {
                    let t = term_factor(&ComponentProfile::new(a, b), &p(num, den), 1).unwrap();
                    assert!(!t.is_negative(), "a={a} b={b} q={num}/{den}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn termwise_nonnegative(a in 0usize..40, b in 0usize..40, num in 0u64..1000, extra in 0u64..1000) {
            let den = num + extra.max(1);
            let t = term_factor(&ComponentProfile::new(a, b), &p(num, den), 1).unwrap();
            prop_assert!(!t.is_negative());
        }
    }
}
