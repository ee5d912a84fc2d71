//! Sampling, connectivity queries and paired Monte Carlo estimation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::dsu::DisjointSets;
use crate::error::{input, Error, Result};
use crate::graph::{BBVertex, BunkbedGraph};
use crate::ratio::Rational;
use crate::rng::SplitMix64;

/// Samples per parallel work unit. Results do not depend on it.
const CHUNK: u64 = 2048;

/// Edge-open probability `p` and its complement `q = 1 - p`.
///
/// `p` is always held exactly. A float passed to [`Self::from_f64`] is
/// converted to the rational with the same binary value.
#[derive(Debug, Clone, PartialEq)]
pub struct PercolationParams {
    p: Rational,
    q: Rational,
    threshold: u128,
}

impl PercolationParams {
    pub fn new(p: Rational) -> Result<Self> {
        if p.is_negative() || p > Rational::one() {
            return input(format!("p = {p} outside [0,1]"));
        }
        let q = Rational::one() - &p;
        // An edge is open iff a uniform 64-bit draw is below floor(p * 2^64).
        let scaled = (p.numer() << 64u32) / p.denom();
        let threshold = scaled.to_u128().expect("threshold fits in 65 bits");
        Ok(Self { p, q, threshold })
    }

    pub fn rational(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 || numer > denom {
            return input(format!("p = {numer}/{denom} is not a probability"));
        }
        Self::new(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_f64(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return input(format!("p = {p} outside [0,1]"));
        }
        Self::new(BigRational::from_float(p).expect("finite"))
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn p_f64(&self) -> f64 {
        self.p.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn opens(&self, draw: u64) -> bool {
        (draw as u128) < self.threshold
    }
}

/// Open/closed state of every random edge of one bunkbed graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    words: Vec<u64>,
    m: usize,
    owner: u64,
}

impl Configuration {
    /// All random edges closed.
    pub fn empty(bb: &BunkbedGraph) -> Self {
        let m = bb.random_edge_count();
        Self {
            words: vec![0; m.div_ceil(64)],
            m,
            owner: bb.fingerprint(),
        }
    }

    /// Builds a configuration from the indices of its open edges.
    pub fn from_open_bits(bb: &BunkbedGraph, open: &[usize]) -> Result<Self> {
        let mut c = Self::empty(bb);
        for &bit in open {
            if bit >= c.m {
                return input(format!("bit {bit} outside 0..{}", c.m));
            }
            c.set(bit, true);
        }
        Ok(c)
    }

    /// Configuration whose low `m` bits are the bits of `mask`.
    pub fn from_mask(bb: &BunkbedGraph, mask: u64) -> Result<Self> {
        let mut c = Self::empty(bb);
        if c.m < 64 && mask >> c.m != 0 {
            return input(format!("mask has bits set beyond m = {}", c.m));
        }
        if let Some(w) = c.words.first_mut() {
            *w = mask;
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    #[inline]
    pub fn is_open(&self, bit: usize) -> bool {
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn set(&mut self, bit: usize, open: bool) {
        let (w, b) = (bit / 64, bit % 64);
        if open {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn open_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Swaps the lower and upper copy of every base edge.
    pub fn mirror(&self, bb: &BunkbedGraph) -> Result<Self> {
        self.check_owner(bb)?;
        let e = bb.base().edge_count();
        let mut out = Self::empty(bb);
        for j in 0..e {
            out.set(j, self.is_open(e + j));
            out.set(e + j, self.is_open(j));
        }
        Ok(out)
    }

    fn check_owner(&self, bb: &BunkbedGraph) -> Result<()> {
        if self.owner != bb.fingerprint() || self.m != bb.random_edge_count() {
            return Err(Error::Mismatch);
        }
        Ok(())
    }
}

/// Draws the configuration for sample `sample_index` of the stream `seed`.
///
/// Edge `j` opens when the `j`-th draw of the sample's stream falls below
/// the threshold for `p`, so raising `p` only ever opens more edges.
pub fn sample_configuration(
    bb: &BunkbedGraph,
    params: &PercolationParams,
    sample_index: u64,
    seed: u64,
) -> Configuration {
    let mut c = Configuration::empty(bb);
    fill_sample(&mut c.words, c.m, params, sample_index, seed);
    c
}

fn fill_sample(words: &mut [u64], m: usize, params: &PercolationParams, index: u64, seed: u64) {
    words.fill(0);
    let mut rng = SplitMix64::for_sample(seed, index);
    for bit in 0..m {
        if params.opens(rng.next_u64()) {
            words[bit / 64] |= 1 << (bit % 64);
        }
    }
}

/// Reusable union-find state for answering connectivity of many configurations.
#[derive(Debug, Clone)]
pub(crate) struct Connectivity {
    edges: Vec<(usize, usize)>,
    posts: Vec<(usize, usize)>,
    sets: DisjointSets,
}

impl Connectivity {
    pub(crate) fn new(bb: &BunkbedGraph) -> Self {
        Self {
            edges: bb.random_edge_nodes(),
            posts: bb.post_nodes(),
            sets: DisjointSets::new(bb.node_count()),
        }
    }

    pub(crate) fn load_words(&mut self, words: &[u64]) -> &mut DisjointSets {
        self.sets.reset();
        for &(a, b) in &self.posts {
            self.sets.union(a, b);
        }
        for (bit, &(a, b)) in self.edges.iter().enumerate() {
            if words[bit / 64] >> (bit % 64) & 1 == 1 {
                self.sets.union(a, b);
            }
        }
        &mut self.sets
    }
}

/// Whether `a` and `b` are joined by a path of open random edges and posts.
pub fn connected(
    bb: &BunkbedGraph,
    config: &Configuration,
    a: BBVertex,
    b: BBVertex,
) -> Result<bool> {
    config.check_owner(bb)?;
    bb.check_vertex(a)?;
    bb.check_vertex(b)?;
    let mut conn = Connectivity::new(bb);
    let sets = conn.load_words(&config.words);
    Ok(sets.same(bb.node(a), bb.node(b)))
}

/// A sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Monte Carlo estimate of `P_p(a <-> b)`.
pub fn mc_connection_estimate(
    bb: &BunkbedGraph,
    a: BBVertex,
    b: BBVertex,
    params: &PercolationParams,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    if samples == 0 {
        return input("at least one sample is required");
    }
    bb.check_vertex(a)?;
    bb.check_vertex(b)?;
    let (na, nb) = (bb.node(a), bb.node(b));
    let hits = sum_over_samples(bb, params, samples, seed, |sets| {
        [sets.same(na, nb) as u64, 0, 0]
    })[0];
    let mean = hits as f64 / samples as f64;
    let std_error = (mean * (1.0 - mean) / samples as f64).max(0.0).sqrt();
    Ok(Estimate {
        mean,
        std_error,
        samples,
        seed,
    })
}

/// Paired estimate of both sides of the bunkbed inequality for `(v, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapEstimate {
    /// Estimated `P(v- <-> w-)`.
    pub p_lower_lower: f64,
    /// Estimated `P(v- <-> w+)`.
    pub p_lower_upper: f64,
    pub gap_mean: f64,
    pub gap_std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Estimates `P(v- <-> w-) - P(v- <-> w+)`, evaluating both events on the
/// same sampled configurations.
pub fn mc_gap_estimate(
    bb: &BunkbedGraph,
    v: usize,
    w: usize,
    params: &PercolationParams,
    samples: u64,
    seed: u64,
) -> Result<GapEstimate> {
    if samples < 2 {
        return input("the gap estimator needs at least two samples");
    }
    bb.check_vertex(BBVertex::lower(v))?;
    bb.check_vertex(BBVertex::lower(w))?;
    let source = bb.node(BBVertex::lower(v));
    let (low, up) = (bb.node(BBVertex::lower(w)), bb.node(BBVertex::upper(w)));
    let [ll, lu, differ] = sum_over_samples(bb, params, samples, seed, |sets| {
        let r = sets.find(source);
        let a = sets.find(low) == r;
        let b = sets.find(up) == r;
        [a as u64, b as u64, (a != b) as u64]
    });
    let n = samples as f64;
    let p_lower_lower = ll as f64 / n;
    let p_lower_upper = lu as f64 / n;
    // Paired differences take values in {-1, 0, 1}.
    let sum = ll as f64 - lu as f64;
    let sum_sq = differ as f64;
    let gap_mean = sum / n;
    let variance = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
    Ok(GapEstimate {
        p_lower_lower,
        p_lower_upper,
        gap_mean,
        gap_std_error: (variance / n).sqrt(),
        samples,
        seed,
    })
}

/// Sums a per-sample integer statistic over `samples` configurations.
///
/// Work is split into fixed chunks of sample indices; integer accumulation
/// makes the result independent of the thread count.
fn sum_over_samples<F>(
    bb: &BunkbedGraph,
    params: &PercolationParams,
    samples: u64,
    seed: u64,
    stat: F,
) -> [u64; 3]
where
    F: Fn(&mut DisjointSets) -> [u64; 3] + Sync,
{
    let m = bb.random_edge_count();
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map_init(
            || (Connectivity::new(bb), vec![0u64; m.div_ceil(64)]),
            |(conn, words), chunk| {
                let start = chunk * CHUNK;
                let end = (start + CHUNK).min(samples);
                let mut acc = [0u64; 3];
                for i in start..end {
                    fill_sample(words, m, params, i, seed);
                    let s = stat(conn.load_words(words));
                    for (a, x) in acc.iter_mut().zip(s) {
                        *a += x;
                    }
                }
                acc
            },
        )
        .reduce(|| [0; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]])
}

impl Default for PercolationParams {
    fn default() -> Self {
        Self::new(Rational::new(One::one(), BigInt::from(2))).expect("1/2")
    }
}
