//! Bond percolation on bunkbed graphs.
//!
//! The bunkbed of a graph `G` with post set `H` consists of two copies of
//! `G`, a lower and an upper layer, plus an always-open vertical edge at
//! every vertex of `H`. Every other edge is open independently with
//! probability `p`. The bunkbed inequality compares `P(v- <-> w-)` with
//! `P(v- <-> w+)`; this crate computes both sides exactly and by Monte
//! Carlo, checks the inequality on complete graphs, replays the
//! component-decomposition argument that proves it there, and cross-checks
//! `p = 1/2` percolation against the uniform random orientation model.
//!
//! ```
//! use bunkbed::{BaseGraph, BunkbedGraph, PercolationParams, exact_gap, format_ratio};
//!
//! let bb = BunkbedGraph::new(BaseGraph::complete(3)?, &[0])?;
//! let half = PercolationParams::rational(1, 2)?;
//! let gap = exact_gap(&bb, 1, 2, &half)?;
//! assert!(gap >= num_rational::BigRational::from_integer(0.into()));
//! println!("gap = {}", format_ratio(&gap));
//! # Ok::<(), bunkbed::Error>(())
//! ```

pub mod decomposition;
pub mod dsu;
pub mod error;
pub mod exact;
pub mod graph;
pub mod orientation;
pub mod percolation;
pub mod ratio;
pub mod rng;

pub use decomposition::{
    bridge_avoidance, conditional_gap, decomposition_expectation, exact_ab_probabilities,
    o_components, term_factor, ComponentPartition, ComponentProfile, DecompositionTable,
    OConfiguration, OSpace,
};
pub use error::{Error, Result};
pub use exact::{
    connection_polynomial, eval_counts, eval_counts_f64, exact_gap, exact_gap_uniform_v,
    Enumerator, ExactProbability, GapTable, ReliabilityCounts, DEFAULT_CUTOFF,
};
pub use graph::{BBVertex, BaseGraph, BunkbedGraph, Layer};
pub use orientation::{
    check_orientation_equivalence, orientation_connection_probability, EquivalenceReport,
    Orientation,
};
pub use percolation::{
    connected, mc_connection_estimate, mc_gap_estimate, sample_configuration, Configuration,
    Estimate, GapEstimate, PercolationParams,
};
pub use ratio::{format_ratio, parse_probability, parse_ratio, probability_grid, Rational};

// Guide chapters are compiled as doctests so their snippets stay in sync.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bunkbed-graphs.md")]
    mod bunkbed_graphs {}
    #[doc = include_str!("../../../book/src/percolation.md")]
    mod percolation {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/decomposition.md")]
    mod decomposition {}
    #[doc = include_str!("../../../book/src/orientation.md")]
    mod orientation {}
}
