//! Scanning graph families for negative bunkbed gaps.

use num_traits::Signed;
use rayon::prelude::*;
use serde_json::{json, Value};

use bunkbed::rng::{stream_state, SplitMix64};
use bunkbed::{
    format_ratio, mc_gap_estimate, BaseGraph, BunkbedGraph, Error, PercolationParams, Rational,
    Result,
};

use crate::args::{GraphSource, Mode, PostChoice, RunSpec};
use crate::commands::{base_graph, post_sets};
use crate::report::{graph_json, Cell, Report};

/// Violations in Monte Carlo mode need the mean this many standard errors below zero.
pub const MC_VIOLATION_SIGMAS: f64 = 5.0;

const DEFAULT_RANDOM_BUDGET: usize = 100;

#[derive(Debug, Clone)]
struct Instance {
    graph: BaseGraph,
    posts: Vec<usize>,
    seed: u64,
}

/// Smallest gap of one instance at one `p`.
#[derive(Debug, Clone)]
enum Gap {
    Exact(Rational),
    Mc { mean: f64, std_error: f64 },
}

impl Gap {
    fn key(&self) -> f64 {
        match self {
            Gap::Exact(r) => num_traits::ToPrimitive::to_f64(r).unwrap_or(0.0),
            Gap::Mc { mean, .. } => *mean,
        }
    }

    fn less_than(&self, other: &Gap) -> bool {
        match (self, other) {
            (Gap::Exact(a), Gap::Exact(b)) => a < b,
            _ => self.key() < other.key(),
        }
    }

    fn is_violation(&self) -> bool {
        match self {
            Gap::Exact(r) => r.is_negative(),
            Gap::Mc { mean, std_error } => *mean < -MC_VIOLATION_SIGMAS * std_error,
        }
    }

    fn value_cell(&self) -> Cell {
        match self {
            Gap::Exact(r) => Cell::Text(format_ratio(r)),
            Gap::Mc { mean, .. } => Cell::Float(*mean),
        }
    }

    fn json(&self) -> Value {
        match self {
            Gap::Exact(r) => json!(format_ratio(r)),
            Gap::Mc { mean, std_error } => json!({"mean": mean, "std_error": std_error}),
        }
    }
}

#[derive(Debug, Clone)]
struct Finding {
    p: String,
    v: usize,
    w: usize,
    gap: Gap,
}

#[derive(Debug)]
enum Outcome {
    Done {
        minima: Vec<Finding>,
        violations: Vec<Finding>,
    },
    Skipped(String),
}

fn instances(spec: &RunSpec) -> Result<Vec<Instance>> {
    let budget = spec.budget;
    let mut out = Vec::new();
    match &spec.source {
        GraphSource::Random { n, .. } => {
            let count = budget.unwrap_or(DEFAULT_RANDOM_BUDGET);
            for i in 0..count as u64 {
                let seed = stream_state(spec.seed, i);
                let graph = spec.source.build(seed)?;
                let posts = match &spec.posts {
                    PostChoice::Given(h) => h.clone(),
                    _ => {
                        let mut rng = SplitMix64::new(!seed);
                        (0..*n).filter(|_| rng.next_u64() >> 63 == 1).collect()
                    }
                };
                out.push(Instance { graph, posts, seed });
            }
        }
        GraphSource::Complete(n) => {
            let graph = base_graph(spec)?;
            // K_n is vertex-transitive, so one post set per size suffices.
            let sets = match &spec.posts {
                PostChoice::Default => (0..=*n).map(|h| (0..h).collect()).collect(),
                other => post_sets(other, *n, None),
            };
            out.extend(sets.into_iter().enumerate().map(|(i, posts)| Instance {
                graph: graph.clone(),
                posts,
                seed: stream_state(spec.seed, i as u64),
            }));
        }
        _ => {
            let graph = base_graph(spec)?;
            let choice = match &spec.posts {
                PostChoice::Given(h) => PostChoice::Given(h.clone()),
                _ => PostChoice::All,
            };
            let sets = post_sets(&choice, graph.n_vertices(), None);
            out.extend(sets.into_iter().enumerate().map(|(i, posts)| Instance {
                graph: graph.clone(),
                posts,
                seed: stream_state(spec.seed, i as u64),
            }));
        }
    }
    if let Some(b) = budget {
        out.truncate(b);
    }
    Ok(out)
}

fn examine(inst: &Instance, spec: &RunSpec, grid: &[PercolationParams]) -> Result<Outcome> {
    let n = inst.graph.n_vertices();
    let bb = BunkbedGraph::new(inst.graph.clone(), &inst.posts)?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|v| (0..n).filter(move |&w| w != v).map(move |w| (v, w)))
        .collect();
    let table = match spec.mode {
        Mode::Exact => match spec.enumerator.gap_table(&bb) {
            Ok(t) => Some(t),
            Err(e @ Error::Capacity { .. }) => return Ok(Outcome::Skipped(e.to_string())),
            Err(e) => return Err(e),
        },
        Mode::Mc => None,
    };
    let mut minima = Vec::new();
    let mut violations = Vec::new();
    for params in grid {
        let p = format_ratio(params.p());
        let mut best: Option<Finding> = None;
        for &(v, w) in &pairs {
            let gap = match &table {
                Some(t) => Gap::Exact(t.gap(v, w, params)),
                None => {
                    let e = mc_gap_estimate(&bb, v, w, params, spec.samples, inst.seed)?;
                    Gap::Mc {
                        mean: e.gap_mean,
                        std_error: e.gap_std_error,
                    }
                }
            };
            let finding = Finding {
                p: p.clone(),
                v,
                w,
                gap,
            };
            if finding.gap.is_violation() {
                violations.push(finding.clone());
            }
            if best.as_ref().is_none_or(|b| finding.gap.less_than(&b.gap)) {
                best = Some(finding);
            }
        }
        minima.extend(best);
    }
    Ok(Outcome::Done { minima, violations })
}

/// Scans every instance of the requested family and reports the smallest gap.
pub fn run(spec: &RunSpec) -> Result<Report> {
    let grid = spec.grid_or(11);
    let instances = instances(spec)?;
    let outcomes: Vec<Result<Outcome>> = instances
        .par_iter()
        .map(|inst| examine(inst, spec, &grid))
        .collect();

    let method = match spec.mode {
        Mode::Exact => "exact",
        Mode::Mc => "mc",
    };
    let columns = match spec.mode {
        Mode::Exact => vec!["instance", "posts", "p", "min_gap", "v", "w"],
        Mode::Mc => vec!["instance", "posts", "p", "min_gap", "std_error", "v", "w"],
    };
    let mut r = Report::new("search", columns);
    let mut overall: Option<(usize, Finding)> = None;
    let mut violations = Vec::new();
    let mut skipped = 0usize;
    for (i, (inst, outcome)) in instances.iter().zip(outcomes).enumerate() {
        match outcome? {
            Outcome::Skipped(why) => {
                skipped += 1;
                r.warnings.push(format!("instance {i} skipped: {why}"));
            }
            Outcome::Done {
                minima,
                violations: found,
            } => {
                for f in minima {
                    let mut row: Vec<Cell> = vec![
                        i.into(),
                        inst.posts.clone().into(),
                        f.p.clone().into(),
                        f.gap.value_cell(),
                    ];
                    if let Gap::Mc { std_error, .. } = f.gap {
                        row.push(std_error.into());
                    }
                    row.extend([f.v.into(), f.w.into()]);
                    r.push(row);
                    if overall
                        .as_ref()
                        .is_none_or(|(_, b)| f.gap.less_than(&b.gap))
                    {
                        overall = Some((i, f));
                    }
                }
                for f in found {
                    let evidence = match &f.gap {
                        Gap::Exact(_) => "exact enumeration".to_string(),
                        Gap::Mc { std_error, .. } => {
                            format!("mc mean below -{MC_VIOLATION_SIGMAS} std errors ({std_error})")
                        }
                    };
                    violations.push(json!({
                        "instance": i,
                        "graph": graph_json(spec.source.family().name(), &inst.graph),
                        "posts": inst.posts,
                        "v": f.v,
                        "w": f.w,
                        "p": f.p,
                        "gap": f.gap.json(),
                        "evidence": evidence,
                    }));
                }
            }
        }
    }

    let mut family = json!({"family": spec.source.family().name()});
    match &spec.source {
        GraphSource::Complete(n) | GraphSource::Wheel(n) | GraphSource::Cycle(n) => {
            family["n"] = json!(n);
        }
        GraphSource::Random { n, edge_prob } => {
            family["n"] = json!(n);
            family["edge_prob"] = json!(edge_prob);
        }
        GraphSource::File(path) => family["file"] = json!(path.display().to_string()),
    }
    let min_gap = overall.map(|(i, f)| {
        json!({
            "instance": i,
            "posts": instances[i].posts,
            "v": f.v,
            "w": f.w,
            "p": f.p,
            "gap": f.gap.json(),
            "method": method,
        })
    });
    r.violation = !violations.is_empty();
    r.meta("family", family)
        .meta("method", json!(method))
        .meta("instances", json!(instances.len()))
        .meta("skipped", json!(skipped))
        .meta("min_gap", min_gap.unwrap_or(Value::Null))
        .meta("violations", Value::Array(violations));
    Ok(r)
}
