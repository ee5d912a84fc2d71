use serde_json::{json, Value};

use bunkbed::decomposition::verify_decomposition;
use bunkbed::orientation::check_equivalence_with;
use bunkbed::{
    eval_counts, format_ratio, mc_gap_estimate, BBVertex, BaseGraph, BunkbedGraph, Error,
    PercolationParams, Rational, Result,
};
use num_traits::Signed;

use crate::args::{CommandKind, Mode, PostChoice, RunSpec};
use crate::report::{graph_json, Cell, Report};
use crate::search;

/// Runs a validated command and returns its report.
pub fn execute(spec: &RunSpec) -> Result<Report> {
    match spec.command {
        CommandKind::Exact => exact(spec),
        CommandKind::Mc => mc(spec),
        CommandKind::Gap => gap(spec),
        CommandKind::VerifyTheorem => verify_theorem(spec),
        CommandKind::VerifyDecomposition => decomposition(spec),
        CommandKind::OrientCheck => orient_check(spec),
        CommandKind::Search => search::run(spec),
    }
}

pub(crate) fn base_graph(spec: &RunSpec) -> Result<BaseGraph> {
    spec.source.build(spec.seed)
}

fn check_vertex(g: &BaseGraph, v: usize, flag: &str) -> Result<usize> {
    if v >= g.n_vertices() {
        return Err(Error::Input(format!(
            "--{flag} {v} outside 0..{}",
            g.n_vertices()
        )));
    }
    Ok(v)
}

/// `(v, w)` from the flags, defaulting to the first and last vertex.
fn pair(spec: &RunSpec, g: &BaseGraph) -> Result<(usize, usize)> {
    let last = g.n_vertices().saturating_sub(1);
    Ok((
        check_vertex(g, spec.v.unwrap_or(0), "v")?,
        check_vertex(g, spec.w.unwrap_or(last), "w")?,
    ))
}

fn target(spec: &RunSpec, g: &BaseGraph) -> Result<usize> {
    check_vertex(g, spec.w.unwrap_or(g.n_vertices().saturating_sub(1)), "w")
}

/// Post sets to examine. `All` ranges over subsets of the vertices other than `exclude`.
pub(crate) fn post_sets(choice: &PostChoice, n: usize, exclude: Option<usize>) -> Vec<Vec<usize>> {
    match choice {
        PostChoice::Given(h) => vec![h.clone()],
        PostChoice::Default => vec![Vec::new()],
        PostChoice::All => {
            let pool: Vec<usize> = (0..n).filter(|&u| Some(u) != exclude).collect();
            (0u64..1 << pool.len())
                .map(|mask| {
                    pool.iter()
                        .enumerate()
                        .filter(|&(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &u)| u)
                        .collect()
                })
                .collect()
        }
    }
}

fn single_posts(spec: &RunSpec) -> Result<Vec<usize>> {
    match &spec.posts {
        PostChoice::All => Err(Error::Input(
            "--all-posts is not supported by this command".into(),
        )),
        other => Ok(post_sets(other, 0, None).remove(0)),
    }
}

fn ratio(x: &Rational) -> Cell {
    Cell::Text(format_ratio(x))
}

fn exact(spec: &RunSpec) -> Result<Report> {
    let g = base_graph(spec)?;
    let posts = single_posts(spec)?;
    let bb = BunkbedGraph::new(g.clone(), &posts)?;
    let (v, w) = pair(spec, &g)?;
    let polys = spec.enumerator.connection_polynomials(
        &bb,
        &[
            (BBVertex::lower(v), BBVertex::lower(w)),
            (BBVertex::lower(v), BBVertex::upper(w)),
        ],
    )?;
    let mut r = Report::new("exact", vec!["p", "p_lower_lower", "p_lower_upper", "gap"]);
    r.meta("graph", graph_json(spec.source.family().name(), &g))
        .meta("posts", json!(bb.posts()))
        .meta("v", json!(v))
        .meta("w", json!(w))
        .meta("method", json!("exact"))
        .meta(
            "same_layer_counts",
            serde_json::to_value(&polys[0]).expect("counts"),
        )
        .meta(
            "cross_layer_counts",
            serde_json::to_value(&polys[1]).expect("counts"),
        );
    for params in spec.grid_or_half() {
        let same = eval_counts(&polys[0], &params);
        let cross = eval_counts(&polys[1], &params);
        let gap = &same - &cross;
        r.push(vec![
            ratio(params.p()),
            ratio(&same),
            ratio(&cross),
            ratio(&gap),
        ]);
    }
    Ok(r)
}

fn mc(spec: &RunSpec) -> Result<Report> {
    let g = base_graph(spec)?;
    let posts = single_posts(spec)?;
    let bb = BunkbedGraph::new(g.clone(), &posts)?;
    let (v, w) = pair(spec, &g)?;
    let mut r = Report::new(
        "mc",
        vec![
            "p",
            "p_lower_lower",
            "p_lower_upper",
            "gap_mean",
            "gap_std_error",
        ],
    );
    r.meta("graph", graph_json(spec.source.family().name(), &g))
        .meta("posts", json!(bb.posts()))
        .meta("v", json!(v))
        .meta("w", json!(w))
        .meta("method", json!("mc"))
        .meta("samples", json!(spec.samples))
        .meta("seed", json!(spec.seed));
    for params in spec.grid_or_half() {
        let e = mc_gap_estimate(&bb, v, w, &params, spec.samples, spec.seed)?;
        r.push(vec![
            ratio(params.p()),
            e.p_lower_lower.into(),
            e.p_lower_upper.into(),
            e.gap_mean.into(),
            e.gap_std_error.into(),
        ]);
    }
    Ok(r)
}

fn gap(spec: &RunSpec) -> Result<Report> {
    let g = base_graph(spec)?;
    let posts = single_posts(spec)?;
    let bb = BunkbedGraph::new(g.clone(), &posts)?;
    let (v, w) = pair(spec, &g)?;
    let grid = spec.grid_or_half();
    let mut r = match spec.mode {
        Mode::Exact => Report::new("gap", vec!["p", "gap"]),
        Mode::Mc => Report::new("gap", vec!["p", "mean", "std_error"]),
    };
    r.meta("graph", graph_json(spec.source.family().name(), &g))
        .meta("posts", json!(bb.posts()))
        .meta("v", json!(v))
        .meta("w", json!(w));
    let mut single: Option<Value> = None;
    match spec.mode {
        Mode::Exact => {
            r.meta("method", json!("exact"));
            let polys = spec.enumerator.connection_polynomials(
                &bb,
                &[
                    (BBVertex::lower(v), BBVertex::lower(w)),
                    (BBVertex::lower(v), BBVertex::upper(w)),
                ],
            )?;
            for params in &grid {
                let gap = eval_counts(&polys[0], params) - eval_counts(&polys[1], params);
                single = Some(json!(format_ratio(&gap)));
                r.push(vec![ratio(params.p()), ratio(&gap)]);
            }
        }
        Mode::Mc => {
            r.meta("method", json!("mc"))
                .meta("samples", json!(spec.samples))
                .meta("seed", json!(spec.seed));
            for params in &grid {
                let e = mc_gap_estimate(&bb, v, w, params, spec.samples, spec.seed)?;
                single = Some(json!({"mean": e.gap_mean, "std_error": e.gap_std_error}));
                r.push(vec![
                    ratio(params.p()),
                    e.gap_mean.into(),
                    e.gap_std_error.into(),
                ]);
            }
        }
    }
    if grid.len() == 1 {
        r.meta("p", json!(format_ratio(grid[0].p())));
        r.meta("gap", single.expect("one row"));
    }
    Ok(r)
}

fn verify_theorem(spec: &RunSpec) -> Result<Report> {
    if spec.mode != Mode::Exact {
        return Err(Error::Input(
            "verify-theorem runs in exact mode only".into(),
        ));
    }
    let g = base_graph(spec)?;
    let w = target(spec, &g)?;
    let vs: Vec<usize> = match spec.v {
        Some(v) => vec![check_vertex(&g, v, "v")?],
        None => (0..g.n_vertices()).collect(),
    };
    let grid = spec.grid_or(11);
    let mut r = Report::new(
        "verify-theorem",
        vec!["posts", "p", "min_gap", "argmin_v", "ok"],
    );
    let mut violations = 0usize;
    for posts in post_sets(&spec.posts, g.n_vertices(), Some(w)) {
        let bb = BunkbedGraph::new(g.clone(), &posts)?;
        let table = spec.enumerator.gap_table(&bb)?;
        for params in &grid {
            let (argmin, min) = vs
                .iter()
                .map(|&v| (v, table.gap(v, w, params)))
                .min_by(|a, b| a.1.cmp(&b.1))
                .expect("at least one vertex");
            let ok = !min.is_negative();
            violations += usize::from(!ok);
            r.push(vec![
                posts.clone().into(),
                ratio(params.p()),
                ratio(&min),
                argmin.into(),
                ok.into(),
            ]);
        }
    }
    r.meta("graph", graph_json(spec.source.family().name(), &g))
        .meta("w", json!(w))
        .meta("method", json!("exact"))
        .meta("violations", json!(violations));
    r.violation = violations > 0;
    Ok(r)
}

fn decomposition(spec: &RunSpec) -> Result<Report> {
    let g = base_graph(spec)?;
    let w = target(spec, &g)?;
    let grid = spec.grid_or_half();
    let mut r = Report::new(
        "verify-decomposition",
        vec!["n", "H", "p", "lhs", "rhs", "equal", "min_term"],
    );
    let mut failures = 0usize;
    for posts in post_sets(&spec.posts, g.n_vertices(), Some(w)) {
        let bb = BunkbedGraph::new(g.clone(), &posts)?;
        for rep in verify_decomposition(&bb, w, &grid, &spec.enumerator)? {
            failures += usize::from(!rep.passed());
            r.push(vec![
                rep.n.into(),
                rep.posts.clone().into(),
                rep.p.clone().into(),
                rep.lhs.clone().into(),
                rep.rhs.clone().into(),
                rep.equal.into(),
                rep.min_term.clone().into(),
            ]);
        }
    }
    r.meta("w", json!(w)).meta("failures", json!(failures));
    r.flatten_single = true;
    r.violation = failures > 0;
    Ok(r)
}

fn orient_check(spec: &RunSpec) -> Result<Report> {
    let g = base_graph(spec)?;
    let pairs: Vec<(usize, usize)> = match (spec.v, spec.w) {
        (None, None) => (0..g.n_vertices())
            .flat_map(|v| {
                (0..g.n_vertices())
                    .filter(move |&w| w != v)
                    .map(move |w| (v, w))
            })
            .collect(),
        _ => vec![pair(spec, &g)?],
    };
    let mut r = Report::new(
        "orient-check",
        vec![
            "graph_hash",
            "v",
            "w",
            "orientation_prob",
            "percolation_half_prob",
            "equal",
        ],
    );
    let mut mismatches = 0usize;
    for (v, w) in pairs {
        let rep = check_equivalence_with(&g, v, w, &spec.enumerator)?;
        mismatches += usize::from(!rep.equal);
        r.push(vec![
            rep.graph_hash.into(),
            rep.v.into(),
            rep.w.into(),
            rep.orientation_prob.into(),
            rep.percolation_half_prob.into(),
            rep.equal.into(),
        ]);
    }
    r.meta("graph", graph_json(spec.source.family().name(), &g))
        .meta("mismatches", json!(mismatches));
    r.flatten_single = true;
    r.violation = mismatches > 0;
    Ok(r)
}

impl RunSpec {
    fn grid_or_half(&self) -> Vec<PercolationParams> {
        self.grid
            .clone()
            .unwrap_or_else(|| vec![PercolationParams::default()])
    }
}
