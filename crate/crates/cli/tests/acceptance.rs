//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::time::Instant;

use bunkbed::decomposition::{verify_decomposition, ComponentProfile, DecompositionTable};
use bunkbed::orientation::check_equivalence_with;
use bunkbed::rng::SplitMix64;
use bunkbed::{
    eval_counts, mc_gap_estimate, term_factor, BaseGraph, BunkbedGraph, Enumerator,
    PercolationParams, Rational,
};
use bunkbed_cli::run_cli;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn grid(k: u64) -> Vec<PercolationParams> {
    (0..k)
        .map(|i| PercolationParams::rational(i, k - 1).unwrap())
        .collect()
}

fn subsets(pool: &[usize]) -> Vec<Vec<usize>> {
    (0u32..1 << pool.len())
        .map(|mask| {
            pool.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &u)| u)
                .collect()
        })
        .collect()
}

fn complete_bunkbed(n: usize, posts: &[usize]) -> BunkbedGraph {
    BunkbedGraph::new(BaseGraph::complete(n).unwrap(), posts).unwrap()
}

/// Outcome of one criterion: `Ok(detail)` or `Err(reason)`.
type Verdict = Result<String, String>;

type Criterion = (&'static str, fn() -> Verdict);

/// 1. The gap is nonnegative on every complete-graph bunkbed with at most five vertices.
fn theorem_reproduction() -> Verdict {
    let ps = grid(11);
    let mut checked = 0u64;
    for n in 2..=5 {
        let all: Vec<usize> = (0..n).collect();
        for posts in subsets(&all) {
            let table = Enumerator::default()
                .gap_table(&complete_bunkbed(n, &posts))
                .unwrap();
            for v in 0..n {
                for w in 0..n {
                    for p in &ps {
                        let gap = table.gap(v, w, p);
                        if gap.is_negative() {
                            return Err(format!(
                                "K_{n} H={posts:?} v={v} w={w} p={} gap={gap}",
                                p.p()
                            ));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} exact gaps, all >= 0"))
}

/// 2. The decomposition expectation equals the uniform-v gap exactly.
fn decomposition_identity() -> Verdict {
    let ps = grid(11);
    let mut checked = 0;
    for n in 3..=5 {
        let w = n - 1;
        let pool: Vec<usize> = (0..w).collect();
        for posts in subsets(&pool) {
            let bb = complete_bunkbed(n, &posts);
            let enumerator = Enumerator::default();
            let table = DecompositionTable::build(&bb, w, &enumerator).unwrap();
            let gaps = enumerator.gap_table(&bb).unwrap();
            for p in &ps {
                let rhs = gaps.uniform_v_gap(w, p);
                let sym = table.expectation(p, true);
                let plain = table.expectation(p, false);
                if sym != rhs || plain != rhs {
                    return Err(format!(
                        "K_{n} H={posts:?} p={}: {sym} / {plain} vs {rhs}",
                        p.p()
                    ));
                }
                checked += 1;
            }
            // The full report additionally compares P(A) - P(B) and the smallest summand.
            for rep in verify_decomposition(&bb, w, &ps, &enumerator).unwrap() {
                if !rep.passed() {
                    return Err(format!("report failed: {rep:?}"));
                }
            }
        }
    }
    Ok(format!(
        "{checked} (n, H, p) cases equal with zero tolerance"
    ))
}

/// 3. `(a - b)(q^b - q^a) >= 0`.
fn termwise_nonnegativity() -> Verdict {
    let qs = [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)];
    let mut count = 0;
    for a in 0..=6 {
        for b in 0..=6 {
            for &(num, den) in &qs {
                // term_factor is parametrised by p; q = num/den means p = 1 - q.
                let p = PercolationParams::rational(den - num, den).unwrap();
                let t = term_factor(&ComponentProfile::new(a, b), &p, 1).unwrap();
                if t.is_negative() {
                    return Err(format!("a={a} b={b} q={num}/{den}"));
                }
                count += 1;
            }
        }
    }
    let mut rng = SplitMix64::new(0xAC3);
    for _ in 0..10_000 {
        let a = rng.below(64) as usize;
        let b = rng.below(64) as usize;
        let den = 1 + rng.below(1_000_000);
        let num = rng.below(den + 1);
        let p = PercolationParams::rational(num, den).unwrap();
        let t = term_factor(&ComponentProfile::new(a, b), &p, 1).unwrap();
        if t.is_negative() {
            return Err(format!("a={a} b={b} p={num}/{den}"));
        }
        count += 1;
    }
    Ok(format!("{count} triples, zero failures"))
}

/// 4. The trivial cases of the reduction.
fn reduction_cases() -> Verdict {
    let ps = grid(11);
    let mut count = 0;
    for n in 1..=4 {
        let all: Vec<usize> = (0..n).collect();
        for posts in subsets(&all) {
            let bb = complete_bunkbed(n, &posts);
            let table = Enumerator::default().gap_table(&bb).unwrap();
            for p in &ps {
                for v in 0..n {
                    if eval_counts(table.same_layer(v, v), p) != Rational::one() {
                        return Err(format!("v=w={v} not surely connected, K_{n} H={posts:?}"));
                    }
                    for w in 0..n {
                        let gap = table.gap(v, w, p);
                        if (bb.is_post(w) || bb.is_post(v)) && !gap.is_zero() {
                            return Err(format!("K_{n} H={posts:?} v={v} w={w}: gap {gap}"));
                        }
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{count} (n, H, v, w, p) cases"))
}

/// 5. Paired Monte Carlo agrees with the exact gap within five standard errors.
fn mc_consistency() -> Verdict {
    let (v, w) = (0, 3);
    let mut worst = 100;
    for posts in subsets(&[0, 1, 2, 3]) {
        let bb = complete_bunkbed(4, &posts);
        let table = Enumerator::default().gap_table(&bb).unwrap();
        for (num, den) in [(1, 4), (1, 2), (3, 4)] {
            let p = PercolationParams::rational(num, den).unwrap();
            let exact = table.gap(v, w, &p).to_f64().unwrap();
            let within = (0..100u64)
                .filter(|&seed| {
                    let e = mc_gap_estimate(&bb, v, w, &p, 100_000, seed).unwrap();
                    (e.gap_mean - exact).abs() <= 5.0 * e.gap_std_error
                })
                .count();
            if within < 99 {
                return Err(format!(
                    "H={posts:?} p={num}/{den}: only {within}/100 seeds within 5 se"
                ));
            }
            worst = worst.min(within);
        }
    }
    Ok(format!(
        "48 (H, p) cases, worst {worst}/100 seeds within 5 se"
    ))
}

fn random_connected_graph(rng: &mut SplitMix64) -> BaseGraph {
    loop {
        let n = 2 + rng.below(6) as usize;
        let g = BaseGraph::random(n, 0.5, rng.next_u64()).unwrap();
        if g.edge_count() <= 10 && is_connected(&g) {
            return g;
        }
    }
}

fn is_connected(g: &BaseGraph) -> bool {
    let mut seen = vec![false; g.n_vertices()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(a, b) in g.edges() {
            for (s, t) in [(a, b), (b, a)] {
                if s == x && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// 6. Random orientations and p = 1/2 percolation agree exactly.
fn orientation_equivalence() -> Verdict {
    let enumerator = Enumerator::default();
    let mut cases: Vec<(BaseGraph, usize, usize)> = Vec::new();
    let named = [
        BaseGraph::complete(2).unwrap(),
        BaseGraph::complete(3).unwrap(),
        BaseGraph::complete(4).unwrap(),
        BaseGraph::path(3).unwrap(),
        BaseGraph::cycle(4).unwrap(),
    ];
    for g in named {
        for v in 0..g.n_vertices() {
            for w in 0..g.n_vertices() {
                cases.push((g.clone(), v, w));
            }
        }
    }
    let mut rng = SplitMix64::new(0x0A1E);
    for _ in 0..200 {
        let g = random_connected_graph(&mut rng);
        let v = rng.below(g.n_vertices() as u64) as usize;
        let w = rng.below(g.n_vertices() as u64) as usize;
        cases.push((g, v, w));
    }
    for (g, v, w) in &cases {
        let rep = check_equivalence_with(g, *v, *w, &enumerator).unwrap();
        if !rep.equal {
            return Err(format!("mismatch: {rep:?} on {:?}", g.edges()));
        }
    }
    Ok(format!("{} graph/pair cases, zero mismatches", cases.len()))
}

/// 7. Reports are byte-identical across reruns and worker counts.
fn determinism() -> Verdict {
    let commands: [&[&str]; 7] = [
        &[
            "verify-theorem",
            "--family",
            "complete",
            "--n",
            "4",
            "--all-posts",
            "--p-grid",
            "11",
        ],
        &[
            "verify-decomposition",
            "--n",
            "4",
            "--all-posts",
            "--p-grid",
            "5",
        ],
        &["orient-check", "--family", "wheel", "--n", "5"],
        &[
            "mc",
            "--n",
            "4",
            "--posts",
            "1",
            "--p-grid",
            "3",
            "--samples",
            "20000",
            "--seed",
            "9",
        ],
        &["search", "--family", "cycle", "--n", "4", "--p", "1/2"],
        &[
            "search",
            "--family",
            "random",
            "--n",
            "5",
            "--budget",
            "4",
            "--mode",
            "mc",
            "--samples",
            "2000",
            "--p",
            "1/2",
            "--seed",
            "3",
        ],
        &[
            "exact", "--family", "complete", "--n", "4", "--posts", "0,2", "--p-grid", "4",
            "--format", "csv",
        ],
    ];
    for cmd in commands {
        let mut outputs = Vec::new();
        for threads in ["1", "2", "8", "1"] {
            let mut argv = vec!["bunkbed"];
            argv.extend_from_slice(cmd);
            argv.extend(["--threads", threads]);
            let out = run_cli(argv);
            if out.code != 0 {
                return Err(format!("{cmd:?} exited {}: {}", out.code, out.stderr));
            }
            outputs.push(out.stdout);
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("{cmd:?} output differs across runs"));
        }
    }
    Ok(format!(
        "{} commands x 4 runs (1, 2, 8, 1 workers) identical",
        commands.len()
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("AC1 theorem reproduction", theorem_reproduction),
        ("AC2 decomposition identity", decomposition_identity),
        ("AC3 termwise nonnegativity", termwise_nonnegativity),
        ("AC4 reduction cases", reduction_cases),
        ("AC5 MC consistency", mc_consistency),
        ("AC6 orientation equivalence", orientation_equivalence),
        ("AC7 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS  {name}: {detail} ({secs:.1}s)"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name}: {reason} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
