use std::path::PathBuf;

use bunkbed::{
    parse_probability, probability_grid, BaseGraph, Enumerator, Error, PercolationParams, Result,
    DEFAULT_CUTOFF,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "bunkbed",
    version,
    about = "Bond percolation experiments on bunkbed graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Exact,
    Mc,
    Gap,
    VerifyTheorem,
    VerifyDecomposition,
    OrientCheck,
    Search,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact connection polynomials of (v-, w-) and (v-, w+) and their values.
    Exact(RunArgs),
    /// Paired Monte Carlo estimates of both connection probabilities.
    Mc(RunArgs),
    /// The bunkbed gap P(v- <-> w-) - P(v- <-> w+), exact or Monte Carlo.
    Gap(RunArgs),
    /// Check the gap is nonnegative for every v, over post sets and a p-grid.
    VerifyTheorem(RunArgs),
    /// Check the component decomposition against full enumeration.
    VerifyDecomposition(RunArgs),
    /// Compare random-orientation and p = 1/2 percolation connection probabilities.
    OrientCheck(RunArgs),
    /// Scan a graph family for negative bunkbed gaps.
    Search(RunArgs),
}

impl Command {
    pub fn split(self) -> (CommandKind, RunArgs) {
        match self {
            Command::Exact(a) => (CommandKind::Exact, a),
            Command::Mc(a) => (CommandKind::Mc, a),
            Command::Gap(a) => (CommandKind::Gap, a),
            Command::VerifyTheorem(a) => (CommandKind::VerifyTheorem, a),
            Command::VerifyDecomposition(a) => (CommandKind::VerifyDecomposition, a),
            Command::OrientCheck(a) => (CommandKind::OrientCheck, a),
            Command::Search(a) => (CommandKind::Search, a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Complete,
    Wheel,
    Cycle,
    Random,
    File,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Complete => "complete",
            Family::Wheel => "wheel",
            Family::Cycle => "cycle",
            Family::Random => "random",
            Family::File => "file",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Graph family; `file` reads an edge list given by --file.
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Number of base vertices.
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge-list file (`vertices N` header, then `u v` lines).
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Comma-separated post vertices; the empty string means no posts.
    #[arg(long)]
    pub posts: Option<String>,
    /// Range over every post set.
    #[arg(long)]
    pub all_posts: bool,
    #[arg(long)]
    pub v: Option<usize>,
    #[arg(long)]
    pub w: Option<usize>,
    /// Edge-open probability, `a/b` or a decimal.
    #[arg(long)]
    pub p: Option<String>,
    /// Use the grid {0, 1/(K-1), ..., 1} of K probabilities.
    #[arg(long = "p-grid")]
    pub p_grid: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Largest number of random edges to enumerate exhaustively.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Maximum number of instances examined by `search`.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Edge probability of the `random` family.
    #[arg(long = "edge-prob", default_value = "1/2")]
    pub edge_prob: String,
    /// Worker threads (defaults to all cores); output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Where the base graph comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Complete(usize),
    Wheel(usize),
    Cycle(usize),
    Random { n: usize, edge_prob: f64 },
    File(PathBuf),
}

impl GraphSource {
    pub fn family(&self) -> Family {
        match self {
            GraphSource::Complete(_) => Family::Complete,
            GraphSource::Wheel(_) => Family::Wheel,
            GraphSource::Cycle(_) => Family::Cycle,
            GraphSource::Random { .. } => Family::Random,
            GraphSource::File(_) => Family::File,
        }
    }

    /// Builds the graph; `seed` only matters for the random family.
    pub fn build(&self, seed: u64) -> Result<BaseGraph> {
        match self {
            GraphSource::Complete(n) => BaseGraph::complete(*n),
            // `--n` counts all vertices, so the rim has n - 1 of them.
            GraphSource::Wheel(n) => BaseGraph::wheel(n.saturating_sub(1)),
            GraphSource::Cycle(n) => BaseGraph::cycle(*n),
            GraphSource::Random { n, edge_prob } => BaseGraph::random(*n, *edge_prob, seed),
            GraphSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
                BaseGraph::parse_edge_list(&text)
            }
        }
    }
}

/// How the post set is chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PostChoice {
    Given(Vec<usize>),
    All,
    Default,
}

/// A validated command line.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub command: CommandKind,
    pub source: GraphSource,
    pub posts: PostChoice,
    pub v: Option<usize>,
    pub w: Option<usize>,
    pub grid: Option<Vec<PercolationParams>>,
    pub samples: u64,
    pub seed: u64,
    pub mode: Mode,
    pub format: Format,
    pub enumerator: Enumerator,
    pub cutoff_raised: bool,
    pub budget: Option<usize>,
    pub threads: Option<usize>,
}

impl RunSpec {
    pub fn from_args(command: CommandKind, a: RunArgs) -> Result<Self> {
        let family = match (a.family, &a.file) {
            (None, Some(_)) | (Some(Family::File), Some(_)) => Family::File,
            (Some(Family::File), None) => return bad("--family file requires --file"),
            (Some(_), Some(_)) => return bad("give either --family or --file, not both"),
            (Some(f), None) => f,
            (None, None) => Family::Complete,
        };
        let need_n = || {
            a.n.ok_or_else(|| Error::Input("--n is required for this family".into()))
        };
        let source = match family {
            Family::Complete => GraphSource::Complete(need_n()?),
            Family::Wheel => GraphSource::Wheel(need_n()?),
            Family::Cycle => GraphSource::Cycle(need_n()?),
            Family::Random => {
                let p = parse_probability(&a.edge_prob)?;
                let edge_prob = num_traits::ToPrimitive::to_f64(&p).unwrap_or(0.5);
                GraphSource::Random {
                    n: need_n()?,
                    edge_prob,
                }
            }
            Family::File => GraphSource::File(a.file.clone().expect("checked above")),
        };
        let posts = match (&a.posts, a.all_posts) {
            (Some(_), true) => return bad("give either --posts or --all-posts, not both"),
            (Some(text), false) => PostChoice::Given(parse_posts(text)?),
            (None, true) => PostChoice::All,
            (None, false) => PostChoice::Default,
        };
        let grid = match (&a.p, a.p_grid) {
            (Some(_), Some(_)) => return bad("give either --p or --p-grid, not both"),
            (Some(p), None) => Some(vec![PercolationParams::new(parse_probability(p)?)?]),
            (None, Some(k)) => {
                if k < 2 {
                    return bad("--p-grid needs at least 2 points");
                }
                Some(
                    probability_grid(k)?
                        .into_iter()
                        .map(PercolationParams::new)
                        .collect::<Result<_>>()?,
                )
            }
            (None, None) => None,
        };
        let uses_mc = command == CommandKind::Mc || a.mode == Mode::Mc;
        if uses_mc && a.samples < 2 {
            return bad("--samples must be at least 2");
        }
        let enumerator = Enumerator::with_cutoff(a.cutoff.unwrap_or(DEFAULT_CUTOFF))?;
        if a.budget == Some(0) {
            return bad("--budget must be at least 1");
        }
        if a.threads == Some(0) {
            return bad("--threads must be at least 1");
        }
        Ok(Self {
            command,
            source,
            posts,
            v: a.v,
            w: a.w,
            grid,
            samples: a.samples,
            seed: a.seed,
            mode: a.mode,
            format: a.format,
            enumerator,
            cutoff_raised: a.cutoff.is_some_and(|c| c > DEFAULT_CUTOFF),
            budget: a.budget,
            threads: a.threads,
        })
    }

    /// The requested probabilities, or `default` points when none were given.
    pub fn grid_or(&self, default: usize) -> Vec<PercolationParams> {
        self.grid.clone().unwrap_or_else(|| {
            probability_grid(default)
                .expect("valid grid")
                .into_iter()
                .map(|p| PercolationParams::new(p).expect("grid point in [0,1]"))
                .collect()
        })
    }
}

fn bad<T>(msg: &str) -> Result<T> {
    Err(Error::Input(msg.to_string()))
}

/// Parses `"i,j,k"`; the empty string is the empty set.
pub fn parse_posts(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let mut posts = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Input(format!("bad post vertex `{}`", t.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    posts.sort_unstable();
    posts.dedup();
    Ok(posts)
}
