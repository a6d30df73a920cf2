//! Flag parsing for the `dtqw` binary.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 verification
//! failure, 3 a peak sat on the edge of its search window.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiment::{
    cmd_scaling, cmd_search, cmd_spread, cmd_sweep, cmd_verify, format_real, peak_summary,
    scaling_summary, weight_grid, GraphKind, GraphSpec, RunSpec, WeightSource,
};
use crate::graph::Boundary;
use crate::walk::CoinFamily;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_WINDOW_TRUNCATED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "dtqw",
    version,
    about = "Discrete-time quantum walks with adjustable self-loops"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability at the lattice center of a walk started there.
    Spread(RunArgs),
    /// Target probability of one search run plus its first peak.
    Search(RunArgs),
    /// First peak against a grid of uniform loop weights.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0.0)]
        n_from: f64,
        #[arg(long, default_value_t = 2.0)]
        n_to: f64,
        #[arg(long, default_value_t = 0.01)]
        n_step: f64,
    },
    /// First peak against graph size, with a log-log fit of the peak step.
    Scaling {
        #[command(flatten)]
        run: RunArgs,
        /// Comma list (`10,12,14`) or inclusive range (`10..30:2`).
        #[arg(long)]
        sizes: String,
    },
    /// Kernel invariants and the multi-loop equivalence checks.
    Verify {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphArg {
    Complete,
    Lattice2d,
    Lattice3d,
    Edgelist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoinArg {
    Grover,
    GroverLoop,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Key=value file whose keys are long flag names; flags on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GraphArg::Lattice2d)]
    pub graph: GraphArg,
    /// Lattice sides (`20,20`) or the vertex count of a complete graph.
    #[arg(long)]
    pub dims: Option<String>,
    #[arg(long)]
    pub open_boundary: bool,
    /// Edge-list file for `--graph edgelist`.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CoinArg::GroverLoop)]
    pub coin: CoinArg,
    /// A number, or `degree-centrality`.
    #[arg(long, default_value = "0")]
    pub loop_weight: String,
    /// File with one weight per vertex; overrides --loop-weight.
    #[arg(long)]
    pub loop_weights: Option<PathBuf>,
    /// Marked vertex ids, comma separated.
    #[arg(long, default_value = "0")]
    pub target: String,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reserved; runs are deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_list(text: &str, what: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("{what}: {t:?} is not a non-negative integer")))
        })
        .collect()
}

/// Parses `a,b,c` or the inclusive range `a..b` / `a..b:step`.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    let Some((lo, rest)) = text.split_once("..") else {
        return parse_list(text, "sizes");
    };
    let (hi, step) = match rest.split_once(':') {
        Some((hi, step)) => (hi, step),
        None => (rest, "1"),
    };
    let nums = parse_list(&format!("{lo},{hi},{step}"), "sizes")?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if step == 0 || hi < lo {
        return Err(Error::Config(format!("empty size range {text:?}")));
    }
    Ok((lo..=hi).step_by(step).collect())
}

impl RunArgs {
    pub fn to_spec(&self) -> Result<RunSpec> {
        let kind = match self.graph {
            GraphArg::Complete => GraphKind::Complete,
            GraphArg::Lattice2d => GraphKind::Lattice2d,
            GraphArg::Lattice3d => GraphKind::Lattice3d,
            GraphArg::Edgelist => {
                let path = self
                    .edges
                    .as_ref()
                    .ok_or_else(|| Error::Config("--graph edgelist needs --edges <file>".into()))?;
                GraphKind::EdgeList(fs::read_to_string(path)?)
            }
        };
        let dims = match &self.dims {
            Some(d) => parse_list(d, "dims")?,
            None => Vec::new(),
        };
        let weights = match (&self.loop_weights, self.loop_weight.as_str()) {
            (Some(path), _) => WeightSource::parse_per_vertex(&fs::read_to_string(path)?)?,
            (None, "degree-centrality") => WeightSource::DegreeCentrality,
            (None, x) => WeightSource::Scalar(x.parse().map_err(|_| {
                Error::Config(format!(
                    "--loop-weight {x:?} is neither a number nor degree-centrality"
                ))
            })?),
        };
        Ok(RunSpec {
            graph: GraphSpec {
                kind,
                dims,
                boundary: if self.open_boundary {
                    Boundary::Open
                } else {
                    Boundary::Periodic
                },
            },
            coin: match self.coin {
                CoinArg::Grover => CoinFamily::StandardGrover,
                CoinArg::GroverLoop => CoinFamily::GroverLoop,
            },
            weights,
            targets: parse_list(&self.target, "target")?,
            steps: self.steps,
            seed: self.seed,
        })
    }
}

/// Expands `--config <file>` into flags placed right after the subcommand,
/// ahead of the user's own flags so that those take precedence.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut iter = args.into_iter();
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy().into_owned();
        if s == "--config" {
            path = iter.next();
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.into());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path)?;
    let mut injected = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected key=value, got {line:?}"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key == "open-boundary" {
            match value {
                "true" | "1" | "yes" => injected.push(OsString::from("--open-boundary")),
                "false" | "0" | "no" => {}
                v => {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: format!("open-boundary takes true/false, got {v:?}"),
                    })
                }
            }
        } else {
            injected.push(format!("--{key}").into());
            injected.push(value.into());
        }
    }
    // program name, subcommand, then config flags
    let split = rest.len().min(2);
    let mut out: Vec<OsString> = rest[..split].to_vec();
    out.extend(injected);
    out.extend_from_slice(&rest[split..]);
    Ok(out)
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout())),
    })
}

fn execute(cli: Cli) -> Result<i32> {
    let mut code = EXIT_OK;
    match cli.command {
        Command::Spread(run) => {
            let spec = run.to_spec()?;
            let mut out = open_out(&run.out)?;
            cmd_spread(&spec, &mut out)?;
            out.flush()?;
        }
        Command::Search(run) => {
            let spec = run.to_spec()?;
            let mut out = open_out(&run.out)?;
            let peak = cmd_search(&spec, &mut out)?;
            out.flush()?;
            eprintln!("{}", peak_summary(&peak));
            if peak.window_truncated {
                code = EXIT_WINDOW_TRUNCATED;
            }
        }
        Command::Sweep {
            run,
            n_from,
            n_to,
            n_step,
        } => {
            let spec = run.to_spec()?;
            let grid = weight_grid(n_from, n_to, n_step)?;
            let mut out = open_out(&run.out)?;
            let rows = cmd_sweep(&spec, &grid, &mut out)?;
            out.flush()?;
            if let Some((n, peak)) =
                rows.iter()
                    .reduce(|best, r| if r.1.p_peak > best.1.p_peak { r } else { best })
            {
                eprintln!("best_n={} {}", format_real(*n), peak_summary(peak));
            }
            if rows.iter().any(|(_, p)| p.window_truncated) {
                code = EXIT_WINDOW_TRUNCATED;
            }
        }
        Command::Scaling { run, sizes } => {
            let spec = run.to_spec()?;
            let sizes = parse_sizes(&sizes)?;
            let mut out = open_out(&run.out)?;
            let report = cmd_scaling(&spec, &sizes, &mut out)?;
            out.flush()?;
            eprintln!("{}", scaling_summary(&report));
            if report.any_truncated() {
                code = EXIT_WINDOW_TRUNCATED;
            }
        }
        Command::Verify { out } => {
            let mut out = open_out(&out)?;
            let report = cmd_verify(&mut out)?;
            out.flush()?;
            if !report.passed() {
                code = EXIT_VERIFY_FAILED;
            }
        }
    }
    Ok(code)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = match expand_config(args.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
