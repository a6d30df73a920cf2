//! Run descriptions and the CSV-producing experiment commands.
//!
//! Every CSV has a single header line followed by unquoted decimal fields;
//! reals carry 17 significant digits so they parse back to the same double.

use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{build_complete, build_lattice, load_edge_list, Boundary, Graph};
use crate::search::{
    default_window, degree_centrality_weights, find_first_peak, run_search, scaling_study,
    weight_sweep, GraphFamily, PeakResult, ScalingReport, WeightRule, WindowRule,
};
use crate::walk::{spreading_probe, CoinConfig, CoinFamily};

pub use crate::verify::{cmd_verify, verify_with, Check, VerifyReport};

#[derive(Debug, Clone, PartialEq)]
pub enum GraphKind {
    Complete,
    Lattice2d,
    Lattice3d,
    /// Edge-list document text.
    EdgeList(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    pub kind: GraphKind,
    /// Side lengths for lattices, `[N]` for complete graphs; empty selects the
    /// family default.
    pub dims: Vec<usize>,
    pub boundary: Boundary,
}

impl GraphSpec {
    pub fn lattice2d(side: usize) -> Self {
        GraphSpec {
            kind: GraphKind::Lattice2d,
            dims: vec![side, side],
            boundary: Boundary::Periodic,
        }
    }

    pub fn complete(n: usize) -> Self {
        GraphSpec {
            kind: GraphKind::Complete,
            dims: vec![n],
            boundary: Boundary::Periodic,
        }
    }

    pub fn build(&self, with_loop: bool) -> Result<Graph> {
        match &self.kind {
            GraphKind::Complete => {
                let n = match self.dims.as_slice() {
                    [] => 400,
                    [n] => *n,
                    d => {
                        return Err(Error::Config(format!(
                            "complete graph takes one size, got {d:?}"
                        )))
                    }
                };
                build_complete(n, with_loop)
            }
            GraphKind::Lattice2d => {
                let dims = if self.dims.is_empty() {
                    vec![20, 20]
                } else {
                    self.dims.clone()
                };
                if dims.len() != 2 {
                    return Err(Error::UnsupportedDimension(dims.len()));
                }
                build_lattice(&dims, self.boundary, with_loop)
            }
            GraphKind::Lattice3d => {
                let dims = if self.dims.is_empty() {
                    vec![5, 5, 5]
                } else {
                    self.dims.clone()
                };
                if dims.len() != 3 {
                    return Err(Error::UnsupportedDimension(dims.len()));
                }
                build_lattice(&dims, self.boundary, with_loop)
            }
            GraphKind::EdgeList(text) => {
                let g = load_edge_list(text)?;
                if with_loop {
                    g.with_loops(true)
                } else {
                    Ok(g)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSource {
    Scalar(f64),
    DegreeCentrality,
    PerVertex(Vec<f64>),
}

impl WeightSource {
    /// Reads one weight per vertex, whitespace separated; `#` starts a comment.
    pub fn parse_per_vertex(text: &str) -> Result<Self> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("");
            for tok in body.split_whitespace() {
                let w: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("loop weight {tok:?} is not a number"),
                })?;
                out.push(w);
            }
        }
        Ok(WeightSource::PerVertex(out))
    }

    fn is_zero(&self) -> bool {
        match self {
            WeightSource::Scalar(w) => *w == 0.0,
            WeightSource::DegreeCentrality => false,
            WeightSource::PerVertex(w) => w.iter().all(|&x| x == 0.0),
        }
    }

    fn weights(&self, g: &Graph) -> Result<Vec<f64>> {
        let n = g.vertex_count();
        match self {
            WeightSource::Scalar(w) => Ok(vec![*w; n]),
            WeightSource::DegreeCentrality => Ok(degree_centrality_weights(g)),
            WeightSource::PerVertex(w) if w.len() == n => Ok(w.clone()),
            WeightSource::PerVertex(w) => Err(Error::Config(format!(
                "{} per-vertex weights for {} vertices",
                w.len(),
                n
            ))),
        }
    }
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub graph: GraphSpec,
    pub coin: CoinFamily,
    pub weights: WeightSource,
    pub targets: Vec<usize>,
    /// Step count; `None` selects the command default.
    pub steps: Option<usize>,
    /// Reserved; every command is deterministic.
    pub seed: u64,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            graph: GraphSpec::lattice2d(20),
            coin: CoinFamily::GroverLoop,
            weights: WeightSource::Scalar(0.0),
            targets: vec![0],
            steps: None,
            seed: 0,
        }
    }
}

impl RunSpec {
    /// The graph (with a loop slot on every vertex for the Grover-loop coin)
    /// and the unmarked coin.
    pub fn build(&self) -> Result<(Graph, CoinConfig)> {
        match self.coin {
            CoinFamily::GroverLoop => {
                let g = self.graph.build(true)?;
                let cfg = CoinConfig::grover_loop(self.weights.weights(&g)?);
                Ok((g, cfg))
            }
            CoinFamily::StandardGrover => {
                if !self.weights.is_zero() {
                    return Err(Error::Config(
                        "loop weights need the grover-loop coin".into(),
                    ));
                }
                Ok((self.graph.build(false)?, CoinConfig::standard()))
            }
        }
    }

    fn single_target(&self) -> Result<usize> {
        match self.targets.as_slice() {
            [t] => Ok(*t),
            t => Err(Error::Config(format!(
                "expected exactly one target, got {t:?}"
            ))),
        }
    }

    fn scalar_weight(&self) -> Result<f64> {
        match self.weights {
            WeightSource::Scalar(w) => Ok(w),
            _ => Err(Error::Config(
                "this command takes a single scalar loop weight".into(),
            )),
        }
    }
}

/// Formats a double with 17 significant digits in plain decimal notation.
pub fn format_real(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (16 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

fn write_trace(out: &mut dyn Write, values: &[f64]) -> Result<()> {
    writeln!(out, "step,probability")?;
    for (t, p) in values.iter().enumerate() {
        writeln!(out, "{t},{}", format_real(*p))?;
    }
    Ok(())
}

/// One-line peak summary, e.g. `peak_probability=0.23 peak_step=28`.
pub fn peak_summary(peak: &PeakResult) -> String {
    let mut s = format!(
        "peak_probability={} peak_step={}",
        format_real(peak.p_peak),
        peak.t_peak
    );
    if peak.window_truncated {
        s.push_str(" window_truncated");
    }
    s
}

/// Center-vertex probability trace on an odd-sided lattice; 200 steps by
/// default.
pub fn cmd_spread(spec: &RunSpec, out: &mut dyn Write) -> Result<Vec<f64>> {
    let n = spec.scalar_weight()?;
    if spec.coin == CoinFamily::StandardGrover && n != 0.0 {
        return Err(Error::Config(
            "loop weights need the grover-loop coin".into(),
        ));
    }
    let g = spec.graph.build(spec.coin == CoinFamily::GroverLoop)?;
    let trace = spreading_probe(&g, n, spec.steps.unwrap_or(200))?;
    write_trace(out, &trace)?;
    Ok(trace)
}

/// Target-probability trace of one search run, window `10 ceil(sqrt(N))` by
/// default.
pub fn cmd_search(spec: &RunSpec, out: &mut dyn Write) -> Result<PeakResult> {
    let (g, cfg) = spec.build()?;
    let t_max = spec
        .steps
        .unwrap_or_else(|| default_window(g.vertex_count()));
    let trace = run_search(&g, &cfg.with_marked(spec.targets.iter().copied()), t_max)?;
    write_trace(out, trace.values())?;
    Ok(find_first_peak(&trace))
}

/// Inclusive grid `from, from + step, ...` up to `to`.
pub fn weight_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("sweep step {step} must be positive")));
    }
    if !(from.is_finite() && to.is_finite() && to >= from) {
        return Err(Error::Config(format!("sweep range {from}..{to} is empty")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| from + i as f64 * step).collect())
}

/// `n,peak_probability,peak_step` per grid point, ascending in `n`.
pub fn cmd_sweep(
    spec: &RunSpec,
    grid: &[f64],
    out: &mut dyn Write,
) -> Result<Vec<(f64, PeakResult)>> {
    if spec.coin != CoinFamily::GroverLoop {
        return Err(Error::Config(
            "weight sweeps use the grover-loop coin".into(),
        ));
    }
    let g = spec.graph.build(true)?;
    let target = spec.single_target()?;
    let t_max = spec
        .steps
        .unwrap_or_else(|| default_window(g.vertex_count()));
    let rows = weight_sweep(&g, target, grid, t_max)?;
    writeln!(out, "n,peak_probability,peak_step")?;
    for (n, peak) in &rows {
        writeln!(
            out,
            "{},{},{}",
            format_real(*n),
            format_real(peak.p_peak),
            peak.t_peak
        )?;
    }
    Ok(rows)
}

/// `N,peak_probability,peak_step` per size, searching vertex 0.
pub fn cmd_scaling(spec: &RunSpec, sizes: &[usize], out: &mut dyn Write) -> Result<ScalingReport> {
    let family = match spec.graph.kind {
        GraphKind::Complete => GraphFamily::Complete,
        GraphKind::Lattice2d => GraphFamily::Lattice2d,
        GraphKind::Lattice3d => GraphFamily::Lattice3d,
        GraphKind::EdgeList(_) => {
            return Err(Error::Config(
                "scaling runs need a graph family, not an edge list".into(),
            ))
        }
    };
    let rule = match (&spec.coin, &spec.weights) {
        (_, w) if w.is_zero() => WeightRule::Zero,
        (CoinFamily::StandardGrover, _) => {
            return Err(Error::Config(
                "loop weights need the grover-loop coin".into(),
            ))
        }
        (_, WeightSource::DegreeCentrality) => WeightRule::DegreeCentrality,
        (_, WeightSource::Scalar(n)) => WeightRule::Fixed(*n),
        (_, WeightSource::PerVertex(_)) => {
            return Err(Error::Config(
                "per-vertex weights cannot follow a size sweep".into(),
            ))
        }
    };
    let window = spec.steps.map_or(WindowRule::Auto, WindowRule::Fixed);
    let report = scaling_study(family, sizes, rule, window)?;
    writeln!(out, "N,peak_probability,peak_step")?;
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{}",
            row.vertex_count,
            format_real(row.peak.p_peak),
            row.peak.t_peak
        )?;
    }
    Ok(report)
}

/// Summary line for a scaling report.
pub fn scaling_summary(report: &ScalingReport) -> String {
    let mut s = match report.exponent {
        Some(e) => format!("exponent={}", format_real(e)),
        None => "exponent=undefined".to_string(),
    };
    let truncated: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.peak.window_truncated)
        .map(|r| r.vertex_count.to_string())
        .collect();
    if !truncated.is_empty() {
        s.push_str(&format!(" window_truncated={}", truncated.join(";")));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv(f: impl FnOnce(&mut Vec<u8>)) -> String {
        let mut buf = Vec::new();
        f(&mut buf);
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn real_formatting_round_trips() {
        for v in [
            0.1,
            0.0025,
            1.0,
            0.23644059902343934,
            1e-20,
            123456.789,
            2.0f64.sqrt(),
        ] {
            let s = format_real(v);
            assert!(!s.contains('e'), "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(1.0), "1.0000000000000000");
    }

    #[test]
    fn grid_counts() {
        assert_eq!(weight_grid(0.0, 2.0, 0.01).unwrap().len(), 201);
        assert_eq!(weight_grid(0.0, 0.0, 0.01).unwrap(), vec![0.0]);
        let g = weight_grid(0.5, 1.0, 0.25).unwrap();
        assert_eq!(g, vec![0.5, 0.75, 1.0]);
        assert!(weight_grid(0.0, 1.0, 0.0).is_err());
        assert!(weight_grid(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn per_vertex_weights_file() {
        let w = WeightSource::parse_per_vertex("0.1 0.2\n# comment\n0.3 # tail\n").unwrap();
        assert_eq!(w, WeightSource::PerVertex(vec![0.1, 0.2, 0.3]));
        assert!(matches!(
            WeightSource::parse_per_vertex("0.1\nabc"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn spec_consistency() {
        let spec = RunSpec {
            coin: CoinFamily::StandardGrover,
            weights: WeightSource::Scalar(0.5),
            ..RunSpec::default()
        };
        assert!(matches!(spec.build(), Err(Error::Config(_))));

        let spec = RunSpec {
            weights: WeightSource::PerVertex(vec![0.1; 3]),
            ..RunSpec::default()
        };
        assert!(spec.build().is_err());

        let spec = RunSpec {
            graph: GraphSpec {
                kind: GraphKind::EdgeList("0 1\n1 2\n2 0".into()),
                dims: vec![],
                boundary: Boundary::Periodic,
            },
            weights: WeightSource::DegreeCentrality,
            ..RunSpec::default()
        };
        let (g, cfg) = spec.build().unwrap();
        assert!(g.has_loop(1));
        assert_eq!(cfg.loop_weights, vec![1.0; 3]);
    }

    #[test]
    fn spread_csv_shape() {
        let spec = RunSpec {
            graph: GraphSpec {
                kind: GraphKind::Lattice2d,
                dims: vec![15, 15],
                boundary: Boundary::Periodic,
            },
            weights: WeightSource::Scalar(1.0),
            steps: Some(6),
            ..RunSpec::default()
        };
        let text = csv(|b| {
            cmd_spread(&spec, b).unwrap();
        });
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 8);
        assert_eq!(lines[0], "step,probability");
        assert_eq!(lines[1], "0,1.0000000000000000");
    }

    #[test]
    fn search_is_deterministic() {
        let spec = RunSpec {
            graph: GraphSpec::lattice2d(8),
            weights: WeightSource::Scalar(0.05),
            steps: Some(40),
            ..RunSpec::default()
        };
        let a = csv(|b| {
            cmd_search(&spec, b).unwrap();
        });
        let b = csv(|b| {
            cmd_search(&spec, b).unwrap();
        });
        assert_eq!(a, b);
        assert_eq!(a.lines().filter(|l| l.starts_with("step")).count(), 1);
    }

    #[test]
    fn sweep_rows_ascend() {
        let spec = RunSpec {
            graph: GraphSpec::lattice2d(6),
            ..RunSpec::default()
        };
        let grid = weight_grid(0.0, 0.3, 0.1).unwrap();
        let text = csv(|b| {
            cmd_sweep(&spec, &grid, b).unwrap();
        });
        let ns: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(ns.len(), 4);
        assert!(ns.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn scaling_rejects_edge_lists() {
        let spec = RunSpec {
            graph: GraphSpec {
                kind: GraphKind::EdgeList("0 1".into()),
                dims: vec![],
                boundary: Boundary::Periodic,
            },
            ..RunSpec::default()
        };
        assert!(cmd_scaling(&spec, &[3, 4], &mut Vec::new()).is_err());
    }
}
