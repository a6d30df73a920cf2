use std::fs;
use std::path::Path;
use std::process::Command;

use dtqw::cli::{run, EXIT_OK, EXIT_USAGE, EXIT_WINDOW_TRUNCATED};
use dtqw::graph::{ArcTable, Graph};
use dtqw::verify::verify_with;
use dtqw::walk::{CoinConfig, Evolution, WalkKernel, WalkerState};
use dtqw::Result;
use tempfile::TempDir;

fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let out = dir.join(name);
    let mut argv = vec!["dtqw"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let code = run(argv);
    (code, fs::read_to_string(&out).unwrap_or_default())
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn spread_on_the_large_torus() {
    let dir = TempDir::new().unwrap();
    let (code, csv) = run_to_file(
        dir.path(),
        "spread.csv",
        &[
            "spread",
            "--dims",
            "101,101",
            "--loop-weight",
            "1",
            "--steps",
            "50",
        ],
    );
    assert_eq!(code, EXIT_OK);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("step,probability"));
    assert_eq!(lines.next(), Some("0,1.0000000000000000"));
    assert_eq!(rows(&csv).len(), 51);
}

#[test]
fn sweep_writes_every_grid_point_in_order() {
    let dir = TempDir::new().unwrap();
    let (code, csv) = run_to_file(dir.path(), "sweep.csv", &["sweep", "--dims", "20,20"]);
    assert_eq!(code, EXIT_OK);
    assert!(csv.starts_with("n,peak_probability,peak_step\n"));
    let ns: Vec<f64> = rows(&csv).iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ns.len(), 201);
    assert!(ns.windows(2).all(|w| w[1] > w[0]));
    assert!((ns[200] - 2.0).abs() < 1e-12);
}

#[test]
fn search_reports_the_first_peak() {
    let dir = TempDir::new().unwrap();
    let (code, csv) = run_to_file(
        dir.path(),
        "search.csv",
        &["search", "--dims", "20,20", "--loop-weight", "0.01"],
    );
    assert_eq!(code, EXIT_OK);
    let r = rows(&csv);
    assert_eq!(r.len(), 201);
    let p45: f64 = r[45][1].parse().unwrap();
    assert!((p45 - 0.972).abs() <= 0.01);
}

#[test]
fn scaling_writes_one_row_per_size() {
    let dir = TempDir::new().unwrap();
    let (code, csv) = run_to_file(
        dir.path(),
        "scaling.csv",
        &[
            "scaling",
            "--sizes",
            "10..14:2",
            "--loop-weight",
            "degree-centrality",
        ],
    );
    assert_eq!(code, EXIT_OK);
    let r = rows(&csv);
    let ns: Vec<&str> = r.iter().map(|x| x[0].as_str()).collect();
    assert_eq!(ns, ["100", "144", "196"]);
}

#[test]
fn truncated_window_sets_the_exit_code() {
    let dir = TempDir::new().unwrap();
    let (code, _) = run_to_file(
        dir.path(),
        "short.csv",
        &["search", "--loop-weight", "0.01", "--steps", "5"],
    );
    assert_eq!(code, EXIT_WINDOW_TRUNCATED);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(["dtqw", "search", "--graph", "petersen"]), EXIT_USAGE);
    assert_eq!(run(["dtqw", "search", "--loop-weight", "lots"]), EXIT_USAGE);
    assert_eq!(run(["dtqw", "search", "--dims", "20,20,20,20"]), EXIT_USAGE);
    assert_eq!(
        run(["dtqw", "search", "--coin", "grover", "--loop-weight", "1"]),
        EXIT_USAGE
    );
    assert_eq!(run(["dtqw", "search", "--graph", "edgelist"]), EXIT_USAGE);
    assert_eq!(run(["dtqw", "frobnicate"]), EXIT_USAGE);
}

#[test]
fn config_file_with_command_line_override() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("run.cfg");
    fs::write(
        &config,
        "# small 2D run\ngraph = lattice2d\ndims = 20,20\nloop-weight = 1\nsteps = 10\n",
    )
    .unwrap();
    let cfg = config.to_str().unwrap();
    let (_, from_config) = run_to_file(dir.path(), "a.csv", &["search", "--config", cfg]);
    let (_, overridden) = run_to_file(
        dir.path(),
        "b.csv",
        &["search", "--config", cfg, "--loop-weight", "0.01"],
    );
    let (_, direct) = run_to_file(
        dir.path(),
        "c.csv",
        &[
            "search",
            "--dims",
            "20,20",
            "--loop-weight",
            "0.01",
            "--steps",
            "10",
        ],
    );
    assert_eq!(rows(&from_config).len(), 11);
    assert_ne!(from_config, overridden);
    assert_eq!(overridden, direct);
}

#[test]
fn edge_list_graphs_run_end_to_end() {
    let dir = TempDir::new().unwrap();
    let edges = dir.path().join("cycle.txt");
    let text: String = (0..12).map(|i| format!("{i} {}\n", (i + 1) % 12)).collect();
    fs::write(&edges, format!("# twelve-cycle\n{text}")).unwrap();
    let (code, csv) = run_to_file(
        dir.path(),
        "cycle.csv",
        &[
            "search",
            "--graph",
            "edgelist",
            "--edges",
            edges.to_str().unwrap(),
            "--loop-weight",
            "0.5",
            "--steps",
            "30",
        ],
    );
    assert_ne!(code, EXIT_USAGE);
    assert_eq!(rows(&csv).len(), 31);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let args = [
        "sweep", "--graph", "complete", "--dims", "100", "--n-step", "0.1",
    ];
    let (_, a) = run_to_file(dir.path(), "a.csv", &args);
    let (_, b) = run_to_file(dir.path(), "b.csv", &args);
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn binary_verify_report() {
    let out = Command::new(env!("CARGO_BIN_EXE_dtqw"))
        .arg("verify")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let (summary, checks) = lines.split_last().unwrap();
    assert_eq!(*summary, format!("{0} of {0} checks passed", checks.len()));
    for line in checks {
        assert!(line.starts_with("PASS "), "{line}");
        assert!(line.contains(" max_deviation=") && line.contains(" tolerance="));
    }
    assert!(checks
        .iter()
        .any(|l| l.contains("equivalence-K10-n3-marked")));
}

#[test]
fn binary_reports_search_summary_on_stderr() {
    let out = Command::new(env!("CARGO_BIN_EXE_dtqw"))
        .args(["search", "--loop-weight", "0.01"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("peak_step=45"), "{stderr}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.starts_with("step")).count(), 1);
}

/// Flip-flop shift with the sign of every arc pointing to a lower vertex
/// flipped: unitary, but not the walk that real loops produce.
struct SignFlippedShift(Evolution);

impl WalkKernel for SignFlippedShift {
    fn arc_table(&self) -> &ArcTable {
        self.0.arc_table()
    }

    fn apply_coin(&self, state: &mut WalkerState) -> Result<()> {
        self.0.apply_coin(state)
    }

    fn apply_shift(&self, state: &mut WalkerState) -> Result<()> {
        self.0.apply_shift(state)?;
        let table = self.0.arc_table();
        for (a, arc) in state.amplitudes_mut().iter_mut().zip(table.arcs()) {
            if arc.source > arc.direction {
                *a = -*a;
            }
        }
        Ok(())
    }
}

#[test]
fn verify_catches_a_unitary_but_wrong_shift() {
    let factory = |g: &Graph, cfg: CoinConfig| -> Result<Box<dyn WalkKernel>> {
        Ok(Box::new(SignFlippedShift(Evolution::new(g, cfg)?)))
    };
    let report = verify_with(&factory).unwrap();
    assert!(report
        .check("unitarity-drift-10000-steps")
        .unwrap()
        .passed());
    assert!(report.check("marginal-normalisation").unwrap().passed());
    assert!(!report.passed());
    let failed_equivalence = report
        .checks
        .iter()
        .filter(|c| c.name.starts_with("equivalence-") && !c.passed())
        .count();
    assert!(failed_equivalence > 0);
    assert!(!report
        .check("kernel-matches-dense-loop-free")
        .unwrap()
        .passed());
}
