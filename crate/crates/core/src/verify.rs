//! Self-check suite behind the `verify` command: kernel invariants and the
//! weighted-loop / multi-loop equivalence against the dense oracle.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::{build_complete, build_lattice, ArcTable, Boundary, Graph};
use crate::oracle::{
    build_dense_step, equivalence_check_with, random_state, KernelFactory, MultiLoopGraph,
};
use crate::walk::{position_distribution, CoinConfig, Evolution, WalkKernel, WalkerState};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            deviation,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} max_deviation={:.3e} tolerance={:.0e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.deviation,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn default_factory(g: &Graph, cfg: CoinConfig) -> Result<Box<dyn WalkKernel>> {
    Ok(Box::new(Evolution::new(g, cfg)?))
}

/// Runs every check with the blocked kernel and writes one line per check.
pub fn cmd_verify(out: &mut dyn Write) -> Result<VerifyReport> {
    let report = verify_with(&default_factory)?;
    for c in &report.checks {
        writeln!(out, "{c}")?;
    }
    writeln!(
        out,
        "{} of {} checks passed",
        report.checks.iter().filter(|c| c.passed()).count(),
        report.checks.len()
    )?;
    Ok(report)
}

/// Connected random graph: a spanning path plus extra edges.
pub fn random_graph(rng: &mut impl Rng, max_vertices: usize) -> Graph {
    let n = rng.gen_range(3..=max_vertices.max(3));
    let p = rng.gen_range(0.05..0.5);
    let mut nb = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if v == u + 1 || rng.gen_bool(p) {
                nb[u].push(v);
                nb[v].push(u);
            }
        }
    }
    Graph::new(nb, vec![false; n]).expect("spanning path keeps every vertex connected")
}

fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..2.0)).collect()
}

/// Runs the suite with kernels built by `factory`.
pub fn verify_with(factory: &KernelFactory<'_>) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0d71_2016);
    let mut checks = Vec::new();

    // Long run: norm drift and marginal normalisation.
    let torus = build_lattice(&[10, 10], Boundary::Periodic, true)?;
    let weights = random_weights(&mut rng, torus.vertex_count());
    let kernel = factory(&torus, CoinConfig::grover_loop(weights.clone()))?;
    let mut state = random_state(kernel.arc_table().len(), 11);
    let (mut drift, mut marginal) = (0.0f64, 0.0f64);
    {
        let table = kernel.arc_table();
        kernel.run_with(&mut state, 10_000, &mut |t, s| {
            drift = drift.max((s.norm() - 1.0).abs());
            if t % 100 == 0 {
                let total: f64 = position_distribution(s, table).iter().sum();
                marginal = marginal.max((total - 1.0).abs());
            }
        })?;
    }
    checks.push(Check::new("unitarity-drift-10000-steps", drift, 1e-10));
    checks.push(Check::new("marginal-normalisation", marginal, 1e-10));

    // Involutions.
    let kernel = factory(&torus, CoinConfig::grover_loop(weights))?;
    let init = random_state(kernel.arc_table().len(), 12);
    let mut s = init.clone();
    kernel.apply_coin(&mut s)?;
    kernel.apply_coin(&mut s)?;
    checks.push(Check::new("coin-involution", s.max_abs_diff(&init), 1e-12));
    let mut s = init.clone();
    kernel.apply_shift(&mut s)?;
    kernel.apply_shift(&mut s)?;
    checks.push(Check::new("shift-involution", s.max_abs_diff(&init), 1e-12));

    // Grover-loop with zero weight against the standard coin.
    let mut worst = 0.0f64;
    for i in 0..20 {
        let g = random_graph(&mut rng, 50);
        let marked: Vec<usize> = if i % 2 == 0 { vec![] } else { vec![0] };
        worst = worst.max(zero_weight_deviation(&g, &marked, factory, 100 + i)?);
    }
    checks.push(Check::new("zero-weight-equals-grover", worst, 1e-15));

    // Equivalence instances against the dense oracle.
    let instances = [
        (
            "torus5x5",
            build_lattice(&[5, 5], Boundary::Periodic, false)?,
        ),
        ("K10", build_complete(10, false)?),
    ];
    let mut unitarity = 0.0f64;
    for (_, g) in &instances {
        for loops in 0..=3 {
            for marked in [BTreeSet::new(), BTreeSet::from([0])] {
                let m = MultiLoopGraph::uniform(g, loops)?;
                unitarity = unitarity.max(build_dense_step(&m, &marked)?.unitarity_error());
            }
        }
    }
    checks.push(Check::new("dense-oracle-unitarity", unitarity, 1e-12));

    let mut loop_free = 0.0f64;
    let mut loop_free_graphs: Vec<Graph> = instances.iter().map(|(_, g)| g.clone()).collect();
    while loop_free_graphs.len() < 5 {
        let g = random_graph(&mut rng, 30);
        if ArcTable::new(&g).len() <= 200 {
            loop_free_graphs.push(g);
        }
    }
    for g in &loop_free_graphs {
        for marked in [BTreeSet::new(), BTreeSet::from([1])] {
            let r = equivalence_check_with(g, 0, &marked, 50, factory)?;
            loop_free = loop_free.max(r.max_deviation());
        }
    }
    checks.push(Check::new(
        "kernel-matches-dense-loop-free",
        loop_free,
        1e-12,
    ));

    for (name, g) in &instances {
        for loops in 1..=3 {
            for (tag, marked) in [
                ("unmarked", BTreeSet::new()),
                ("marked", BTreeSet::from([0])),
            ] {
                let r = equivalence_check_with(g, loops, &marked, 100, factory)?;
                checks.push(Check::new(
                    format!("equivalence-{name}-n{loops}-{tag}"),
                    r.max_deviation(),
                    1e-10,
                ));
            }
        }
    }

    Ok(VerifyReport { checks })
}

/// Applies the Grover-loop coin with zero weights on `g` plus loop slots and
/// the standard coin on loop-free `g`; returns the largest disagreement,
/// counting any amplitude that appears on a loop arc.
fn zero_weight_deviation(
    g: &Graph,
    marked: &[usize],
    factory: &KernelFactory<'_>,
    seed: u64,
) -> Result<f64> {
    let looped = g.with_loops(true)?;
    let plain = g.without_loops()?;
    let n = g.vertex_count();
    let a = factory(
        &looped,
        CoinConfig::grover_loop_uniform(n, 0.0).with_marked(marked.iter().copied()),
    )?;
    let b = factory(
        &plain,
        CoinConfig::standard().with_marked(marked.iter().copied()),
    )?;
    let (ta, tb) = (a.arc_table().clone(), b.arc_table().clone());

    let base = random_state(tb.len(), seed);
    let mut embedded = vec![Complex64::new(0.0, 0.0); ta.len()];
    for (id, arc) in tb.arcs().iter().enumerate() {
        embedded[ta.index_of(arc.source, arc.direction).unwrap()] = base.amplitudes()[id];
    }
    let mut sa = WalkerState::new(embedded);
    let mut sb = base;
    let mut worst = 0.0f64;
    for _ in 0..3 {
        a.step(&mut sa)?;
        b.step(&mut sb)?;
        for (id, arc) in ta.arcs().iter().enumerate() {
            let x = sa.amplitudes()[id];
            let want = if arc.is_loop() {
                Complex64::new(0.0, 0.0)
            } else {
                sb.amplitudes()[tb.index_of(arc.source, arc.direction).unwrap()]
            };
            worst = worst.max((x - want).norm());
        }
    }
    Ok(worst)
}
