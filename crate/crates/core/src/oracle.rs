//! Brute-force reference walk on graphs carrying any integer number of real
//! self-loops per vertex.
//!
//! Nothing here goes through [`Evolution`]'s weighted kernel or the
//! [`ArcTable`] reversal map: the multi-loop basis, its shift and its Grover
//! blocks are rebuilt from the graph, and [`DenseUnitary`] materialises the
//! whole step matrix. Agreement with the kernel is therefore evidence rather
//! than a restatement of the same code path.

use std::collections::{BTreeSet, HashMap};
use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{ArcTable, Graph};
use crate::walk::{
    center_start_state, position_distribution, CoinConfig, Evolution, WalkKernel, WalkerState,
};

/// Largest basis [`build_dense_step`] accepts.
pub const DENSE_ARC_CAP: usize = 5000;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A loop-free base graph plus `loop_count[j]` real self-loops at vertex `j`.
///
/// Basis order per vertex: neighbor directions ascending, then loop copies
/// `1..=loop_count[j]`.
#[derive(Debug, Clone)]
pub struct MultiLoopGraph {
    base: Graph,
    loop_count: Vec<usize>,
    offsets: Vec<usize>,
}

impl MultiLoopGraph {
    pub fn new(base: &Graph, loop_count: Vec<usize>) -> Result<Self> {
        if loop_count.len() != base.vertex_count() {
            return Err(Error::Contract(format!(
                "{} loop counts for {} vertices",
                loop_count.len(),
                base.vertex_count()
            )));
        }
        let base = base.without_loops().map_err(|_| {
            Error::Contract("a loop-free vertex with a zero loop count would be isolated".into())
        })?;
        let mut offsets = vec![0];
        for j in 0..base.vertex_count() {
            let next = offsets[j] + base.degree(j) + loop_count[j];
            offsets.push(next);
        }
        Ok(MultiLoopGraph {
            base,
            loop_count,
            offsets,
        })
    }

    pub fn uniform(base: &Graph, loops: usize) -> Result<Self> {
        MultiLoopGraph::new(base, vec![loops; base.vertex_count()])
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn loop_count(&self, j: usize) -> usize {
        self.loop_count[j]
    }

    pub fn vertex_count(&self) -> usize {
        self.base.vertex_count()
    }

    /// Total basis dimension: `sum_j Deg(j) + loop_count(j)`.
    pub fn arc_count(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn vertex_slice(&self, j: usize) -> Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }

    /// Index of the `i`-th loop copy (0-based) at `j`.
    pub fn loop_index(&self, j: usize, i: usize) -> usize {
        assert!(i < self.loop_count[j]);
        self.offsets[j] + self.base.degree(j) + i
    }

    /// Destination of every basis vector under the flip-flop shift.
    fn shift_map(&self) -> Vec<usize> {
        let mut index = HashMap::new();
        for j in 0..self.vertex_count() {
            for (pos, &k) in self.base.neighbors(j).iter().enumerate() {
                index.insert((j, k), self.offsets[j] + pos);
            }
        }
        let mut map: Vec<usize> = (0..self.arc_count()).collect();
        for (&(j, k), &from) in &index {
            map[from] = index[&(k, j)];
        }
        map
    }

    /// `(m+n) x (m+n)` Grover matrix `2/(m+n) J - I` of vertex `j`, negated
    /// when marked.
    pub fn grover_block(&self, j: usize, marked: bool) -> DMatrix<Complex64> {
        let dim = self.vertex_slice(j).len();
        let off = 2.0 / dim as f64;
        let sign = if marked { -1.0 } else { 1.0 };
        DMatrix::from_fn(dim, dim, |r, c| {
            let v = if r == c { off - 1.0 } else { off };
            Complex64::new(sign * v, 0.0)
        })
    }

    fn marginals(&self, x: &[Complex64]) -> Vec<f64> {
        (0..self.vertex_count())
            .map(|j| {
                x[self.vertex_slice(j)]
                    .iter()
                    .map(Complex64::norm_sqr)
                    .sum()
            })
            .collect()
    }
}

/// One step `S C` of the multi-loop walk.
pub trait OracleStep {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64>;
}

/// Explicit step matrix.
#[derive(Debug, Clone)]
pub struct DenseUnitary {
    matrix: DMatrix<Complex64>,
}

impl DenseUnitary {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `max |(U^dagger U - I)_{rc}|`.
    pub fn unitarity_error(&self) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0f64;
        for r in 0..prod.nrows() {
            for c in 0..prod.ncols() {
                let want = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((prod[(r, c)] - Complex64::new(want, 0.0)).norm());
            }
        }
        worst
    }
}

impl OracleStep for DenseUnitary {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let v = DVector::from_column_slice(x);
        (&self.matrix * v).as_slice().to_vec()
    }
}

/// Builds `U = S C` over the multi-loop basis as a dense matrix.
pub fn build_dense_step(g: &MultiLoopGraph, marked: &BTreeSet<usize>) -> Result<DenseUnitary> {
    let dim = g.arc_count();
    if dim > DENSE_ARC_CAP {
        return Err(Error::OracleTooLarge {
            arcs: dim,
            cap: DENSE_ARC_CAP,
        });
    }
    // U = S C: row `a` of C lands on row shift(a).
    let shift = g.shift_map();
    let mut matrix = DMatrix::from_element(dim, dim, ZERO);
    for j in 0..g.vertex_count() {
        let r = g.vertex_slice(j);
        let block = g.grover_block(j, marked.contains(&j));
        for (br, row) in r.clone().enumerate() {
            for (bc, col) in r.clone().enumerate() {
                matrix[(shift[row], col)] = block[(br, bc)];
            }
        }
    }
    Ok(DenseUnitary { matrix })
}

/// Matrix-free multi-loop step: explicit dense Grover block per vertex and
/// an explicit shift map. Same operator as [`DenseUnitary`] for graphs too
/// large to materialise.
#[derive(Debug, Clone)]
pub struct BlockOracle {
    graph: MultiLoopGraph,
    blocks: Vec<DMatrix<Complex64>>,
    shift: Vec<usize>,
}

impl BlockOracle {
    pub fn new(g: &MultiLoopGraph, marked: &BTreeSet<usize>) -> Self {
        BlockOracle {
            blocks: (0..g.vertex_count())
                .map(|j| g.grover_block(j, marked.contains(&j)))
                .collect(),
            shift: g.shift_map(),
            graph: g.clone(),
        }
    }
}

impl OracleStep for BlockOracle {
    fn dim(&self) -> usize {
        self.graph.arc_count()
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut coined = vec![ZERO; x.len()];
        for (j, block) in self.blocks.iter().enumerate() {
            let r = self.graph.vertex_slice(j);
            let out = block * DVector::from_column_slice(&x[r.clone()]);
            coined[r].copy_from_slice(out.as_slice());
        }
        let mut shifted = vec![ZERO; x.len()];
        for (from, &to) in self.shift.iter().enumerate() {
            shifted[to] = coined[from];
        }
        shifted
    }
}

fn check_uniform_loops(table: &ArcTable, g: &MultiLoopGraph) -> Result<usize> {
    let n = g.loop_count(0);
    if n == 0 || (0..g.vertex_count()).any(|j| g.loop_count(j) != n) {
        return Err(Error::Contract(
            "lifting needs the same positive integer loop count on every vertex".into(),
        ));
    }
    if table.vertex_count() != g.vertex_count()
        || (0..g.vertex_count())
            .any(|j| !table.has_loop(j) || table.degree(j) != g.base().degree(j))
    {
        return Err(Error::Contract(
            "single-loop graph must match the base graph with a loop slot everywhere".into(),
        ));
    }
    Ok(n)
}

/// Maps a single-loop state to the multi-loop basis: non-loop amplitudes are
/// copied and each of the `n` loop copies at `j` gets `alpha_jj / sqrt(n)`.
pub fn lift_state(
    state: &WalkerState,
    table: &ArcTable,
    g: &MultiLoopGraph,
) -> Result<Vec<Complex64>> {
    let n = check_uniform_loops(table, g)?;
    if state.len() != table.len() {
        return Err(Error::DimensionMismatch {
            expected: table.len(),
            actual: state.len(),
        });
    }
    let scale = 1.0 / (n as f64).sqrt();
    let amps = state.amplitudes();
    let mut out = vec![ZERO; g.arc_count()];
    for j in 0..g.vertex_count() {
        let src = table.vertex_slice(j);
        let dst = g.vertex_slice(j);
        let m = g.base().degree(j);
        out[dst.start..dst.start + m].copy_from_slice(&amps[src.start..src.start + m]);
        let loop_amp = amps[src.end - 1] * scale;
        for i in 0..n {
            out[g.loop_index(j, i)] = loop_amp;
        }
    }
    Ok(out)
}

/// Inverse of [`lift_state`] built from the first loop copy, together with
/// the largest spread between loop copies of one vertex.
pub fn project_state(
    x: &[Complex64],
    table: &ArcTable,
    g: &MultiLoopGraph,
) -> Result<(WalkerState, f64)> {
    let n = check_uniform_loops(table, g)?;
    let scale = (n as f64).sqrt();
    let mut out = vec![ZERO; table.len()];
    let mut asymmetry = 0.0f64;
    for j in 0..g.vertex_count() {
        let src = g.vertex_slice(j);
        let dst = table.vertex_slice(j);
        let m = g.base().degree(j);
        out[dst.start..dst.start + m].copy_from_slice(&x[src.start..src.start + m]);
        let first = x[g.loop_index(j, 0)];
        for i in 1..n {
            asymmetry = asymmetry.max((x[g.loop_index(j, i)] - first).norm());
        }
        out[dst.end - 1] = first * scale;
    }
    Ok((WalkerState::new(out), asymmetry))
}

/// Largest deviations seen while running the kernel against the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EquivalenceReport {
    pub steps: usize,
    /// Position marginals, max over vertices and steps.
    pub marginal: f64,
    /// Arc amplitudes after mapping the oracle state back.
    pub amplitude: f64,
    /// Spread between loop copies of the same vertex.
    pub loop_asymmetry: f64,
}

impl EquivalenceReport {
    pub fn max_deviation(&self) -> f64 {
        self.marginal.max(self.amplitude).max(self.loop_asymmetry)
    }
}

/// Builds the kernel under test from a graph and a coin configuration.
pub type KernelFactory<'a> = dyn Fn(&Graph, CoinConfig) -> Result<Box<dyn WalkKernel>> + 'a;

/// Runs the Grover-loop kernel with weight `n` on `base` plus one loop slot
/// against the dense oracle with `n` real loops, from a seeded random state.
/// `n = 0` compares both on the identical loop-free basis.
pub fn equivalence_check(
    base: &Graph,
    n: usize,
    marked: &BTreeSet<usize>,
    steps: usize,
) -> Result<EquivalenceReport> {
    let factory = |g: &Graph, cfg: CoinConfig| -> Result<Box<dyn WalkKernel>> {
        Ok(Box::new(Evolution::new(g, cfg)?))
    };
    equivalence_check_with(base, n, marked, steps, &factory)
}

pub fn equivalence_check_with(
    base: &Graph,
    n: usize,
    marked: &BTreeSet<usize>,
    steps: usize,
    factory: &KernelFactory<'_>,
) -> Result<EquivalenceReport> {
    let multi = MultiLoopGraph::uniform(base, n)?;
    let oracle = build_dense_step(&multi, marked)?;
    let single = base.with_loops(n > 0)?;
    let cfg = CoinConfig::grover_loop_uniform(single.vertex_count(), n as f64)
        .with_marked(marked.iter().copied());
    let kernel = factory(&single, cfg)?;
    let init = random_state(kernel.arc_table().len(), 0x5eed_0000 + n as u64);
    compare_runs(kernel.as_ref(), &multi, &oracle, init, steps)
}

/// Compares kernel and oracle trajectories from `init` (kernel layout).
pub fn compare_runs(
    kernel: &dyn WalkKernel,
    multi: &MultiLoopGraph,
    oracle: &dyn OracleStep,
    init: WalkerState,
    steps: usize,
) -> Result<EquivalenceReport> {
    let table = kernel.arc_table().clone();
    let lifted =
        multi.arc_count() != table.len() || (0..table.vertex_count()).any(|j| table.has_loop(j));
    let to_oracle = |s: &WalkerState| -> Result<Vec<Complex64>> {
        if lifted {
            lift_state(s, &table, multi)
        } else {
            Ok(s.amplitudes().to_vec())
        }
    };
    let from_oracle = |x: &[Complex64]| -> Result<(WalkerState, f64)> {
        if lifted {
            project_state(x, &table, multi)
        } else {
            Ok((WalkerState::new(x.to_vec()), 0.0))
        }
    };

    let mut state = init;
    let mut x = to_oracle(&state)?;
    let mut report = EquivalenceReport::default();
    for t in 0..=steps {
        if t > 0 {
            kernel.step(&mut state)?;
            x = oracle.apply(&x);
        }
        let pk = position_distribution(&state, &table);
        let po = multi.marginals(&x);
        for (a, b) in pk.iter().zip(&po) {
            report.marginal = report.marginal.max((a - b).abs());
        }
        let (mapped, asym) = from_oracle(&x)?;
        report.amplitude = report.amplitude.max(state.max_abs_diff(&mapped));
        report.loop_asymmetry = report.loop_asymmetry.max(asym);
        report.steps = t;
    }
    Ok(report)
}

/// Center-vertex probability of the multi-loop walk started on the center's
/// neighbor arcs, for steps `0..=t_max`.
pub fn oracle_spreading_trace(
    g: &MultiLoopGraph,
    oracle: &dyn OracleStep,
    center: usize,
    t_max: usize,
) -> Vec<f64> {
    let mut x = vec![ZERO; g.arc_count()];
    let m = g.base().degree(center);
    let start = g.vertex_slice(center).start;
    for a in &mut x[start..start + m] {
        *a = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
    }
    let prob = |x: &[Complex64]| -> f64 {
        x[g.vertex_slice(center)]
            .iter()
            .map(Complex64::norm_sqr)
            .sum()
    };
    let mut trace = vec![prob(&x)];
    for _ in 0..t_max {
        x = oracle.apply(&x);
        trace.push(prob(&x));
    }
    trace
}

/// Kernel-side counterpart of [`oracle_spreading_trace`].
pub fn kernel_spreading_trace(
    kernel: &dyn WalkKernel,
    center: usize,
    t_max: usize,
) -> Result<Vec<f64>> {
    let table = kernel.arc_table();
    let mut state = center_start_state(table, center);
    let prob = |s: &WalkerState| crate::walk::vertex_probability(s, table, center);
    let mut trace = vec![prob(&state)];
    kernel.run_with(&mut state, t_max, &mut |_, s| trace.push(prob(s)))?;
    Ok(trace)
}

/// Normalised complex state with entries drawn from a seeded generator.
pub fn random_state(len: usize, seed: u64) -> WalkerState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    WalkerState::new(amps)
}
