//! Coined walk evolution: Grover and Grover-loop coins, phase-flip marking,
//! the flip-flop shift, and position marginals.
//!
//! The state is one flat amplitude vector in [`ArcTable`] order, so the coin
//! is a rank-1 update on each vertex's contiguous block and the shift is the
//! arc-reversal permutation.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{ArcTable, Graph};

/// Amplitude vector over the arcs of an [`ArcTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    amplitudes: Vec<Complex64>,
}

impl WalkerState {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        WalkerState { amplitudes }
    }

    pub fn zeros(len: usize) -> Self {
        WalkerState::new(vec![Complex64::new(0.0, 0.0); len])
    }

    /// All weight on a single arc.
    pub fn basis(len: usize, arc: usize) -> Self {
        let mut s = WalkerState::zeros(len);
        s.amplitudes[arc] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn from_real(values: &[f64]) -> Self {
        WalkerState::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest componentwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &WalkerState) -> f64 {
        assert_eq!(self.len(), other.len());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_len(&self, table: &ArcTable) -> Result<()> {
        if self.len() != table.len() {
            return Err(Error::DimensionMismatch {
                expected: table.len(),
                actual: self.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinFamily {
    /// Grover reflection about the uniform superposition of every arc at the
    /// vertex. A loop slot, when present, counts as one ordinary direction.
    StandardGrover,
    /// Reflection about the weighted diagonal state: neighbor components
    /// `1/sqrt(m+n)`, loop component `sqrt(n)/sqrt(m+n)`.
    GroverLoop,
}

/// Coin selection, per-vertex loop weights, and the marked-vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinConfig {
    pub family: CoinFamily,
    /// Per-vertex weights, used only by [`CoinFamily::GroverLoop`].
    pub loop_weights: Vec<f64>,
    pub marked: BTreeSet<usize>,
}

impl CoinConfig {
    pub fn standard() -> Self {
        CoinConfig {
            family: CoinFamily::StandardGrover,
            loop_weights: Vec::new(),
            marked: BTreeSet::new(),
        }
    }

    pub fn grover_loop(loop_weights: Vec<f64>) -> Self {
        CoinConfig {
            family: CoinFamily::GroverLoop,
            loop_weights,
            marked: BTreeSet::new(),
        }
    }

    /// Same weight `n` on each of `vertex_count` vertices.
    pub fn grover_loop_uniform(vertex_count: usize, n: f64) -> Self {
        CoinConfig::grover_loop(vec![n; vertex_count])
    }

    pub fn with_marked<I: IntoIterator<Item = usize>>(mut self, marked: I) -> Self {
        self.marked = marked.into_iter().collect();
        self
    }

    pub fn unmarked(&self) -> Self {
        CoinConfig {
            marked: BTreeSet::new(),
            ..self.clone()
        }
    }

    /// Effective loop weight at `j`: the configured weight for the Grover-loop
    /// coin, and 1 (one real loop) or 0 for the standard coin.
    pub fn weight(&self, table: &ArcTable, j: usize) -> f64 {
        match self.family {
            CoinFamily::StandardGrover => {
                if table.has_loop(j) {
                    1.0
                } else {
                    0.0
                }
            }
            CoinFamily::GroverLoop => self.loop_weights[j],
        }
    }

    pub fn validate(&self, table: &ArcTable) -> Result<()> {
        let n = table.vertex_count();
        if self.family == CoinFamily::GroverLoop {
            if self.loop_weights.len() != n {
                return Err(Error::Config(format!(
                    "{} loop weights for {} vertices",
                    self.loop_weights.len(),
                    n
                )));
            }
            for (j, &w) in self.loop_weights.iter().enumerate() {
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::Config(format!(
                        "loop weight {w} at vertex {j} must be finite and non-negative"
                    )));
                }
                if w > 0.0 && !table.has_loop(j) {
                    return Err(Error::Config(format!(
                        "loop weight {w} at vertex {j}, which has no loop slot"
                    )));
                }
            }
        }
        if let Some(&j) = self.marked.iter().find(|&&j| j >= n) {
            return Err(Error::Config(format!(
                "marked vertex {j} out of range 0..{n}"
            )));
        }
        Ok(())
    }
}

/// Weighted diagonal state of vertex `j`, laid out like its arc slice
/// (neighbor directions ascending, loop arc last).
pub fn diagonal_state(g: &Graph, j: usize, n: f64) -> Result<Vec<f64>> {
    if !n.is_finite() || n < 0.0 {
        return Err(Error::Config(format!(
            "loop weight {n} must be finite and non-negative"
        )));
    }
    if n > 0.0 && !g.has_loop(j) {
        return Err(Error::Config(format!(
            "loop weight {n} at vertex {j}, which has no loop slot"
        )));
    }
    Ok(diagonal_components(g.degree(j), g.has_loop(j), n))
}

fn diagonal_components(degree: usize, has_loop: bool, n: f64) -> Vec<f64> {
    let scale = 1.0 / (degree as f64 + n).sqrt();
    let mut d = vec![scale; degree];
    if has_loop {
        d.push(n.sqrt() * scale);
    }
    d
}

/// A step operator `U = S C` acting in place on a [`WalkerState`].
pub trait WalkKernel {
    fn arc_table(&self) -> &ArcTable;

    fn apply_coin(&self, state: &mut WalkerState) -> Result<()>;

    fn apply_shift(&self, state: &mut WalkerState) -> Result<()>;

    fn step(&self, state: &mut WalkerState) -> Result<()> {
        self.apply_coin(state)?;
        self.apply_shift(state)
    }

    /// Applies `t` steps, calling `hook(step, state)` after each one.
    fn run_with(
        &self,
        state: &mut WalkerState,
        t: usize,
        hook: &mut dyn FnMut(usize, &WalkerState),
    ) -> Result<()> {
        for s in 1..=t {
            self.step(state)?;
            hook(s, state);
        }
        Ok(())
    }

    fn run(&self, state: &mut WalkerState, t: usize) -> Result<()> {
        for _ in 0..t {
            self.step(state)?;
        }
        Ok(())
    }
}

/// Blocked kernel with precomputed diagonal-state coefficients.
#[derive(Debug, Clone)]
pub struct Evolution {
    table: ArcTable,
    config: CoinConfig,
    diag: Vec<f64>,
    flip: Vec<bool>,
}

impl Evolution {
    pub fn new(g: &Graph, config: CoinConfig) -> Result<Self> {
        Evolution::with_table(ArcTable::new(g), config)
    }

    pub fn with_table(table: ArcTable, config: CoinConfig) -> Result<Self> {
        config.validate(&table)?;
        let n = table.vertex_count();
        let mut diag = Vec::with_capacity(table.len());
        for j in 0..n {
            let w = config.weight(&table, j);
            diag.extend(diagonal_components(table.degree(j), table.has_loop(j), w));
        }
        let mut flip = vec![false; n];
        for &j in &config.marked {
            flip[j] = true;
        }
        Ok(Evolution {
            table,
            config,
            diag,
            flip,
        })
    }

    pub fn config(&self) -> &CoinConfig {
        &self.config
    }

    /// Per-arc diagonal-state coefficients, in arc order.
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }
}

impl WalkKernel for Evolution {
    fn arc_table(&self) -> &ArcTable {
        &self.table
    }

    fn apply_coin(&self, state: &mut WalkerState) -> Result<()> {
        state.check_len(&self.table)?;
        let amps = state.amplitudes_mut();
        for j in 0..self.table.vertex_count() {
            let range = self.table.vertex_slice(j);
            let d = &self.diag[range.clone()];
            let block = &mut amps[range];
            let overlap: Complex64 = d.iter().zip(block.iter()).map(|(&c, a)| a * c).sum();
            let twice = overlap * 2.0;
            if self.flip[j] {
                for (a, &c) in block.iter_mut().zip(d) {
                    *a -= twice * c;
                }
            } else {
                for (a, &c) in block.iter_mut().zip(d) {
                    *a = twice * c - *a;
                }
            }
        }
        Ok(())
    }

    fn apply_shift(&self, state: &mut WalkerState) -> Result<()> {
        state.check_len(&self.table)?;
        let amps = state.amplitudes_mut();
        for (id, &rev) in self.table.reverse_permutation().iter().enumerate() {
            if id < rev {
                amps.swap(id, rev);
            }
        }
        Ok(())
    }
}

pub fn apply_coin(state: &mut WalkerState, g: &Graph, cfg: &CoinConfig) -> Result<()> {
    Evolution::new(g, cfg.clone())?.apply_coin(state)
}

pub fn apply_shift(state: &mut WalkerState, g: &Graph) -> Result<()> {
    Evolution::new(g, CoinConfig::standard())?.apply_shift(state)
}

pub fn step(state: &mut WalkerState, g: &Graph, cfg: &CoinConfig) -> Result<()> {
    Evolution::new(g, cfg.clone())?.step(state)
}

pub fn run(state: &mut WalkerState, g: &Graph, cfg: &CoinConfig, t: usize) -> Result<()> {
    Evolution::new(g, cfg.clone())?.run(state, t)
}

/// Per-vertex probability: squared amplitudes summed over each arc slice,
/// loop arc included.
pub fn position_distribution(state: &WalkerState, table: &ArcTable) -> Vec<f64> {
    let amps = state.amplitudes();
    (0..table.vertex_count())
        .map(|j| {
            amps[table.vertex_slice(j)]
                .iter()
                .map(Complex64::norm_sqr)
                .sum()
        })
        .collect()
}

/// Probability of finding the walker on vertex `j`.
pub fn vertex_probability(state: &WalkerState, table: &ArcTable, j: usize) -> f64 {
    state.amplitudes()[table.vertex_slice(j)]
        .iter()
        .map(Complex64::norm_sqr)
        .sum()
}

/// Center vertex of a lattice whose sides are all odd.
pub fn lattice_center(g: &Graph) -> Result<usize> {
    let shape = g
        .lattice_shape()
        .ok_or_else(|| Error::Config("spreading probe needs a lattice graph".into()))?;
    let mut id = 0;
    for &d in &shape.dims {
        if d % 2 == 0 {
            return Err(Error::NoCenter(d));
        }
        id = id * d + d / 2;
    }
    Ok(id)
}

/// Equal superposition over the non-loop arcs leaving `center`; the loop arc
/// starts empty.
pub fn center_start_state(table: &ArcTable, center: usize) -> WalkerState {
    let mut s = WalkerState::zeros(table.len());
    let m = table.degree(center);
    let amp = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
    let start = table.vertex_slice(center).start;
    for a in &mut s.amplitudes_mut()[start..start + m] {
        *a = amp;
    }
    s
}

/// Probability at the lattice center for steps `0..=t_max` of a Grover-loop
/// walk with uniform weight `n`, started from the center's neighbor arcs.
pub fn spreading_probe(g: &Graph, n: f64, t_max: usize) -> Result<Vec<f64>> {
    let center = lattice_center(g)?;
    let kernel = Evolution::new(g, CoinConfig::grover_loop_uniform(g.vertex_count(), n))?;
    let table = kernel.arc_table();
    let mut state = center_start_state(table, center);
    let mut trace = Vec::with_capacity(t_max + 1);
    trace.push(vertex_probability(&state, table, center));
    kernel.run_with(&mut state, t_max, &mut |_, s| {
        trace.push(vertex_probability(s, table, center))
    })?;
    Ok(trace)
}
