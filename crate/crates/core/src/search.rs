//! Spatial search with the phase-flip coin: initial state, target traces,
//! first-peak detection, the degree-centrality weight rule and scaling runs.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{build_complete, build_lattice, ArcTable, Boundary, Graph};
use crate::walk::{vertex_probability, CoinConfig, Evolution, WalkKernel, WalkerState};

/// A candidate peak ends once the trace falls below this fraction of the
/// running maximum.
pub const PEAK_DROP_FRACTION: f64 = 0.5;

/// The running maximum only counts as a peak after it reaches this multiple
/// of the step-0 value.
pub const PEAK_RISE_FACTOR: f64 = 2.0;

/// Values within this distance of the maximum tie; the earliest wins.
pub const PEAK_TIE_TOLERANCE: f64 = 1e-12;

/// Target probability per step; index 0 is the state before any step.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTrace {
    values: Vec<f64>,
}

impl ProbabilityTrace {
    pub fn new(values: Vec<f64>) -> Self {
        ProbabilityTrace { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of evolution steps covered (`len - 1`).
    pub fn steps(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakResult {
    pub t_peak: usize,
    pub p_peak: f64,
    /// The peak sits on the last step of the window, so the true first peak
    /// may lie beyond it.
    pub window_truncated: bool,
}

/// Default search window `10 * ceil(sqrt(N))`.
pub fn default_window(vertex_count: usize) -> usize {
    10 * (vertex_count as f64).sqrt().ceil() as usize
}

/// `(1/sqrt(N)) sum_j |j> (x) |D'_j(n_j)>`. With all weights zero this is
/// `1/sqrt(N Deg(j))` on every non-loop arc and zero on loop arcs.
pub fn search_initial_state(table: &ArcTable, cfg: &CoinConfig) -> WalkerState {
    let n = table.vertex_count();
    let norm = 1.0 / (n as f64).sqrt();
    let mut amps = Vec::with_capacity(table.len());
    for j in 0..n {
        let m = table.degree(j) as f64;
        let w = cfg.weight(table, j);
        let scale = norm / (m + w).sqrt();
        amps.extend(std::iter::repeat_n(
            Complex64::new(scale, 0.0),
            table.degree(j),
        ));
        if table.has_loop(j) {
            amps.push(Complex64::new(scale * w.sqrt(), 0.0));
        }
    }
    WalkerState::new(amps)
}

/// Runs `U = S C_flip` for `t_max` steps from [`search_initial_state`] and
/// records the total probability on the marked vertices.
pub fn run_search(g: &Graph, cfg: &CoinConfig, t_max: usize) -> Result<ProbabilityTrace> {
    if cfg.marked.is_empty() {
        return Err(Error::Config(
            "search needs at least one marked vertex".into(),
        ));
    }
    if t_max == 0 {
        return Err(Error::Config(
            "search window must cover at least one step".into(),
        ));
    }
    let kernel = Evolution::new(g, cfg.clone())?;
    let table = kernel.arc_table();
    let target_prob = |s: &WalkerState| -> f64 {
        cfg.marked
            .iter()
            .map(|&j| vertex_probability(s, table, j))
            .sum::<f64>()
    };
    let mut state = search_initial_state(table, cfg);
    let mut values = Vec::with_capacity(t_max + 1);
    values.push(target_prob(&state));
    kernel.run_with(&mut state, t_max, &mut |_, s| values.push(target_prob(s)))?;
    Ok(ProbabilityTrace::new(values))
}

/// First peak of a target trace.
///
/// The trace is scanned with a running maximum; the first peak's window ends
/// at the first step whose value drops below [`PEAK_DROP_FRACTION`] of the
/// running maximum, once that maximum has risen to [`PEAK_RISE_FACTOR`] times
/// the starting value. Small oscillations near the top of a peak do not end
/// the window, and later revivals are never reached. The peak is the maximum
/// within the window, earliest index on ties.
pub fn find_first_peak(trace: &ProbabilityTrace) -> PeakResult {
    let v = trace.values();
    assert!(!v.is_empty(), "empty probability trace");
    let mut best = v[0];
    let mut end = v.len();
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > best {
            best = x;
        } else if best > 0.0 && best >= PEAK_RISE_FACTOR * v[0] && x < PEAK_DROP_FRACTION * best {
            end = i;
            break;
        }
    }
    let t_peak = v[..end]
        .iter()
        .position(|&x| x >= best - PEAK_TIE_TOLERANCE)
        .expect("maximum is attained inside the window");
    PeakResult {
        t_peak,
        p_peak: v[t_peak],
        window_truncated: t_peak + 1 == v.len() && v.len() > 1,
    }
}

/// `n_j = Deg(j) / (N - 1)`, counting only non-loop neighbors.
pub fn degree_centrality_weights(g: &Graph) -> Vec<f64> {
    let n = g.vertex_count();
    assert!(n >= 2, "degree centrality needs at least two vertices");
    let denom = (n - 1) as f64;
    (0..n).map(|j| g.degree(j) as f64 / denom).collect()
}

/// One Grover-loop search per uniform weight in `grid`, run in parallel,
/// results in grid order.
pub fn weight_sweep(
    g: &Graph,
    target: usize,
    grid: &[f64],
    t_max: usize,
) -> Result<Vec<(f64, PeakResult)>> {
    if let Some(&w) = grid.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::Config(format!(
            "sweep weight {w} must be non-negative"
        )));
    }
    let n = g.vertex_count();
    grid.par_iter()
        .map(|&w| {
            let cfg = CoinConfig::grover_loop_uniform(n, w).with_marked([target]);
            let trace = run_search(g, &cfg, t_max)?;
            Ok((w, find_first_peak(&trace)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFamily {
    /// Periodic `s x s` lattice.
    Lattice2d,
    /// Periodic `s x s x s` lattice.
    Lattice3d,
    /// Complete graph on `s` vertices.
    Complete,
}

impl GraphFamily {
    pub fn build(self, size: usize, with_loop: bool) -> Result<Graph> {
        match self {
            GraphFamily::Lattice2d => build_lattice(&[size, size], Boundary::Periodic, with_loop),
            GraphFamily::Lattice3d => {
                build_lattice(&[size, size, size], Boundary::Periodic, with_loop)
            }
            GraphFamily::Complete => build_complete(size, with_loop),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightRule {
    /// No loop slot; standard Grover coin.
    Zero,
    DegreeCentrality,
    Fixed(f64),
}

impl WeightRule {
    /// Graph with the loop slots this rule needs, and the matching coin.
    pub fn configure(self, family: GraphFamily, size: usize) -> Result<(Graph, CoinConfig)> {
        match self {
            WeightRule::Zero => Ok((family.build(size, false)?, CoinConfig::standard())),
            WeightRule::DegreeCentrality => {
                let g = family.build(size, true)?;
                let w = degree_centrality_weights(&g);
                Ok((g, CoinConfig::grover_loop(w)))
            }
            WeightRule::Fixed(n) => {
                let g = family.build(size, true)?;
                let cfg = CoinConfig::grover_loop_uniform(g.vertex_count(), n);
                Ok((g, cfg))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowRule {
    /// [`default_window`] of the vertex count.
    #[default]
    Auto,
    Fixed(usize),
}

impl WindowRule {
    pub fn steps(self, vertex_count: usize) -> usize {
        match self {
            WindowRule::Auto => default_window(vertex_count),
            WindowRule::Fixed(t) => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub size: usize,
    pub vertex_count: usize,
    pub peak: PeakResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `ln t_peak` against `ln N` over the rows whose
    /// peak is not window-truncated; `None` with fewer than two such rows.
    pub exponent: Option<f64>,
}

impl ScalingReport {
    pub fn any_truncated(&self) -> bool {
        self.rows.iter().any(|r| r.peak.window_truncated)
    }
}

/// Searches vertex 0 on each graph of `family` at the given sizes.
pub fn scaling_study(
    family: GraphFamily,
    sizes: &[usize],
    rule: WeightRule,
    window: WindowRule,
) -> Result<ScalingReport> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(
            "scaling sizes must be strictly ascending".into(),
        ));
    }
    let rows = sizes
        .par_iter()
        .map(|&size| {
            let (g, cfg) = rule.configure(family, size)?;
            let n = g.vertex_count();
            let trace = run_search(&g, &cfg.with_marked([0]), window.steps(n))?;
            Ok(ScalingRow {
                size,
                vertex_count: n,
                peak: find_first_peak(&trace),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| !r.peak.window_truncated && r.peak.t_peak > 0)
        .map(|r| ((r.vertex_count as f64).ln(), (r.peak.t_peak as f64).ln()))
        .unzip();
    Ok(ScalingReport {
        exponent: least_squares_slope(&xs, &ys),
        rows,
    })
}

/// Ordinary least-squares slope of `ys` on `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return None;
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::position_distribution;

    fn peak(v: &[f64]) -> PeakResult {
        find_first_peak(&ProbabilityTrace::new(v.to_vec()))
    }

    #[test]
    fn first_peak_basic_cases() {
        let p = peak(&[0.1, 0.5, 0.3]);
        assert_eq!((p.t_peak, p.p_peak), (1, 0.5));
        assert!(!p.window_truncated);

        let p = peak(&[0.1, 0.2, 0.3, 0.4]);
        assert_eq!(p.t_peak, 3);
        assert!(p.window_truncated);

        let p = peak(&[0.1, 0.5, 0.3, 0.5, 0.2]);
        assert_eq!(p.t_peak, 1);
    }

    #[test]
    fn first_peak_ignores_later_revivals() {
        let p = peak(&[0.01, 0.2, 0.4, 0.38, 0.41, 0.1, 0.0, 0.3, 0.9, 0.2]);
        assert_eq!((p.t_peak, p.p_peak), (4, 0.41));
    }

    #[test]
    fn first_peak_needs_a_real_rise() {
        // an initial dip does not end the window
        let p = peak(&[0.1, 0.04, 0.15, 0.3, 0.1]);
        assert_eq!(p.t_peak, 3);
    }

    #[test]
    fn initial_state_loop_free() {
        let g = build_complete(400, false).unwrap();
        let t = ArcTable::new(&g);
        let s = search_initial_state(&t, &CoinConfig::standard());
        let want = 1.0 / (400.0f64 * 399.0).sqrt();
        assert!(s
            .amplitudes()
            .iter()
            .all(|a| (a.re - want).abs() < 1e-16 && a.im == 0.0));
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn initial_state_torus() {
        let g = build_lattice(&[20, 20], Boundary::Periodic, true).unwrap();
        let t = ArcTable::new(&g);
        let s = search_initial_state(&t, &CoinConfig::grover_loop_uniform(400, 0.0));
        for (id, a) in s.amplitudes().iter().enumerate() {
            let want = if t.arc(id).is_loop() { 0.0 } else { 1.0 / 40.0 };
            assert!((a.re - want).abs() < 1e-16);
        }

        let s = search_initial_state(&t, &CoinConfig::grover_loop_uniform(400, 0.01));
        let nb = 1.0 / (400.0f64 * 4.01).sqrt();
        let lp = 0.1 / (400.0f64 * 4.01).sqrt();
        for (id, a) in s.amplitudes().iter().enumerate() {
            let want = if t.arc(id).is_loop() { lp } else { nb };
            assert!((a.re - want).abs() < 1e-16);
        }
        assert!((s.norm() - 1.0).abs() < 1e-12);
        let p = position_distribution(&s, &t);
        assert!(p.iter().all(|x| (x - 1.0 / 400.0).abs() < 1e-15));
    }

    #[test]
    fn run_search_rejects_bad_config() {
        let g = build_complete(5, false).unwrap();
        assert!(matches!(
            run_search(&g, &CoinConfig::standard(), 10),
            Err(Error::Config(_))
        ));
        assert!(run_search(&g, &CoinConfig::standard().with_marked([0]), 0).is_err());
    }

    #[test]
    fn trace_starts_at_one_over_n() {
        let g = build_lattice(&[6, 6], Boundary::Periodic, false).unwrap();
        let tr = run_search(&g, &CoinConfig::standard().with_marked([3]), 20).unwrap();
        assert_eq!(tr.len(), 21);
        assert!((tr.values()[0] - 1.0 / 36.0).abs() < 1e-15);
        assert!(tr
            .values()
            .iter()
            .all(|&p| (0.0..=1.0 + 1e-12).contains(&p)));
    }

    #[test]
    fn degree_centrality() {
        let g = build_lattice(&[20, 20], Boundary::Periodic, true).unwrap();
        let w = degree_centrality_weights(&g);
        assert!(w.iter().all(|&x| x == 4.0 / 399.0));
        assert!((w[0] - 0.010025).abs() < 1e-6);

        let g = build_complete(30, true).unwrap();
        assert!(degree_centrality_weights(&g).iter().all(|&x| x == 1.0));

        let g = build_lattice(&[5, 5, 5], Boundary::Periodic, false).unwrap();
        assert!(degree_centrality_weights(&g)
            .iter()
            .all(|&x| x == 6.0 / 124.0));
    }

    #[test]
    fn sweep_single_point_matches_direct_run() {
        let g = build_lattice(&[8, 8], Boundary::Periodic, true).unwrap();
        let sweep = weight_sweep(&g, 0, &[0.0], 80).unwrap();
        let direct = run_search(
            &g,
            &CoinConfig::grover_loop_uniform(64, 0.0).with_marked([0]),
            80,
        )
        .unwrap();
        assert_eq!(sweep, vec![(0.0, find_first_peak(&direct))]);
        assert!(weight_sweep(&g, 0, &[0.1, -1.0], 80).is_err());
    }

    #[test]
    fn slope_fit() {
        let xs: Vec<f64> = (1..6).map(|x| (x as f64).ln()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x + 1.3).collect();
        assert!((least_squares_slope(&xs, &ys).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(least_squares_slope(&[1.0], &[2.0]), None);
        assert_eq!(least_squares_slope(&[1.0, 1.0], &[2.0, 3.0]), None);
    }

    #[test]
    fn scaling_flags_truncated_windows() {
        let report = scaling_study(
            GraphFamily::Lattice2d,
            &[6, 8],
            WeightRule::DegreeCentrality,
            WindowRule::Fixed(3),
        )
        .unwrap();
        assert!(report.any_truncated());
        assert_eq!(report.exponent, None);
        assert!(scaling_study(
            GraphFamily::Complete,
            &[8, 6],
            WeightRule::Zero,
            WindowRule::Auto
        )
        .is_err());
    }

    #[test]
    fn complete_graph_peak_near_half() {
        let g = build_complete(100, false).unwrap();
        let tr = run_search(
            &g,
            &CoinConfig::standard().with_marked([0]),
            default_window(100),
        )
        .unwrap();
        let p = find_first_peak(&tr);
        assert!((0.45..=0.60).contains(&p.p_peak), "{p:?}");
    }
}
