//! Search on a graph read from an edge list, with per-vertex weights from the
//! degree-centrality rule.

use dtqw::search::{default_window, find_first_peak, run_search};
use dtqw::{degree_centrality_weights, load_edge_list, CoinConfig};

const EDGES: &str = "\
# two triangles joined by a path
0 1
1 2
2 0
2 3
3 4
4 5
5 6
6 4
";

fn main() -> dtqw::Result<()> {
    let g = load_edge_list(EDGES)?.with_loops(true)?;
    let weights = degree_centrality_weights(&g);
    for target in 0..g.vertex_count() {
        let cfg = CoinConfig::grover_loop(weights.clone()).with_marked([target]);
        let peak = find_first_peak(&run_search(&g, &cfg, default_window(g.vertex_count()))?);
        println!("target {target}: p={:.4} t={}", peak.p_peak, peak.t_peak);
    }
    Ok(())
}
