//! Search on a 20x20 torus: a light loop weight lifts the success probability
//! from about 0.24 to about 0.97.

use dtqw::search::{default_window, find_first_peak, run_search};
use dtqw::{build_lattice, Boundary, CoinConfig};

fn main() -> dtqw::Result<()> {
    let g = build_lattice(&[20, 20], Boundary::Periodic, true)?;
    let window = default_window(g.vertex_count());
    for w in [0.0, 0.01, 1.0] {
        let cfg = CoinConfig::grover_loop_uniform(g.vertex_count(), w).with_marked([0]);
        let trace = run_search(&g, &cfg, window)?;
        let peak = find_first_peak(&trace);
        println!(
            "n={w:<5} peak {:.4} at step {}{}",
            peak.p_peak,
            peak.t_peak,
            if peak.window_truncated {
                " (window too short)"
            } else {
                ""
            }
        );
    }
    Ok(())
}
