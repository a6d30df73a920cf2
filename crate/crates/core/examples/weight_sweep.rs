//! First-peak probability against the loop weight on a 20x20 torus, as CSV.

use dtqw::experiment::{format_real, weight_grid};
use dtqw::search::{default_window, weight_sweep};
use dtqw::{build_lattice, Boundary};

fn main() -> dtqw::Result<()> {
    let g = build_lattice(&[20, 20], Boundary::Periodic, true)?;
    let grid = weight_grid(0.0, 0.2, 0.005)?;
    let rows = weight_sweep(&g, 0, &grid, default_window(g.vertex_count()))?;
    println!("n,peak_probability,peak_step");
    for (n, peak) in rows {
        println!(
            "{},{},{}",
            format_real(n),
            format_real(peak.p_peak),
            peak.t_peak
        );
    }
    Ok(())
}
