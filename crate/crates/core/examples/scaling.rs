//! Peak step against lattice size with degree-centrality weights, and the
//! fitted exponent of t_peak ~ N^a.

use dtqw::search::{scaling_study, GraphFamily, WeightRule, WindowRule};

fn main() -> dtqw::Result<()> {
    let studies = [
        (
            GraphFamily::Lattice2d,
            (10..=30).step_by(4).collect::<Vec<_>>(),
        ),
        (GraphFamily::Lattice3d, vec![5, 7, 9]),
    ];
    for (family, sizes) in studies {
        let report = scaling_study(
            family,
            &sizes,
            WeightRule::DegreeCentrality,
            WindowRule::Auto,
        )?;
        println!("{family:?}");
        for row in &report.rows {
            println!(
                "  N={:<5} p={:.4} t={}",
                row.vertex_count, row.peak.p_peak, row.peak.t_peak
            );
        }
        match report.exponent {
            Some(a) => println!("  exponent {a:.3}"),
            None => println!("  too few sizes for a fit"),
        }
    }
    Ok(())
}
