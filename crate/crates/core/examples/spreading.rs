//! Return probability at the center of a 101x101 torus for a few loop weights.

use dtqw::{build_lattice, spreading_probe, Boundary};

fn main() -> dtqw::Result<()> {
    let g = build_lattice(&[101, 101], Boundary::Periodic, true)?;
    let weights = [0.0, 0.5, 1.0, 2.0];
    let traces = weights
        .iter()
        .map(|&n| spreading_probe(&g, n, 50))
        .collect::<dtqw::Result<Vec<_>>>()?;
    print!("step");
    for n in weights {
        print!(",n={n}");
    }
    println!();
    for t in (0..=50).step_by(5) {
        print!("{t}");
        for tr in &traces {
            print!(",{:.6}", tr[t]);
        }
        println!();
    }
    Ok(())
}
