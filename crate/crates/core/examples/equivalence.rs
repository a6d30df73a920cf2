//! An integer loop weight reproduces a walk with that many real loops. The
//! weighted walk is compared with a dense unitary built on the multi-loop
//! graph.

use std::collections::BTreeSet;

use dtqw::oracle::equivalence_check;
use dtqw::{build_complete, build_lattice, Boundary};

fn main() -> dtqw::Result<()> {
    let graphs = [
        (
            "5x5 torus",
            build_lattice(&[5, 5], Boundary::Periodic, false)?,
        ),
        ("K10", build_complete(10, false)?),
    ];
    for (name, g) in &graphs {
        for n in 1..=3 {
            let r = equivalence_check(g, n, &BTreeSet::from([0]), 100)?;
            println!(
                "{name:<10} n={n} marginal {:.1e} amplitude {:.1e}",
                r.marginal, r.amplitude
            );
        }
    }
    Ok(())
}
