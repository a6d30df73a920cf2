//! Search for one vertex of K400 with and without a weighted loop.

use dtqw::search::{default_window, find_first_peak, run_search};
use dtqw::{build_complete, CoinConfig};

fn main() -> dtqw::Result<()> {
    let n = 400;
    let plain = build_complete(n, false)?;
    let looped = build_complete(n, true)?;
    let window = default_window(n);

    let trace = run_search(&plain, &CoinConfig::standard().with_marked([0]), window)?;
    let peak = find_first_peak(&trace);
    println!("no loop      p={:.4} t={}", peak.p_peak, peak.t_peak);

    for w in [0.5, 1.0, 2.0] {
        let cfg = CoinConfig::grover_loop_uniform(n, w).with_marked([0]);
        let peak = find_first_peak(&run_search(&looped, &cfg, window)?);
        println!("loop n={w:<4}  p={:.4} t={}", peak.p_peak, peak.t_peak);
    }
    Ok(())
}
