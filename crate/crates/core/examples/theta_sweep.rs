//! Reach frequencies of the origin cluster over a small (p, L) grid, with
//! the crossing windows between side lengths.

use wdrcm::model::{pc_lower_bound, ModelParams};
use wdrcm::percolation::{pc_sweep, SweepOptions};

fn main() -> wdrcm::Result<()> {
    let params = ModelParams::pa_polynomial(1, 0.25, 1.0, 2.0)?;
    println!("lower bound for p_c: {:?}", pc_lower_bound(&params));
    let p_grid = [0.05, 0.1, 0.2, 0.4, 0.8];
    let table = pc_sweep(&params, &p_grid, &[25.0, 50.0], 2000, 1, SweepOptions::default())?;
    for s in &table.summaries {
        println!("p={:<5} L={:<4} f={:.4} [{:.4}, {:.4}]", s.p, s.l, s.frequency, s.ci_low, s.ci_high);
    }
    for c in &table.crossings {
        println!("crossing L {} -> {}: p in ({}, {}]", c.l_small, c.l_large, c.p_low, c.p_high);
    }
    Ok(())
}
