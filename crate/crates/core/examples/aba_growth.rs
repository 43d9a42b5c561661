//! Grows the age-based attachment graph, follows the giant component after
//! percolation and fits the degree tail of the rescaled graph.

use wdrcm::aba::{degree_tail_fit, giant_fraction_trajectory, grow_aba, rescale_map};
use wdrcm::model::ModelParams;

fn main() -> wdrcm::Result<()> {
    let params = ModelParams::pa_polynomial(1, 0.75, 1.0, 2.0)?;
    let traj = giant_fraction_trajectory(&params, 0.3, &[250.0, 1000.0, 4000.0], 3, 5)?;
    for s in &traj.summaries {
        println!("t={:<6} largest fraction {:.3} [{:.3}, {:.3}]", s.t, s.mean_largest, s.ci_low, s.ci_high);
    }

    let g = grow_aba(20_000.0, &params, 9)?;
    let rescaled = rescale_map(&g, g.time())?;
    let fit = degree_tail_fit(&rescaled)?;
    println!(
        "{} vertices, tail exponent {:.3} (1 + 1/gamma = {:.3}), reliable {}",
        rescaled.n_vertices(),
        fit.exponent,
        1.0 + 1.0 / params.gamma,
        fit.reliable
    );
    Ok(())
}
