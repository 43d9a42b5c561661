//! Greedy hierarchy from an old vertex at the origin, and its success rate
//! as the starting mark decreases.

use wdrcm::hierarchy::{build_chain, check_chain, success_curve};
use wdrcm::model::{alpha_window, KernelKind, ModelParams, ProfileKind};

fn main() -> wdrcm::Result<()> {
    let params = ModelParams::new(1, 0.8, 1.0, 2.0, KernelKind::Min, ProfileKind::normalized_polynomial(1, 2.0))?
        .with_p(0.5)?;
    let w = alpha_window(&params)?;
    println!("alpha1 in {:?}, default pick {:?}", w.alpha1_range, w.default_pick());

    let chain = build_chain(0.05, 3, None, &params, 11)?;
    check_chain(&chain, &params)?;
    for (k, hop) in chain.hops.iter().enumerate() {
        println!(
            "hop {}: target mark {:.3e} at {:?}, connector mark {:.3}",
            k + 1,
            hop.target.mark,
            hop.target.position,
            hop.connector.mark
        );
    }
    println!("failure: {:?}", chain.failure);

    let curve = success_curve(&[0.1, 0.03], 3, 200, &params, None, 1)?;
    for p in &curve.points {
        println!("s0={} success {:.3} [{:.3}, {:.3}]", p.s0, p.probability, p.ci_low, p.ci_high);
    }
    Ok(())
}
