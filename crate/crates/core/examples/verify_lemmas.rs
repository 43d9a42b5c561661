//! Numerical checks: a few appendix integrals, the I_rho cross-check and
//! one two-connection bound.

use wdrcm::model::{KernelKind, ModelParams, ProfileKind};
use wdrcm::verify::{
    random_admissible_configuration, verify_appendix_lemma, verify_i_rho, verify_two_connection,
    Lemma, LemmaPoint,
};

fn main() -> wdrcm::Result<()> {
    let points = [
        (Lemma::A1a, LemmaPoint::new(0.4, 3).with_t0(0.2)),
        (Lemma::A1b, LemmaPoint::new(0.5, 2).with_t0(0.25)),
        (Lemma::A3, LemmaPoint::new(0.3, 2).with_t0(0.5).with_x(0.1)),
        (Lemma::A4, LemmaPoint::new(0.7, 1).with_x(0.05).with_m(3)),
    ];
    for (lemma, pt) in points {
        let r = verify_appendix_lemma(lemma, &pt)?;
        println!("{} {}: lhs={:.6e} {} rhs={:.6e} pass={}", r.check, r.point, r.lhs, r.relation, r.rhs, r.pass);
    }
    for d in 1..=3 {
        let params = ModelParams::new(d, 0.5, 1.0, 2.0, KernelKind::Pa, ProfileKind::Surgery)?;
        let r = verify_i_rho(&params)?;
        println!("I_rho d={d}: quadrature={:.6} closed form={:.6} ({})", r.lhs, r.rhs, r.note);
    }
    let params = ModelParams::new(1, 0.5, 1.0, 2.0, KernelKind::Pa, ProfileKind::Surgery)?.with_p(0.1)?;
    let (x, y) = random_admissible_configuration(&params, 3)?;
    let r = verify_two_connection(&params, &x, &y, 20_000, 4)?;
    println!("two connection: lhs={:.3e} rhs={:.3e} pass={}", r.lhs, r.rhs, r.pass);
    Ok(())
}
