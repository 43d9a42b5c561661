use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use crate::error::{Error, Result};

/// The symmetric mark kernels `g(s, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// `(s^{-gamma/d} + t^{-gamma/d})^{-d} / beta`
    Sum,
    /// `min(s, t)^gamma / beta`
    Min,
    /// `max(s, t)^{1-gamma} min(s, t)^gamma / beta`
    Pa,
    /// `s^gamma t^gamma / beta`
    Product,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Sum => "sum",
            KernelKind::Min => "min",
            KernelKind::Pa => "pa",
            KernelKind::Product => "product",
        }
    }
}

pub(crate) fn check_mark(name: &'static str, m: f64) -> Result<()> {
    if m > 0.0 && m <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("mark {m} outside (0, 1]")))
    }
}

/// Evaluates `g(s, t)` for the selected kernel.
pub fn kernel_eval(kind: KernelKind, s: f64, t: f64, params: &ModelParams) -> Result<f64> {
    check_mark("s", s)?;
    check_mark("t", t)?;
    Ok(raw_kernel(kind, s, t, params.gamma, params.beta, params.d))
}

#[inline]
pub(crate) fn raw_kernel(kind: KernelKind, s: f64, t: f64, gamma: f64, beta: f64, d: usize) -> f64 {
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    match kind {
        KernelKind::Sum => {
            let e = -gamma / d as f64;
            (lo.powf(e) + hi.powf(e)).powi(-(d as i32)) / beta
        }
        KernelKind::Min => lo.powf(gamma) / beta,
        KernelKind::Pa => hi.powf(1.0 - gamma) * lo.powf(gamma) / beta,
        KernelKind::Product => lo.powf(gamma) * hi.powf(gamma) / beta,
    }
}

/// Per-vertex powers so that kernel values inside pair loops need only
/// multiplications.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MarkPowers {
    pub mark: f64,
    /// `t^gamma` (Min, PA, Product) or `t^{-gamma/d}` (Sum)
    pub a: f64,
    /// `t^{1-gamma}` (PA), unused otherwise
    pub b: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct FastKernel {
    kind: KernelKind,
    gamma: f64,
    inv_beta: f64,
    d: i32,
}

impl FastKernel {
    pub fn new(params: &ModelParams) -> Self {
        Self::with_kind(params, params.kernel)
    }

    pub fn with_kind(params: &ModelParams, kind: KernelKind) -> Self {
        Self {
            kind,
            gamma: params.gamma,
            inv_beta: 1.0 / params.beta,
            d: params.d as i32,
        }
    }

    pub fn powers(&self, mark: f64) -> MarkPowers {
        match self.kind {
            KernelKind::Sum => MarkPowers {
                mark,
                a: mark.powf(-self.gamma / self.d as f64),
                b: 0.0,
            },
            _ => MarkPowers {
                mark,
                a: mark.powf(self.gamma),
                b: mark.powf(1.0 - self.gamma),
            },
        }
    }

    #[inline(always)]
    pub fn eval(&self, u: &MarkPowers, v: &MarkPowers) -> f64 {
        match self.kind {
            KernelKind::Sum => (u.a + v.a).powi(-self.d) * self.inv_beta,
            KernelKind::Min => {
                if u.mark <= v.mark {
                    u.a * self.inv_beta
                } else {
                    v.a * self.inv_beta
                }
            }
            KernelKind::Pa => {
                if u.mark <= v.mark {
                    u.a * v.b * self.inv_beta
                } else {
                    v.a * u.b * self.inv_beta
                }
            }
            KernelKind::Product => u.a * v.a * self.inv_beta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProfileKind;
    use proptest::prelude::*;

    fn params(d: usize, gamma: f64, beta: f64) -> ModelParams {
        ModelParams::new(d, gamma, beta, 2.0, KernelKind::Pa, ProfileKind::Surgery).unwrap()
    }

    #[test]
    fn worked_values() {
        let p = params(1, 0.3, 1.0);
        assert!((kernel_eval(KernelKind::Pa, 0.25, 0.25, &p).unwrap() - 0.25).abs() < 1e-15);
        let p = params(1, 0.5, 1.0);
        assert!((kernel_eval(KernelKind::Min, 0.25, 1.0, &p).unwrap() - 0.5).abs() < 1e-15);
        assert!((kernel_eval(KernelKind::Sum, 1.0, 1.0, &p).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn marks_outside_unit_interval_rejected() {
        let p = params(1, 0.5, 1.0);
        assert!(kernel_eval(KernelKind::Pa, 0.0, 0.5, &p).is_err());
        assert!(kernel_eval(KernelKind::Pa, 0.5, 1.5, &p).is_err());
        assert!(kernel_eval(KernelKind::Min, -0.1, 0.5, &p).is_err());
    }

    #[test]
    fn sum_kernel_sandwich_on_grid() {
        for d in 1..=3 {
            for &gamma in &[0.1, 0.5, 0.9] {
                let p = params(d, gamma, 1.7);
                let scale = 2f64.powi(-(d as i32));
                for i in 1..=100 {
                    for j in 1..=100 {
                        let s = i as f64 / 100.0;
                        let t = j as f64 / 100.0;
                        let gmin = kernel_eval(KernelKind::Min, s, t, &p).unwrap();
                        let gsum = kernel_eval(KernelKind::Sum, s, t, &p).unwrap();
                        assert!(scale * gmin <= gsum * (1.0 + 1e-12));
                        assert!(gsum <= gmin * (1.0 + 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn pa_equals_product_at_half() {
        let p = params(2, 0.5, 0.8);
        for i in 1..=40 {
            for j in 1..=40 {
                let s = i as f64 / 40.0;
                let t = j as f64 / 40.0;
                let a = kernel_eval(KernelKind::Pa, s, t, &p).unwrap();
                let b = kernel_eval(KernelKind::Product, s, t, &p).unwrap();
                assert!((a - b).abs() <= 1e-14 * a.max(b));
            }
        }
    }

    #[test]
    fn fast_kernel_matches_reference() {
        for kind in [KernelKind::Sum, KernelKind::Min, KernelKind::Pa, KernelKind::Product] {
            for d in 1..=3 {
                let p = params(d, 0.37, 1.3).with_kernel(kind);
                let fk = FastKernel::new(&p);
                for &(s, t) in &[(0.1, 0.9), (0.9, 0.1), (0.5, 0.5), (1e-6, 1.0)] {
                    let slow = kernel_eval(kind, s, t, &p).unwrap();
                    let fast = fk.eval(&fk.powers(s), &fk.powers(t));
                    assert!((slow - fast).abs() <= 1e-13 * slow, "{kind:?} d={d}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn symmetric_and_monotone(s in 1e-6f64..1.0, t in 1e-6f64..1.0, gamma in 0.01f64..0.99, k in 0usize..4) {
            let kind = [KernelKind::Sum, KernelKind::Min, KernelKind::Pa, KernelKind::Product][k];
            let p = params(2, gamma, 1.0);
            let a = kernel_eval(kind, s, t, &p).unwrap();
            let b = kernel_eval(kind, t, s, &p).unwrap();
            prop_assert!((a - b).abs() <= 1e-14 * a.max(b));
            prop_assert!(a > 0.0 && a.is_finite());
            let s2 = (s * 1.5).min(1.0);
            let c = kernel_eval(kind, s2, t, &p).unwrap();
            prop_assert!(c >= a * (1.0 - 1e-12));
        }
    }
}
