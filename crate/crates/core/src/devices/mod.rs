//! Device equations and their Newton linearizations.
//!
//! Every evaluation is a pure function of terminal voltages (and, for the
//! memristor, its internal state), returning currents together with the
//! analytic partial derivatives the solver stamps.

mod bjt;
mod limit;
mod memristor;

pub use bjt::{eval_bjt, BjtEval, BjtParams};
pub use limit::{critical_voltage, limit_junction_voltage};
pub use memristor::{eval_memristor, window_joglekar, MemristorEval, MemristorParams, Window};

/// Thermal voltage at 27 °C (V).
pub const VT: f64 = 0.025852;

/// Largest exponent evaluated exactly; beyond it `exp` continues linearly.
pub const EXP_LIMIT: f64 = 80.0;

/// `exp(a)` with linear continuation above [`EXP_LIMIT`]. Returns the value
/// and its derivative; the pair is continuous across the limit.
pub(crate) fn limited_exp(a: f64) -> (f64, f64) {
    if a > EXP_LIMIT {
        let e = EXP_LIMIT.exp();
        (e * (1.0 + a - EXP_LIMIT), e)
    } else {
        let e = a.exp();
        (e, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limited_exp_is_c1_at_the_clamp() {
        let (below, d_below) = limited_exp(EXP_LIMIT - 1e-9);
        let (above, d_above) = limited_exp(EXP_LIMIT + 1e-9);
        assert!((above - below) / below < 1e-8);
        assert!((d_above - d_below) / d_below < 1e-8);
        let (huge, _) = limited_exp(1e6);
        assert!(huge.is_finite());
    }
}
