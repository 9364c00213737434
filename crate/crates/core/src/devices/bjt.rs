use super::{limited_exp, VT};

/// NPN transport-model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BjtParams {
    /// Saturation current (A).
    pub is_sat: f64,
    /// Forward current gain.
    pub bf: f64,
    /// Forward Early voltage (V); infinite disables the Early effect.
    pub vaf: f64,
    /// Reverse current gain.
    pub br: f64,
    /// Thermal voltage (V).
    pub vt: f64,
}

impl Default for BjtParams {
    fn default() -> Self {
        Self {
            is_sat: 1e-14,
            bf: 100.0,
            vaf: f64::INFINITY,
            br: 1.0,
            vt: VT,
        }
    }
}

impl BjtParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.is_sat > 0.0 && self.is_sat.is_finite()) {
            return Err("IS must be positive".into());
        }
        if !(self.bf > 0.0 && self.bf.is_finite()) {
            return Err("BF must be positive".into());
        }
        if !(self.br > 0.0 && self.br.is_finite()) {
            return Err("BR must be positive".into());
        }
        if !(self.vaf > 0.0) {
            return Err("VAF must be positive (omit it for no Early effect)".into());
        }
        if !(self.vt > 0.0) {
            return Err("thermal voltage must be positive".into());
        }
        Ok(())
    }
}

/// Terminal currents (into the device) and their partials with respect to
/// the junction voltages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BjtEval {
    pub ic: f64,
    pub ib: f64,
    pub ie: f64,
    /// ∂Ic/∂Vbe
    pub gc_be: f64,
    /// ∂Ic/∂Vbc
    pub gc_bc: f64,
    /// ∂Ib/∂Vbe
    pub gb_be: f64,
    /// ∂Ib/∂Vbc
    pub gb_bc: f64,
}

impl BjtEval {
    /// ∂Ie/∂Vbe
    pub fn ge_be(&self) -> f64 {
        -(self.gc_be + self.gb_be)
    }

    /// ∂Ie/∂Vbc
    pub fn ge_bc(&self) -> f64 {
        -(self.gc_bc + self.gb_bc)
    }
}

/// Ebers–Moll transport model with the Early factor applied to the
/// transport current.
pub fn eval_bjt(vbe: f64, vbc: f64, p: &BjtParams) -> BjtEval {
    let (ebe, dbe) = limited_exp(vbe / p.vt);
    let (ebc, dbc) = limited_exp(vbc / p.vt);
    let icc = p.is_sat * (ebe - 1.0);
    let iec = p.is_sat * (ebc - 1.0);
    let gcc = p.is_sat * dbe / p.vt;
    let gec = p.is_sat * dbc / p.vt;

    let (early, d_early) = if p.vaf.is_finite() {
        (1.0 - vbc / p.vaf, -1.0 / p.vaf)
    } else {
        (1.0, 0.0)
    };
    let it = (icc - iec) * early;
    let ic = it - iec / p.br;
    let ib = icc / p.bf + iec / p.br;
    BjtEval {
        ic,
        ib,
        ie: -(ic + ib),
        gc_be: gcc * early,
        gc_bc: -gec * early + (icc - iec) * d_early - gec / p.br,
        gb_be: gcc / p.bf,
        gb_bc: gec / p.br,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn paper_card() -> BjtParams {
        BjtParams {
            vaf: 100.0,
            ..BjtParams::default()
        }
    }

    #[test]
    fn forward_active_golden() {
        // Reference values from a 40-digit evaluation of the same equations.
        let e = eval_bjt(0.7, -4.3, &paper_card());
        let ic = 0.005_994_688_814_843_946_457_790_085_886_160_424_689_62;
        let ib = 0.000_057_475_444_043_916_744_561_745_789_896_073_103_447_948;
        assert!((e.ic - ic).abs() / ic < 1e-12, "{}", e.ic);
        assert!((e.ib - ib).abs() / ib < 1e-12, "{}", e.ib);
        assert!((e.ie + ic + ib).abs() / ic < 1e-12);
    }

    #[test]
    fn zero_bias_is_off() {
        let e = eval_bjt(0.0, 0.0, &paper_card());
        assert_eq!((e.ic, e.ib, e.ie), (0.0, 0.0, 0.0));
    }

    #[test]
    fn no_early_effect_means_no_output_conductance() {
        let e = eval_bjt(0.7, -5.0, &BjtParams::default());
        assert!(e.gc_bc.abs() < 1e-20 * e.gc_be, "{}", e.gc_bc);
    }

    #[test]
    fn huge_bias_stays_finite() {
        let e = eval_bjt(50.0, 40.0, &paper_card());
        for v in [e.ic, e.ib, e.ie, e.gc_be, e.gc_bc, e.gb_be, e.gb_bc] {
            assert!(v.is_finite());
        }
    }

    proptest! {
        #[test]
        fn terminal_currents_sum_to_zero(vbe in -2.0f64..1.0, vbc in -10.0f64..1.0) {
            let e = eval_bjt(vbe, vbc, &paper_card());
            let scale = e.ic.abs().max(e.ib.abs()).max(e.ie.abs()).max(f64::MIN_POSITIVE);
            prop_assert!((e.ic + e.ib + e.ie).abs() <= 1e-15 * scale);
        }

        #[test]
        // Leakage terms of order IS·(1 + BF/BR) perturb the ratio, so this
        // holds to 1e-9 only at mA-class collector currents.
        fn forward_active_ratio_is_bf(vbe in 0.66f64..0.85, vbc in -10.0f64..-0.2, bf in 20.0f64..100.0) {
            let p = BjtParams { bf, ..BjtParams::default() };
            let e = eval_bjt(vbe, vbc, &p);
            prop_assert!(((e.ic / e.ib) - bf).abs() / bf < 1e-9);
        }

        #[test]
        fn early_slope(vbe in 0.6f64..0.75, vcb in 0.2f64..0.8) {
            // Slope of Ic against collector voltage at fixed Vbe.
            let p = paper_card();
            let h = 1e-4;
            let ic = |vcb: f64| eval_bjt(vbe, -vcb, &p).ic;
            let slope = (ic(vcb + h) - ic(vcb - h)) / (2.0 * h);
            let expected = ic(vcb) / p.vaf;
            prop_assert!((slope - expected).abs() / expected < 0.01);
        }
    }
}
