/// Junction voltage above which exponential growth is damped,
/// `vt * ln(vt / (sqrt(2) * is_sat))`.
pub fn critical_voltage(vt: f64, is_sat: f64) -> f64 {
    vt * (vt / (std::f64::consts::SQRT_2 * is_sat)).ln()
}

/// Logarithmic damping of a junction-voltage update (SPICE `pnjlim`).
/// Returns the voltage to evaluate the junction at and whether it was
/// limited.
pub fn limit_junction_voltage(v_new: f64, v_old: f64, vt: f64, vcrit: f64) -> (f64, bool) {
    if v_new > vcrit && (v_new - v_old).abs() > 2.0 * vt {
        if v_old > 0.0 {
            let arg = 1.0 + (v_new - v_old) / vt;
            if arg > 0.0 {
                (v_old + vt * arg.ln(), true)
            } else {
                (vcrit, true)
            }
        } else {
            (vt * (v_new / vt).ln(), true)
        }
    } else {
        (v_new, false)
    }
}
