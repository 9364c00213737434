/// Total area of the lobes of an i–v loop over the samples given (one
/// period). The loop is split wherever `v` changes sign; each lobe's area is
/// `|∮ i dv|` over that segment, and the lobe areas are summed.
pub fn lobe_area(v: &[f64], i: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut lobe = 0.0;
    for k in 1..v.len() {
        let (v0, v1, i0, i1) = (v[k - 1], v[k], i[k - 1], i[k]);
        if v0 * v1 < 0.0 {
            // Split the segment at the zero crossing.
            let s = v0 / (v0 - v1);
            let ic = i0 + s * (i1 - i0);
            lobe += 0.5 * (i0 + ic) * (0.0 - v0);
            total += lobe.abs();
            lobe = 0.5 * (ic + i1) * v1;
        } else {
            lobe += 0.5 * (i0 + i1) * (v1 - v0);
        }
    }
    total + lobe.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn resistor_has_no_area() {
        let v: Vec<f64> = (0..=1000).map(|k| (TAU * k as f64 / 1000.0).sin()).collect();
        let i: Vec<f64> = v.iter().map(|v| v / 100.0).collect();
        assert!(lobe_area(&v, &i) < 1e-12);
    }

    #[test]
    fn ellipse_area() {
        // v = sin, i = cos traces a unit circle once: area π.
        let n = 100_000;
        let v: Vec<f64> = (0..=n).map(|k| (TAU * k as f64 / n as f64).sin()).collect();
        let i: Vec<f64> = (0..=n).map(|k| (TAU * k as f64 / n as f64).cos()).collect();
        // Split at v = 0 into two half-discs of area π/2 each.
        assert!((lobe_area(&v, &i) - std::f64::consts::PI).abs() < 1e-6);
    }
}
