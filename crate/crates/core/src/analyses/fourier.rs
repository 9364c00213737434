use rustfft::{num_complex::Complex, FftPlanner};

use super::trace::interpolate;
use super::{AnalysisError, Trace};
use crate::netlist::AnalysisDirective;

/// Samples taken from the last fundamental period.
pub const RESAMPLE_POINTS: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierReport {
    pub signal: String,
    /// Fundamental frequency (Hz).
    pub fundamental: f64,
    pub dc: f64,
    /// Magnitudes of harmonics 1..=N; index 0 is the fundamental.
    pub magnitudes: Vec<f64>,
    /// Phases of harmonics 1..=N (degrees, cosine reference).
    pub phases: Vec<f64>,
    /// THD over harmonics 2..=N (%).
    pub thd_requested: f64,
    /// THD over every harmonic up to the resampling Nyquist bin (%).
    pub thd_full: f64,
}

/// One-sided amplitude spectrum of a window holding exactly one period.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub dc: f64,
    /// Amplitude of bin k at index k; index 0 is unused and set to 0.
    pub magnitudes: Vec<f64>,
    /// Phase of bin k in degrees.
    pub phases: Vec<f64>,
}

/// Amplitude spectrum up to and including the Nyquist bin.
pub fn spectrum(samples: &[f64]) -> Spectrum {
    let n = samples.len();
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let mut magnitudes = vec![0.0; half + 1];
    let mut phases = vec![0.0; half + 1];
    for k in 1..=half {
        let scale = if 2 * k == n { 1.0 } else { 2.0 } / n as f64;
        magnitudes[k] = buf[k].norm() * scale;
        phases[k] = buf[k].arg().to_degrees();
    }
    Spectrum {
        dc: buf[0].re / n as f64,
        magnitudes,
        phases,
    }
}

/// Resamples the final period `[t_end - 1/f0, t_end)` at
/// [`RESAMPLE_POINTS`] equidistant points by linear interpolation.
pub fn resample_last_period(axis: &[f64], values: &[f64], fundamental: f64) -> Result<Vec<f64>, AnalysisError> {
    let period = 1.0 / fundamental;
    let (first, last) = match (axis.first(), axis.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => {
            return Err(AnalysisError::TraceTooShort { span: 0.0, period });
        }
    };
    let span = last - first;
    if span < period * (1.0 - 1e-9) {
        return Err(AnalysisError::TraceTooShort { span, period });
    }
    let start = last - period;
    Ok((0..RESAMPLE_POINTS)
        .map(|j| interpolate(axis, values, start + period * j as f64 / RESAMPLE_POINTS as f64))
        .collect())
}

/// Harmonic analysis of sampled data.
pub fn fourier_of_samples(
    signal: &str,
    axis: &[f64],
    values: &[f64],
    fundamental: f64,
    harmonics: usize,
) -> Result<FourierReport, AnalysisError> {
    if harmonics < 2 || harmonics >= RESAMPLE_POINTS / 2 {
        return Err(AnalysisError::Invalid(format!(
            "harmonic count must lie in 2..{}",
            RESAMPLE_POINTS / 2
        )));
    }
    let window = resample_last_period(axis, values, fundamental)?;
    let spec = spectrum(&window);
    let c1 = spec.magnitudes[1];
    if c1 == 0.0 {
        return Err(AnalysisError::ZeroFundamental(signal.to_string()));
    }
    let thd = |bins: &[f64]| 100.0 * bins.iter().map(|c| c * c).sum::<f64>().sqrt() / c1;
    Ok(FourierReport {
        signal: signal.to_string(),
        fundamental,
        dc: spec.dc,
        magnitudes: spec.magnitudes[1..=harmonics].to_vec(),
        phases: spec.phases[1..=harmonics].to_vec(),
        thd_requested: thd(&spec.magnitudes[2..=harmonics]),
        thd_full: thd(&spec.magnitudes[2..]),
    })
}

/// Harmonic analysis of one trace signal.
pub fn fourier_of(trace: &Trace, signal: &str, fundamental: f64, harmonics: usize) -> Result<FourierReport, AnalysisError> {
    let values = trace
        .signal(signal)
        .ok_or_else(|| AnalysisError::MissingSignal(signal.to_string()))?;
    let name = &trace.names[trace.index_of(signal).expect("found above")];
    fourier_of_samples(name, &trace.axis, values, fundamental, harmonics)
}

/// Runs a `.four` directive: one report per listed signal.
pub fn fourier_analysis(trace: &Trace, d: &AnalysisDirective) -> Result<Vec<FourierReport>, AnalysisError> {
    let AnalysisDirective::Four {
        fundamental,
        harmonics,
        signals,
    } = d
    else {
        return Err(AnalysisError::Invalid("not a .four directive".into()));
    };
    signals
        .iter()
        .map(|s| fourier_of(trace, s, *fundamental, *harmonics))
        .collect()
}

impl FourierReport {
    /// SPICE-style text table.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "Fourier components of {}\nDC component: {:e}\nFundamental: {:e} Hz\n\nHarmonic  Frequency (Hz)  Magnitude       Phase (deg)  Normalized\n",
            self.signal, self.dc, self.fundamental
        );
        for (k, (m, p)) in self.magnitudes.iter().zip(&self.phases).enumerate() {
            s.push_str(&format!(
                "{:>8}  {:>14.6e}  {:>14.6e}  {:>11.4}  {:>10.6e}\n",
                k + 1,
                self.fundamental * (k + 1) as f64,
                m,
                p,
                m / self.magnitudes[0]
            ));
        }
        s.push_str(&format!(
            "\nTotal harmonic distortion: {:.6}% ({:.6}%)\n",
            self.thd_requested, self.thd_full
        ));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn sampled(f0: f64, periods: f64, per_period: usize, f: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
        let n = (periods * per_period as f64) as usize;
        let dt = 1.0 / (f0 * per_period as f64);
        let axis: Vec<f64> = (0..=n).map(|k| k as f64 * dt).collect();
        let values = axis.iter().map(|t| f(*t)).collect();
        (axis, values)
    }

    #[test]
    fn unit_sine() {
        let (a, v) = sampled(50.0, 3.0, 2000, |t| (TAU * 50.0 * t).sin());
        let r = fourier_of_samples("s", &a, &v, 50.0, 9).unwrap();
        assert!((r.magnitudes[0] - 1.0).abs() < 1e-3);
        assert!(r.thd_requested < 0.05);
        assert!(r.dc.abs() < 1e-9);
    }

    #[test]
    fn third_harmonic_adds_its_ratio() {
        for a3 in [0.01, 0.05, 0.2] {
            let (a, v) = sampled(1e3, 2.0, 4096, |t| {
                (TAU * 1e3 * t).sin() + a3 * (3.0 * TAU * 1e3 * t).sin()
            });
            let r = fourier_of_samples("s", &a, &v, 1e3, 9).unwrap();
            assert!((r.thd_requested - 100.0 * a3).abs() < 0.1, "{}", r.thd_requested);
        }
    }

    #[test]
    fn too_short_and_zero_fundamental() {
        let (a, v) = sampled(1.0, 0.5, 100, |t| t);
        assert!(matches!(
            fourier_of_samples("s", &a, &v, 1.0, 9),
            Err(AnalysisError::TraceTooShort { .. })
        ));
        let (a, v) = sampled(1.0, 2.0, 100, |_| 3.0);
        assert!(matches!(
            fourier_of_samples("s", &a, &v, 1.0, 9),
            Err(AnalysisError::ZeroFundamental(_))
        ));
    }

    #[test]
    fn nyquist_bin_scaling() {
        let x: Vec<f64> = (0..8).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let s = spectrum(&x);
        assert!((s.magnitudes[4] - 1.0).abs() < 1e-12);
        assert!(s.dc.abs() < 1e-12);
    }
}
