#![allow(dead_code)]

use std::path::PathBuf;

use mirrorsim::netlist::{parse_circuit, Circuit};

pub const CORPUS: [&str; 4] = ["basic_cm", "widlar", "widlar_mem", "memristor_sine"];

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(format!("{name}.cir"))
}

pub fn corpus_text(name: &str) -> String {
    let path = corpus_path(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn corpus(name: &str) -> Circuit {
    parse_circuit(&corpus_text(name)).unwrap_or_else(|e| panic!("{name}.cir: {e}"))
}

/// Relative error with a floor, so that partials which vanish analytically
/// are compared against the scale of their neighbours instead of zero.
pub fn rel_err(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

/// Central difference of `f` at `x` with step `h`.
pub fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Root of a decreasing-minus-increasing scalar function on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
