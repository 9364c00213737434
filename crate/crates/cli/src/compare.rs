use std::collections::BTreeSet;
use std::fmt::Write;
use std::path::Path;

use mirrorsim::analyses::{Results, RunOptions};
use mirrorsim::exec;
use mirrorsim::netlist::{AnalysisDirective, Circuit};
use mirrorsim::Execution;

use crate::run::{load, simulate};
use crate::{Failure, Metric};

pub fn compare(a: &Path, b: &Path, metric: Metric, exec: Execution) -> Result<String, Failure> {
    let ca = load(a)?;
    let cb = load(b)?;
    if metric == Metric::Thd {
        for (path, c) in [(a, &ca), (b, &cb)] {
            check_thd_directives(path, c)?;
        }
    }
    let opts = RunOptions {
        exec,
        ..RunOptions::default()
    };
    let (ra, rb) = exec::join(exec, || simulate(a, &ca, &opts), || simulate(b, &cb, &opts));
    let (ra, rb) = (ra?, rb?);
    let (name_a, name_b) = (display_name(a), display_name(b));
    Ok(match metric {
        Metric::Thd => thd_table(&name_a, &name_b, &ra, &rb),
        Metric::Power => power_table(&name_a, &name_b, &ra, &rb),
    })
}

fn display_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.display().to_string())
}

fn check_thd_directives(path: &Path, c: &Circuit) -> Result<(), Failure> {
    let has_tran = c.directives.iter().any(|d| matches!(d, AnalysisDirective::Tran { .. }));
    if c.fourier_directive().is_none() || !has_tran {
        return Err(Failure::Analysis(format!(
            "{}: the thd metric needs both a .tran and a .four directive",
            path.display()
        )));
    }
    Ok(())
}

/// Relation of `b` to `a` over paired values, or `None` when mixed.
fn verdict(pairs: &[(f64, f64)]) -> Option<std::cmp::Ordering> {
    use std::cmp::Ordering::*;
    if pairs.iter().all(|(a, b)| a == b) {
        Some(Equal)
    } else if pairs.iter().all(|(a, b)| b < a) {
        Some(Less)
    } else if pairs.iter().all(|(a, b)| b > a) {
        Some(Greater)
    } else {
        None
    }
}

fn verdict_line(what: &str, a: &str, b: &str, pairs: &[(f64, f64)]) -> String {
    use std::cmp::Ordering::*;
    match verdict(pairs) {
        Some(Equal) => "Verdict: equal\n".into(),
        Some(Less) => format!("Verdict: {b} has lower {what} than {a}\n"),
        Some(Greater) => format!("Verdict: {a} has lower {what} than {b}\n"),
        None => format!("Verdict: mixed, neither circuit has lower {what} in every row\n"),
    }
}

fn thd_table(a: &str, b: &str, ra: &Results, rb: &Results) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<28} {:>18} {:>18}", "THD", a, b);
    let mut pairs = Vec::new();
    for (fa, fb) in ra.fourier.iter().zip(&rb.fourier) {
        let label = if fa.signal == fb.signal {
            fa.signal.clone()
        } else {
            format!("{} / {}", fa.signal, fb.signal)
        };
        let _ = writeln!(
            s,
            "{:<28} {:>17.6}% {:>17.6}%",
            format!("{label} requested"),
            fa.thd_requested,
            fb.thd_requested
        );
        let _ = writeln!(
            s,
            "{:<28} {:>17.6}% {:>17.6}%",
            format!("{label} full"),
            fa.thd_full,
            fb.thd_full
        );
        pairs.push((fa.thd_requested, fb.thd_requested));
        pairs.push((fa.thd_full, fb.thd_full));
    }
    s.push('\n');
    s.push_str(&verdict_line("THD", a, b, &pairs));
    s
}

fn power_table(a: &str, b: &str, ra: &Results, rb: &Results) -> String {
    let (pa, pb) = (
        ra.power.as_ref().expect("every run reports power"),
        rb.power.as_ref().expect("every run reports power"),
    );
    let mut s = String::new();
    let _ = writeln!(s, "{:<20} {:>18} {:>18}", "Average power (W)", a, b);
    let names: BTreeSet<String> = pa
        .entries
        .iter()
        .chain(&pb.entries)
        .map(|e| e.name.to_uppercase())
        .collect();
    let cell = |p: &mirrorsim::analyses::PowerReport, n: &str| {
        p.entry(n)
            .map(|e| format!("{:.6e}", e.power))
            .unwrap_or_else(|| "-".into())
    };
    for n in &names {
        let _ = writeln!(s, "{:<20} {:>18} {:>18}", n, cell(pa, n), cell(pb, n));
    }
    let _ = writeln!(s, "{:<20} {:>18.6e} {:>18.6e}", "total delivered", pa.delivered, pb.delivered);
    let _ = writeln!(s, "{:<20} {:>18.6e} {:>18.6e}", "total dissipated", pa.dissipated, pb.dissipated);
    s.push('\n');
    s.push_str(&verdict_line(
        "total power",
        a,
        b,
        &[(pa.delivered, pb.delivered)],
    ));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering::*;

    #[test]
    fn verdicts() {
        assert_eq!(verdict(&[(1.0, 1.0), (2.0, 2.0)]), Some(Equal));
        assert_eq!(verdict(&[(1.0, 0.5), (2.0, 1.0)]), Some(Less));
        assert_eq!(verdict(&[(1.0, 1.5)]), Some(Greater));
        assert_eq!(verdict(&[(1.0, 0.5), (2.0, 3.0)]), None);
        assert_eq!(verdict(&[(1.0, 1.0), (2.0, 1.0)]), None);
    }
}
