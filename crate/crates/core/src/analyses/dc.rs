use super::trace::signal_row;
use super::{AnalysisError, Trace};
use crate::exec::{self, Execution};
use crate::netlist::{AnalysisDirective, Circuit};
use crate::solver::{solve_operating_point, Solution, Stimulus, Tolerances};

/// Sweep points per independently solved chunk. Each chunk cold-starts its
/// first point and warm-starts the rest, so results do not depend on the
/// number of worker threads.
pub const SWEEP_CHUNK: usize = 8;

/// Inclusive sweep values `start + k·step`.
pub fn sweep_values(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|k| start + k as f64 * step).collect()
}

pub fn run_dc_sweep(circuit: &Circuit, d: &AnalysisDirective, tol: &Tolerances) -> Result<Trace, AnalysisError> {
    run_dc_sweep_with(circuit, d, tol, Execution::default())
}

pub fn run_dc_sweep_with(
    circuit: &Circuit,
    d: &AnalysisDirective,
    tol: &Tolerances,
    exec: Execution,
) -> Result<Trace, AnalysisError> {
    let AnalysisDirective::DcSweep {
        source,
        start,
        stop,
        step,
    } = d
    else {
        return Err(AnalysisError::Invalid("not a DC sweep directive".into()));
    };
    let (index, comp) = circuit
        .component(source)
        .filter(|(_, c)| c.is_source())
        .ok_or_else(|| AnalysisError::UnknownComponent(source.clone()))?;
    let values = sweep_values(*start, *stop, *step);
    let chunks: Vec<&[f64]> = values.chunks(SWEEP_CHUNK).collect();

    let solved = exec::map(exec, &chunks, |chunk| {
        let mut rows = Vec::with_capacity(chunk.len());
        let mut prev: Option<Solution> = None;
        for &value in chunk.iter() {
            let stim = Stimulus::swept(index, value);
            let sol = solve_operating_point(circuit, tol, &stim, prev.as_ref()).map_err(|error| {
                AnalysisError::SweepPoint {
                    component: comp.name.clone(),
                    value,
                    error,
                }
            })?;
            rows.push((value, signal_row(circuit, &sol, &stim)));
            prev = Some(sol);
        }
        Ok(rows)
    });

    let mut trace = Trace::for_circuit(circuit, format!("V({})", comp.name));
    if matches!(comp.kind, crate::netlist::ComponentKind::CurrentSource { .. }) {
        trace.axis_label = format!("I({})", comp.name);
    }
    for chunk in solved {
        for (value, row) in chunk? {
            trace.push(value, &row);
        }
    }
    Ok(trace)
}
