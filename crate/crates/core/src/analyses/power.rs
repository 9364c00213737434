use super::{AnalysisError, Trace};
use crate::netlist::{AnalysisDirective, Circuit, ComponentKind, NodeId};
use crate::solver::{branch_powers, Solution, Stimulus};

#[derive(Debug, Clone, PartialEq)]
pub struct PowerEntry {
    pub name: String,
    pub is_source: bool,
    /// Delivered power for sources, dissipated power otherwise (W).
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerReport {
    pub entries: Vec<PowerEntry>,
    /// Net power delivered by all independent sources (W).
    pub delivered: f64,
    /// Net power absorbed by all other components (W).
    pub dissipated: f64,
    /// `|delivered - dissipated|` (W).
    pub imbalance: f64,
    /// Averaging window `(from, to)` for transient reports.
    pub window: Option<(f64, f64)>,
}

impl PowerReport {
    fn from_absorbed(items: impl IntoIterator<Item = (String, bool, f64)>, window: Option<(f64, f64)>) -> Self {
        let entries: Vec<PowerEntry> = items
            .into_iter()
            .map(|(name, is_source, absorbed)| PowerEntry {
                name,
                is_source,
                power: if is_source { -absorbed } else { absorbed },
            })
            .collect();
        let delivered = entries.iter().filter(|e| e.is_source).map(|e| e.power).sum::<f64>();
        let dissipated = entries.iter().filter(|e| !e.is_source).map(|e| e.power).sum::<f64>();
        Self {
            entries,
            delivered,
            dissipated,
            imbalance: (delivered - dissipated).abs(),
            window,
        }
    }

    /// Whether the imbalance is below `rel` times the larger total.
    pub fn is_balanced(&self, rel: f64) -> bool {
        self.imbalance <= rel * self.delivered.abs().max(self.dissipated.abs())
    }

    pub fn entry(&self, name: &str) -> Option<&PowerEntry> {
        self.entries.iter().find(|e| e.name.eq_ignore_ascii_case(name))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("Average power (sources: delivered, others: dissipated)\n");
        if let Some((a, b)) = self.window {
            s.push_str(&format!("Window: {a:e} s to {b:e} s\n"));
        }
        s.push('\n');
        for e in &self.entries {
            let role = if e.is_source { "delivered" } else { "dissipated" };
            s.push_str(&format!("{:<12} {:>10}  {:>14.6e} W\n", e.name, role, e.power));
        }
        s.push_str(&format!(
            "\nTotal delivered:  {:.6e} W\nTotal dissipated: {:.6e} W\nImbalance:        {:.6e} W\n",
            self.delivered, self.dissipated, self.imbalance
        ));
        s
    }
}

/// Per-component power at a DC operating point. Solver gmin shunts are not
/// circuit components and are left out; each carries gmin·V², about 100 pW
/// at 10 V with the default 1e-12 S.
pub fn power_report_dc(circuit: &Circuit, sol: &Solution, stimulus: &Stimulus) -> PowerReport {
    let powers = branch_powers(circuit, sol, stimulus, 0.0);
    PowerReport::from_absorbed(
        circuit
            .components
            .iter()
            .zip(powers)
            .map(|(c, p)| (c.name.clone(), c.is_source(), p.power)),
        None,
    )
}

/// Instantaneous absorbed power `Σ v_terminal · i_terminal` of a component.
pub fn instantaneous_power(circuit: &Circuit, trace: &Trace, name: &str) -> Result<Vec<f64>, AnalysisError> {
    let (_, comp) = circuit
        .component(name)
        .ok_or_else(|| AnalysisError::UnknownComponent(name.to_string()))?;
    let get = |sig: String| {
        trace
            .signal(&sig)
            .ok_or(AnalysisError::MissingSignal(sig))
    };
    let voltage = |n: NodeId| -> Result<Option<&[f64]>, AnalysisError> {
        if n.is_ground() {
            Ok(None)
        } else {
            get(format!("V({})", circuit.nodes.name(n))).map(Some)
        }
    };
    let currents: Vec<(&[f64], f64)> = match comp.kind {
        ComponentKind::Bjt { .. } => vec![
            (get(format!("Ic({})", comp.name))?, 1.0),
            (get(format!("Ib({})", comp.name))?, 1.0),
            (get(format!("Ie({})", comp.name))?, 1.0),
        ],
        _ => {
            let i = get(format!("I({})", comp.name))?;
            vec![(i, 1.0), (i, -1.0)]
        }
    };
    let mut p = vec![0.0; trace.len()];
    for (node, (i, sign)) in comp.terminals.iter().zip(currents) {
        if let Some(v) = voltage(*node)? {
            for (k, pk) in p.iter_mut().enumerate() {
                *pk += v[k] * sign * i[k];
            }
        }
    }
    Ok(p)
}

/// Trapezoidal mean of `values` over `[a, b]`, interpolating at the ends.
pub(crate) fn window_mean(axis: &[f64], values: &[f64], a: f64, b: f64) -> f64 {
    if b <= a {
        return super::interpolate(axis, values, a);
    }
    let mut pts: Vec<(f64, f64)> = vec![(a, super::interpolate(axis, values, a))];
    pts.extend(
        axis.iter()
            .zip(values)
            .filter(|(t, _)| **t > a && **t < b)
            .map(|(t, v)| (*t, *v)),
    );
    pts.push((b, super::interpolate(axis, values, b)));
    let area: f64 = pts
        .windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum();
    area / (b - a)
}

/// Averaging window for a transient trace: the largest whole number of
/// fundamental periods ending at the last sample when the circuit has a
/// `.four` directive, otherwise the whole trace.
pub fn averaging_window(circuit: &Circuit, trace: &Trace) -> (f64, f64) {
    let (first, last) = (trace.axis[0], *trace.axis.last().expect("non-empty trace"));
    if let Some(AnalysisDirective::Four { fundamental, .. }) = circuit.fourier_directive() {
        let period = 1.0 / fundamental;
        let periods = ((last - first) / period + 1e-9).floor();
        if periods >= 1.0 {
            return (last - periods * period, last);
        }
    }
    (first, last)
}

/// Average absorbed power of one component over `window` (or the default
/// averaging window).
pub fn average_power(
    circuit: &Circuit,
    trace: &Trace,
    name: &str,
    window: Option<(f64, f64)>,
) -> Result<f64, AnalysisError> {
    if trace.is_empty() {
        return Err(AnalysisError::Invalid("empty trace".into()));
    }
    let (a, b) = window.unwrap_or_else(|| averaging_window(circuit, trace));
    let p = instantaneous_power(circuit, trace, name)?;
    Ok(window_mean(&trace.axis, &p, a, b))
}

/// Per-component average power over a transient trace.
pub fn power_report_transient(circuit: &Circuit, trace: &Trace) -> Result<PowerReport, AnalysisError> {
    if trace.is_empty() {
        return Err(AnalysisError::Invalid("empty trace".into()));
    }
    let window = averaging_window(circuit, trace);
    let items = circuit
        .components
        .iter()
        .map(|c| {
            average_power(circuit, trace, &c.name, Some(window)).map(|p| (c.name.clone(), c.is_source(), p))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PowerReport::from_absorbed(items, Some(window)))
}
