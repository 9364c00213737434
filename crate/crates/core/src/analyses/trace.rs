use std::io::{self, Write};

use crate::netlist::{Circuit, ComponentKind};
use crate::solver::{device_currents, Solution, Stimulus};

/// Sweep- or time-indexed signals.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// What the axis measures, e.g. `time` or `V(VL)`.
    pub axis_label: String,
    pub axis: Vec<f64>,
    pub names: Vec<String>,
    /// One column per entry of `names`, each as long as `axis`.
    pub columns: Vec<Vec<f64>>,
}

impl Trace {
    pub fn new(axis_label: impl Into<String>, names: Vec<String>) -> Self {
        let columns = vec![Vec::new(); names.len()];
        Self {
            axis_label: axis_label.into(),
            axis: Vec::new(),
            names,
            columns,
        }
    }

    /// Empty trace with every signal the circuit records.
    pub fn for_circuit(circuit: &Circuit, axis_label: impl Into<String>) -> Self {
        Self::new(axis_label, circuit.signal_names())
    }

    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    pub fn push(&mut self, axis: f64, row: &[f64]) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.axis.push(axis);
        for (col, v) in self.columns.iter_mut().zip(row) {
            col.push(*v);
        }
    }

    /// Appends the signals of `sol` in [`Circuit::signal_names`] order.
    pub fn push_solution(&mut self, circuit: &Circuit, axis: f64, sol: &Solution, stimulus: &Stimulus) {
        self.push(axis, &signal_row(circuit, sol, stimulus));
    }

    pub fn append(&mut self, other: Trace) {
        debug_assert_eq!(self.names, other.names);
        self.axis.extend(other.axis);
        for (a, b) in self.columns.iter_mut().zip(other.columns) {
            a.extend(b);
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n.eq_ignore_ascii_case(name))
    }

    /// Signal by name (case-insensitive).
    pub fn signal(&self, name: &str) -> Option<&[f64]> {
        self.index_of(name).map(|k| self.columns[k].as_slice())
    }

    /// Linear interpolation of `values` (sampled on this trace's axis) at
    /// `at`, clamped to the ends.
    pub fn interpolate(&self, values: &[f64], at: f64) -> f64 {
        interpolate(&self.axis, values, at)
    }

    /// Checks the trace invariants: equal lengths, strictly increasing axis
    /// and finite values.
    pub fn check(&self) -> Result<(), String> {
        if self.columns.iter().any(|c| c.len() != self.axis.len()) {
            return Err("column lengths differ from axis".into());
        }
        if self.axis.windows(2).any(|w| !(w[1] > w[0])) {
            return Err("axis is not strictly increasing".into());
        }
        if self
            .axis
            .iter()
            .chain(self.columns.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err("non-finite value".into());
        }
        Ok(())
    }

    /// CSV with an `axis` column followed by one column per signal.
    /// Values use Rust's shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "axis")?;
        for n in &self.names {
            write!(w, ",{n}")?;
        }
        writeln!(w)?;
        for (r, a) in self.axis.iter().enumerate() {
            write!(w, "{a}")?;
            for c in &self.columns {
                write!(w, ",{}", c[r])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Linear interpolation on a strictly increasing axis, clamped to the ends.
pub fn interpolate(axis: &[f64], values: &[f64], at: f64) -> f64 {
    let n = axis.len();
    if n == 0 {
        return f64::NAN;
    }
    if at <= axis[0] {
        return values[0];
    }
    if at >= axis[n - 1] {
        return values[n - 1];
    }
    let k = axis.partition_point(|t| *t <= at);
    let (t0, t1) = (axis[k - 1], axis[k]);
    let (v0, v1) = (values[k - 1], values[k]);
    v0 + (v1 - v0) * (at - t0) / (t1 - t0)
}

pub(crate) fn signal_row(circuit: &Circuit, sol: &Solution, stimulus: &Stimulus) -> Vec<f64> {
    let mut row: Vec<f64> = sol.node_voltages[1..].to_vec();
    let mut mem = 0;
    for (c, i) in circuit
        .components
        .iter()
        .zip(device_currents(circuit, sol, stimulus))
    {
        match c.kind {
            ComponentKind::Bjt { .. } => row.extend_from_slice(&i),
            ComponentKind::Memristor { .. } => {
                row.push(i[0]);
                row.push(sol.mem_states[mem]);
                mem += 1;
            }
            _ => row.push(i[0]),
        }
    }
    row
}
