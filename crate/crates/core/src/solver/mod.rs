//! Modified nodal analysis: assembly, dense linear solves, Newton iteration
//! and DC continuation.
//!
//! Unknowns are laid out as node voltages (ground excluded), then
//! voltage-source branch currents, then memristor states when a transient
//! step is being solved.

mod matrix;
mod mna;
mod newton;

use thiserror::Error;

use crate::netlist::{Circuit, ComponentKind, NodeId, Waveform};

pub use matrix::{solve_linear, DenseMatrix, SingularPivot, SystemMatrix, PIVOT_FLOOR};
pub use mna::{assemble, branch_powers, device_currents, node_balances, BranchPower, NodeBalance};
pub use newton::{
    gmin_stepping, gmin_stepping_with, newton_solve, newton_solve_detailed, newton_solve_with,
    solve_operating_point, source_stepping_with,
};

pub(crate) use mna::{state_rates as state_rates_at, AssemblyContext, Layout, TransientStep};
pub(crate) use newton::newton;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub reltol: f64,
    /// Absolute current tolerance (A).
    pub abstol: f64,
    /// Absolute voltage tolerance (V).
    pub vntol: f64,
    pub max_iter: usize,
    /// Shunt conductance from every BJT terminal node to ground (S).
    pub gmin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            reltol: 1e-3,
            abstol: 1e-12,
            vntol: 1e-6,
            max_iter: 100,
            gmin: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [self.reltol, self.abstol, self.vntol];
        if positive.iter().any(|v| !(*v > 0.0)) || self.max_iter < 1 || !(self.gmin >= 0.0) {
            return Err("tolerances must be positive and max_iter >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Indexed by [`NodeId`]; entry 0 (ground) is always 0.
    pub node_voltages: Vec<f64>,
    /// One per voltage source, in component order. Positive current flows
    /// into the source's positive terminal.
    pub branch_currents: Vec<f64>,
    /// One per memristor, in component order.
    pub mem_states: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl Solution {
    /// All-zero voltages and currents with memristors at their initial state.
    pub fn initial(circuit: &Circuit) -> Self {
        Self {
            node_voltages: vec![0.0; circuit.nodes.len()],
            branch_currents: vec![0.0; circuit.voltage_sources().count()],
            mem_states: circuit
                .memristors()
                .map(|(_, c)| match &c.kind {
                    ComponentKind::Memristor { params, .. } => params.x_init,
                    _ => unreachable!(),
                })
                .collect(),
            converged: false,
            iterations: 0,
        }
    }

    pub fn voltage(&self, node: NodeId) -> f64 {
        self.node_voltages[node.0]
    }

    pub fn node_voltage(&self, circuit: &Circuit, name: &str) -> Option<f64> {
        circuit.nodes.lookup(name).map(|n| self.voltage(n))
    }

    /// Branch current of a named voltage source.
    pub fn source_current(&self, circuit: &Circuit, name: &str) -> Option<f64> {
        circuit
            .voltage_sources()
            .position(|(_, c)| c.name.eq_ignore_ascii_case(name))
            .map(|k| self.branch_currents[k])
    }
}

/// Source values applied while solving: time point, continuation scale and
/// an optional swept source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stimulus {
    /// `None` evaluates every waveform at its DC value.
    pub time: Option<f64>,
    pub scale: f64,
    /// Component index of a swept source and its value.
    pub sweep: Option<(usize, f64)>,
}

impl Default for Stimulus {
    fn default() -> Self {
        Self::dc()
    }
}

impl Stimulus {
    pub fn dc() -> Self {
        Self {
            time: None,
            scale: 1.0,
            sweep: None,
        }
    }

    pub fn at_time(t: f64) -> Self {
        Self {
            time: Some(t),
            ..Self::dc()
        }
    }

    pub fn swept(component: usize, value: f64) -> Self {
        Self {
            sweep: Some((component, value)),
            ..Self::dc()
        }
    }

    pub fn scaled(self, scale: f64) -> Self {
        Self { scale, ..self }
    }

    pub(crate) fn source_value(&self, index: usize, kind: &ComponentKind) -> f64 {
        let base = match (self.sweep, kind) {
            (Some((k, v)), _) if k == index => v,
            (_, ComponentKind::VoltageSource { waveform }) => self.waveform_value(waveform),
            (_, ComponentKind::CurrentSource { dc }) => *dc,
            _ => 0.0,
        };
        base * self.scale
    }

    fn waveform_value(&self, w: &Waveform) -> f64 {
        match self.time {
            Some(t) => w.value_at(t),
            None => w.dc_value(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("singular matrix: no DC path to ground or voltage-source loop at {unknown}")]
    Singular { unknown: String },
    #[error("Newton iteration did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("Newton iteration produced a non-finite value")]
    NonFinite,
    #[error("no DC operating point (direct Newton, gmin stepping and source stepping all failed)")]
    NoOperatingPoint,
}
