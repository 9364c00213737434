//! Netlist dialect: lexing, record parsing, elaboration into a [`Circuit`],
//! and printing a circuit back to text.
//!
//! The grammar is documented token by token in `docs/netlist.md`.

mod elaborate;
mod parse;
mod print;
mod value;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::devices::{BjtParams, MemristorParams};

pub use elaborate::elaborate;
pub use parse::parse_netlist;
pub use value::{parse_value, SUFFIXES};

/// Parses and elaborates netlist text in one step.
pub fn parse_circuit(text: &str) -> Result<Circuit, NetlistError> {
    elaborate(parse_netlist(text)?)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct NetlistError {
    /// 1-based source line, when the problem is tied to one.
    pub line: Option<usize>,
    pub kind: NetlistErrorKind,
}

impl fmt::Display for NetlistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetlistErrorKind {
    #[error("malformed value `{0}`")]
    BadValue(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("no ground node (node `0` is never referenced)")]
    NoGround,
    #[error("dangling node `{0}` (connected to a single terminal)")]
    DanglingNode(String),
    #[error("component `{component}` references undefined model `{model}`")]
    UnresolvedModel { component: String, model: String },
    #[error("model `{model}` has the wrong type for component `{component}`")]
    ModelKindMismatch { component: String, model: String },
    #[error("duplicate component name `{0}`")]
    DuplicateComponent(String),
    #[error("duplicate model name `{0}`")]
    DuplicateModel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("directive refers to unknown source `{0}`")]
    UnknownSource(String),
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
}

impl NetlistError {
    pub(crate) fn new(kind: NetlistErrorKind) -> Self {
        Self { line: None, kind }
    }

    pub(crate) fn at(line: usize, kind: NetlistErrorKind) -> Self {
        Self { line: Some(line), kind }
    }

    pub(crate) fn bad_value(token: &str) -> Self {
        Self::new(NetlistErrorKind::BadValue(token.to_string()))
    }

    pub(crate) fn with_line(mut self, line: usize) -> Self {
        self.line.get_or_insert(line);
        self
    }
}

/// Netlist after line-level parsing, before connectivity checks.
#[derive(Debug, Clone, PartialEq)]
pub struct RawNetlist {
    pub title: String,
    pub lines: Vec<RawLine>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawLine {
    /// Line number of the first physical line of the record.
    pub line: usize,
    pub record: Record,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Resistor {
        name: String,
        pos: String,
        neg: String,
        resistance: f64,
    },
    VoltageSource {
        name: String,
        pos: String,
        neg: String,
        waveform: Waveform,
    },
    CurrentSource {
        name: String,
        pos: String,
        neg: String,
        dc: f64,
    },
    Bjt {
        name: String,
        collector: String,
        base: String,
        emitter: String,
        model: String,
    },
    Memristor {
        name: String,
        pos: String,
        neg: String,
        model: String,
        x_init: Option<f64>,
    },
    Model {
        name: String,
        card: ModelCard,
    },
    Directive(AnalysisDirective),
}

/// Time dependence of an independent voltage source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Waveform {
    Dc(f64),
    Sin {
        offset: f64,
        amplitude: f64,
        frequency: f64,
    },
}

impl Waveform {
    /// Value used for operating points (the `t = 0` value).
    pub fn dc_value(&self) -> f64 {
        match *self {
            Waveform::Dc(v) => v,
            Waveform::Sin { offset, .. } => offset,
        }
    }

    pub fn value_at(&self, t: f64) -> f64 {
        match *self {
            Waveform::Dc(v) => v,
            Waveform::Sin {
                offset,
                amplitude,
                frequency,
            } => offset + amplitude * (std::f64::consts::TAU * frequency * t).sin(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelCard {
    Npn(BjtParams),
    Memristor(MemristorParams),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisDirective {
    Op,
    DcSweep {
        source: String,
        start: f64,
        stop: f64,
        step: f64,
    },
    Tran {
        tstep: f64,
        tstop: f64,
        tstart: f64,
    },
    Four {
        fundamental: f64,
        harmonics: usize,
        signals: Vec<String>,
    },
}

/// Dense node index. Ground is always `NodeId(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

impl NodeId {
    pub const GROUND: NodeId = NodeId(0);

    pub fn is_ground(self) -> bool {
        self.0 == 0
    }
}

/// Node names in index order; index 0 is `"0"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMap {
    names: Vec<String>,
}

impl NodeMap {
    pub(crate) fn new(names: Vec<String>) -> Self {
        debug_assert_eq!(names.first().map(String::as_str), Some("0"));
        Self { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id.0]
    }

    pub fn lookup(&self, name: &str) -> Option<NodeId> {
        let name = name.to_ascii_lowercase();
        self.names.iter().position(|n| *n == name).map(NodeId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (NodeId(i), n.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentKind {
    Resistor { resistance: f64 },
    VoltageSource { waveform: Waveform },
    CurrentSource { dc: f64 },
    Bjt { model: String, params: BjtParams },
    Memristor { model: String, params: MemristorParams },
}

/// An elaborated component. Terminal order is `[pos, neg]` for two-terminal
/// elements and `[collector, base, emitter]` for BJTs.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub name: String,
    pub terminals: Vec<NodeId>,
    pub kind: ComponentKind,
}

impl Component {
    pub fn is_source(&self) -> bool {
        matches!(
            self.kind,
            ComponentKind::VoltageSource { .. } | ComponentKind::CurrentSource { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub title: String,
    /// Sorted by lower-cased name, so component line order does not matter.
    pub components: Vec<Component>,
    /// Keyed by lower-cased model name.
    pub models: BTreeMap<String, ModelCard>,
    pub directives: Vec<AnalysisDirective>,
    pub nodes: NodeMap,
}

impl Circuit {
    pub fn component(&self, name: &str) -> Option<(usize, &Component)> {
        self.components
            .iter()
            .enumerate()
            .find(|(_, c)| c.name.eq_ignore_ascii_case(name))
    }

    /// Index of each voltage source among voltage sources, by component index.
    pub fn voltage_sources(&self) -> impl Iterator<Item = (usize, &Component)> {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c.kind, ComponentKind::VoltageSource { .. }))
    }

    pub fn memristors(&self) -> impl Iterator<Item = (usize, &Component)> {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c.kind, ComponentKind::Memristor { .. }))
    }

    pub fn has_nonlinear(&self) -> bool {
        self.components
            .iter()
            .any(|c| matches!(c.kind, ComponentKind::Bjt { .. }))
    }

    /// Every signal name a trace of this circuit records, in column order:
    /// node voltages, then device currents (and memristor states).
    pub fn signal_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .nodes
            .iter()
            .skip(1)
            .map(|(_, n)| format!("V({n})"))
            .collect();
        for c in &self.components {
            match c.kind {
                ComponentKind::Bjt { .. } => {
                    names.push(format!("Ic({})", c.name));
                    names.push(format!("Ib({})", c.name));
                    names.push(format!("Ie({})", c.name));
                }
                ComponentKind::Memristor { .. } => {
                    names.push(format!("I({})", c.name));
                    names.push(format!("X({})", c.name));
                }
                _ => names.push(format!("I({})", c.name)),
            }
        }
        names
    }

    /// First `.four` directive, if any.
    pub fn fourier_directive(&self) -> Option<&AnalysisDirective> {
        self.directives
            .iter()
            .find(|d| matches!(d, AnalysisDirective::Four { .. }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_waveform() {
        let w = Waveform::Sin {
            offset: 1.0,
            amplitude: 2.0,
            frequency: 50.0,
        };
        assert_eq!(w.dc_value(), 1.0);
        assert!((w.value_at(0.005) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn error_display_carries_line() {
        let e = NetlistError::at(4, NetlistErrorKind::NoGround);
        assert_eq!(e.to_string(), "line 4: no ground node (node `0` is never referenced)");
    }
}
