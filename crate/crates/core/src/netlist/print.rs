use std::fmt;

use super::{AnalysisDirective, Circuit, ComponentKind, ModelCard, Waveform};
use crate::devices::Window;

/// Prints the circuit in the netlist dialect. Numbers use shortest
/// round-trip exponent form, so re-parsing reproduces identical values.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.components {
            write!(f, "{}", c.name)?;
            for t in &c.terminals {
                write!(f, " {}", self.nodes.name(*t))?;
            }
            match &c.kind {
                ComponentKind::Resistor { resistance } => writeln!(f, " {resistance:e}")?,
                ComponentKind::VoltageSource {
                    waveform: Waveform::Dc(v),
                } => writeln!(f, " DC {v:e}")?,
                ComponentKind::VoltageSource {
                    waveform:
                        Waveform::Sin {
                            offset,
                            amplitude,
                            frequency,
                        },
                } => writeln!(f, " SIN({offset:e} {amplitude:e} {frequency:e})")?,
                ComponentKind::CurrentSource { dc } => writeln!(f, " DC {dc:e}")?,
                ComponentKind::Bjt { model, .. } => writeln!(f, " {model}")?,
                ComponentKind::Memristor { model, params } => {
                    writeln!(f, " {model} xinit={:e}", params.x_init)?
                }
            }
        }
        for (name, card) in &self.models {
            match card {
                ModelCard::Npn(p) => {
                    write!(f, ".model {name} NPN(IS={:e} BF={:e} BR={:e}", p.is_sat, p.bf, p.br)?;
                    if p.vaf.is_finite() {
                        write!(f, " VAF={:e}", p.vaf)?;
                    }
                    writeln!(f, ")")?;
                }
                ModelCard::Memristor(p) => {
                    write!(
                        f,
                        ".model {name} MEMR(RON={:e} ROFF={:e} D={:e} UV={:e} P={} XINIT={:e}",
                        p.r_on, p.r_off, p.d, p.mu_v, p.p, p.x_init
                    )?;
                    if p.window == Window::None {
                        write!(f, " WINDOW=0")?;
                    }
                    writeln!(f, ")")?;
                }
            }
        }
        for d in &self.directives {
            match d {
                AnalysisDirective::Op => writeln!(f, ".op")?,
                AnalysisDirective::DcSweep {
                    source,
                    start,
                    stop,
                    step,
                } => writeln!(f, ".dc {source} {start:e} {stop:e} {step:e}")?,
                AnalysisDirective::Tran {
                    tstep,
                    tstop,
                    tstart,
                } => writeln!(f, ".tran {tstep:e} {tstop:e} {tstart:e}")?,
                AnalysisDirective::Four {
                    fundamental,
                    harmonics,
                    signals,
                } => writeln!(f, ".four {fundamental:e} {harmonics} {}", signals.join(" "))?,
            }
        }
        writeln!(f, ".end")
    }
}
