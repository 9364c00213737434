//! Analyses driven by netlist directives: operating point, DC sweep,
//! transient, Fourier/THD and average power.

mod dc;
mod fourier;
mod hysteresis;
mod power;
mod trace;
mod tran;

use thiserror::Error;

use crate::exec::Execution;
use crate::netlist::{AnalysisDirective, Circuit};
use crate::solver::{solve_operating_point, Solution, SolverError, Stimulus, Tolerances};

pub use dc::{run_dc_sweep, run_dc_sweep_with, sweep_values, SWEEP_CHUNK};
pub use fourier::{
    fourier_analysis, fourier_of, fourier_of_samples, resample_last_period, spectrum,
    FourierReport, Spectrum, RESAMPLE_POINTS,
};
pub use hysteresis::lobe_area;
pub use power::{
    average_power, instantaneous_power, power_report_dc, power_report_transient, PowerEntry,
    PowerReport,
};
pub use trace::{interpolate, Trace};
pub use tran::run_transient;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("operating point: {0}")]
    OperatingPoint(SolverError),
    #[error("DC sweep failed at {component} = {value}: {error}")]
    SweepPoint {
        component: String,
        value: f64,
        error: SolverError,
    },
    #[error("transient failed at t = {time:e} s: {error}")]
    Timestep { time: f64, error: SolverError },
    #[error("trace spans {span:e} s, shorter than one fundamental period ({period:e} s)")]
    TraceTooShort { span: f64, period: f64 },
    #[error("fundamental component of {0} is zero; THD undefined")]
    ZeroFundamental(String),
    #[error("signal `{0}` not found")]
    MissingSignal(String),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("{0}")]
    Invalid(String),
}

/// DC operating point with the full continuation chain.
pub fn run_op(circuit: &Circuit, tol: &Tolerances) -> Result<Solution, AnalysisError> {
    solve_operating_point(circuit, tol, &Stimulus::dc(), None).map_err(AnalysisError::OperatingPoint)
}

/// Overrides applied on top of the netlist's directives.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub tol: Tolerances,
    /// Replaces the `.tran` step when set.
    pub tstep: Option<f64>,
    pub exec: Execution,
}

/// Everything produced by executing a circuit's directives in order.
#[derive(Debug, Clone, Default)]
pub struct Results {
    pub op: Option<Solution>,
    pub dc: Vec<Trace>,
    pub tran: Option<Trace>,
    pub fourier: Vec<FourierReport>,
    pub power: Option<PowerReport>,
}

/// Runs every directive. The power report comes from the transient when
/// there is one, otherwise from the DC operating point (solved even when no
/// `.op` was requested).
pub fn run_all(circuit: &Circuit, opts: &RunOptions) -> Result<Results, AnalysisError> {
    let mut out = Results::default();
    let mut op_for_power = None;
    for d in &circuit.directives {
        match d {
            AnalysisDirective::Op => {
                let sol = run_op(circuit, &opts.tol)?;
                op_for_power = Some(sol.clone());
                out.op = Some(sol);
            }
            AnalysisDirective::DcSweep { .. } => {
                out.dc.push(run_dc_sweep_with(circuit, d, &opts.tol, opts.exec)?);
            }
            AnalysisDirective::Tran {
                tstep,
                tstop,
                tstart,
            } => {
                let step = opts.tstep.unwrap_or(*tstep);
                out.tran = Some(run_transient(circuit, step, *tstop, *tstart, &opts.tol)?);
            }
            AnalysisDirective::Four { .. } => {}
        }
    }
    if let Some(four) = circuit.fourier_directive() {
        let trace = out.tran.as_ref().ok_or_else(|| {
            AnalysisError::Invalid(".four needs a .tran analysis".into())
        })?;
        out.fourier = fourier_analysis(trace, four)?;
    }
    out.power = Some(match &out.tran {
        Some(trace) => power_report_transient(circuit, trace)?,
        None => {
            let sol = match op_for_power {
                Some(s) => s,
                None => run_op(circuit, &opts.tol)?,
            };
            power_report_dc(circuit, &sol, &Stimulus::dc())
        }
    });
    Ok(out)
}
