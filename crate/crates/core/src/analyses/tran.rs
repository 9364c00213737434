use log::{debug, warn};

use super::{AnalysisError, Trace};
use crate::netlist::Circuit;
use crate::solver::{
    newton, solve_operating_point, AssemblyContext, Layout, Solution, SolverError, Stimulus,
    Tolerances, TransientStep,
};

/// Fixed-step trapezoidal transient from the DC operating point at `t = 0`.
///
/// Memristor states are unknowns of every step's Newton system. A step that
/// fails to converge is retried as sub-steps starting at a quarter of its
/// length and doubling after each success. Samples are recorded at every
/// multiple of `tstep` from `tstart` on, plus `tstop` itself.
pub fn run_transient(
    circuit: &Circuit,
    tstep: f64,
    tstop: f64,
    tstart: f64,
    tol: &Tolerances,
) -> Result<Trace, AnalysisError> {
    if !(tstep > 0.0) || !(tstop > tstart) || !(tstart >= 0.0) {
        return Err(AnalysisError::Invalid(
            "transient needs tstep > 0 and tstop > tstart >= 0".into(),
        ));
    }
    let op = solve_operating_point(circuit, tol, &Stimulus::at_time(0.0), None).map_err(|error| {
        AnalysisError::Timestep { time: 0.0, error }
    })?;

    let mut stepper = Stepper::new(circuit, tol, &op);
    let mut trace = Trace::for_circuit(circuit, "time");
    let eps = 1e-9 * tstep;
    if tstart <= eps {
        trace.push_solution(circuit, 0.0, &op, &Stimulus::at_time(0.0));
    }

    let steps = ((tstop / tstep) - 1e-9).ceil().max(1.0) as usize;
    let mut t = 0.0;
    for n in 1..=steps {
        let t_next = if n == steps { tstop } else { n as f64 * tstep };
        stepper.advance(t, t_next)?;
        t = t_next;
        if t >= tstart - eps {
            let sol = stepper.solution();
            trace.push_solution(circuit, t, &sol, &Stimulus::at_time(t));
        }
    }
    Ok(trace)
}

struct Stepper<'a> {
    circuit: &'a Circuit,
    tol: &'a Tolerances,
    layout: Layout,
    x: Vec<f64>,
    states: Vec<f64>,
    rates: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(circuit: &'a Circuit, tol: &'a Tolerances, op: &Solution) -> Self {
        let layout = Layout::new(circuit, true);
        let x = layout.to_unknowns(op);
        let states = op.mem_states.clone();
        let rates = crate::solver::state_rates_at(circuit, &layout, &x, &states);
        Self {
            circuit,
            tol,
            layout,
            x,
            states,
            rates,
        }
    }

    fn solution(&self) -> Solution {
        self.layout.to_solution(&self.x, &self.states, 0)
    }

    fn advance(&mut self, t0: f64, t1: f64) -> Result<(), AnalysisError> {
        if self.try_step(t1 - t0, t1).is_ok() {
            return Ok(());
        }
        debug!("transient: retrying [{t0:e}, {t1:e}] with sub-steps");
        let mut t = t0;
        let mut h = (t1 - t0) / 4.0;
        let eps = 1e-12 * (t1 - t0);
        while t < t1 - eps {
            let hh = h.min(t1 - t);
            let target = if t + hh >= t1 - eps { t1 } else { t + hh };
            self.try_step(target - t, target)
                .map_err(|error| AnalysisError::Timestep { time: target, error })?;
            t = target;
            h *= 2.0;
        }
        Ok(())
    }

    fn try_step(&mut self, dt: f64, t: f64) -> Result<(), SolverError> {
        let ctx = AssemblyContext {
            stimulus: Stimulus::at_time(t),
            gmin: self.tol.gmin,
            fixed_states: &self.states,
            step: Some(TransientStep {
                dt,
                prev_states: &self.states,
                prev_rates: &self.rates,
            }),
        };
        let out = newton(self.circuit, &self.layout, self.x.clone(), &ctx, self.tol)?;
        let mut x = out.x;
        let first_state = self.layout.node_unknowns + self.layout.n_vsrc;
        for (m, s) in x[first_state..].iter_mut().enumerate() {
            let clamped = s.clamp(0.0, 1.0);
            if (clamped - *s).abs() > 1e-12 {
                warn!("memristor state {m} clamped from {s} at t = {t:e}");
            }
            *s = clamped;
        }
        self.states = x[first_state..].to_vec();
        self.rates = crate::solver::state_rates_at(self.circuit, &self.layout, &x, &self.states);
        self.x = x;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_circuit;

    #[test]
    fn sine_through_resistor_is_sampled_exactly() {
        let c = parse_circuit("t\nV1 a 0 SIN(0 1 1k)\nR1 a 0 1k\n").unwrap();
        let tr = run_transient(&c, 1e-5, 2e-3, 0.0, &Tolerances::default()).unwrap();
        assert_eq!(tr.len(), 201);
        let v = tr.signal("V(a)").unwrap();
        for (t, v) in tr.axis.iter().zip(v) {
            assert!((v - (std::f64::consts::TAU * 1e3 * t).sin()).abs() < 1e-12);
        }
        tr.check().unwrap();
    }

    #[test]
    fn tstart_trims_output() {
        let c = parse_circuit("t\nV1 a 0 SIN(0 1 1k)\nR1 a 0 1k\n").unwrap();
        let tr = run_transient(&c, 1e-4, 1e-3, 5e-4, &Tolerances::default()).unwrap();
        assert_eq!(tr.len(), 6);
        assert!((tr.axis[0] - 5e-4).abs() < 1e-15);
        assert_eq!(*tr.axis.last().unwrap(), 1e-3);
    }

    #[test]
    fn uneven_stop_time_ends_exactly() {
        let c = parse_circuit("t\nV1 a 0 1\nR1 a 0 1k\n").unwrap();
        let tr = run_transient(&c, 3e-4, 1e-3, 0.0, &Tolerances::default()).unwrap();
        assert_eq!(*tr.axis.last().unwrap(), 1e-3);
        assert_eq!(tr.len(), 5);
    }
}
