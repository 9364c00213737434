use log::debug;

use super::mna::{assemble_at, AssemblyContext, Layout, Linearization};
use super::{solve_linear, Solution, SolverError, Stimulus, Tolerances};
use crate::devices::{critical_voltage, eval_bjt, eval_memristor, limit_junction_voltage};
use crate::netlist::{Circuit, ComponentKind};

/// Absolute tolerance on memristor state updates.
const STATE_TOL: f64 = 1e-9;

pub(crate) struct NewtonOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// ‖Δx‖∞ over node voltages, one entry per iteration.
    pub step_norms: Vec<f64>,
}

/// Newton–Raphson on the MNA system starting from `x0`.
///
/// Converges when every unknown's update is within its tolerance, no
/// junction was limited and every nonlinear device current agrees with its
/// linearized prediction. The accepted iterate then gets one more Newton
/// correction, which is quadratically small.
pub(crate) fn newton(
    circuit: &Circuit,
    layout: &Layout,
    x0: Vec<f64>,
    ctx: &AssemblyContext<'_>,
    tol: &Tolerances,
) -> Result<NewtonOutcome, SolverError> {
    let vcrit: Vec<f64> = circuit
        .components
        .iter()
        .filter_map(|c| match &c.kind {
            ComponentKind::Bjt { params, .. } => Some(critical_voltage(params.vt, params.is_sat)),
            _ => None,
        })
        .collect();
    let vts: Vec<f64> = circuit
        .components
        .iter()
        .filter_map(|c| match &c.kind {
            ComponentKind::Bjt { params, .. } => Some(params.vt),
            _ => None,
        })
        .collect();

    let mut x = x0;
    let mut junctions = layout.junctions(circuit, &x);
    let mut step_norms = Vec::new();

    for iter in 1..=tol.max_iter {
        let (sys, lin) = assemble_at(circuit, layout, &x, &junctions, ctx);
        let x_new = solve(circuit, layout, &sys)?;
        step_norms.push(node_step_norm(layout, &x, &x_new));
        if !layout.is_nonlinear() {
            return Ok(NewtonOutcome {
                x: x_new,
                iterations: iter,
                step_norms,
            });
        }

        let deltas_ok = deltas_within(layout, &x, &x_new, tol);
        let raw = layout.junctions(circuit, &x_new);
        let mut limited = false;
        let mut next_junctions = Vec::with_capacity(raw.len());
        for (k, ((vbe, vbc), (old_be, old_bc))) in raw.iter().zip(&junctions).enumerate() {
            let (be, l1) = limit_junction_voltage(*vbe, *old_be, vts[k], vcrit[k]);
            let (bc, l2) = limit_junction_voltage(*vbc, *old_bc, vts[k], vcrit[k]);
            limited |= l1 || l2;
            next_junctions.push((be, bc));
        }
        let currents_ok = currents_within(circuit, layout, &lin, &raw, &x_new, ctx, tol);
        x = x_new;
        junctions = next_junctions;

        if deltas_ok && currents_ok && !limited {
            let (sys, _) = assemble_at(circuit, layout, &x, &junctions, ctx);
            let polished = solve(circuit, layout, &sys)?;
            step_norms.push(node_step_norm(layout, &x, &polished));
            return Ok(NewtonOutcome {
                x: polished,
                iterations: iter + 1,
                step_norms,
            });
        }
    }
    debug!("newton: no convergence after {} iterations", tol.max_iter);
    Err(SolverError::NoConvergence {
        iterations: tol.max_iter,
    })
}

fn solve(
    circuit: &Circuit,
    layout: &Layout,
    sys: &super::SystemMatrix,
) -> Result<Vec<f64>, SolverError> {
    let x = solve_linear(sys).map_err(|p| SolverError::Singular {
        unknown: layout.label(circuit, p.column),
    })?;
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(SolverError::NonFinite)
    }
}

fn node_step_norm(layout: &Layout, old: &[f64], new: &[f64]) -> f64 {
    old[..layout.node_unknowns]
        .iter()
        .zip(&new[..layout.node_unknowns])
        .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

fn deltas_within(layout: &Layout, old: &[f64], new: &[f64], tol: &Tolerances) -> bool {
    old.iter().zip(new).enumerate().all(|(k, (a, b))| {
        let abs = if k < layout.node_unknowns {
            tol.vntol
        } else if k < layout.node_unknowns + layout.n_vsrc {
            tol.abstol
        } else {
            STATE_TOL
        };
        (a - b).abs() <= tol.reltol * a.abs().max(b.abs()) + abs
    })
}

/// Compares each nonlinear device's actual current at the new iterate with
/// the current its linearization predicted.
fn currents_within(
    circuit: &Circuit,
    layout: &Layout,
    lin: &Linearization,
    raw: &[(f64, f64)],
    x_new: &[f64],
    ctx: &AssemblyContext<'_>,
    tol: &Tolerances,
) -> bool {
    let close = |pred: f64, actual: f64| {
        (pred - actual).abs() <= tol.reltol * pred.abs().max(actual.abs()) + tol.abstol
    };
    let mut bjt = 0;
    let mut mem = 0;
    for c in &circuit.components {
        match &c.kind {
            ComponentKind::Bjt { params, .. } => {
                let ((be0, bc0), e0) = &lin.bjt[bjt];
                let (be, bc) = raw[bjt];
                bjt += 1;
                let e = eval_bjt(be, bc, params);
                let pred_c = e0.ic + e0.gc_be * (be - be0) + e0.gc_bc * (bc - bc0);
                let pred_b = e0.ib + e0.gb_be * (be - be0) + e0.gb_bc * (bc - bc0);
                if !close(pred_c, e.ic) || !close(pred_b, e.ib) {
                    return false;
                }
            }
            ComponentKind::Memristor { params, .. } if layout.with_states => {
                let ((v0, s0), e0) = &lin.mem[mem];
                let v = layout.volt(x_new, c.terminals[0]) - layout.volt(x_new, c.terminals[1]);
                let s = layout.state(x_new, ctx, mem);
                mem += 1;
                let e = eval_memristor(v, s, params);
                let pred = e0.i + e0.di_dv * (v - v0) + e0.di_dx * (s - s0);
                if !close(pred, e.i) {
                    return false;
                }
            }
            ComponentKind::Memristor { .. } => mem += 1,
            _ => {}
        }
    }
    true
}

fn dc_context<'a>(stimulus: &Stimulus, gmin: f64, states: &'a [f64]) -> AssemblyContext<'a> {
    AssemblyContext {
        stimulus: *stimulus,
        gmin,
        fixed_states: states,
        step: None,
    }
}

/// DC Newton solve from `initial` with all sources at their DC values.
pub fn newton_solve(circuit: &Circuit, initial: &Solution, tol: &Tolerances) -> Result<Solution, SolverError> {
    newton_solve_with(circuit, initial, tol, &Stimulus::dc())
}

pub fn newton_solve_with(
    circuit: &Circuit,
    initial: &Solution,
    tol: &Tolerances,
    stimulus: &Stimulus,
) -> Result<Solution, SolverError> {
    newton_solve_detailed(circuit, initial, tol, stimulus).map(|(s, _)| s)
}

/// As [`newton_solve_with`], also returning ‖ΔV‖∞ for every iteration.
pub fn newton_solve_detailed(
    circuit: &Circuit,
    initial: &Solution,
    tol: &Tolerances,
    stimulus: &Stimulus,
) -> Result<(Solution, Vec<f64>), SolverError> {
    let layout = Layout::new(circuit, false);
    let ctx = dc_context(stimulus, tol.gmin, &initial.mem_states);
    let out = newton(circuit, &layout, layout.to_unknowns(initial), &ctx, tol)?;
    Ok((
        layout.to_solution(&out.x, &initial.mem_states, out.iterations),
        out.step_norms,
    ))
}

/// Ladder of shunt conductances, decade by decade from 1 mS.
fn gmin_ladder(target: f64) -> Vec<f64> {
    let floor = target.max(1e-12);
    let mut ladder: Vec<f64> = (3..=12)
        .map(|k| 10f64.powi(-k))
        .filter(|g| *g > floor * (1.0 + 1e-9))
        .collect();
    ladder.push(floor);
    ladder
}

/// gmin continuation from a zero guess. Each rung warm-starts the next; the
/// last rung uses the solver's gmin (or 1e-12 S when that is smaller).
pub fn gmin_stepping(circuit: &Circuit, tol: &Tolerances) -> Result<Solution, SolverError> {
    gmin_stepping_with(circuit, tol, &Stimulus::dc())
}

pub fn gmin_stepping_with(
    circuit: &Circuit,
    tol: &Tolerances,
    stimulus: &Stimulus,
) -> Result<Solution, SolverError> {
    let mut sol = Solution::initial(circuit);
    let mut total = 0;
    for g in gmin_ladder(tol.gmin) {
        let step_tol = Tolerances { gmin: g, ..*tol };
        sol = newton_solve_with(circuit, &sol, &step_tol, stimulus)?;
        total += sol.iterations;
        debug!("gmin stepping: converged at gmin = {g:e}");
    }
    sol.iterations = total;
    Ok(sol)
}

/// Source continuation: every independent source scaled from 0.1 to 1 in
/// ten steps.
pub fn source_stepping_with(
    circuit: &Circuit,
    tol: &Tolerances,
    stimulus: &Stimulus,
) -> Result<Solution, SolverError> {
    let mut sol = Solution::initial(circuit);
    let mut total = 0;
    for k in 1..=10 {
        let scaled = stimulus.scaled(stimulus.scale * k as f64 / 10.0);
        sol = newton_solve_with(circuit, &sol, tol, &scaled)?;
        total += sol.iterations;
    }
    sol.iterations = total;
    Ok(sol)
}

/// DC operating point: Newton from `warm` (when given), then from zero,
/// then gmin stepping, then source stepping.
pub fn solve_operating_point(
    circuit: &Circuit,
    tol: &Tolerances,
    stimulus: &Stimulus,
    warm: Option<&Solution>,
) -> Result<Solution, SolverError> {
    if let Some(w) = warm {
        if let Ok(s) = newton_solve_with(circuit, w, tol, stimulus) {
            return Ok(s);
        }
    }
    let zero = Solution::initial(circuit);
    match newton_solve_with(circuit, &zero, tol, stimulus) {
        Ok(s) => return Ok(s),
        Err(e) => debug!("direct Newton failed ({e}); trying gmin stepping"),
    }
    match gmin_stepping_with(circuit, tol, stimulus) {
        Ok(s) => return Ok(s),
        Err(e) => debug!("gmin stepping failed ({e}); trying source stepping"),
    }
    source_stepping_with(circuit, tol, stimulus).map_err(|e| {
        debug!("source stepping failed ({e})");
        SolverError::NoOperatingPoint
    })
}
