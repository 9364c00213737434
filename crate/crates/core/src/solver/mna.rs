use super::{Solution, Stimulus, SystemMatrix};
use crate::devices::{eval_bjt, eval_memristor, BjtEval, BjtParams, MemristorEval, MemristorParams};
use crate::netlist::{Circuit, ComponentKind, NodeId};

/// Maps circuit elements onto rows and columns of the MNA system.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub node_unknowns: usize,
    pub n_vsrc: usize,
    pub n_mem: usize,
    pub with_states: bool,
    /// Per component: branch index for voltage sources, memristor index for
    /// memristors, BJT index for BJTs.
    pub slot: Vec<usize>,
    pub n_bjt: usize,
    pub gmin_nodes: Vec<NodeId>,
}

impl Layout {
    pub fn new(circuit: &Circuit, with_states: bool) -> Self {
        let (mut v, mut m, mut q) = (0, 0, 0);
        let mut gmin_nodes = Vec::new();
        let slot = circuit
            .components
            .iter()
            .map(|c| match c.kind {
                ComponentKind::VoltageSource { .. } => {
                    v += 1;
                    v - 1
                }
                ComponentKind::Memristor { .. } => {
                    m += 1;
                    m - 1
                }
                ComponentKind::Bjt { .. } => {
                    gmin_nodes.extend(c.terminals.iter().filter(|t| !t.is_ground()));
                    q += 1;
                    q - 1
                }
                _ => usize::MAX,
            })
            .collect();
        gmin_nodes.sort();
        gmin_nodes.dedup();
        Self {
            node_unknowns: circuit.nodes.len() - 1,
            n_vsrc: v,
            n_mem: m,
            with_states,
            slot,
            n_bjt: q,
            gmin_nodes,
        }
    }

    pub fn dim(&self) -> usize {
        self.node_unknowns + self.n_vsrc + if self.with_states { self.n_mem } else { 0 }
    }

    pub fn node_row(&self, n: NodeId) -> Option<usize> {
        (!n.is_ground()).then(|| n.0 - 1)
    }

    pub fn branch_row(&self, b: usize) -> usize {
        self.node_unknowns + b
    }

    pub fn state_row(&self, m: usize) -> Option<usize> {
        self.with_states
            .then(|| self.node_unknowns + self.n_vsrc + m)
    }

    /// Whether Newton iteration is needed at all.
    pub fn is_nonlinear(&self) -> bool {
        self.n_bjt > 0 || (self.with_states && self.n_mem > 0)
    }

    pub fn label(&self, circuit: &Circuit, row: usize) -> String {
        if row < self.node_unknowns {
            return format!("node `{}`", circuit.nodes.name(NodeId(row + 1)));
        }
        let (kind, idx) = if row < self.node_unknowns + self.n_vsrc {
            ("voltage source", row - self.node_unknowns)
        } else {
            ("memristor state", row - self.node_unknowns - self.n_vsrc)
        };
        let name = circuit
            .components
            .iter()
            .zip(&self.slot)
            .find(|(c, s)| {
                **s == idx
                    && match c.kind {
                        ComponentKind::VoltageSource { .. } => kind == "voltage source",
                        ComponentKind::Memristor { .. } => kind == "memristor state",
                        _ => false,
                    }
            })
            .map(|(c, _)| c.name.clone())
            .unwrap_or_default();
        format!("{kind} `{name}`")
    }

    pub fn to_unknowns(&self, sol: &Solution) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.dim());
        x.extend_from_slice(&sol.node_voltages[1..]);
        x.extend_from_slice(&sol.branch_currents);
        if self.with_states {
            x.extend_from_slice(&sol.mem_states);
        }
        x
    }

    pub fn to_solution(&self, x: &[f64], fixed_states: &[f64], iterations: usize) -> Solution {
        let mut node_voltages = Vec::with_capacity(self.node_unknowns + 1);
        node_voltages.push(0.0);
        node_voltages.extend_from_slice(&x[..self.node_unknowns]);
        let branch_currents = x[self.node_unknowns..self.node_unknowns + self.n_vsrc].to_vec();
        let mem_states = if self.with_states {
            x[self.node_unknowns + self.n_vsrc..].to_vec()
        } else {
            fixed_states.to_vec()
        };
        Solution {
            node_voltages,
            branch_currents,
            mem_states,
            converged: true,
            iterations,
        }
    }

    pub fn volt(&self, x: &[f64], n: NodeId) -> f64 {
        self.node_row(n).map_or(0.0, |r| x[r])
    }

    pub fn state(&self, x: &[f64], ctx: &AssemblyContext<'_>, m: usize) -> f64 {
        match self.state_row(m) {
            Some(r) => x[r],
            None => ctx.fixed_states[m],
        }
    }

    /// Raw junction voltages `(vbe, vbc)` of every BJT at `x`.
    pub fn junctions(&self, circuit: &Circuit, x: &[f64]) -> Vec<(f64, f64)> {
        circuit
            .components
            .iter()
            .filter(|c| matches!(c.kind, ComponentKind::Bjt { .. }))
            .map(|c| {
                let (vc, vb, ve) = (
                    self.volt(x, c.terminals[0]),
                    self.volt(x, c.terminals[1]),
                    self.volt(x, c.terminals[2]),
                );
                (vb - ve, vb - vc)
            })
            .collect()
    }
}

/// Previous accepted transient point, for the trapezoidal state rows.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TransientStep<'a> {
    pub dt: f64,
    pub prev_states: &'a [f64],
    pub prev_rates: &'a [f64],
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct AssemblyContext<'a> {
    pub stimulus: Stimulus,
    pub gmin: f64,
    /// Memristor states used when they are not unknowns.
    pub fixed_states: &'a [f64],
    pub step: Option<TransientStep<'a>>,
}

/// Device linearizations used for one assembly, for the Newton current check.
#[derive(Debug, Clone, Default)]
pub(crate) struct Linearization {
    pub bjt: Vec<((f64, f64), BjtEval)>,
    pub mem: Vec<((f64, f64), MemristorEval)>,
}

fn bjt_params(kind: &ComponentKind) -> &BjtParams {
    match kind {
        ComponentKind::Bjt { params, .. } => params,
        _ => unreachable!(),
    }
}

fn mem_params(kind: &ComponentKind) -> &MemristorParams {
    match kind {
        ComponentKind::Memristor { params, .. } => params,
        _ => unreachable!(),
    }
}

/// Stamps the linearized system around `x`, evaluating BJTs at the given
/// (possibly limited) junction voltages.
pub(crate) fn assemble_at(
    circuit: &Circuit,
    layout: &Layout,
    x: &[f64],
    junctions: &[(f64, f64)],
    ctx: &AssemblyContext<'_>,
) -> (SystemMatrix, Linearization) {
    let mut sys = SystemMatrix::zeros(layout.dim());
    let mut lin = Linearization::default();
    let row = |n: NodeId| layout.node_row(n);

    for (index, c) in circuit.components.iter().enumerate() {
        let slot = layout.slot[index];
        match &c.kind {
            ComponentKind::Resistor { resistance } => {
                stamp_conductance(&mut sys, row(c.terminals[0]), row(c.terminals[1]), 1.0 / resistance);
            }
            ComponentKind::VoltageSource { .. } => {
                let (p, n) = (row(c.terminals[0]), row(c.terminals[1]));
                let br = Some(layout.branch_row(slot));
                sys.add(p, br, 1.0);
                sys.add(n, br, -1.0);
                sys.add(br, p, 1.0);
                sys.add(br, n, -1.0);
                sys.add_rhs(br, ctx.stimulus.source_value(index, &c.kind));
            }
            ComponentKind::CurrentSource { .. } => {
                let value = ctx.stimulus.source_value(index, &c.kind);
                sys.add_rhs(row(c.terminals[0]), -value);
                sys.add_rhs(row(c.terminals[1]), value);
            }
            ComponentKind::Bjt { params, .. } => {
                let (vbe, vbc) = junctions[slot];
                let e = eval_bjt(vbe, vbc, params);
                let [c_node, b_node, e_node] = [c.terminals[0], c.terminals[1], c.terminals[2]];
                for (node, i0, g_be, g_bc) in [
                    (c_node, e.ic, e.gc_be, e.gc_bc),
                    (b_node, e.ib, e.gb_be, e.gb_bc),
                    (e_node, e.ie, e.ge_be(), e.ge_bc()),
                ] {
                    let r = row(node);
                    // i ≈ i0 + g_be·(Vb − Ve − vbe) + g_bc·(Vb − Vc − vbc)
                    sys.add(r, row(b_node), g_be + g_bc);
                    sys.add(r, row(e_node), -g_be);
                    sys.add(r, row(c_node), -g_bc);
                    sys.add_rhs(r, -(i0 - g_be * vbe - g_bc * vbc));
                }
                lin.bjt.push(((vbe, vbc), e));
            }
            ComponentKind::Memristor { params, .. } => {
                let (p, n) = (row(c.terminals[0]), row(c.terminals[1]));
                let v0 = layout.volt(x, c.terminals[0]) - layout.volt(x, c.terminals[1]);
                let x0 = layout.state(x, ctx, slot);
                let e = eval_memristor(v0, x0, params);
                match (layout.state_row(slot), ctx.step) {
                    (Some(s), Some(step)) => {
                        let s = Some(s);
                        stamp_conductance(&mut sys, p, n, e.di_dv);
                        sys.add(p, s, e.di_dx);
                        sys.add(n, s, -e.di_dx);
                        let i_eq = e.i - e.di_dv * v0 - e.di_dx * x0;
                        sys.add_rhs(p, -i_eq);
                        sys.add_rhs(n, i_eq);

                        let h = 0.5 * step.dt;
                        sys.add(s, s, 1.0 - h * e.ddx_dx);
                        sys.add(s, p, -h * e.ddx_dv);
                        sys.add(s, n, h * e.ddx_dv);
                        sys.add_rhs(
                            s,
                            step.prev_states[slot]
                                + h * step.prev_rates[slot]
                                + h * (e.dx_dt - e.ddx_dv * v0 - e.ddx_dx * x0),
                        );
                    }
                    _ => stamp_conductance(&mut sys, p, n, e.di_dv),
                }
                lin.mem.push(((v0, x0), e));
            }
        }
    }
    if ctx.gmin > 0.0 {
        for n in &layout.gmin_nodes {
            sys.add(row(*n), row(*n), ctx.gmin);
        }
    }
    (sys, lin)
}

fn stamp_conductance(sys: &mut SystemMatrix, p: Option<usize>, n: Option<usize>, g: f64) {
    sys.add(p, p, g);
    sys.add(n, n, g);
    sys.add(p, n, -g);
    sys.add(n, p, -g);
}

/// Linearized MNA system around `guess` for DC conditions, or for one
/// trapezoidal step of length `dt` from `guess` when `dt` is given (the
/// guess then also serves as the previous accepted point).
pub fn assemble(
    circuit: &Circuit,
    guess: &Solution,
    stimulus: &Stimulus,
    gmin: f64,
    dt: Option<f64>,
) -> SystemMatrix {
    let layout = Layout::new(circuit, dt.is_some());
    let x = layout.to_unknowns(guess);
    let rates: Vec<f64> = if dt.is_some() {
        state_rates(circuit, &layout, &x, &guess.mem_states)
    } else {
        Vec::new()
    };
    let ctx = AssemblyContext {
        stimulus: *stimulus,
        gmin,
        fixed_states: &guess.mem_states,
        step: dt.map(|dt| TransientStep {
            dt,
            prev_states: &guess.mem_states,
            prev_rates: &rates,
        }),
    };
    let junctions = layout.junctions(circuit, &x);
    assemble_at(circuit, &layout, &x, &junctions, &ctx).0
}

/// dx/dt of every memristor at unknowns `x` with states `states`.
pub(crate) fn state_rates(circuit: &Circuit, layout: &Layout, x: &[f64], states: &[f64]) -> Vec<f64> {
    circuit
        .memristors()
        .map(|(index, c)| {
            let v = layout.volt(x, c.terminals[0]) - layout.volt(x, c.terminals[1]);
            eval_memristor(v, states[layout.slot[index]], mem_params(&c.kind)).dx_dt
        })
        .collect()
}

/// Currents into each terminal of every component at `sol`, in component
/// order; terminal order matches [`crate::netlist::Component::terminals`].
pub fn device_currents(circuit: &Circuit, sol: &Solution, stimulus: &Stimulus) -> Vec<Vec<f64>> {
    let v = |n: NodeId| sol.voltage(n);
    let mut vsrc = 0;
    let mut mem = 0;
    circuit
        .components
        .iter()
        .enumerate()
        .map(|(index, c)| match &c.kind {
            ComponentKind::Resistor { resistance } => {
                let i = (v(c.terminals[0]) - v(c.terminals[1])) / resistance;
                vec![i, -i]
            }
            ComponentKind::VoltageSource { .. } => {
                let i = sol.branch_currents[vsrc];
                vsrc += 1;
                vec![i, -i]
            }
            ComponentKind::CurrentSource { .. } => {
                let i = stimulus.source_value(index, &c.kind);
                vec![i, -i]
            }
            ComponentKind::Bjt { .. } => {
                let (vc, vb, ve) = (v(c.terminals[0]), v(c.terminals[1]), v(c.terminals[2]));
                let e = eval_bjt(vb - ve, vb - vc, bjt_params(&c.kind));
                vec![e.ic, e.ib, e.ie]
            }
            ComponentKind::Memristor { .. } => {
                let x = sol.mem_states[mem];
                mem += 1;
                let i = eval_memristor(v(c.terminals[0]) - v(c.terminals[1]), x, mem_params(&c.kind)).i;
                vec![i, -i]
            }
        })
        .collect()
}

/// Power absorbed by one branch at an operating point (W).
#[derive(Debug, Clone, PartialEq)]
pub struct BranchPower {
    /// Component name, or `gmin(<node>)` for a solver shunt.
    pub label: String,
    pub power: f64,
}

/// Absorbed power of every branch, gmin shunts included. By Tellegen's
/// theorem these sum to zero at a solution satisfying KCL.
pub fn branch_powers(circuit: &Circuit, sol: &Solution, stimulus: &Stimulus, gmin: f64) -> Vec<BranchPower> {
    let currents = device_currents(circuit, sol, stimulus);
    let mut out: Vec<BranchPower> = circuit
        .components
        .iter()
        .zip(&currents)
        .map(|(c, i)| BranchPower {
            label: c.name.clone(),
            power: c
                .terminals
                .iter()
                .zip(i)
                .map(|(n, i)| sol.voltage(*n) * i)
                .sum(),
        })
        .collect();
    if gmin > 0.0 {
        let layout = Layout::new(circuit, false);
        for n in layout.gmin_nodes {
            let v = sol.voltage(n);
            out.push(BranchPower {
                label: format!("gmin({})", circuit.nodes.name(n)),
                power: gmin * v * v,
            });
        }
    }
    out
}

/// KCL balance at one non-ground node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeBalance {
    /// Net current leaving the node through all branches (A).
    pub residual: f64,
    /// Largest single branch-current magnitude at the node (A).
    pub largest: f64,
}

/// KCL residual at every non-ground node (index `k` is node `k + 1`).
pub fn node_balances(circuit: &Circuit, sol: &Solution, stimulus: &Stimulus, gmin: f64) -> Vec<NodeBalance> {
    let mut out = vec![
        NodeBalance {
            residual: 0.0,
            largest: 0.0
        };
        circuit.nodes.len() - 1
    ];
    let mut add = |n: NodeId, i: f64| {
        if !n.is_ground() {
            let b = &mut out[n.0 - 1];
            b.residual += i;
            b.largest = b.largest.max(i.abs());
        }
    };
    for (c, currents) in circuit.components.iter().zip(device_currents(circuit, sol, stimulus)) {
        for (n, i) in c.terminals.iter().zip(currents) {
            add(*n, i);
        }
    }
    if gmin > 0.0 {
        for n in Layout::new(circuit, false).gmin_nodes {
            add(n, gmin * sol.voltage(n));
        }
    }
    out
}
