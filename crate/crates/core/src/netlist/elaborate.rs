use std::collections::{BTreeMap, HashMap};

use super::{
    AnalysisDirective, Circuit, Component, ComponentKind, ModelCard, NetlistError,
    NetlistErrorKind, NodeId, NodeMap, RawNetlist, Record,
};

struct Pending<'a> {
    line: usize,
    name: &'a str,
    nodes: Vec<&'a str>,
    record: &'a Record,
}

/// Interns nodes, resolves model cards and checks connectivity.
pub fn elaborate(raw: RawNetlist) -> Result<Circuit, NetlistError> {
    let mut models: BTreeMap<String, ModelCard> = BTreeMap::new();
    let mut pending: Vec<Pending<'_>> = Vec::new();
    let mut directives = Vec::new();
    let mut directive_lines = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();

    for line in &raw.lines {
        let (name, nodes): (&str, Vec<&str>) = match &line.record {
            Record::Model { name, card } => {
                if models.insert(name.to_ascii_lowercase(), *card).is_some() {
                    return Err(NetlistError::at(
                        line.line,
                        NetlistErrorKind::DuplicateModel(name.clone()),
                    ));
                }
                continue;
            }
            Record::Directive(d) => {
                directives.push(d.clone());
                directive_lines.push(line.line);
                continue;
            }
            Record::Resistor { name, pos, neg, .. }
            | Record::VoltageSource { name, pos, neg, .. }
            | Record::CurrentSource { name, pos, neg, .. }
            | Record::Memristor { name, pos, neg, .. } => (name, vec![pos, neg]),
            Record::Bjt {
                name,
                collector,
                base,
                emitter,
                ..
            } => (name, vec![collector, base, emitter]),
        };
        if seen.insert(name.to_ascii_lowercase(), line.line).is_some() {
            return Err(NetlistError::at(
                line.line,
                NetlistErrorKind::DuplicateComponent(name.to_string()),
            ));
        }
        pending.push(Pending {
            line: line.line,
            name,
            nodes,
            record: &line.record,
        });
    }

    let mut incidence: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for p in &pending {
        for n in &p.nodes {
            incidence.entry(n).or_insert((0, p.line)).0 += 1;
        }
    }
    if !incidence.contains_key("0") {
        return Err(NetlistError::new(NetlistErrorKind::NoGround));
    }
    for (node, (count, line)) in &incidence {
        if *node != "0" && *count < 2 {
            return Err(NetlistError::at(
                *line,
                NetlistErrorKind::DanglingNode(node.to_string()),
            ));
        }
    }
    let mut names = vec!["0".to_string()];
    names.extend(incidence.keys().filter(|n| **n != "0").map(|n| n.to_string()));
    let nodes = NodeMap::new(names);
    let id = |n: &str| nodes.lookup(n).expect("interned above");

    pending.sort_by_key(|p| p.name.to_ascii_lowercase());
    let mut components = Vec::with_capacity(pending.len());
    for p in &pending {
        let terminals: Vec<NodeId> = p.nodes.iter().map(|n| id(n)).collect();
        let kind = resolve_kind(p, &models)?;
        components.push(Component {
            name: p.name.to_string(),
            terminals,
            kind,
        });
    }

    let circuit = Circuit {
        title: raw.title,
        components,
        models,
        directives,
        nodes,
    };
    for (d, line) in circuit.directives.iter().zip(directive_lines) {
        check_directive(&circuit, d).map_err(|e| e.with_line(line))?;
    }
    Ok(circuit)
}

fn resolve_kind(
    p: &Pending<'_>,
    models: &BTreeMap<String, ModelCard>,
) -> Result<ComponentKind, NetlistError> {
    let lookup = |model: &str| {
        models.get(&model.to_ascii_lowercase()).ok_or_else(|| {
            NetlistError::at(
                p.line,
                NetlistErrorKind::UnresolvedModel {
                    component: p.name.to_string(),
                    model: model.to_string(),
                },
            )
        })
    };
    let mismatch = |model: &str| {
        NetlistError::at(
            p.line,
            NetlistErrorKind::ModelKindMismatch {
                component: p.name.to_string(),
                model: model.to_string(),
            },
        )
    };
    Ok(match p.record {
        Record::Resistor { resistance, .. } => ComponentKind::Resistor {
            resistance: *resistance,
        },
        Record::VoltageSource { waveform, .. } => ComponentKind::VoltageSource {
            waveform: *waveform,
        },
        Record::CurrentSource { dc, .. } => ComponentKind::CurrentSource { dc: *dc },
        Record::Bjt { model, .. } => match lookup(model)? {
            ModelCard::Npn(params) => ComponentKind::Bjt {
                model: model.clone(),
                params: *params,
            },
            _ => return Err(mismatch(model)),
        },
        Record::Memristor { model, x_init, .. } => match lookup(model)? {
            ModelCard::Memristor(card) => {
                let mut params = *card;
                if let Some(x) = x_init {
                    params.x_init = *x;
                }
                params.validate().map_err(|m| {
                    NetlistError::at(p.line, NetlistErrorKind::InvalidParameter(m))
                })?;
                ComponentKind::Memristor {
                    model: model.clone(),
                    params,
                }
            }
            _ => return Err(mismatch(model)),
        },
        Record::Model { .. } | Record::Directive(_) => unreachable!("filtered earlier"),
    })
}

fn check_directive(circuit: &Circuit, d: &AnalysisDirective) -> Result<(), NetlistError> {
    match d {
        AnalysisDirective::DcSweep { source, .. } => match circuit.component(source) {
            Some((_, c)) if c.is_source() => Ok(()),
            _ => Err(NetlistError::new(NetlistErrorKind::UnknownSource(
                source.clone(),
            ))),
        },
        AnalysisDirective::Four { signals, .. } => {
            let known = circuit.signal_names();
            for s in signals {
                if !known.iter().any(|k| k.eq_ignore_ascii_case(s)) {
                    return Err(NetlistError::new(NetlistErrorKind::UnknownSignal(
                        s.clone(),
                    )));
                }
            }
            Ok(())
        }
        AnalysisDirective::Op | AnalysisDirective::Tran { .. } => Ok(()),
    }
}
