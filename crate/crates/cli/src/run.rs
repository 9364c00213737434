use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use mirrorsim::analyses::{run_all, Results, RunOptions, Trace};
use mirrorsim::netlist::{parse_circuit, Circuit};
use mirrorsim::solver::{Stimulus, Tolerances};
use mirrorsim::Execution;

use crate::svg;
use crate::{Failure, Format};

pub struct RunArgs {
    pub file: PathBuf,
    pub out: PathBuf,
    pub tstep: Option<f64>,
    pub reltol: Option<f64>,
    pub formats: Vec<Format>,
    pub exec: Execution,
}

/// Reads and elaborates a netlist, reporting problems as `file:line: msg`.
pub fn load(path: &Path) -> Result<Circuit, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    parse_circuit(&text).map_err(|e| {
        Failure::Parse(match e.line {
            Some(line) => format!("{}:{line}: {}", path.display(), e.kind),
            None => format!("{}: {}", path.display(), e.kind),
        })
    })
}

pub fn options(tstep: Option<f64>, reltol: Option<f64>, exec: Execution) -> Result<RunOptions, Failure> {
    let tol = Tolerances {
        reltol: reltol.unwrap_or(Tolerances::default().reltol),
        ..Tolerances::default()
    };
    tol.validate().map_err(Failure::Parse)?;
    if let Some(t) = tstep {
        if !(t > 0.0) {
            return Err(Failure::Parse("--tstep must be positive".into()));
        }
    }
    Ok(RunOptions { tol, tstep, exec })
}

pub fn simulate(path: &Path, circuit: &Circuit, opts: &RunOptions) -> Result<Results, Failure> {
    run_all(circuit, opts).map_err(|e| Failure::Analysis(format!("{}: {e}", path.display())))
}

pub fn run(args: &RunArgs) -> Result<(), Failure> {
    let opts = options(args.tstep, args.reltol, args.exec)?;
    let circuit = load(&args.file)?;
    let results = simulate(&args.file, &circuit, &opts)?;

    let stem = args
        .file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "circuit".into());
    let files = render(&circuit, &results, &stem, &args.formats);
    fs::create_dir_all(&args.out).map_err(|e| Failure::Io(format!("{}: {e}", args.out.display())))?;
    for (name, contents) in files {
        let path = args.out.join(name);
        fs::write(&path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        info!("wrote {}", path.display());
    }
    Ok(())
}

/// Every output file for one run, as `(file name, contents)`.
fn render(circuit: &Circuit, results: &Results, stem: &str, formats: &[Format]) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    if formats.contains(&Format::Text) {
        if let Some(op) = &results.op {
            let mut t = Trace::for_circuit(circuit, "op");
            t.push_solution(circuit, 0.0, op, &Stimulus::dc());
            files.push((format!("{stem}.op.txt"), op_text(circuit, &t, op.iterations).into_bytes()));
        }
        if !results.fourier.is_empty() {
            let text: Vec<String> = results.fourier.iter().map(|r| r.to_text()).collect();
            files.push((format!("{stem}.four.txt"), text.join("\n").into_bytes()));
        }
        if let Some(p) = &results.power {
            files.push((format!("{stem}.power.txt"), p.to_text().into_bytes()));
        }
    }
    for (k, trace) in results.dc.iter().enumerate() {
        let kind = if k == 0 { "dc".to_string() } else { format!("dc{}", k + 1) };
        push_trace(&mut files, circuit, trace, stem, &kind, formats);
    }
    if let Some(trace) = &results.tran {
        push_trace(&mut files, circuit, trace, stem, "tran", formats);
        if formats.contains(&Format::Svg) {
            for (_, m) in circuit.memristors() {
                if let Some(plot) = memristor_loop(circuit, trace, &m.name) {
                    files.push((format!("{stem}.{}.iv.svg", m.name.to_lowercase()), plot.into_bytes()));
                }
            }
        }
    }
    files
}

fn push_trace(
    files: &mut Vec<(String, Vec<u8>)>,
    circuit: &Circuit,
    trace: &Trace,
    stem: &str,
    kind: &str,
    formats: &[Format],
) {
    if formats.contains(&Format::Csv) {
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).expect("writing to memory");
        files.push((format!("{stem}.{kind}.csv"), buf));
    }
    if formats.contains(&Format::Svg) {
        // Device currents are what the mirror figures show.
        let series: Vec<(&str, &[f64])> = trace
            .names
            .iter()
            .zip(&trace.columns)
            .filter(|(n, _)| n.starts_with('I'))
            .map(|(n, c)| (n.as_str(), c.as_slice()))
            .collect();
        let title = format!("{} ({kind})", circuit.title);
        let plot = svg::plot(&title, &trace.axis_label, "current (A)", &trace.axis, &series);
        files.push((format!("{stem}.{kind}.svg"), plot.into_bytes()));
    }
}

/// Current against terminal voltage for one memristor.
fn memristor_loop(circuit: &Circuit, trace: &Trace, name: &str) -> Option<String> {
    let (_, comp) = circuit.component(name)?;
    let volts = |k: usize| -> Option<Vec<f64>> {
        let node = comp.terminals[k];
        if node.is_ground() {
            Some(vec![0.0; trace.len()])
        } else {
            trace.signal(&format!("V({})", circuit.nodes.name(node))).map(<[f64]>::to_vec)
        }
    };
    let (vp, vn) = (volts(0)?, volts(1)?);
    let v: Vec<f64> = vp.iter().zip(&vn).map(|(a, b)| a - b).collect();
    let label = format!("I({})", comp.name);
    let i = trace.signal(&label)?;
    Some(svg::plot(
        &format!("{} i-v loop", comp.name),
        "voltage (V)",
        "current (A)",
        &v,
        &[(label.as_str(), i)],
    ))
}

fn op_text(circuit: &Circuit, t: &Trace, iterations: usize) -> String {
    let mut s = format!("Operating point: {}\n\n", circuit.title);
    for (name, col) in t.names.iter().zip(&t.columns) {
        s.push_str(&format!("{name:<16} {:>16.9e}\n", col[0]));
    }
    if circuit.memristors().next().is_some() {
        s.push_str("\nMemristor states are held at their initial values.\n");
    }
    s.push_str(&format!("\nNewton iterations: {iterations}\n"));
    s
}
