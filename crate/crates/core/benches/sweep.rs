use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use mirrorsim::analyses::{run_dc_sweep_with, run_transient};
use mirrorsim::exec;
use mirrorsim::netlist::{parse_circuit, AnalysisDirective, Circuit};
use mirrorsim::solver::Tolerances;
use mirrorsim::Execution;

fn corpus(name: &str) -> Circuit {
    let path = format!("{}/../../corpus/{name}.cir", env!("CARGO_MANIFEST_DIR"));
    parse_circuit(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn dc_sweeps(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut group = c.benchmark_group("dc_sweep");
    for (name, step) in [("basic_cm", 0.1), ("basic_cm", 0.01), ("widlar", 0.01)] {
        let circuit = corpus(name);
        let d = AnalysisDirective::DcSweep {
            source: "VL".into(),
            start: 0.0,
            stop: 10.0,
            step,
        };
        let points = (10.0 / step).round() as usize + 1;
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(mode, format!("{name}/{points}")), &d, |b, d| {
                b.iter(|| run_dc_sweep_with(black_box(&circuit), d, &tol, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn paired_transients(c: &mut Criterion) {
    let tol = Tolerances::default();
    let a = corpus("widlar");
    let b = corpus("widlar_mem");
    let mut group = c.benchmark_group("compare_transients");
    group.sample_size(10);
    for (mode, exec) in MODES {
        group.bench_function(mode, |bench| {
            bench.iter(|| {
                exec::join(
                    exec,
                    || run_transient(&a, 1e-6, 5e-3, 0.0, &tol).unwrap(),
                    || run_transient(&b, 1e-6, 5e-3, 0.0, &tol).unwrap(),
                )
            })
        });
    }
    group.finish();
}

criterion_group!(benches, dc_sweeps, paired_transients);
criterion_main!(benches);
