use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use kinduct_core::driver::{kinduction, load_task, InvariantsMode, KInductionConfig};
use kinduct_core::frontend::{load, TypeOptions};
use kinduct_core::solver::{solve_clauses, Budget, Lit};
use kinduct_core::transform::{prepare, Phase};
use kinduct_core::vcgen::generate;

const DRAIN: &str = "int main() { unsigned int x = *; while (x > 0) x--; assert(x == 0); }";
const PAIR: &str = "int main() { unsigned int x = *; unsigned int y = x; while (x > 0) { x--; y--; } assert(y == 0); }";

fn frontend(c: &mut Criterion) {
    c.bench_function("load_drain", |b| b.iter(|| load("t.c", black_box(DRAIN), TypeOptions::default()).unwrap()));
}

fn kinduction_runs(c: &mut Criterion) {
    let mut g = c.benchmark_group("kinduction");
    for (name, src, mode) in [
        ("drain_none", DRAIN, InvariantsMode::None),
        ("drain_builtin", DRAIN, InvariantsMode::Builtin),
        ("pair_builtin", PAIR, InvariantsMode::Builtin),
    ] {
        let cfg = KInductionConfig { invariants_mode: mode, ..KInductionConfig::default() };
        g.bench_function(name, |b| {
            b.iter(|| {
                let t = load_task("t.c", src, mode, TypeOptions::default()).unwrap();
                kinduction(&t, &cfg).unwrap()
            })
        });
    }
    g.finish();
}

fn vc_generation(c: &mut Criterion) {
    let t = load_task("t.c", DRAIN, InvariantsMode::None, TypeOptions::default()).unwrap();
    let u = prepare(&t.plain, 10, Phase::Inductive).unwrap();
    c.bench_function("generate_inductive_k10", |b| b.iter(|| generate(black_box(&u))));
}

fn pigeonhole(c: &mut Criterion) {
    let (p, h) = (7u32, 6u32);
    let v = |i: u32, j: u32| Lit::new(i * h + j, false);
    let mut cs: Vec<Vec<Lit>> = (0..p).map(|i| (0..h).map(|j| v(i, j)).collect()).collect();
    for j in 0..h {
        for a in 0..p {
            for b in a + 1..p {
                cs.push(vec![!v(a, j), !v(b, j)]);
            }
        }
    }
    c.bench_function("cdcl_pigeonhole_7_6", |b| b.iter(|| solve_clauses(p * h, black_box(&cs), Budget::default())));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = frontend, kinduction_runs, vc_generation, pigeonhole
}
criterion_main!(benches);
