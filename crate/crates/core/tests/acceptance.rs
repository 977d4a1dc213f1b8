//! End-to-end acceptance checks. Runs without the test harness and prints one
//! PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{check_golden, corpus, earliest_violation, goldens, lower_with, z3, z3_sat};
use kinduct_core::bench::{classify, score_tallies, Classification, Expected, Tallies};
use kinduct_core::driver::{
    base_case, format_log, forward_condition, kinduction, load_task, Context, InvariantsMode, KInductionConfig,
    LogPhase, Task, Trace, VerdictStatus,
};
use kinduct_core::frontend::TypeOptions;
use kinduct_core::interp::{self, Outcome, RunConfig, SequenceSource};
use kinduct_core::solver::{self, emit_smtlib, solve_clauses, Budget, CnfInstance, Lit, SatResult, Status};
use kinduct_core::transform::{prepare, Phase};
use kinduct_core::vcgen::generate;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;

const DRAIN: &str = "int main() { unsigned int x = *; while (x > 0) x--; assert(x == 0); }";
const EIGHT_BIT: TypeOptions = TypeOptions { width_override: Some(8) };

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cfg(mode: InvariantsMode, k_max: usize) -> KInductionConfig {
    KInductionConfig { invariants_mode: mode, max_iterations: k_max, ..KInductionConfig::default() }
}

fn drain() -> Check {
    let start = Instant::now();
    let t = load_task("drain.c", DRAIN, InvariantsMode::Builtin, TypeOptions::default()).map_err(|e| e.to_string())?;
    let v = kinduction(&t, &cfg(InvariantsMode::Builtin, 100)).map_err(|e| e.to_string())?;
    ensure(v.status == VerdictStatus::True && v.decided_by == Some(LogPhase::Inductive), || format!("{v:?}"))?;
    let k = v.k_at_decision.unwrap();
    ensure(k <= 5, || format!("proved at k={k}"))?;
    let ctx = Context::unbounded("drain");
    for k in 1..=10 {
        let holds = forward_condition(&t.plain, k, &ctx).map_err(|e| e.to_string())?;
        ensure(!holds, || format!("forward condition alone holds at k={k}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("{secs:.1} s"))?;
    Ok(format!("inductive step at k={k}, forward fails for k<=10, {secs:.2} s"))
}

fn base_case_vs_enumeration() -> Check {
    let start = Instant::now();
    let ctx = Context::unbounded("oracle");
    let progs = corpus();
    for prog in &progs {
        let p = lower_with(&prog.source, EIGHT_BIT);
        let oracle = earliest_violation(&p, 8).map(|k| k as usize);
        let mut got = None;
        for k in 1..=8 {
            if base_case(&p, &p, k, &ctx).map_err(|e| e.to_string())?.is_some() {
                got = Some(k);
                break;
            }
        }
        ensure(oracle == got, || format!("{}: enumeration {oracle:?}, base case {got:?}", prog.path))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 300.0, || format!("{secs:.1} s"))?;
    Ok(format!("{} programs agree, {secs:.1} s", progs.len()))
}

/// Re-executes the plain program on the recorded inputs.
fn trace_replays(task: &Task, t: &Trace) -> Result<(), String> {
    let p = &task.plain;
    let heads: BTreeSet<usize> = p.loops.iter().map(|l| l.head).collect();
    let mut src = SequenceSource::new(t.inputs.iter().copied());
    let run = interp::run(&p.instrs, &p.vars, &mut src, RunConfig { record_at: Some(&heads), ..RunConfig::default() });
    match run.outcome {
        Outcome::AssertionFailed { pc, .. } if pc == t.violated.pc => {}
        other => return Err(format!("replay ends in {other:?}, trace says pc {}", t.violated.pc)),
    }
    ensure(run.snapshots.len() + 1 == t.states.len(), || {
        format!("{} loop-head states replayed, {} in trace", run.snapshots.len(), t.states.len() - 1)
    })?;
    for ((pc, store), s) in run.snapshots.iter().zip(&t.states) {
        ensure(*pc == s.pc, || format!("state at pc {pc}, trace says {}", s.pc))?;
        for (name, &want) in &s.values {
            let v = p.vars.find(name).ok_or_else(|| format!("unknown variable {name}"))?;
            let got = p.vars.ty(v).to_i128(store[v.index()]);
            ensure(got == want, || format!("{name} = {got}, trace says {want}"))?;
        }
    }
    Ok(())
}

fn builtin_soundness() -> Check {
    let mut tallies = Tallies::default();
    let mut traces = 0;
    for prog in corpus() {
        let task = load_task(&prog.path, &prog.source, InvariantsMode::Builtin, TypeOptions::default())
            .map_err(|e| format!("{}: {e}", prog.path))?;
        let v = kinduction(&task, &cfg(InvariantsMode::Builtin, 100)).map_err(|e| format!("{}: {e}", prog.path))?;
        let class = classify(prog.expected, v.status);
        tallies.add(class);
        ensure(!matches!(class, Classification::FalseIncorrect | Classification::TrueIncorrect), || {
            format!("{}: {:?} on a {} program", prog.path, v.status, prog.expected.name())
        })?;
        if v.status == VerdictStatus::False {
            let t = v.counterexample.as_ref().ok_or_else(|| format!("{}: FALSE without trace", prog.path))?;
            trace_replays(&task, t).map_err(|e| format!("{}: {e}", prog.path))?;
            traces += 1;
        }
    }
    Ok(format!(
        "{} proofs, {} bugs, {} unknown, 0 incorrect, {traces} traces replay",
        tallies.correct_proofs, tallies.bugs_found, tallies.unknown_and_timeout
    ))
}

fn proofs(mode: InvariantsMode, k_max: usize) -> Result<usize, String> {
    let mut n = 0;
    for prog in corpus().into_iter().filter(|p| p.expected == Expected::Safe) {
        let task = load_task(&prog.path, &prog.source, mode, TypeOptions::default()).map_err(|e| e.to_string())?;
        let c = KInductionConfig { timeout_seconds: 60.0, ..cfg(mode, k_max) };
        n += (kinduction(&task, &c).map_err(|e| e.to_string())?.status == VerdictStatus::True) as usize;
    }
    Ok(n)
}

fn invariants_help() -> Check {
    // stutter removal makes deep inductive steps slow; both modes use the same bound
    let k_max = 20;
    let with = proofs(InvariantsMode::Builtin, k_max)?;
    let without = proofs(InvariantsMode::None, k_max)?;
    ensure(with > without, || format!("builtin {with}, none {without}"))?;
    Ok(format!("builtin proves {with}, none proves {without} (k<={k_max})"))
}

fn golden_translations() -> Check {
    let all = goldens();
    ensure(all.len() == 12, || format!("{} goldens", all.len()))?;
    all.iter().try_for_each(check_golden)?;
    Ok("12 translations match".into())
}

fn score_weights() -> Check {
    let cases: [((usize, usize, usize, usize, usize), i64); 10] = [
        ((0, 0, 0, 0, 0), 0),
        ((1, 0, 0, 0, 0), 1),
        ((0, 1, 0, 0, 0), 2),
        ((0, 0, 1, 0, 0), -6),
        ((0, 0, 0, 1, 0), -12),
        ((0, 0, 0, 0, 9), 0),
        ((1, 2, 1, 0, 0), -1),
        ((0, 3, 0, 0, 0), 6),
        ((5, 5, 1, 1, 3), -3),
        ((20, 10, 0, 2, 4), 16),
    ];
    for ((b, p, f, t, u), want) in cases {
        let mut tl = Tallies::default();
        for (n, c) in [
            (b, Classification::BugFound),
            (p, Classification::CorrectProof),
            (f, Classification::FalseIncorrect),
            (t, Classification::TrueIncorrect),
            (u, Classification::UnknownOrTimeout),
        ] {
            (0..n).for_each(|_| tl.add(c));
        }
        let got = score_tallies(&tl);
        ensure(got == want, || format!("({b},{p},{f},{t},{u}) scores {got}, want {want}"))?;
    }
    Ok("10 tallies score as expected".into())
}

fn brute_force(n: u32, clauses: &[Vec<Lit>]) -> bool {
    (0u64..1 << n).any(|m| clauses.iter().all(|c| c.iter().any(|l| ((m >> l.var()) & 1 == 1) != l.is_negated())))
}

fn solver_agreement() -> Check {
    let mut rng = StdRng::seed_from_u64(0xacce);
    for i in 0..10_000 {
        let n = rng.gen_range(1..=16u32);
        let m = rng.gen_range(0..=50usize);
        let clauses: Vec<Vec<Lit>> = (0..m)
            .map(|_| (0..rng.gen_range(1..=4)).map(|_| Lit::new(rng.gen_range(0..n), rng.gen_bool(0.5))).collect())
            .collect();
        let truth = brute_force(n, &clauses);
        let ok = match solve_clauses(n, &clauses, Budget::default()).0 {
            SatResult::Sat(a) => truth && clauses.iter().all(|c| c.iter().any(|&l| CnfInstance::lit_value(l, &a))),
            SatResult::Unsat => !truth,
            SatResult::BudgetExhausted => false,
        };
        ensure(ok, || format!("random CNF #{i} disagrees with its truth table"))?;
    }
    let z3 = z3().ok_or("z3 not installed")?;
    let mut compared = 0;
    for prog in corpus() {
        let task = load_task("t.c", &prog.source, InvariantsMode::Builtin, TypeOptions::default()).map_err(|e| e.to_string())?;
        for phase in [Phase::Base, Phase::Forward, Phase::Inductive] {
            for k in 1..=2 {
                let f = generate(&prepare(&task.instrumented, k, phase).map_err(|e| e.to_string())?);
                let ours = solver::check(&f, Budget::default()).map_err(|e| e.to_string())?.status == Status::Sat;
                let theirs = z3_sat(&z3, &emit_smtlib(&f));
                ensure(theirs == Some(ours), || format!("{} {phase} k={k}: ours {ours}, z3 {theirs:?}", prog.path))?;
                compared += 1;
            }
        }
    }
    Ok(format!("10000 random CNFs, {compared} corpus VCs agree with z3"))
}

fn phase_logs() -> Check {
    let dir = common::workspace_root().join("corpus/phases");
    let table = std::fs::read_to_string(dir.join("expected.tsv")).map_err(|e| e.to_string())?;
    let mut n = 0;
    let mut rechecks = 0;
    for line in table.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let f: Vec<&str> = line.split('\t').collect();
        let src = std::fs::read_to_string(dir.join(f[0])).map_err(|e| e.to_string())?;
        let task = load_task(f[0], &src, InvariantsMode::None, TypeOptions::default()).map_err(|e| e.to_string())?;
        let v = kinduction(&task, &cfg(InvariantsMode::None, f[1].parse().unwrap())).map_err(|e| e.to_string())?;
        let want: String = f[5].split(',').map(|e| format!("{e}\n")).collect();
        let got = format_log(&v.phase_log);
        ensure(got == want, || format!("{}: log {got:?}, want {want:?}", f[0]))?;
        ensure(v.status.to_string() == f[2], || format!("{}: {}", f[0], v.status))?;
        if let [.., (LogPhase::Recheck, k)] = v.phase_log.as_slice() {
            ensure(Some(*k) == v.k_at_decision.map(|d| d + 5), || format!("{}: recheck at {k}", f[0]))?;
            rechecks += 1;
        }
        n += 1;
    }
    ensure(n == 5 && rechecks >= 2, || format!("{n} fixtures, {rechecks} rechecks"))?;
    Ok(format!("{n} phase logs match, {rechecks} end with the re-check at k+5"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("drain proved by k-induction with invariants", drain),
        ("base case matches enumeration at 8 bits", base_case_vs_enumeration),
        ("builtin invariants: no incorrect verdicts, traces replay", builtin_soundness),
        ("builtin invariants prove more programs", invariants_help),
        ("invariant comment translation goldens", golden_translations),
        ("score weights", score_weights),
        ("SAT solver agrees with truth tables and z3", solver_agreement),
        ("phase logs of the k-induction loop", phase_logs),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = Duration::from_millis(start.elapsed().as_millis() as u64);
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{took:?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{took:?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
