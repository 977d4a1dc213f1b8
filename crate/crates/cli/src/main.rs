use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use kinduct_core::bench::{self, Manifest};
use kinduct_core::driver::{self, InvariantsMode, KInductionConfig, Trace, Verdict, VerdictStatus};
use kinduct_core::frontend::TypeOptions;
use kinduct_core::invariants;
use kinduct_core::transform::{self, Phase};
use serde_json::json;

const EXIT_TRUE: u8 = 0;
const EXIT_FALSE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "kinduct", version, about = "k-induction model checker for MiniC programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the assertions of one program.
    Verify(VerifyArgs),
    /// Run a manifest of labeled programs and report the score.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Largest k tried.
    #[arg(long = "k-max", default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    k_max: u64,
    /// Increment of k for the base case re-run after a proof.
    #[arg(long = "recheck-inc", default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    recheck_inc: u64,
    /// Timeout in seconds.
    #[arg(long, default_value_t = 900.0)]
    timeout: f64,
    /// Source of loop invariants: none, inferred, or `// P(...) {...}` comments.
    #[arg(long, default_value = "none", value_parser = ["none", "builtin", "comments"])]
    invariants: String,
    /// Force every integer type to this width.
    #[arg(long = "width-override", value_parser = ["8", "16", "32"])]
    width_override: Option<String>,
}

impl Common {
    fn config(&self) -> KInductionConfig {
        KInductionConfig {
            max_iterations: self.k_max as usize,
            recheck_increment: self.recheck_inc as usize,
            timeout_seconds: self.timeout,
            invariants_mode: InvariantsMode::parse(&self.invariants).expect("validated by clap"),
            ..KInductionConfig::default()
        }
    }

    fn type_options(&self) -> TypeOptions {
        TypeOptions { width_override: self.width_override.as_ref().map(|w| w.parse().expect("validated by clap")) }
    }
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Print the counterexample trace.
    #[arg(long = "show-cex")]
    show_cex: bool,
    /// Write every VC as SMT-LIB2 into this directory.
    #[arg(long = "emit-smt")]
    emit_smt: Option<PathBuf>,
    /// Write every VC as DIMACS CNF into this directory.
    #[arg(long = "emit-cnf")]
    emit_cnf: Option<PathBuf>,
    /// Print the result as a JSON object.
    #[arg(long)]
    json: bool,
    /// Print the GOTO program and exit.
    #[arg(long = "dump-goto")]
    dump_goto: bool,
    /// Print the invariants (or translated source in comments mode) and exit.
    #[arg(long = "dump-invariants")]
    dump_invariants: bool,
    /// Print the program prepared for a phase and exit.
    #[arg(long = "dump-unwound", value_parser = ["base", "forward", "inductive"])]
    dump_unwound: Option<String>,
    /// Unwinding depth for --dump-unwound.
    #[arg(long = "dump-k", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    dump_k: u64,
}

#[derive(Args)]
struct BenchArgs {
    manifest: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Entries verified in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write one CSV row per entry.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_TRUE };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn verify(a: VerifyArgs) -> anyhow::Result<u8> {
    let source = std::fs::read_to_string(&a.file).with_context(|| format!("cannot read {}", a.file.display()))?;
    let file = a.file.display().to_string();
    let mut cfg = a.common.config();
    cfg.emit_smt = a.emit_smt.clone();
    cfg.emit_cnf = a.emit_cnf.clone();
    let start = Instant::now();
    let task = driver::load_task(&file, &source, cfg.invariants_mode, a.common.type_options())?;
    if a.dump_goto || a.dump_invariants || a.dump_unwound.is_some() {
        if a.dump_goto {
            print!("{}", task.instrumented.dump());
        }
        if a.dump_invariants {
            match cfg.invariants_mode {
                InvariantsMode::Builtin => print!("{}", task.invariants.as_ref().map(|i| i.dump()).unwrap_or_default()),
                InvariantsMode::Comments => print!("{}", invariants::translate_invariants(&source)?),
                InvariantsMode::None => {}
            }
        }
        if let Some(phase) = &a.dump_unwound {
            let phase = Phase::parse(phase).expect("validated by clap");
            print!("{}", transform::prepare(&task.instrumented, a.dump_k as usize, phase)?.dump());
        }
        return Ok(EXIT_TRUE);
    }
    let verdict = match driver::kinduction(&task, &cfg) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_UNKNOWN);
        }
    };
    let time_ms = start.elapsed().as_millis() as u64;
    if a.json {
        let mut out = json!({
            "file": file,
            "status": verdict.status,
            "phase": verdict.decided_by,
            "k": verdict.k_at_decision,
            "time_ms": time_ms,
        });
        if let Some(t) = &verdict.counterexample {
            out["trace"] = serde_json::to_value(t)?;
        }
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        print_verdict(&file, &verdict, time_ms);
        if a.show_cex {
            if let Some(t) = &verdict.counterexample {
                print_trace(t);
            }
        }
    }
    Ok(match verdict.status {
        VerdictStatus::True => EXIT_TRUE,
        VerdictStatus::False => EXIT_FALSE,
        VerdictStatus::Unknown => EXIT_UNKNOWN,
    })
}

fn print_verdict(file: &str, v: &Verdict, time_ms: u64) {
    let how = match (v.decided_by, v.k_at_decision) {
        (Some(p), Some(k)) => format!(" ({p}, k={k})"),
        _ => v.reason.as_ref().map(|r| format!(" ({r})")).unwrap_or_default(),
    };
    println!("{file}: {}{how} in {time_ms} ms", v.status);
}

fn print_trace(t: &Trace) {
    println!("counterexample:");
    for (i, s) in t.states.iter().enumerate() {
        let vals: Vec<String> = s.values.iter().map(|(n, v)| format!("{n}={v}")).collect();
        println!("  s[{i}] line {}: {}", s.line, vals.join(" "));
    }
    println!("  violated: line {}, column {}", t.violated.line, t.violated.col);
}

fn run_bench(a: BenchArgs) -> anyhow::Result<u8> {
    let manifest = Manifest::load(&a.manifest)?;
    let report = bench::run_suite(&manifest, &a.common.config(), a.common.type_options(), a.jobs);
    for r in &report.rows {
        let verdict = r.verdict.map(|v| v.to_string()).unwrap_or_else(|| "INVALID".into());
        let how = match (r.phase, r.k) {
            (Some(p), Some(k)) => format!(" {p} k={k}"),
            _ => String::new(),
        };
        println!("{}\t{}\t{verdict}{how}\t{} ms", r.path, r.expected.name(), r.time_ms);
        if let Some(e) = &r.error {
            println!("\t{e}");
        }
    }
    let t = &report.tallies;
    println!(
        "correct {} (proofs {}, bugs {}), false incorrect {}, true incorrect {}, unknown {}, invalid {}",
        t.correct_results, t.correct_proofs, t.bugs_found, t.false_incorrect, t.true_incorrect, t.unknown_and_timeout, t.invalid
    );
    println!("score {} in {} ms", report.score, report.total_time_ms);
    if let Some(p) = &a.json {
        std::fs::write(p, report.to_json()).with_context(|| format!("cannot write {}", p.display()))?;
    }
    if let Some(p) = &a.csv {
        let f = std::fs::File::create(p).with_context(|| format!("cannot write {}", p.display()))?;
        report.write_csv(f)?;
    }
    Ok(EXIT_TRUE)
}
