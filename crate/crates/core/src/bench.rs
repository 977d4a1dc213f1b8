//! Benchmark harness: runs a manifest of labeled programs and scores the
//! verdicts.

use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::driver::{self, KInductionConfig, LogPhase, VerdictStatus};
use crate::frontend::TypeOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expected {
    Safe,
    Unsafe,
}

impl Expected {
    pub fn name(self) -> &'static str {
        match self {
            Expected::Safe => "safe",
            Expected::Unsafe => "unsafe",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// As written in the manifest.
    pub path: String,
    pub expected: Expected,
    pub category: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
    /// Relative entry paths are resolved against this directory.
    pub base_dir: PathBuf,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest line {line}: expected `path<TAB>safe|unsafe<TAB>category`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("manifest line {line}: expected verdict must be `safe` or `unsafe`, got `{text}`")]
    Label { line: usize, text: String },
    #[error("cannot read manifest: {0}")]
    Io(#[from] io::Error),
}

impl Manifest {
    /// Parses tab-separated lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Manifest, ManifestError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [path, expected, category] = fields.as_slice() else {
                return Err(ManifestError::Syntax { line: i + 1, text: line.to_string() });
            };
            let expected = match expected.trim() {
                "safe" => Expected::Safe,
                "unsafe" => Expected::Unsafe,
                other => return Err(ManifestError::Label { line: i + 1, text: other.to_string() }),
            };
            entries.push(ManifestEntry { path: path.trim().to_string(), expected, category: category.trim().to_string() });
        }
        Ok(Manifest { entries, base_dir: base_dir.into() })
    }

    pub fn load(path: &Path) -> Result<Manifest, ManifestError> {
        let text = std::fs::read_to_string(path)?;
        Manifest::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn resolve(&self, e: &ManifestEntry) -> PathBuf {
        let p = Path::new(&e.path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    BugFound,
    CorrectProof,
    /// FALSE on a safe program.
    FalseIncorrect,
    /// TRUE on an unsafe program.
    TrueIncorrect,
    UnknownOrTimeout,
    /// Missing or unloadable file; not scored.
    Invalid,
}

pub fn classify(expected: Expected, verdict: VerdictStatus) -> Classification {
    match (verdict, expected) {
        (VerdictStatus::False, Expected::Unsafe) => Classification::BugFound,
        (VerdictStatus::True, Expected::Safe) => Classification::CorrectProof,
        (VerdictStatus::False, Expected::Safe) => Classification::FalseIncorrect,
        (VerdictStatus::True, Expected::Unsafe) => Classification::TrueIncorrect,
        (VerdictStatus::Unknown, _) => Classification::UnknownOrTimeout,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub path: String,
    pub expected: Expected,
    pub category: String,
    pub verdict: Option<VerdictStatus>,
    pub phase: Option<LogPhase>,
    pub k: Option<usize>,
    pub time_ms: u64,
    pub class: Classification,
    /// Load failure or internal error.
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tallies {
    pub correct_results: usize,
    pub bugs_found: usize,
    pub correct_proofs: usize,
    pub false_incorrect: usize,
    pub true_incorrect: usize,
    pub unknown_and_timeout: usize,
    /// Excluded from every other count.
    pub invalid: usize,
}

impl Tallies {
    pub fn from_rows<'a>(rows: impl IntoIterator<Item = &'a Row>) -> Tallies {
        let mut t = Tallies::default();
        for r in rows {
            t.add(r.class);
        }
        t
    }

    pub fn add(&mut self, c: Classification) {
        match c {
            Classification::BugFound => self.bugs_found += 1,
            Classification::CorrectProof => self.correct_proofs += 1,
            Classification::FalseIncorrect => self.false_incorrect += 1,
            Classification::TrueIncorrect => self.true_incorrect += 1,
            Classification::UnknownOrTimeout => self.unknown_and_timeout += 1,
            Classification::Invalid => self.invalid += 1,
        }
        self.correct_results = self.bugs_found + self.correct_proofs;
    }

    /// Number of scored entries.
    pub fn scored(&self) -> usize {
        self.correct_results + self.false_incorrect + self.true_incorrect + self.unknown_and_timeout
    }
}

pub const BUG_FOUND: i64 = 1;
pub const CORRECT_PROOF: i64 = 2;
pub const FALSE_ALARM: i64 = -6;
pub const WRONG_PROOF: i64 = -12;

pub fn score_tallies(t: &Tallies) -> i64 {
    BUG_FOUND * t.bugs_found as i64
        + CORRECT_PROOF * t.correct_proofs as i64
        + FALSE_ALARM * t.false_incorrect as i64
        + WRONG_PROOF * t.true_incorrect as i64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    /// Sorted by path.
    pub rows: Vec<Row>,
    pub tallies: Tallies,
    pub score: i64,
    pub total_time_ms: u64,
}

impl BenchReport {
    pub fn from_rows(mut rows: Vec<Row>, total_time_ms: u64) -> BenchReport {
        rows.sort_by(|a, b| a.path.cmp(&b.path));
        let tallies = Tallies::from_rows(&rows);
        BenchReport { score: score_tallies(&tallies), rows, tallies, total_time_ms }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<BenchReport> {
        serde_json::from_str(s)
    }

    /// Columns: path, expected, verdict, phase, k, time_ms.
    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["path", "expected", "verdict", "phase", "k", "time_ms"])?;
        for r in &self.rows {
            let verdict = match (r.class, r.verdict) {
                (Classification::Invalid, _) => "INVALID".to_string(),
                (_, Some(v)) => v.to_string(),
                (_, None) => String::new(),
            };
            out.write_record([
                r.path.clone(),
                r.expected.name().to_string(),
                verdict,
                r.phase.map(|p| p.to_string()).unwrap_or_default(),
                r.k.map(|k| k.to_string()).unwrap_or_default(),
                r.time_ms.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn score(r: &BenchReport) -> i64 {
    score_tallies(&Tallies::from_rows(&r.rows))
}

/// Verifies one entry under `cfg`.
pub fn run_entry(m: &Manifest, e: &ManifestEntry, cfg: &KInductionConfig, opts: TypeOptions) -> Row {
    let start = Instant::now();
    let mut row = Row {
        path: e.path.clone(),
        expected: e.expected,
        category: e.category.clone(),
        verdict: None,
        phase: None,
        k: None,
        time_ms: 0,
        class: Classification::Invalid,
        error: None,
    };
    let path = m.resolve(e);
    let source = match std::fs::read_to_string(&path) {
        Ok(s) => s,
        Err(err) => {
            row.error = Some(format!("{}: {err}", path.display()));
            return row;
        }
    };
    let file = path.display().to_string();
    match driver::load_task(&file, &source, cfg.invariants_mode, opts) {
        Err(err) => row.error = Some(err.to_string()),
        Ok(task) => match driver::kinduction(&task, cfg) {
            Ok(v) => {
                row.verdict = Some(v.status);
                row.phase = v.decided_by;
                row.k = v.k_at_decision;
                row.class = classify(e.expected, v.status);
            }
            Err(err) => {
                row.verdict = Some(VerdictStatus::Unknown);
                row.class = Classification::UnknownOrTimeout;
                row.error = Some(err.to_string());
            }
        },
    }
    row.time_ms = start.elapsed().as_millis() as u64;
    row
}

/// Runs every entry, up to `jobs` at a time.
pub fn run_suite(m: &Manifest, cfg: &KInductionConfig, opts: TypeOptions, jobs: usize) -> BenchReport {
    let start = Instant::now();
    let next = AtomicUsize::new(0);
    let rows = Mutex::new(Vec::with_capacity(m.entries.len()));
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, m.entries.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(e) = m.entries.get(i) else { break };
                let row = run_entry(m, e, cfg, opts);
                rows.lock().expect("no poisoned lock").push(row);
            });
        }
    });
    let rows = rows.into_inner().expect("no poisoned lock");
    BenchReport::from_rows(rows, start.elapsed().as_millis() as u64)
}
