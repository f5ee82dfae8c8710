//! Acceptance checks for `lcdg-core`.
//!
//! Each criterion runs a fixed, seeded workload, compares against the
//! oracles in [`oracles`] where an independent computation exists, and must
//! finish inside its time limit to pass.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

pub mod criteria;
pub mod oracles;

/// Relative tolerance of the character orthogonality check.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
/// Allowed range of the normalized energy T_k q / |S|^{2k-1}.
pub const ENERGY_RATIO_RANGE: (f64, f64) = (0.5, 2.0);
/// Allowed range of the normalized 4-cycle count.
pub const CYCLE_RATIO_RANGE: (f64, f64) = (0.3, 3.0);
/// Upper bound for L q² / |S|³.
pub const DEGENERATE_RATIO_MAX: f64 = 4.0;

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    /// Checks passed and the run finished inside the limit.
    pub passed: bool,
    pub checks_passed: bool,
    pub elapsed_secs: f64,
    pub limit_secs: f64,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2}: {} [{:.2}s of {}s] {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed_secs,
            self.limit_secs,
            self.detail
        )
    }
}

/// What a criterion body reports: whether its checks held, and a summary.
pub struct Report {
    pub ok: bool,
    pub notes: String,
}

impl Default for Report {
    fn default() -> Self {
        Self::new()
    }
}

impl Report {
    pub fn new() -> Self {
        Report {
            ok: true,
            notes: String::new(),
        }
    }

    pub fn check(&mut self, ok: bool, note: impl AsRef<str>) {
        self.ok &= ok;
        if !ok {
            self.note(format!("VIOLATION {}", note.as_ref()));
        }
    }

    pub fn note(&mut self, note: impl AsRef<str>) {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        let _ = write!(self.notes, "{}", note.as_ref());
    }
}

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub limit_secs: f64,
    body: fn() -> lcdg_core::Result<Report>,
}

impl Criterion {
    pub fn run(&self) -> Outcome {
        let start = Instant::now();
        let result = (self.body)();
        let elapsed_secs = start.elapsed().as_secs_f64();
        let (checks_passed, detail) = match result {
            Ok(r) => (r.ok, r.notes),
            Err(e) => (false, format!("error: {e}")),
        };
        Outcome {
            id: self.id,
            title: self.title,
            passed: checks_passed && elapsed_secs < self.limit_secs,
            checks_passed,
            elapsed_secs,
            limit_secs: self.limit_secs,
            detail,
        }
    }
}

pub fn criteria() -> Vec<Criterion> {
    use criteria::*;
    let c = |id, title, limit_secs, body| Criterion {
        id,
        title,
        limit_secs,
        body,
    };
    vec![
        c(1, "character orthogonality", 10.0, character_orthogonality as fn() -> _),
        c(2, "spectral closed walks", 30.0, spectral_walks),
        c(3, "energy oracle", 60.0, energy_oracle),
        c(4, "energy inequality", 120.0, energy_inequality),
        c(5, "sphere energy trend", 300.0, sphere_energy_trend),
        c(6, "good tuples give cycles", 180.0, good_tuple_cycles),
        c(7, "total 4-cycle count", 300.0, total_cycles),
        c(8, "expander mixing", 120.0, mixing),
        c(9, "large eigenvalue certificate", 60.0, bad_set),
        c(10, "degenerate span count", 180.0, degenerate_span),
        c(11, "congruence class bookkeeping", 180.0, class_bookkeeping),
        c(12, "independent set", 120.0, independent_set),
    ]
}

pub fn run_criterion(id: u8) -> Option<Outcome> {
    criteria().into_iter().find(|c| c.id == id).map(|c| c.run())
}

pub fn run_all() -> Vec<Outcome> {
    criteria().iter().map(Criterion::run).collect()
}
