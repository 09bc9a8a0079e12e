//! Reporting helpers for the acceptance suite: each criterion yields one
//! verdict line, and the process exit status reflects the whole run.

use std::fmt;
use std::process::ExitCode;
use std::time::{Duration, Instant};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] criterion {}: {}: {}", self.id, self.title, self.detail)
    }
}

/// Collects named sub-checks for one criterion.
#[derive(Debug, Default)]
pub struct Checks {
    parts: Vec<(bool, String)>,
}

impl Checks {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `ok` with a short description of what was measured.
    pub fn check(&mut self, ok: bool, what: impl Into<String>) -> &mut Self {
        self.parts.push((ok, what.into()));
        self
    }

    pub fn pass(&self) -> bool {
        !self.parts.is_empty() && self.parts.iter().all(|(ok, _)| *ok)
    }

    pub fn summary(&self) -> String {
        self.parts
            .iter()
            .map(|(ok, what)| if *ok { what.clone() } else { format!("{what} [violated]") })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Runs criteria in order and prints one line per criterion.
#[derive(Debug, Default)]
pub struct Suite {
    verdicts: Vec<Verdict>,
}

impl Suite {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs `body`; an `Err` counts as a failure and its message is reported.
    pub fn criterion<F>(&mut self, id: u32, title: &'static str, body: F)
    where
        F: FnOnce() -> Result<Checks, String>,
    {
        let verdict = match body() {
            Ok(checks) => Verdict { id, title, pass: checks.pass(), detail: checks.summary() },
            Err(e) => Verdict { id, title, pass: false, detail: format!("error: {e}") },
        };
        println!("{verdict}");
        self.verdicts.push(verdict);
    }

    pub fn verdicts(&self) -> &[Verdict] {
        &self.verdicts
    }

    pub fn finish(self) -> ExitCode {
        let failed: Vec<u32> = self.verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
        println!(
            "acceptance: {} of {} criteria passed",
            self.verdicts.len() - failed.len(),
            self.verdicts.len()
        );
        if failed.is_empty() {
            ExitCode::SUCCESS
        } else {
            println!("acceptance: failing criteria {failed:?}");
            ExitCode::FAILURE
        }
    }
}

/// Mean wall time of `reps` calls of `f` after one warm-up call.
pub fn mean_time<T>(reps: u32, mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut last = f();
    let start = Instant::now();
    for _ in 0..reps {
        last = std::hint::black_box(f());
    }
    (last, start.elapsed() / reps.max(1))
}
