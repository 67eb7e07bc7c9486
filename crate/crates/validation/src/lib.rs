//! Pass/fail bookkeeping for the acceptance run: one line per criterion,
//! panics reported as failures, nonzero exit when anything fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Check { pass, detail: detail.into() }
    }

    /// Passes only if every part passes; details are joined with "; ".
    pub fn all(parts: Vec<Check>) -> Self {
        let pass = parts.iter().all(|c| c.pass);
        let detail = parts.into_iter().map(|c| c.detail).collect::<Vec<_>>().join("; ");
        Check { pass, detail }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: String,
    pub name: String,
    pub check: Check,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {} ({:.2}s): {}",
            if self.check.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.check.detail
        )
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub outcomes: Vec<Outcome>,
}

impl Report {
    /// Runs one criterion, prints its line immediately, and keeps going
    /// after failures or panics.
    pub fn run(&mut self, id: &str, name: &str, f: impl FnOnce() -> Check) {
        let start = Instant::now();
        let check = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(c) => c,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Check::new(false, format!("panicked: {msg}"))
            }
        };
        let outcome = Outcome { id: id.into(), name: name.into(), check, elapsed: start.elapsed() };
        println!("{}", outcome.line());
        self.outcomes.push(outcome);
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.check.pass).count()
    }

    pub fn summary(&self) -> String {
        format!("{} passed, {} failed", self.outcomes.len() - self.failures(), self.failures())
    }
}
