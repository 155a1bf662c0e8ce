use std::time::{Duration, Instant};

/// Result of one criterion.
#[derive(Debug, Clone)]
pub struct Check {
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Check {
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Failed, and listed as a known failure.
    KnownFail,
    /// Passed although listed as a known failure.
    UnexpectedPass,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::KnownFail => "FAIL (known)",
            Verdict::UnexpectedPass => "PASS (listed as known failure)",
        }
    }

    /// Whether the suite as a whole should fail.
    pub fn breaks_suite(self) -> bool {
        matches!(self, Verdict::Fail | Verdict::UnexpectedPass)
    }
}

pub struct Runner {
    known_failures: &'static [&'static str],
    pub lines: Vec<(String, Verdict)>,
}

impl Runner {
    pub fn new(known_failures: &'static [&'static str]) -> Self {
        Runner {
            known_failures,
            lines: Vec::new(),
        }
    }

    /// Runs `f`, failing it if it exceeds `limit`, and prints its line.
    pub fn run(&mut self, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Check) {
        let start = Instant::now();
        let check = f();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let pass = check.pass && in_time;
        let known = self.known_failures.contains(&name);
        let verdict = match (pass, known) {
            (true, false) => Verdict::Pass,
            (false, false) => Verdict::Fail,
            (false, true) => Verdict::KnownFail,
            (true, true) => Verdict::UnexpectedPass,
        };
        let budget = match limit {
            Some(l) => format!("{:.2}s of {}s", elapsed.as_secs_f64(), l.as_secs()),
            None => format!("{:.2}s", elapsed.as_secs_f64()),
        };
        let late = if in_time { "" } else { " over time budget;" };
        println!("{:<32} {:<6} [{budget}]{late} {}", name, verdict.label(), check.detail);
        self.lines.push((name.to_string(), verdict));
    }

    pub fn failed(&self) -> Vec<&str> {
        self.lines
            .iter()
            .filter(|(_, v)| v.breaks_suite())
            .map(|(n, _)| n.as_str())
            .collect()
    }
}
