use std::fmt::Write as _;

use serde::Serialize;

/// Outcome of one named check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    Pass,
    Fail,
}

/// Exact witness carried by every failing check: the offending location and
/// both sides of the comparison, printed as exact rationals so the failure
/// reproduces from a single eval call.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub location: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub status: CheckStatus,
    /// What was covered, in one line (ranges, parameter sets).
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Reported sequences (probe values and the like); empty for most checks.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub data: Vec<String>,
}

impl CheckResult {
    pub fn pass(id: &str, detail: String) -> Self {
        Self { id: id.into(), status: CheckStatus::Pass, detail, witness: None, data: Vec::new() }
    }

    pub fn fail(id: &str, detail: String, witness: Witness) -> Self {
        Self {
            id: id.into(),
            status: CheckStatus::Fail,
            detail,
            witness: Some(witness),
            data: Vec::new(),
        }
    }

    pub fn with_data(mut self, data: Vec<String>) -> Self {
        self.data = data;
        self
    }
}

/// A full suite run. Identical configuration yields identical bytes in both
/// serializations; checks are ordered by id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub params: Vec<(String, String)>,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn new(suite: &str, params: Vec<(String, String)>, mut checks: Vec<CheckResult>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        Self { suite: suite.into(), params, checks }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail).count()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "suite: {}", self.suite).unwrap();
        for (k, v) in &self.params {
            writeln!(out, "  {k} = {v}").unwrap();
        }
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.checks {
            let status = match c.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
            };
            writeln!(out, "{status} {:width$}  {}", c.id, c.detail).unwrap();
            if let Some(w) = &c.witness {
                writeln!(out, "     {:width$}  at {}: expected {}, got {}", "", w.location, w.expected, w.got)
                    .unwrap();
            }
            for d in &c.data {
                writeln!(out, "     {:width$}  {d}", "").unwrap();
            }
        }
        let verdict = if self.all_pass() {
            format!("result: PASS ({} checks)", self.checks.len())
        } else {
            format!("result: FAIL ({} of {} checks failed)", self.failed(), self.checks.len())
        };
        writeln!(out, "{verdict}").unwrap();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> SuiteReport {
        SuiteReport::new(
            "demo",
            vec![("level".into(), "8".into())],
            vec![
                CheckResult::fail(
                    "zz-later",
                    "something".into(),
                    Witness { location: "1/2^1".into(), expected: "0".into(), got: "1".into() },
                ),
                CheckResult::pass("aa-first", "fine".into()),
            ],
        )
    }

    #[test]
    fn checks_are_sorted_by_id() {
        let r = sample_report();
        assert_eq!(r.checks[0].id, "aa-first");
        assert!(!r.all_pass());
        assert_eq!(r.failed(), 1);
    }

    #[test]
    fn serializations_are_deterministic() {
        let a = sample_report();
        let b = sample_report();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_text(), b.to_text());
        assert!(a.to_text().contains("FAIL zz-later"));
        assert!(a.to_json().contains("\"expected\": \"0\""));
    }
}
