use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The hypothesis of the inequality does not hold at this input.
    Skip,
}

/// One inequality `lhs ≤ rhs`, checked up to `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub verdict: Verdict,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`; a failure has `slack < −tolerance`.
    pub slack: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Inequality {
    pub(crate) fn check(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = rhs - lhs;
        let verdict = if slack >= -tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            name: name.to_owned(),
            verdict,
            lhs,
            rhs,
            slack,
            tolerance,
            note: None,
        }
    }

    pub(crate) fn skip(name: &str, note: impl Into<String>) -> Self {
        Self {
            name: name.to_owned(),
            verdict: Verdict::Skip,
            lhs: f64::NAN,
            rhs: f64::NAN,
            slack: f64::NAN,
            tolerance: 0.0,
            note: Some(note.into()),
        }
    }
}

/// Output of one checker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checker: String,
    pub verdict: Verdict,
    pub items: Vec<Inequality>,
}

impl Report {
    pub(crate) fn new(checker: &str, items: Vec<Inequality>) -> Self {
        let verdict = if items.iter().any(|i| i.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if items.iter().all(|i| i.verdict == Verdict::Skip) {
            Verdict::Skip
        } else {
            Verdict::Pass
        };
        Self {
            checker: checker.to_owned(),
            verdict,
            items,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    pub fn item(&self, name: &str) -> Option<&Inequality> {
        self.items.iter().find(|i| i.name == name)
    }
}

/// Absolute 1e-9 plus relative 1e-10 of the magnitudes involved.
pub fn tolerance(scale: f64) -> f64 {
    1e-9 + 1e-10 * scale.abs()
}
