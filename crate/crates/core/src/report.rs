//! Pass/fail reports shared by the bound checkers.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

/// A judged sample passes when `margin ≥ -MARGIN_FACTOR · quadError`.
pub const MARGIN_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Nothing could be judged (for instance every radius was exceptional).
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundSample {
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub quad_error: f64,
    /// Which inequality of the report this row belongs to, when there are
    /// several.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<String>,
    /// Samples used to fit constants are listed but not judged.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub fit: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

impl BoundSample {
    pub fn new(r: f64, lhs: f64, rhs: f64, quad_error: f64) -> Self {
        Self { r, lhs, rhs, margin: rhs - lhs, quad_error, check: None, fit: false, details: BTreeMap::new() }
    }

    pub fn check(mut self, name: &str) -> Self {
        self.check = Some(name.to_owned());
        self
    }

    pub fn fitting(mut self) -> Self {
        self.fit = true;
        self
    }

    pub fn detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_owned(), value);
        self
    }

    /// NaN margins fail.
    pub fn passes(&self) -> bool {
        self.fit || self.margin >= -MARGIN_FACTOR * self.quad_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub theorem: String,
    pub function: String,
    pub params: BTreeMap<String, Value>,
    pub samples: Vec<BoundSample>,
    pub verdict: Verdict,
    pub flags: Vec<String>,
    #[serde(skip)]
    forced_fail: bool,
}

impl Report {
    pub fn new(theorem: &str, function: impl Into<String>) -> Self {
        Self {
            theorem: theorem.to_owned(),
            function: function.into(),
            params: BTreeMap::new(),
            samples: Vec::new(),
            verdict: Verdict::Inconclusive,
            flags: Vec::new(),
            forced_fail: false,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.params.insert(key.to_owned(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn flag(&mut self, flag: &str) -> &mut Self {
        if !self.flags.iter().any(|f| f == flag) {
            self.flags.push(flag.to_owned());
        }
        self
    }

    /// Flags the report and makes its verdict a failure regardless of the
    /// samples.
    pub fn fail_with(&mut self, flag: &str) -> &mut Self {
        self.forced_fail = true;
        self.flag(flag)
    }

    pub fn push(&mut self, s: BoundSample) -> &mut Self {
        self.samples.push(s);
        self
    }

    /// Computes the verdict from the judged samples.
    pub fn finish(mut self) -> Self {
        let mut judged = self.samples.iter().filter(|s| !s.fit).peekable();
        self.verdict = if self.forced_fail {
            Verdict::Fail
        } else if judged.peek().is_none() {
            Verdict::Inconclusive
        } else if judged.all(BoundSample::passes) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Judged samples that fail.
    pub fn failures(&self) -> impl Iterator<Item = &BoundSample> {
        self.samples.iter().filter(|s| !s.passes())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports hold only finite-or-null numbers and strings")
    }
}
