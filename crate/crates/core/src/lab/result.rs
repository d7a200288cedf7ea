//! Verdict types shared by all checkers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Where a verdict came from: subsystem dims and, for suite runs, the
/// master seed and trial index.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<u64>,
}

impl Meta {
    pub fn dims(dims: &[usize]) -> Self {
        Self {
            dims: dims.to_vec(),
            ..Self::default()
        }
    }
}

/// Single inequality or identity. `slack ≥ 0` means the statement holds;
/// `pass = slack ≥ −tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub quantities: BTreeMap<String, f64>,
    pub slack: f64,
    pub pass: bool,
    pub tolerance: f64,
    pub meta: Meta,
}

impl CheckResult {
    pub fn new(name: &str, slack: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            quantities: BTreeMap::new(),
            slack,
            pass: slack >= -tolerance,
            tolerance,
            meta: Meta::default(),
        }
    }

    /// Identity check: slack is `−|lhs − rhs|`.
    pub fn identity(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(name, -(lhs - rhs).abs(), tolerance)
            .with("lhs", lhs)
            .with("rhs", rhs)
    }

    /// Inequality `lhs ≥ rhs`.
    pub fn at_least(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::new(name, lhs - rhs, tolerance)
            .with("lhs", lhs)
            .with("rhs", rhs)
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.quantities.insert(key.to_string(), value);
        self
    }

    pub fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.slack >= -tolerance;
        self
    }

    /// Recomputes `pass` from the stored slack and tolerance.
    pub fn is_consistent(&self) -> bool {
        self.pass == (self.slack >= -self.tolerance)
    }
}

/// A side condition attached to a chain, e.g. `Tr Ω ≤ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub label: String,
    pub slack: f64,
}

/// Ordered chain `v_0 ≥ v_1 ≥ … ≥ v_k` with optional side conditions.
/// Passes iff every consecutive slack and every condition slack is
/// `≥ −tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainResult {
    pub name: String,
    pub links: Vec<(String, f64)>,
    pub slacks: Vec<f64>,
    pub conditions: Vec<Condition>,
    pub quantities: BTreeMap<String, f64>,
    pub pass: bool,
    pub tolerance: f64,
    pub meta: Meta,
}

impl ChainResult {
    pub fn new(name: &str, links: Vec<(String, f64)>, tolerance: f64) -> Self {
        let slacks = links.windows(2).map(|w| w[0].1 - w[1].1).collect();
        let mut out = Self {
            name: name.to_string(),
            links,
            slacks,
            conditions: Vec::new(),
            quantities: BTreeMap::new(),
            pass: false,
            tolerance,
            meta: Meta::default(),
        };
        out.pass = out.recompute_pass();
        out
    }

    pub fn condition(mut self, label: &str, slack: f64) -> Self {
        self.conditions.push(Condition {
            label: label.to_string(),
            slack,
        });
        self.pass = self.recompute_pass();
        self
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.quantities.insert(key.to_string(), value);
        self
    }

    pub fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.recompute_pass();
        self
    }

    /// Smallest slack over links and conditions (`+∞` when there are none).
    pub fn min_slack(&self) -> f64 {
        self.slacks
            .iter()
            .chain(self.conditions.iter().map(|c| &c.slack))
            .fold(f64::INFINITY, |m, &s| m.min(s))
    }

    pub fn link(&self, label: &str) -> Option<f64> {
        self.links.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }

    fn recompute_pass(&self) -> bool {
        // NaN slacks fail
        self.slacks
            .iter()
            .chain(self.conditions.iter().map(|c| &c.slack))
            .all(|&s| s >= -self.tolerance)
    }

    pub fn is_consistent(&self) -> bool {
        self.pass == self.recompute_pass()
    }
}

/// Outcome of the Lie-Trotter study for one state.
///
/// Asserted: every `t_n ≤ 1 + tolerance`, and the final deviation
/// `|t_N − Tr Ω|` does not exceed the first. Monotonicity of `t_n` in `n`
/// is an open question and is only recorded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterResult {
    pub name: String,
    pub n_values: Vec<u64>,
    pub t_values: Vec<f64>,
    pub trace_omega: f64,
    pub deviations: Vec<f64>,
    pub nonincreasing: bool,
    pub converging: bool,
    pub slack: f64,
    pub pass: bool,
    pub tolerance: f64,
    pub meta: Meta,
}

impl TrotterResult {
    pub fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.recompute_pass();
        self
    }

    pub(crate) fn recompute_pass(&self) -> bool {
        self.slack >= -self.tolerance && self.converging
    }
}

/// Any verdict a suite run can produce.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Check(CheckResult),
    Chain(ChainResult),
    Trotter(TrotterResult),
}

impl Verdict {
    pub fn name(&self) -> &str {
        match self {
            Self::Check(c) => &c.name,
            Self::Chain(c) => &c.name,
            Self::Trotter(t) => &t.name,
        }
    }

    pub fn pass(&self) -> bool {
        match self {
            Self::Check(c) => c.pass,
            Self::Chain(c) => c.pass,
            Self::Trotter(t) => t.pass,
        }
    }

    /// The scalar slack used for summaries and worst-case selection.
    pub fn slack(&self) -> f64 {
        match self {
            Self::Check(c) => c.slack,
            Self::Chain(c) => c.min_slack(),
            Self::Trotter(t) => t.slack,
        }
    }

    pub fn meta(&self) -> &Meta {
        match self {
            Self::Check(c) => &c.meta,
            Self::Chain(c) => &c.meta,
            Self::Trotter(t) => &t.meta,
        }
    }

    pub fn set_meta(&mut self, meta: Meta) {
        match self {
            Self::Check(c) => c.meta = meta,
            Self::Chain(c) => c.meta = meta,
            Self::Trotter(t) => t.meta = meta,
        }
    }

    pub fn set_tolerance(&mut self, tolerance: f64) {
        *self = match std::mem::replace(self, Self::Check(CheckResult::new("", 0.0, 0.0))) {
            Self::Check(c) => Self::Check(c.with_tolerance(tolerance)),
            Self::Chain(c) => Self::Chain(c.with_tolerance(tolerance)),
            Self::Trotter(t) => Self::Trotter(t.with_tolerance(tolerance)),
        };
    }

    /// Flat `(name, value)` view used for CSV columns.
    pub fn flat_quantities(&self) -> Vec<(String, f64)> {
        match self {
            Self::Check(c) => c.quantities.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            Self::Chain(c) => {
                let mut out: Vec<(String, f64)> = c
                    .links
                    .iter()
                    .enumerate()
                    .map(|(i, (label, v))| (format!("link{i}:{label}"), *v))
                    .collect();
                out.extend(c.conditions.iter().map(|cd| (format!("cond:{}", cd.label), cd.slack)));
                out.extend(c.quantities.iter().map(|(k, v)| (k.clone(), *v)));
                out
            }
            Self::Trotter(t) => {
                let mut out: Vec<(String, f64)> = t
                    .n_values
                    .iter()
                    .zip(&t.t_values)
                    .map(|(n, v)| (format!("t_{n}"), *v))
                    .collect();
                out.push(("trace_omega".into(), t.trace_omega));
                out.push(("nonincreasing".into(), if t.nonincreasing { 1.0 } else { 0.0 }));
                out
            }
        }
    }
}

impl From<CheckResult> for Verdict {
    fn from(c: CheckResult) -> Self {
        Self::Check(c)
    }
}

impl From<ChainResult> for Verdict {
    fn from(c: ChainResult) -> Self {
        Self::Chain(c)
    }
}

impl From<TrotterResult> for Verdict {
    fn from(t: TrotterResult) -> Self {
        Self::Trotter(t)
    }
}
