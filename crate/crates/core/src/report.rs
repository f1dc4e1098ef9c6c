//! Verdicts, witnesses and the report documents emitted by the suites.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::io::ElementDoc;
use crate::model::{Element, SpaceModel};

/// A concrete counterexample: the offending element(s) and how badly the
/// property failed on them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub description: String,
    pub elements: Vec<ElementDoc>,
    pub residual: Option<f64>,
    /// Smallest eigenvalue of the image, when the image is self-adjoint.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_eigenvalue: Option<f64>,
}

impl Witness {
    pub fn new(description: impl Into<String>, residual: f64) -> Self {
        Self {
            description: description.into(),
            elements: Vec::new(),
            residual: finite(residual),
            min_eigenvalue: None,
        }
    }

    pub fn with_element(mut self, model: &SpaceModel, v: &Element) -> Self {
        self.elements.push(ElementDoc::from_element(model, v));
        self
    }

    pub fn with_min_eigenvalue(mut self, value: Option<f64>) -> Self {
        self.min_eigenvalue = value.and_then(finite);
        self
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Method {
    /// Decided on a complete basis; the verdict is certain.
    Exact,
    /// Decided on random probes; a pass is probabilistic, a fail is certain.
    Sampled { samples: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Verdict {
    Pass {
        method: Method,
        max_residual: f64,
    },
    Fail {
        method: Method,
        witness: Box<Witness>,
    },
    Untested {
        reason: String,
    },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }

    pub fn failed(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn is_tested(&self) -> bool {
        !matches!(self, Verdict::Untested { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Fail { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn max_residual(&self) -> Option<f64> {
        match self {
            Verdict::Pass { max_residual, .. } => Some(*max_residual),
            _ => None,
        }
    }

    pub fn samples(&self) -> usize {
        match self {
            Verdict::Pass {
                method: Method::Sampled { samples },
                ..
            }
            | Verdict::Fail {
                method: Method::Sampled { samples },
                ..
            } => *samples,
            _ => 0,
        }
    }

    /// Conjunction, keeping the first failure as witness.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (f @ Verdict::Fail { .. }, _) => f,
            (_, f @ Verdict::Fail { .. }) => f,
            (u @ Verdict::Untested { .. }, _) => u,
            (_, u @ Verdict::Untested { .. }) => u,
            (
                Verdict::Pass {
                    method: m1,
                    max_residual: r1,
                },
                Verdict::Pass {
                    method: m2,
                    max_residual: r2,
                },
            ) => {
                let method = match (m1, m2) {
                    (Method::Exact, Method::Exact) => Method::Exact,
                    (Method::Sampled { samples: a }, Method::Sampled { samples: b }) => {
                        Method::Sampled { samples: a.max(b) }
                    }
                    (Method::Sampled { samples }, _) | (_, Method::Sampled { samples }) => {
                        Method::Sampled { samples }
                    }
                };
                Verdict::Pass {
                    method,
                    max_residual: r1.max(r2),
                }
            }
        }
    }

    fn short(&self) -> String {
        match self {
            Verdict::Pass {
                method: Method::Exact,
                max_residual,
            } => {
                format!("pass (exact, max residual {max_residual:.2e})")
            }
            Verdict::Pass {
                method: Method::Sampled { samples },
                max_residual,
            } => {
                format!("pass ({samples} samples, max residual {max_residual:.2e})")
            }
            Verdict::Fail { witness, .. } => {
                let mut s = format!("FAIL: {}", witness.description);
                if let Some(r) = witness.residual {
                    let _ = write!(s, " (residual {r:.3e})");
                }
                if let Some(l) = witness.min_eigenvalue {
                    let _ = write!(s, " (image min eigenvalue {l:.3e})");
                }
                s
            }
            Verdict::Untested { reason } => format!("untested: {reason}"),
        }
    }
}

/// One equivalence the suites assert: every side must carry the same truth
/// value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub name: String,
    pub sides: Vec<(String, bool)>,
    pub agree: bool,
}

impl Equivalence {
    pub fn new(name: impl Into<String>, sides: Vec<(String, bool)>) -> Self {
        let agree = sides.windows(2).all(|w| w[0].1 == w[1].1);
        Self {
            name: name.into(),
            sides,
            agree,
        }
    }

    /// `premise ⇒ conclusion`; only a true premise with a false conclusion
    /// disagrees.
    pub fn implication(
        name: impl Into<String>,
        premise: (String, bool),
        conclusion: (String, bool),
    ) -> Self {
        let agree = !premise.1 || conclusion.1;
        Self {
            name: name.into(),
            sides: vec![premise, conclusion],
            agree,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub map: String,
    pub verdicts: BTreeMap<String, Verdict>,
    pub levels_tested: Vec<usize>,
    pub sample_counts: BTreeMap<String, usize>,
    pub equivalences: Vec<Equivalence>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

/// Verdict key for a property at a matrix level.
pub fn at_level(property: &str, level: usize) -> String {
    format!("{property}@{level}")
}

impl ClassificationReport {
    pub fn new(map: impl Into<String>) -> Self {
        Self {
            map: map.into(),
            ..Self::default()
        }
    }

    pub fn insert(&mut self, key: impl Into<String>, verdict: Verdict) {
        let key = key.into();
        let samples = verdict.samples();
        if samples > 0 {
            self.sample_counts.insert(key.clone(), samples);
        }
        self.verdicts.insert(key, verdict);
    }

    pub fn add_level(&mut self, level: usize) {
        if !self.levels_tested.contains(&level) {
            self.levels_tested.push(level);
            self.levels_tested.sort_unstable();
        }
    }

    pub fn verdict(&self, key: &str) -> Option<&Verdict> {
        self.verdicts.get(key)
    }

    pub fn passed(&self, key: &str) -> bool {
        self.verdict(key).is_some_and(Verdict::passed)
    }

    pub fn push(&mut self, eq: Equivalence) {
        self.equivalences.push(eq);
    }

    pub fn consistent(&self) -> bool {
        self.equivalences.iter().all(|e| e.agree)
    }

    /// Fold another report's verdicts and equivalences into this one.
    pub fn merge(&mut self, other: ClassificationReport) {
        for (k, v) in other.verdicts {
            self.insert(k, v);
        }
        for l in other.levels_tested {
            self.add_level(l);
        }
        self.equivalences.extend(other.equivalences);
        self.notes.extend(other.notes);
    }

    pub fn failures(&self) -> impl Iterator<Item = (&String, &Witness)> {
        self.verdicts
            .iter()
            .filter_map(|(k, v)| v.witness().map(|w| (k, w)))
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "map: {}", self.map);
        if !self.levels_tested.is_empty() {
            let levels: Vec<String> = self.levels_tested.iter().map(|l| l.to_string()).collect();
            let _ = writeln!(s, "levels tested: {}", levels.join(", "));
        }
        for (k, v) in &self.verdicts {
            let _ = writeln!(s, "  {k:<28} {}", v.short());
        }
        for e in &self.equivalences {
            let sides: Vec<String> = e.sides.iter().map(|(n, b)| format!("{n}={b}")).collect();
            let mark = if e.agree { "agree" } else { "DISAGREE" };
            let _ = writeln!(s, "  [{mark}] {}: {}", e.name, sides.join(", "));
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

impl AxiomCheck {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: 0,
            failed: 0,
            witness: None,
        }
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub space: String,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(AxiomCheck::ok)
    }

    /// Collapse to a single verdict. The axiom checks are boolean, so a
    /// pass carries a zero residual; a failure carries the first witness.
    pub fn verdict(&self) -> Verdict {
        match self.checks.iter().find(|c| !c.ok()) {
            None => Verdict::Pass {
                method: Method::Sampled {
                    samples: self.samples,
                },
                max_residual: 0.0,
            },
            Some(c) => {
                let mut w = c
                    .witness
                    .clone()
                    .unwrap_or_else(|| Witness::new(c.name.clone(), f64::NAN));
                w.description = format!("{}: {}: {}", self.space, c.name, w.description);
                Verdict::Fail {
                    method: Method::Sampled {
                        samples: self.samples,
                    },
                    witness: Box::new(w),
                }
            }
        }
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render_text(&self) -> String {
        let mut s = format!(
            "space: {} ({} samples, seed {})\n",
            self.space, self.samples, self.seed
        );
        for c in &self.checks {
            let mark = if c.ok() { "pass" } else { "FAIL" };
            let _ = write!(
                s,
                "  [{mark}] {:<36} {} passed, {} failed",
                c.name, c.passed, c.failed
            );
            if let Some(w) = &c.witness {
                let _ = write!(s, " -- {}", w.description);
                if let Some(r) = w.residual {
                    let _ = write!(s, " (residual {r:.3e})");
                }
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_keeps_first_failure() {
        let pass = Verdict::Pass {
            method: Method::Exact,
            max_residual: 1e-15,
        };
        let fail = Verdict::Fail {
            method: Method::Exact,
            witness: Box::new(Witness::new("boom", 1.0)),
        };
        assert!(pass.clone().and(pass.clone()).passed());
        assert_eq!(pass.clone().and(fail.clone()), fail);
        assert_eq!(fail.clone().and(pass), fail);
    }

    #[test]
    fn equivalence_agreement() {
        assert!(Equivalence::new("x", vec![("a".into(), true), ("b".into(), true)]).agree);
        assert!(Equivalence::new("x", vec![("a".into(), false), ("b".into(), false)]).agree);
        assert!(!Equivalence::new("x", vec![("a".into(), true), ("b".into(), false)]).agree);
        assert!(Equivalence::implication("x", ("a".into(), false), ("b".into(), false)).agree);
        assert!(!Equivalence::implication("x", ("a".into(), true), ("b".into(), false)).agree);
    }

    #[test]
    fn nan_residuals_serialize_as_null() {
        let w = Witness::new("nan", f64::NAN);
        let s = serde_json::to_string(&w).unwrap();
        assert!(s.contains("\"residual\":null"));
    }
}
