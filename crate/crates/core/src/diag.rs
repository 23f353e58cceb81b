//! Diagnostics: a rule id, the elements/connectors the finding is about, and
//! a human-readable message. Checking never short-circuits; callers receive
//! the full list, sorted by (rule, subjects, message) so output is stable no
//! matter the evaluation or insertion order.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::ElementId;

/// Registered rule ids. Declaration order is the reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rule {
    // Referential integrity: evaluated first; any hit aborts the F/LC pass
    // because those rules would chase dangling or mistyped references.
    /// Reference to an element id that is not declared.
    Ri1,
    /// Duplicate declaration: element ids, connector ids, or the same child
    /// listed twice under one parent.
    Ri2,
    /// Kind mismatch: behaviour data on a non-Behaviour (or missing on one),
    /// a non-structural owner, a mistyped Init/End slot, a non-Model root, or
    /// a second Model element.
    Ri3,
    /// A connector maps one source to several targets (edges must form a
    /// partial function per connector).
    Ri4,
    /// Every element except the root has exactly one parent.
    F1,
    /// The root Model has no parent.
    F2,
    /// Every structural element is reachable from the Model via inner
    /// structural children.
    F3,
    /// Every structural element owns at least one Behaviour.
    F4,
    /// A Group owns at least two Behaviours.
    F5,
    /// Forms own exactly one Init and one End; Groups own neither.
    F6,
    /// Within one connector, no self-loops and sources are disjoint from
    /// targets.
    Lc1,
    /// No End is an edge source; no Init is an edge target.
    Lc2,
    /// A connector touches at most one Init-or-End element.
    Lc3,
    /// No ordered pair of elements is connected more than once across all
    /// connectors.
    Lc4,
    /// Edges connect siblings: both endpoints have the same parent.
    Lc5,
    /// Within each form, every direct child except Init is forward-reachable
    /// from Init, and every direct child except End is backward-reachable
    /// from End.
    Lc6,
    /// No edge touches the Model element.
    LcM,
    /// Pattern config: goal does not belong to the pattern.
    Cfg1,
    /// Pattern config: bindings do not satisfy the variable schema.
    Cfg2,
    /// Pattern config: check list empty, token illegal for the pattern, or
    /// parameters malformed.
    Cfg3,
}

impl Rule {
    pub const ALL: [Rule; 20] = [
        Rule::Ri1,
        Rule::Ri2,
        Rule::Ri3,
        Rule::Ri4,
        Rule::F1,
        Rule::F2,
        Rule::F3,
        Rule::F4,
        Rule::F5,
        Rule::F6,
        Rule::Lc1,
        Rule::Lc2,
        Rule::Lc3,
        Rule::Lc4,
        Rule::Lc5,
        Rule::Lc6,
        Rule::LcM,
        Rule::Cfg1,
        Rule::Cfg2,
        Rule::Cfg3,
    ];

    pub fn from_id(id: &str) -> Option<Rule> {
        Rule::ALL.iter().copied().find(|r| r.id() == id)
    }

    pub fn id(self) -> &'static str {
        match self {
            Rule::Ri1 => "RI1",
            Rule::Ri2 => "RI2",
            Rule::Ri3 => "RI3",
            Rule::Ri4 => "RI4",
            Rule::F1 => "F1",
            Rule::F2 => "F2",
            Rule::F3 => "F3",
            Rule::F4 => "F4",
            Rule::F5 => "F5",
            Rule::F6 => "F6",
            Rule::Lc1 => "LC1",
            Rule::Lc2 => "LC2",
            Rule::Lc3 => "LC3",
            Rule::Lc4 => "LC4",
            Rule::Lc5 => "LC5",
            Rule::Lc6 => "LC6",
            Rule::LcM => "LC-M",
            Rule::Cfg1 => "CFG1",
            Rule::Cfg2 => "CFG2",
            Rule::Cfg3 => "CFG3",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub rule: Rule,
    pub severity: Severity,
    /// Ids the finding is about: elements and/or connectors, deterministic
    /// order fixed by each rule.
    pub subjects: Vec<ElementId>,
    pub message: String,
    /// Set when the finding was raised against a freshly ingested layout;
    /// rendered as `ING/<rule>`.
    pub via_ingest: bool,
}

impl Diagnostic {
    pub fn error(rule: Rule, subjects: Vec<ElementId>, message: impl Into<String>) -> Self {
        Diagnostic { rule, severity: Severity::Error, subjects, message: message.into(), via_ingest: false }
    }

    pub fn into_ingested(mut self) -> Self {
        self.via_ingest = true;
        self
    }

    pub fn rule_id(&self) -> String {
        if self.via_ingest {
            let mut s = String::from("ING/");
            s.push_str(self.rule.id());
            s
        } else {
            String::from(self.rule.id())
        }
    }
}

/// Wire format: `rule<TAB>subject,subject<TAB>message`.
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t", self.rule_id())?;
        for (i, s) in self.subjects.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "\t{}", self.message)
    }
}

pub(crate) fn sort_diagnostics(diags: &mut Vec<Diagnostic>) {
    diags.sort();
    diags.dedup();
}
