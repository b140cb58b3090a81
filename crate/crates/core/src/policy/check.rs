use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{is_word, AgentSet, Condition, Policy};
use crate::term::Term;

/// Agent sets by name.
pub type SetRegistry = BTreeMap<String, AgentSet>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    UnresolvedSet,
    DuplicateRule,
    DuplicateSet,
    /// A set declared inline and supplied externally with different members.
    SetRedefined,
    InvalidName,
    ZeroDepth,
    /// `and`/`or` with fewer than two operands.
    DegenerateConnective,
    EmptyPattern,
    BlankInPattern,
    LiteralTypedAndTagged,
    EmptyContextKey,
}

impl DiagnosticKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticKind::UnresolvedSet => "unresolved-set",
            DiagnosticKind::DuplicateRule => "duplicate-rule",
            DiagnosticKind::DuplicateSet => "duplicate-set",
            DiagnosticKind::SetRedefined => "set-redefined",
            DiagnosticKind::InvalidName => "invalid-name",
            DiagnosticKind::ZeroDepth => "zero-depth",
            DiagnosticKind::DegenerateConnective => "degenerate-connective",
            DiagnosticKind::EmptyPattern => "empty-pattern",
            DiagnosticKind::BlankInPattern => "blank-in-pattern",
            DiagnosticKind::LiteralTypedAndTagged => "literal-typed-and-tagged",
            DiagnosticKind::EmptyContextKey => "empty-context-key",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    /// Rule the problem was found in; `None` for policy-level problems.
    pub rule: Option<String>,
    pub detail: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            Some(rule) => write!(f, "{}: {}/{}", self.kind.as_str(), rule, self.detail),
            None => write!(f, "{}: {}", self.kind.as_str(), self.detail),
        }
    }
}

/// Merges the policy's inline sets with externally supplied ones.
/// Inline declarations win on a name clash; `check_policy` reports clashes
/// whose members differ.
pub fn resolve_sets(policy: &Policy, external: &SetRegistry) -> SetRegistry {
    let mut out = external.clone();
    for set in &policy.sets {
        out.insert(set.name.clone(), set.clone());
    }
    out
}

pub fn check_policy(policy: &Policy, external: &SetRegistry) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |kind, rule: Option<&str>, detail: String| {
        out.push(Diagnostic { kind, rule: rule.map(str::to_string), detail });
    };

    if !is_word(&policy.name) {
        push(DiagnosticKind::InvalidName, None, format!("policy {:?}", policy.name));
    }
    let mut seen_sets = BTreeSet::new();
    for set in &policy.sets {
        if !is_word(&set.name) {
            push(DiagnosticKind::InvalidName, None, format!("set {:?}", set.name));
        }
        if !seen_sets.insert(set.name.as_str()) {
            push(DiagnosticKind::DuplicateSet, None, set.name.clone());
        }
        if let Some(ext) = external.get(&set.name) {
            if ext.members != set.members {
                push(DiagnosticKind::SetRedefined, None, set.name.clone());
            }
        }
    }

    let known: BTreeSet<&str> = seen_sets.into_iter().chain(external.keys().map(String::as_str)).collect();
    let mut seen_rules = BTreeSet::new();
    for rule in &policy.rules {
        let name = Some(rule.name.as_str());
        if !is_word(&rule.name) {
            push(DiagnosticKind::InvalidName, name, "rule name".into());
        }
        if !seen_rules.insert(rule.name.as_str()) {
            push(DiagnosticKind::DuplicateRule, name, rule.name.clone());
        }
        let mut stack = vec![&rule.condition];
        while let Some(c) = stack.pop() {
            match c {
                Condition::SourceIn(set) | Condition::ChainAnchored { roots: set, .. } => {
                    if !is_word(set) {
                        push(DiagnosticKind::InvalidName, name, set.clone());
                    } else if !known.contains(set.as_str()) {
                        push(DiagnosticKind::UnresolvedSet, name, set.clone());
                    }
                    if let Condition::ChainAnchored { max_depth: 0, .. } = c {
                        push(DiagnosticKind::ZeroDepth, name, set.clone());
                    }
                }
                Condition::ContextEquals { key, .. } | Condition::ContextDefined(key) => {
                    if key.is_empty() {
                        push(DiagnosticKind::EmptyContextKey, name, "context".into());
                    }
                }
                Condition::AssertionMatches(p) => match (&p.predicate, &p.object) {
                    (None, None) => push(DiagnosticKind::EmptyPattern, name, "assertion matches".into()),
                    (_, Some(Term::Blank { label })) => {
                        push(DiagnosticKind::BlankInPattern, name, format!("_:{label}"))
                    }
                    (_, Some(Term::Literal { value })) => {
                        if value.datatype.is_some() && value.language.is_some() {
                            push(DiagnosticKind::LiteralTypedAndTagged, name, value.lexical.clone());
                        } else if value.language.as_deref().is_some_and(|l| !is_word(l)) {
                            push(DiagnosticKind::InvalidName, name, "language tag".into());
                        }
                    }
                    _ => {}
                },
                Condition::And(items) | Condition::Or(items) => {
                    if items.len() < 2 {
                        let op = if matches!(c, Condition::And(_)) { "and" } else { "or" };
                        push(DiagnosticKind::DegenerateConnective, name, format!("{op} with {} operand(s)", items.len()));
                    }
                    stack.extend(items.iter().rev());
                }
                Condition::Not(inner) => stack.push(inner),
                Condition::SourceIs(_)
                | Condition::HasSource
                | Condition::HasEvidence
                | Condition::PublishedAfter(_)
                | Condition::PublishedBefore(_) => {}
            }
        }
    }
    out
}
