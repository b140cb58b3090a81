//! Agent-authored trust policies: an ordered, first-match rule list with a
//! default verdict.
//!
//! ```text
//! policy consumer for <http://ex.org/alice> default reject
//! set publicFaith { <http://ex.org/registry>, <http://ex.org/notary> }
//! rule official accept when source in publicFaith
//! rule backed accept when chain anchored in publicFaith depth 3 any
//! ```

mod check;
mod lexer;
mod parser;
mod printer;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::iri::Iri;
use crate::term::{Term, Timestamp};

pub use check::{check_policy, resolve_sets, Diagnostic, DiagnosticKind, SetRegistry};
pub use parser::{parse_policy, parse_policy_bytes, parse_sets, ParseError, MAX_NESTING};
pub use printer::print_policy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether any single cited evidence claim suffices, or every one must anchor.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainMode {
    #[default]
    Any,
    All,
}

impl fmt::Display for ChainMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainMode::Any => "any",
            ChainMode::All => "all",
        })
    }
}

/// A named set of agents, e.g. the public-faith anchors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentSet {
    pub name: String,
    pub members: BTreeSet<Iri>,
}

impl AgentSet {
    pub fn new(name: impl Into<String>, members: impl IntoIterator<Item = Iri>) -> Self {
        AgentSet { name: name.into(), members: members.into_iter().collect() }
    }
}

/// Pattern over the claim's assertion graph; at least one position is bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionPattern {
    pub predicate: Option<Iri>,
    pub object: Option<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    SourceIs(Iri),
    SourceIn(String),
    HasSource,
    HasEvidence,
    /// Strictly after the given instant.
    PublishedAfter(Timestamp),
    /// Strictly before the given instant.
    PublishedBefore(Timestamp),
    ChainAnchored { roots: String, max_depth: u32, mode: ChainMode },
    ContextEquals { key: String, value: String },
    ContextDefined(String),
    AssertionMatches(AssertionPattern),
    And(Vec<Condition>),
    Or(Vec<Condition>),
    Not(Box<Condition>),
}

impl Condition {
    pub fn is_atom(&self) -> bool {
        !matches!(self, Condition::And(_) | Condition::Or(_) | Condition::Not(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub name: String,
    pub effect: Verdict,
    pub condition: Condition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    pub name: String,
    /// The trusting agent that owns this policy.
    pub owner: Iri,
    pub default: Verdict,
    pub sets: Vec<AgentSet>,
    pub rules: Vec<Rule>,
}

impl Policy {
    pub fn new(name: impl Into<String>, owner: Iri, default: Verdict) -> Self {
        Policy { name: name.into(), owner, default, sets: Vec::new(), rules: Vec::new() }
    }

    pub fn with_set(mut self, set: AgentSet) -> Self {
        self.sets.push(set);
        self
    }

    pub fn with_rule(mut self, name: impl Into<String>, effect: Verdict, condition: Condition) -> Self {
        self.rules.push(Rule { name: name.into(), effect, condition });
        self
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_policy(self))
    }
}

/// Names that print as a bare word: `[A-Za-z_][A-Za-z0-9_.-]*`.
pub fn is_word(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}
