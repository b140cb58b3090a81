//! Nanopublications and the trust metadata carried in their provenance and
//! publication-info graphs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iri::Iri;
use crate::term::{Quad, Term, Timestamp};
use crate::vocab::Vocabulary;

/// Read access to the quads of one named graph.
pub trait GraphView {
    fn graph_quads(&self, graph: &Iri) -> Vec<&Quad>;
}

impl GraphView for [Quad] {
    fn graph_quads(&self, graph: &Iri) -> Vec<&Quad> {
        self.iter().filter(|q| &q.graph == graph).collect()
    }
}

impl GraphView for Vec<Quad> {
    fn graph_quads(&self, graph: &Iri) -> Vec<&Quad> {
        self.as_slice().graph_quads(graph)
    }
}

impl GraphView for BTreeSet<Quad> {
    fn graph_quads(&self, graph: &Iri) -> Vec<&Quad> {
        self.iter().filter(|q| &q.graph == graph).collect()
    }
}

/// A claim packaged as three named graphs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Nanopublication {
    pub id: Iri,
    pub assertion: Iri,
    pub provenance: Iri,
    pub pubinfo: Iri,
}

impl Nanopublication {
    pub fn new(id: Iri, assertion: Iri, provenance: Iri, pubinfo: Iri) -> Self {
        Nanopublication { id, assertion, provenance, pubinfo }
    }

    pub fn graphs(&self) -> [&Iri; 3] {
        [&self.assertion, &self.provenance, &self.pubinfo]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    GraphNamesNotDistinct,
    EmptyAssertion,
    MissingProvenance,
    MissingPubinfo,
    /// A head declaration lacks one of its four reserved quads.
    IncompleteHead,
    /// Two head declarations for one id name different graphs.
    ConflictingHead,
    /// A reserved head predicate used outside the nanopublication's own graph.
    MisplacedHead,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::GraphNamesNotDistinct => "graph-names-not-distinct",
            ViolationKind::EmptyAssertion => "empty-assertion",
            ViolationKind::MissingProvenance => "missing-provenance",
            ViolationKind::MissingPubinfo => "missing-pubinfo",
            ViolationKind::IncompleteHead => "incomplete-head",
            ViolationKind::ConflictingHead => "conflicting-head",
            ViolationKind::MisplacedHead => "misplaced-head",
        }
    }
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub nanopub: Iri,
    pub kind: ViolationKind,
    pub graph: Iri,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} (graph <{}>)", self.nanopub, self.kind, self.graph)
    }
}

/// Checks the three-graph structure of `np` against `quads`.
pub fn validate_nanopub<V: GraphView + ?Sized>(quads: &V, np: &Nanopublication) -> Vec<Violation> {
    let mut out = Vec::new();
    let violation = |kind, graph: &Iri| Violation { nanopub: np.id.clone(), kind, graph: graph.clone() };

    let names = [&np.id, &np.assertion, &np.provenance, &np.pubinfo];
    let mut reported = BTreeSet::new();
    for (i, a) in names.iter().enumerate() {
        if names[i + 1..].contains(a) && reported.insert(*a) {
            out.push(violation(ViolationKind::GraphNamesNotDistinct, a));
        }
    }

    if quads.graph_quads(&np.assertion).is_empty() {
        out.push(violation(ViolationKind::EmptyAssertion, &np.assertion));
    }
    if quads.graph_quads(&np.provenance).is_empty() {
        out.push(violation(ViolationKind::MissingProvenance, &np.provenance));
    }
    if quads.graph_quads(&np.pubinfo).is_empty() {
        out.push(violation(ViolationKind::MissingPubinfo, &np.pubinfo));
    }
    out
}

/// Trust-relevant metadata of one claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimMeta {
    pub claim: Iri,
    pub source: Option<Iri>,
    pub published_at: Option<Timestamp>,
    /// Cited evidence claims, sorted and without duplicates.
    pub evidence: Vec<Iri>,
    pub warnings: Vec<MetaWarning>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetaWarning {
    /// The claim cites itself; the reference was dropped.
    SelfEvidence,
    /// An evidence target that is not an IRI; the reference was dropped.
    NonIriEvidence { object: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetaError {
    #[error("claim {claim} has {count} attribution statements")]
    AmbiguousSource { claim: Iri, count: usize },
    #[error("claim {claim} is attributed to a non-IRI term {object}")]
    InvalidSource { claim: Iri, object: String },
    #[error("claim {claim} has malformed publication time {value}")]
    MalformedTimestamp { claim: Iri, value: String },
    #[error("claim {claim} has {count} publication-time statements")]
    AmbiguousTimestamp { claim: Iri, count: usize },
}

fn objects<'a, V: GraphView + ?Sized>(
    quads: &'a V,
    graph: &Iri,
    subject: &Iri,
    predicate: &Iri,
) -> Vec<&'a Term> {
    let mut objs: Vec<&Term> = quads
        .graph_quads(graph)
        .into_iter()
        .filter(|q| &q.predicate == predicate && q.subject.as_iri() == Some(subject))
        .map(|q| &q.object)
        .collect();
    objs.sort();
    objs.dedup();
    objs
}

fn extract_source<V: GraphView + ?Sized>(
    quads: &V,
    np: &Nanopublication,
    vocab: &Vocabulary,
) -> Result<Option<Iri>, MetaError> {
    let objs = objects(quads, &np.provenance, &np.id, &vocab.attribution);
    match objs.as_slice() {
        [] => Ok(None),
        [Term::Iri { value }] => Ok(Some(value.clone())),
        [other] => Err(MetaError::InvalidSource { claim: np.id.clone(), object: other.to_string() }),
        many => Err(MetaError::AmbiguousSource { claim: np.id.clone(), count: many.len() }),
    }
}

fn extract_published<V: GraphView + ?Sized>(
    quads: &V,
    np: &Nanopublication,
    vocab: &Vocabulary,
) -> Result<Option<Timestamp>, MetaError> {
    let objs = objects(quads, &np.pubinfo, &np.id, &vocab.published);
    match objs.as_slice() {
        [] => Ok(None),
        [Term::Literal { value }] => Timestamp::parse(&value.lexical).map(Some).map_err(|_| {
            MetaError::MalformedTimestamp { claim: np.id.clone(), value: value.lexical.clone() }
        }),
        [other] => {
            Err(MetaError::MalformedTimestamp { claim: np.id.clone(), value: other.to_string() })
        }
        many => Err(MetaError::AmbiguousTimestamp { claim: np.id.clone(), count: many.len() }),
    }
}

fn extract_evidence<V: GraphView + ?Sized>(
    quads: &V,
    np: &Nanopublication,
    vocab: &Vocabulary,
) -> (Vec<Iri>, Vec<MetaWarning>) {
    let mut evidence = Vec::new();
    let mut warnings = Vec::new();
    for obj in objects(quads, &np.provenance, &np.id, &vocab.derivation) {
        match obj.as_iri() {
            Some(iri) if iri == &np.id => warnings.push(MetaWarning::SelfEvidence),
            Some(iri) => evidence.push(iri.clone()),
            None => warnings.push(MetaWarning::NonIriEvidence { object: obj.to_string() }),
        }
    }
    (evidence, warnings)
}

/// Reads source, publication time and evidence for `np`.
///
/// Only the provenance and publication-info graphs are consulted.
pub fn extract_meta<V: GraphView + ?Sized>(
    quads: &V,
    np: &Nanopublication,
    vocab: &Vocabulary,
) -> Result<ClaimMeta, MetaError> {
    let source = extract_source(quads, np, vocab)?;
    let published_at = extract_published(quads, np, vocab)?;
    let (evidence, warnings) = extract_evidence(quads, np, vocab);
    Ok(ClaimMeta { claim: np.id.clone(), source, published_at, evidence, warnings })
}

/// Like [`extract_meta`], but a field that fails to extract is left absent and
/// its error is returned alongside instead of failing the whole record.
pub fn extract_meta_lenient<V: GraphView + ?Sized>(
    quads: &V,
    np: &Nanopublication,
    vocab: &Vocabulary,
) -> (ClaimMeta, Vec<MetaError>) {
    let mut errors = Vec::new();
    let source = extract_source(quads, np, vocab).unwrap_or_else(|e| {
        errors.push(e);
        None
    });
    let published_at = extract_published(quads, np, vocab).unwrap_or_else(|e| {
        errors.push(e);
        None
    });
    let (evidence, warnings) = extract_evidence(quads, np, vocab);
    (ClaimMeta { claim: np.id.clone(), source, published_at, evidence, warnings }, errors)
}
