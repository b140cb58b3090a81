//! Claim-level trust filtering over nanopublications.
//!
//! Claims arrive as N-Quads documents holding nanopublications (assertion,
//! provenance and publication-info graphs). An agent's policy, written in a
//! small rule language, decides per claim whether it is accepted; evidence
//! chains let a claim inherit trust from the claims it cites.

pub mod chain;
pub mod engine;
pub mod iri;
pub mod nanopub;
pub mod nquads;
pub mod policy;
pub mod store;
pub mod term;
pub mod vocab;

pub use chain::{
    build_evidence_graph, resolve_all, resolve_chain, BlockReason, Blocker, ChainError, ChainResolver, ChainResult,
    EvidenceGraph,
};
pub use engine::{
    evaluate_claim, explain, filter, publish_filter, Context, ContextError, Decision, EngineError, TraceEntry,
    TrustEngine, TrustedData, ACTION_KEY, REQUESTER_KEY,
};
pub use iri::{canonicalize_iri, Iri, IriError};
pub use nanopub::{
    extract_meta, extract_meta_lenient, validate_nanopub, ClaimMeta, GraphView, MetaError, MetaWarning,
    Nanopublication, Violation, ViolationKind,
};
pub use nquads::{parse_nquads, write_nquads, SyntaxError};
pub use policy::{
    check_policy, parse_policy, parse_sets, print_policy, AgentSet, AssertionPattern, ChainMode, Condition,
    Diagnostic, DiagnosticKind, ParseError, Policy, Rule, SetRegistry, Verdict,
};
pub use store::{IngestError, IngestOptions, IngestReport, Pattern, Snapshot, Store};
pub use term::{Literal, Quad, Term, Timestamp};
pub use vocab::Vocabulary;
