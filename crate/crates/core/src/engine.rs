//! The trust filter: a policy applied claim by claim to a snapshot, producing
//! an accept/reject partition with an evaluation trace per claim.

use std::cell::{OnceCell, RefCell};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use crate::chain::{build_evidence_graph, ChainResolver, ChainResult, EvidenceGraph};
use crate::iri::Iri;
use crate::nanopub::{extract_meta_lenient, ClaimMeta, MetaError, Nanopublication};
use crate::policy::{check_policy, resolve_sets, ChainMode, Condition, Diagnostic, Policy, SetRegistry, Verdict};
use crate::store::{Pattern, Snapshot};
use crate::vocab::Vocabulary;

/// Context key carrying the requesting agent in publisher-side filtering.
pub const REQUESTER_KEY: &str = "requester.iri";
/// Context key carrying the intended action.
pub const ACTION_KEY: &str = "action.id";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("context key must not be empty")]
    EmptyKey,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Situation information available to policy atoms. Supplied by the
/// trusting agent and taken at face value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Context {
    entries: BTreeMap<String, String>,
    action_id: Option<String>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<String>) -> Result<Self, ContextError> {
        self.insert(key, value)?;
        Ok(self)
    }

    pub fn with_action(mut self, action: impl Into<String>) -> Self {
        self.action_id = Some(action.into());
        self
    }

    /// Returns the previous value for the key, if any.
    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) -> Result<Option<String>, ContextError> {
        let key = key.into();
        if key.is_empty() {
            return Err(ContextError::EmptyKey);
        }
        Ok(self.entries.insert(key, value.into()))
    }

    /// Looks up a key; `action.id` falls back to the action id.
    pub fn get(&self, key: &str) -> Option<&str> {
        match self.entries.get(key) {
            Some(v) => Some(v),
            None if key == ACTION_KEY => self.action_id.as_deref(),
            None => None,
        }
    }

    pub fn action_id(&self) -> Option<&str> {
        self.action_id.as_deref()
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    /// Parses `key=value` lines. Blank lines and `#` comments are skipped;
    /// keys and values are trimmed; a key may appear once.
    pub fn parse(text: &str) -> Result<Self, ContextError> {
        let mut ctx = Context::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ContextError::Syntax { line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key=value".into()))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(err("empty key".into()));
            }
            if ctx.insert(key, value.trim())?.is_some() {
                return Err(err(format!("duplicate key {key}")));
            }
        }
        if let Some(action) = ctx.entries.get(ACTION_KEY) {
            ctx.action_id = Some(action.clone());
        }
        Ok(ctx)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub rule: String,
    /// The atom in policy syntax.
    pub atom: String,
    pub result: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub claim: Iri,
    pub verdict: Verdict,
    /// Absent when the default verdict applied or the claim was withheld.
    pub matched_rule: Option<String>,
    /// Atoms in evaluation order; short-circuited atoms are not listed.
    pub trace: Vec<TraceEntry>,
    /// Chain results keyed by their index in `trace`.
    pub chain_results: BTreeMap<usize, ChainResult>,
    /// Metadata fields that could not be read; atoms over them were false.
    pub meta_issues: Vec<MetaError>,
    /// Publisher whose release filter withheld the claim.
    pub withheld_by: Option<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrustedData {
    pub agent: Iri,
    /// Digest of the snapshot the decisions were computed on.
    pub snapshot: String,
    pub accepted: BTreeSet<Iri>,
    pub decisions: BTreeMap<Iri, Decision>,
}

impl TrustedData {
    /// `(accepted, rejected, total)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        let total = self.decisions.len();
        (self.accepted.len(), total - self.accepted.len(), total)
    }

    pub fn summary(&self) -> String {
        let (a, r, n) = self.counts();
        format!("accepted {a} / rejected {r} of {n}")
    }

    /// Deterministic JSON: object keys sorted, claims in IRI order.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unknown claim {0}")]
    UnknownClaim(Iri),
    #[error("policy has {} problem(s): {}", .0.len(), join(.0))]
    PolicyInvalid(Vec<Diagnostic>),
    #[error("no requester given")]
    MissingRequester,
    #[error("release decisions were computed on snapshot {found}, not {expected}")]
    SnapshotMismatch { expected: String, found: String },
}

fn join(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

/// Evaluates policies against snapshots with a given metadata vocabulary.
#[derive(Debug, Clone, Default)]
pub struct TrustEngine {
    pub vocab: Vocabulary,
}

impl TrustEngine {
    pub fn new(vocab: Vocabulary) -> Self {
        TrustEngine { vocab }
    }

    pub fn evaluate_claim(
        &self,
        snap: &Snapshot,
        policy: &Policy,
        sets: &SetRegistry,
        ctx: &Context,
        claim: &Iri,
    ) -> Result<Decision, EngineError> {
        let sets = checked_sets(policy, sets)?;
        let np = snap.nanopub(claim).ok_or_else(|| EngineError::UnknownClaim(claim.clone()))?;
        let graph = OnceCell::new();
        Ok(Evaluator::new(self, snap, policy, &sets, ctx, &graph).decide(np))
    }

    /// One decision per registered claim.
    pub fn filter(
        &self,
        snap: &Snapshot,
        policy: &Policy,
        sets: &SetRegistry,
        ctx: &Context,
    ) -> Result<TrustedData, EngineError> {
        let sets = checked_sets(policy, sets)?;
        let graph = OnceCell::new();
        let eval = Evaluator::new(self, snap, policy, &sets, ctx, &graph);
        Ok(collect(policy, snap, snap.nanopubs().map(|np| eval.decide(np))))
    }

    /// Publisher-side filter: what the publisher releases to `requester`.
    /// The requester and action are injected into the context under
    /// [`REQUESTER_KEY`] and [`ACTION_KEY`]; without an explicit requester
    /// the context must already carry one.
    pub fn publish_filter(
        &self,
        snap: &Snapshot,
        publisher_policy: &Policy,
        sets: &SetRegistry,
        requester: Option<&Iri>,
        ctx: &Context,
    ) -> Result<TrustedData, EngineError> {
        let mut ctx = ctx.clone();
        match requester {
            Some(r) => {
                ctx.entries.insert(REQUESTER_KEY.into(), r.as_str().into());
            }
            None if ctx.get(REQUESTER_KEY).is_some_and(|r| !r.is_empty()) => {}
            None => return Err(EngineError::MissingRequester),
        }
        if let Some(action) = ctx.action_id.clone() {
            ctx.entries.entry(ACTION_KEY.into()).or_insert(action);
        }
        self.filter(snap, publisher_policy, sets, &ctx)
    }

    /// Consumer filter over the claims a publisher released. Withheld claims
    /// are rejected without consulting the consumer policy, so the accepted
    /// set is the claimwise conjunction of both filters.
    pub fn filter_released(
        &self,
        snap: &Snapshot,
        policy: &Policy,
        sets: &SetRegistry,
        ctx: &Context,
        released: &TrustedData,
    ) -> Result<TrustedData, EngineError> {
        if released.snapshot != snap.digest() {
            return Err(EngineError::SnapshotMismatch {
                expected: snap.digest().to_string(),
                found: released.snapshot.clone(),
            });
        }
        let sets = checked_sets(policy, sets)?;
        let graph = OnceCell::new();
        let eval = Evaluator::new(self, snap, policy, &sets, ctx, &graph);
        let decisions = snap.nanopubs().map(|np| {
            if released.accepted.contains(&np.id) {
                eval.decide(np)
            } else {
                Decision {
                    claim: np.id.clone(),
                    verdict: Verdict::Reject,
                    matched_rule: None,
                    trace: Vec::new(),
                    chain_results: BTreeMap::new(),
                    meta_issues: Vec::new(),
                    withheld_by: Some(released.agent.clone()),
                }
            }
        });
        Ok(collect(policy, snap, decisions))
    }
}

fn checked_sets(policy: &Policy, sets: &SetRegistry) -> Result<SetRegistry, EngineError> {
    let diags = check_policy(policy, sets);
    if !diags.is_empty() {
        return Err(EngineError::PolicyInvalid(diags));
    }
    Ok(resolve_sets(policy, sets))
}

fn collect(policy: &Policy, snap: &Snapshot, decisions: impl Iterator<Item = Decision>) -> TrustedData {
    let decisions: BTreeMap<Iri, Decision> = decisions.map(|d| (d.claim.clone(), d)).collect();
    let accepted = decisions
        .values()
        .filter(|d| d.verdict == Verdict::Accept)
        .map(|d| d.claim.clone())
        .collect();
    TrustedData { agent: policy.owner.clone(), snapshot: snap.digest().to_string(), accepted, decisions }
}

type ChainKey = (String, u32, ChainMode);

struct Evaluator<'a> {
    engine: &'a TrustEngine,
    snap: &'a Snapshot,
    policy: &'a Policy,
    sets: &'a SetRegistry,
    ctx: &'a Context,
    graph: &'a OnceCell<EvidenceGraph>,
    chains: RefCell<HashMap<ChainKey, std::rc::Rc<ChainResolver<'a>>>>,
}

struct ClaimState<'d> {
    np: &'d Nanopublication,
    meta: ClaimMeta,
    rule: String,
    trace: Vec<TraceEntry>,
    chains: BTreeMap<usize, ChainResult>,
}

impl<'a> Evaluator<'a> {
    fn new(
        engine: &'a TrustEngine,
        snap: &'a Snapshot,
        policy: &'a Policy,
        sets: &'a SetRegistry,
        ctx: &'a Context,
        graph: &'a OnceCell<EvidenceGraph>,
    ) -> Self {
        Evaluator { engine, snap, policy, sets, ctx, graph, chains: RefCell::default() }
    }

    fn decide(&self, np: &Nanopublication) -> Decision {
        let (meta, meta_issues) = extract_meta_lenient(self.snap, np, &self.engine.vocab);
        let mut st = ClaimState { np, meta, rule: String::new(), trace: Vec::new(), chains: BTreeMap::new() };
        let mut matched = None;
        for rule in &self.policy.rules {
            st.rule.clone_from(&rule.name);
            if self.eval(&rule.condition, &mut st) {
                matched = Some(rule);
                break;
            }
        }
        Decision {
            claim: np.id.clone(),
            verdict: matched.map_or(self.policy.default, |r| r.effect),
            matched_rule: matched.map(|r| r.name.clone()),
            trace: st.trace,
            chain_results: st.chains,
            meta_issues,
            withheld_by: None,
        }
    }

    fn eval(&self, cond: &Condition, st: &mut ClaimState<'_>) -> bool {
        let result = match cond {
            Condition::And(items) => return items.iter().all(|c| self.eval(c, st)),
            Condition::Or(items) => return items.iter().any(|c| self.eval(c, st)),
            Condition::Not(inner) => return !self.eval(inner, st),
            Condition::SourceIs(agent) => st.meta.source.as_ref() == Some(agent),
            Condition::SourceIn(set) => st
                .meta
                .source
                .as_ref()
                .is_some_and(|s| self.sets.get(set).is_some_and(|set| set.members.contains(s))),
            Condition::HasSource => st.meta.source.is_some(),
            Condition::HasEvidence => !st.meta.evidence.is_empty(),
            Condition::PublishedAfter(t) => st.meta.published_at.is_some_and(|p| p > *t),
            Condition::PublishedBefore(t) => st.meta.published_at.is_some_and(|p| p < *t),
            Condition::ContextEquals { key, value } => self.ctx.get(key) == Some(value.as_str()),
            Condition::ContextDefined(key) => self.ctx.get(key).is_some(),
            Condition::AssertionMatches(p) => {
                let mut pattern = Pattern::any().graph(st.np.assertion.clone());
                pattern.predicate.clone_from(&p.predicate);
                pattern.object.clone_from(&p.object);
                !self.snap.query(&pattern).is_empty()
            }
            Condition::ChainAnchored { roots, max_depth, mode } => {
                let resolver = self.resolver(roots, *max_depth, *mode);
                let result = resolver.resolve(&st.np.id).expect("registered claims are graph nodes");
                let anchored = result.anchored;
                st.chains.insert(st.trace.len(), result);
                anchored
            }
        };
        st.trace.push(TraceEntry { rule: st.rule.clone(), atom: cond.to_string(), result });
        result
    }

    fn resolver(&self, roots: &str, depth: u32, mode: ChainMode) -> std::rc::Rc<ChainResolver<'a>> {
        let key = (roots.to_string(), depth, mode);
        if let Some(r) = self.chains.borrow().get(&key) {
            return r.clone();
        }
        let graph = self.graph.get_or_init(|| build_evidence_graph(self.snap, &self.engine.vocab));
        let members = self.sets.get(roots).map(|s| s.members.clone()).unwrap_or_default();
        let resolver = std::rc::Rc::new(ChainResolver::new(graph, &members, depth, mode));
        self.chains.borrow_mut().insert(key, resolver.clone());
        resolver
    }
}

pub fn evaluate_claim(
    snap: &Snapshot,
    policy: &Policy,
    sets: &SetRegistry,
    ctx: &Context,
    claim: &Iri,
) -> Result<Decision, EngineError> {
    TrustEngine::default().evaluate_claim(snap, policy, sets, ctx, claim)
}

pub fn filter(snap: &Snapshot, policy: &Policy, sets: &SetRegistry, ctx: &Context) -> Result<TrustedData, EngineError> {
    TrustEngine::default().filter(snap, policy, sets, ctx)
}

pub fn publish_filter(
    snap: &Snapshot,
    publisher_policy: &Policy,
    sets: &SetRegistry,
    requester: Option<&Iri>,
    ctx: &Context,
) -> Result<TrustedData, EngineError> {
    TrustEngine::default().publish_filter(snap, publisher_policy, sets, requester, ctx)
}

/// Human-readable rendering of a decision. Stable across runs.
pub fn explain(d: &Decision) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "claim <{}>", d.claim);
    match (&d.withheld_by, &d.matched_rule) {
        (Some(publisher), _) => {
            let _ = writeln!(w, "withheld by publisher <{publisher}>; reject");
        }
        (None, Some(rule)) => {
            let _ = writeln!(w, "rule {rule} matched; {}", d.verdict);
        }
        (None, None) => {
            let _ = writeln!(w, "no rule matched; default {}", d.verdict);
        }
    }
    for (i, t) in d.trace.iter().enumerate() {
        let _ = writeln!(w, "  {}: {} => {}", t.rule, t.atom, t.result);
        let Some(chain) = d.chain_results.get(&i) else { continue };
        match (&chain.path, &chain.anchor_agent) {
            (Some(path), agent) if chain.anchored => {
                let hops: Vec<String> = path.iter().map(|c| format!("<{c}>")).collect();
                let _ = writeln!(w, "    path {} (depth {})", hops.join(" -> "), path.len() - 1);
                if let Some(agent) = agent {
                    let _ = writeln!(w, "    anchored by <{agent}>");
                }
            }
            _ => {
                if chain.blockers.is_empty() {
                    let _ = writeln!(w, "    not anchored");
                }
                for b in &chain.blockers {
                    let _ = writeln!(w, "    blocked at <{}>: {}", b.claim, b.reason.as_str());
                }
            }
        }
    }
    for issue in &d.meta_issues {
        let _ = writeln!(w, "  metadata: {issue}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::parse_policy;
    use crate::store::Store;

    const TWO_HOP: &str = "\
<http://ex.org/c1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.nanopub.org/nschema#Nanopublication> <http://ex.org/c1> .
<http://ex.org/c1> <http://www.nanopub.org/nschema#hasAssertion> <http://ex.org/c1/a> <http://ex.org/c1> .
<http://ex.org/c1> <http://www.nanopub.org/nschema#hasProvenance> <http://ex.org/c1/p> <http://ex.org/c1> .
<http://ex.org/c1> <http://www.nanopub.org/nschema#hasPublicationInfo> <http://ex.org/c1/i> <http://ex.org/c1> .
<http://ex.org/lula> <http://ex.org/convictedOf> <http://ex.org/corruption> <http://ex.org/c1/a> .
<http://ex.org/c1> <http://www.w3.org/ns/prov#wasAttributedTo> <http://ex.org/s> <http://ex.org/c1/p> .
<http://ex.org/c1> <http://www.w3.org/ns/prov#wasDerivedFrom> <http://ex.org/c2> <http://ex.org/c1/p> .
<http://ex.org/c1> <http://www.w3.org/ns/prov#generatedAtTime> \"2018-08-01T00:00:00Z\" <http://ex.org/c1/i> .
<http://ex.org/c2> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.nanopub.org/nschema#Nanopublication> <http://ex.org/c2> .
<http://ex.org/c2> <http://www.nanopub.org/nschema#hasAssertion> <http://ex.org/c2/a> <http://ex.org/c2> .
<http://ex.org/c2> <http://www.nanopub.org/nschema#hasProvenance> <http://ex.org/c2/p> <http://ex.org/c2> .
<http://ex.org/c2> <http://www.nanopub.org/nschema#hasPublicationInfo> <http://ex.org/c2/i> <http://ex.org/c2> .
<http://ex.org/lula> <http://ex.org/ineligibleFor> <http://ex.org/election2018> <http://ex.org/c2/a> .
<http://ex.org/c2> <http://www.w3.org/ns/prov#wasAttributedTo> <http://ex.org/tse> <http://ex.org/c2/p> .
<http://ex.org/c2> <http://www.w3.org/ns/prov#generatedAtTime> \"2018-09-01T00:00:00Z\" <http://ex.org/c2/i> .
";

    fn iri(s: &str) -> Iri {
        Iri::parse(s).unwrap()
    }

    fn snap() -> Snapshot {
        let mut store = Store::new();
        store.ingest_document(TWO_HOP).unwrap();
        store.snapshot()
    }

    fn policy(rules: &str) -> Policy {
        parse_policy(&format!(
            "policy p for <http://ex.org/alice> default reject set publicFaith {{ <http://ex.org/tse> }} {rules}"
        ))
        .unwrap()
    }

    #[test]
    fn default_reject_with_no_rules() {
        let d = evaluate_claim(&snap(), &policy(""), &SetRegistry::new(), &Context::new(), &iri("http://ex.org/c1")).unwrap();
        assert_eq!(d.verdict, Verdict::Reject);
        assert_eq!(d.matched_rule, None);
        assert!(explain(&d).contains("no rule matched; default reject"));
    }

    #[test]
    fn source_is_matches_first_rule() {
        let p = policy("rule r1 accept when source is <http://ex.org/tse>");
        let d = evaluate_claim(&snap(), &p, &SetRegistry::new(), &Context::new(), &iri("http://ex.org/c2")).unwrap();
        assert_eq!((d.verdict, d.matched_rule.as_deref()), (Verdict::Accept, Some("r1")));
    }

    #[test]
    fn chain_anchored_accepts_through_evidence() {
        let p = policy("rule r2 accept when chain anchored in publicFaith depth 3 any");
        let d = evaluate_claim(&snap(), &p, &SetRegistry::new(), &Context::new(), &iri("http://ex.org/c1")).unwrap();
        assert_eq!(d.verdict, Verdict::Accept);
        assert_eq!(d.chain_results[&0].depth, Some(1));
        let text = explain(&d);
        assert!(text.contains("path <http://ex.org/c1> -> <http://ex.org/c2>"), "{text}");
        assert!(text.contains("anchored by <http://ex.org/tse>"), "{text}");
    }

    #[test]
    fn short_circuit_trace_lists_only_evaluated_atoms() {
        let p = policy("rule r accept when not (has evidence and source in publicFaith) or has source");
        let d = evaluate_claim(&snap(), &p, &SetRegistry::new(), &Context::new(), &iri("http://ex.org/c2")).unwrap();
        let atoms: Vec<&str> = d.trace.iter().map(|t| t.atom.as_str()).collect();
        assert_eq!(atoms, vec!["has evidence"]);
        assert_eq!(d.verdict, Verdict::Accept);
    }

    #[test]
    fn unknown_claim_and_invalid_policy() {
        let s = snap();
        let err = evaluate_claim(&s, &policy(""), &SetRegistry::new(), &Context::new(), &iri("http://ex.org/zz"));
        assert_eq!(err, Err(EngineError::UnknownClaim(iri("http://ex.org/zz"))));
        let bad = policy("rule r accept when source in nobody");
        assert!(matches!(filter(&s, &bad, &SetRegistry::new(), &Context::new()), Err(EngineError::PolicyInvalid(_))));
    }

    #[test]
    fn filter_covers_every_claim() {
        let td = filter(&snap(), &policy("rule r accept when has evidence"), &SetRegistry::new(), &Context::new()).unwrap();
        assert_eq!(td.summary(), "accepted 1 / rejected 1 of 2");
        assert_eq!(td.accepted, BTreeSet::from([iri("http://ex.org/c1")]));
    }

    #[test]
    fn empty_snapshot_gives_empty_partition() {
        let td = filter(&Store::new().snapshot(), &policy(""), &SetRegistry::new(), &Context::new()).unwrap();
        assert_eq!(td.summary(), "accepted 0 / rejected 0 of 0");
    }

    #[test]
    fn publisher_filter_uses_requester() {
        let p = parse_policy(
            "policy pub for <http://ex.org/tse> default accept rule deny reject when context requester.iri = <http://ex.org/eve>",
        )
        .unwrap();
        let s = snap();
        let eve = publish_filter(&s, &p, &SetRegistry::new(), Some(&iri("http://ex.org/eve")), &Context::new()).unwrap();
        assert!(eve.accepted.is_empty());
        let bob = publish_filter(&s, &p, &SetRegistry::new(), Some(&iri("http://ex.org/bob")), &Context::new()).unwrap();
        assert_eq!(bob.accepted.len(), 2);
        assert_eq!(
            publish_filter(&s, &p, &SetRegistry::new(), None, &Context::new()),
            Err(EngineError::MissingRequester)
        );
    }

    #[test]
    fn withheld_claims_are_rejected_and_explained() {
        let s = snap();
        let publisher = parse_policy(
            "policy pub for <http://ex.org/tse> default accept rule hide reject when has evidence",
        )
        .unwrap();
        let released = publish_filter(&s, &publisher, &SetRegistry::new(), Some(&iri("http://ex.org/alice")), &Context::new()).unwrap();
        let consumer = parse_policy("policy c for <http://ex.org/alice> default accept").unwrap();
        let td = TrustEngine::default()
            .filter_released(&s, &consumer, &SetRegistry::new(), &Context::new(), &released)
            .unwrap();
        assert_eq!(td.accepted, BTreeSet::from([iri("http://ex.org/c2")]));
        let d = &td.decisions[&iri("http://ex.org/c1")];
        assert_eq!(d.withheld_by, Some(iri("http://ex.org/tse")));
        assert!(explain(d).contains("withheld by publisher <http://ex.org/tse>; reject"));
    }

    #[test]
    fn report_json_has_sorted_keys_and_no_scores() {
        let td = filter(&snap(), &policy("rule r2 accept when chain anchored in publicFaith depth 3 any"), &SetRegistry::new(), &Context::new()).unwrap();
        let json = td.to_json();
        let keys: Vec<usize> = ["\"accepted\"", "\"agent\"", "\"decisions\"", "\"snapshot\""]
            .iter()
            .map(|k| json.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]), "{json}");
        assert_eq!(json, td.to_json());
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        fn no_floats(v: &serde_json::Value) -> bool {
            match v {
                serde_json::Value::Number(n) => n.is_u64() || n.is_i64(),
                serde_json::Value::Array(a) => a.iter().all(no_floats),
                serde_json::Value::Object(o) => o.values().all(no_floats),
                _ => true,
            }
        }
        assert!(no_floats(&value));
    }

    #[test]
    fn context_file_parsing() {
        let ctx = Context::parse("# who\nrequester.iri = http://ex.org/bob\naction.id=publish\n\n").unwrap();
        assert_eq!(ctx.get(REQUESTER_KEY), Some("http://ex.org/bob"));
        assert_eq!(ctx.action_id(), Some("publish"));
        assert!(matches!(Context::parse("a=1\na=2"), Err(ContextError::Syntax { line: 2, .. })));
        assert!(matches!(Context::parse("novalue"), Err(ContextError::Syntax { line: 1, .. })));
        assert_eq!(Context::new().with("", "x"), Err(ContextError::EmptyKey));
        assert_eq!(Context::new().with_action("act").get(ACTION_KEY), Some("act"));
    }
}
