//! Fixture generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use nanotrust_core::vocab::{
    NP_HAS_ASSERTION, NP_HAS_PROVENANCE, NP_HAS_PUBINFO, NP_NANOPUBLICATION, PROV_ATTRIBUTED_TO, PROV_DERIVED_FROM,
    PROV_GENERATED_AT, RDF_TYPE,
};
use nanotrust_core::{
    AgentSet, AssertionPattern, ChainMode, Condition, Iri, Literal, Policy, Store, Term, Timestamp, Verdict,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn iri(s: &str) -> Iri {
    Iri::parse(s).unwrap()
}

pub const AGENTS: usize = 6;
pub const PREDICATES: usize = 4;

pub fn agent(k: usize) -> String {
    format!("http://ex.org/agent/{k}")
}

pub fn claim_id(k: usize) -> String {
    format!("http://ex.org/claim/{k:03}")
}

pub fn predicate(k: usize) -> String {
    format!("http://ex.org/p/{k}")
}

pub fn object(k: usize) -> Term {
    if k.is_multiple_of(2) {
        Term::iri(iri(&format!("http://ex.org/o/{k}")))
    } else {
        Term::literal(Literal::plain(format!("v{k}")))
    }
}

/// One generated claim. Agents, claims and assertion terms are small indices
/// into fixed pools so generated policies hit them often.
#[derive(Debug, Clone)]
pub struct ClaimSpec {
    pub id: usize,
    /// Attribution statements; two or more make the source ambiguous.
    pub sources: Vec<usize>,
    /// Cited claim indices; some point past the generated claims (dangling).
    pub evidence: Vec<usize>,
    pub published: Option<i64>,
    pub facts: Vec<(usize, usize)>,
    /// Subject the first fact with a blank node instead of an IRI.
    pub blank_subject: bool,
}

impl ClaimSpec {
    pub fn plain(id: usize) -> Self {
        ClaimSpec { id, sources: vec![], evidence: vec![], published: None, facts: vec![(0, 0)], blank_subject: false }
    }

    pub fn by(mut self, agent: usize) -> Self {
        self.sources = vec![agent];
        self
    }

    pub fn citing(mut self, claims: &[usize]) -> Self {
        self.evidence = claims.to_vec();
        self
    }

    pub fn graphs(&self) -> (String, String, String, String) {
        let id = claim_id(self.id);
        (format!("{id}/assertion"), format!("{id}/provenance"), format!("{id}/pubinfo"), id)
    }

    /// N-Quads lines for this claim, head declaration included.
    pub fn lines(&self) -> Vec<String> {
        let (a, p, i, id) = self.graphs();
        let mut out = vec![
            format!("<{id}> <{RDF_TYPE}> <{NP_NANOPUBLICATION}> <{id}> ."),
            format!("<{id}> <{NP_HAS_ASSERTION}> <{a}> <{id}> ."),
            format!("<{id}> <{NP_HAS_PROVENANCE}> <{p}> <{id}> ."),
            format!("<{id}> <{NP_HAS_PUBINFO}> <{i}> <{id}> ."),
        ];
        for (n, &(pr, ob)) in self.facts.iter().enumerate() {
            let subject = if n == 0 && self.blank_subject { "_:b0".to_string() } else { format!("<{id}/subject>") };
            out.push(format!("{subject} <{}> {} <{a}> .", predicate(pr), object(ob)));
        }
        for &s in &self.sources {
            out.push(format!("<{id}> <{PROV_ATTRIBUTED_TO}> <{}> <{p}> .", agent(s)));
        }
        for &e in &self.evidence {
            out.push(format!("<{id}> <{PROV_DERIVED_FROM}> <{}> <{p}> .", claim_id(e)));
        }
        if self.sources.is_empty() && self.evidence.is_empty() {
            out.push(format!("<{id}> <http://ex.org/p/note> \"unattributed\" <{p}> ."));
        }
        match self.published {
            Some(t) => out.push(format!(
                "<{id}> <{PROV_GENERATED_AT}> \"{}\"^^<http://www.w3.org/2001/XMLSchema#dateTime> <{i}> .",
                Timestamp::from_unix(t).unwrap()
            )),
            None => out.push(format!("<{id}> <http://ex.org/p/license> <http://ex.org/license/cc0> <{i}> .")),
        }
        out
    }
}

pub fn document(claims: &[ClaimSpec]) -> String {
    claims.iter().flat_map(|c| c.lines()).map(|l| l + "\n").collect()
}

pub fn store_of(claims: &[ClaimSpec]) -> Store {
    let mut store = Store::new();
    store.ingest_document(&document(claims)).expect("generated fixture is valid");
    store
}

pub const BASE_TIME: i64 = 1_500_000_000;

pub fn random_claims(rng: &mut ChaCha8Rng, max: usize) -> Vec<ClaimSpec> {
    let n = rng.gen_range(0..=max);
    (0..n)
        .map(|id| {
            let sources = match rng.gen_range(0..10) {
                0..=2 => vec![],
                3 => vec![rng.gen_range(0..AGENTS), rng.gen_range(0..AGENTS)],
                _ => vec![rng.gen_range(0..AGENTS)],
            };
            let mut evidence: Vec<usize> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..n + 2)).collect();
            evidence.retain(|&e| e != id);
            let published = rng.gen_bool(0.7).then(|| BASE_TIME + rng.gen_range(0..1000) * 3600);
            let facts = (0..rng.gen_range(1..4)).map(|_| (rng.gen_range(0..PREDICATES), rng.gen_range(0..6))).collect();
            ClaimSpec { id, sources, evidence, published, facts, blank_subject: rng.gen_bool(0.2) }
        })
        .collect()
}

pub fn set_names() -> [&'static str; 2] {
    ["publicFaith", "press"]
}

pub fn random_set(rng: &mut ChaCha8Rng, name: &str) -> AgentSet {
    AgentSet::new(name, (0..AGENTS).filter(|_| rng.gen_bool(0.35)).map(|k| iri(&agent(k))))
}

pub fn random_word(rng: &mut ChaCha8Rng) -> String {
    const WORDS: [&str; 6] = ["requester.iri", "action.id", "purpose", "region", "level_2", "x-y"];
    WORDS.choose(rng).unwrap().to_string()
}

fn random_string(rng: &mut ChaCha8Rng) -> String {
    const PIECES: [&str; 8] = ["a", "publish", "http://ex.org/agent/1", "quote\"d", "back\\slash", "ñ", "\n", " "];
    (0..rng.gen_range(0..3)).map(|_| *PIECES.choose(rng).unwrap()).collect()
}

pub fn random_atom(rng: &mut ChaCha8Rng) -> Condition {
    let sets = set_names();
    match rng.gen_range(0..11) {
        0 => Condition::SourceIs(iri(&agent(rng.gen_range(0..AGENTS)))),
        1 => Condition::SourceIn(sets.choose(rng).unwrap().to_string()),
        2 => Condition::HasSource,
        3 => Condition::HasEvidence,
        4 => Condition::PublishedAfter(Timestamp::from_unix(BASE_TIME + rng.gen_range(0..1000) * 3600).unwrap()),
        5 => Condition::PublishedBefore(Timestamp::from_unix(BASE_TIME + rng.gen_range(0..1000) * 3600).unwrap()),
        6 | 7 => Condition::ChainAnchored {
            roots: sets.choose(rng).unwrap().to_string(),
            max_depth: rng.gen_range(1..5),
            mode: if rng.gen_bool(0.5) { ChainMode::Any } else { ChainMode::All },
        },
        8 => Condition::ContextEquals { key: random_word(rng), value: random_string(rng) },
        9 => Condition::ContextDefined(random_word(rng)),
        _ => {
            let predicate = rng.gen_bool(0.7).then(|| iri(&predicate(rng.gen_range(0..PREDICATES))));
            let object = if predicate.is_none() || rng.gen_bool(0.5) {
                Some(match rng.gen_range(0..4) {
                    0 => Term::literal(Literal::typed("1", iri("http://www.w3.org/2001/XMLSchema#integer"))),
                    1 => Term::literal(Literal::lang("v1", "en")),
                    _ => object(rng.gen_range(0..6)),
                })
            } else {
                None
            };
            Condition::AssertionMatches(AssertionPattern { predicate, object })
        }
    }
}

pub fn random_condition(rng: &mut ChaCha8Rng, depth: u32) -> Condition {
    if depth == 0 || rng.gen_bool(0.45) {
        return random_atom(rng);
    }
    match rng.gen_range(0..3) {
        0 => Condition::Not(Box::new(random_condition(rng, depth - 1))),
        k => {
            let items = (0..rng.gen_range(2..4)).map(|_| random_condition(rng, depth - 1)).collect();
            if k == 1 {
                Condition::And(items)
            } else {
                Condition::Or(items)
            }
        }
    }
}

fn verdict(rng: &mut ChaCha8Rng) -> Verdict {
    if rng.gen_bool(0.5) {
        Verdict::Accept
    } else {
        Verdict::Reject
    }
}

/// A policy that passes `check_policy` with no external sets.
pub fn random_policy(rng: &mut ChaCha8Rng) -> Policy {
    let mut p = Policy::new(format!("p{}", rng.gen_range(0..100)), iri(&agent(rng.gen_range(0..AGENTS))), verdict(rng));
    for name in set_names() {
        p = p.with_set(random_set(rng, name));
    }
    for r in 0..rng.gen_range(0..5) {
        let effect = verdict(rng);
        p = p.with_rule(format!("r{r}"), effect, random_condition(rng, 3));
    }
    p
}

/// Direct line scan of a document for attributed claims, independent of the
/// store and the metadata extractor.
pub fn sourced_claims_by_scan(doc: &str) -> BTreeSet<Iri> {
    let needle = format!("<{PROV_ATTRIBUTED_TO}>");
    doc.lines()
        .filter(|l| l.split_whitespace().nth(1) == Some(needle.as_str()))
        .map(|l| iri(l.split_whitespace().next().unwrap().trim_matches(['<', '>'])))
        .collect()
}

/// Small evidence graph given by indices: node `i` has an optional source and
/// a list of targets; a target `>= nodes.len()` is a missing claim.
#[derive(Debug, Clone)]
pub struct TinyGraph {
    pub sources: Vec<Option<usize>>,
    pub edges: Vec<Vec<usize>>,
}

impl TinyGraph {
    pub fn random(rng: &mut ChaCha8Rng, max_nodes: usize) -> Self {
        let n = rng.gen_range(1..=max_nodes);
        let density = rng.gen_range(0.1..0.6);
        let sources = (0..n).map(|_| rng.gen_bool(0.6).then(|| rng.gen_range(0..4))).collect();
        let edges = (0..n)
            .map(|i| {
                let mut e: Vec<usize> = (0..n).filter(|&j| j != i && rng.gen_bool(density)).collect();
                if rng.gen_bool(0.1) {
                    e.push(n + rng.gen_range(0..2));
                }
                e
            })
            .collect();
        TinyGraph { sources, edges }
    }

    pub fn name(k: usize) -> Iri {
        iri(&format!("http://ex.org/n/{k}"))
    }

    pub fn evidence_graph(&self) -> nanotrust_core::EvidenceGraph {
        nanotrust_core::EvidenceGraph::from_claims(self.sources.iter().enumerate().map(|(i, s)| {
            (
                Self::name(i),
                s.map(|a| iri(&agent(a))),
                None,
                self.edges[i].iter().map(|&j| Self::name(j)).collect(),
            )
        }))
    }

    fn rooted(&self, i: usize, roots: &BTreeSet<usize>) -> bool {
        self.sources[i].is_some_and(|s| roots.contains(&s))
    }

    /// The recursive definition, with a path-local visited set.
    pub fn anchored(&self, start: usize, roots: &BTreeSet<usize>, max_depth: u32, mode: ChainMode) -> bool {
        fn go(g: &TinyGraph, c: usize, d: u32, path: &mut Vec<usize>, roots: &BTreeSet<usize>, max: u32, mode: ChainMode) -> bool {
            if g.rooted(c, roots) {
                return true;
            }
            if d >= max {
                return false;
            }
            let n = g.sources.len();
            let check = |e: usize, path: &mut Vec<usize>| {
                if e >= n || path.contains(&e) {
                    return false;
                }
                path.push(e);
                let r = go(g, e, d + 1, path, roots, max, mode);
                path.pop();
                r
            };
            match mode {
                ChainMode::Any => g.edges[c].iter().any(|&e| check(e, path)),
                ChainMode::All => !g.edges[c].is_empty() && g.edges[c].iter().all(|&e| check(e, path)),
            }
        }
        go(self, start, 0, &mut vec![start], roots, max_depth, mode)
    }

    /// All simple paths from `start` of at most `max_depth` hops that end at
    /// a root-sourced claim without passing one earlier; shortest first, then
    /// by claim IRI sequence.
    pub fn anchoring_paths(&self, start: usize, roots: &BTreeSet<usize>, max_depth: u32) -> Vec<Vec<Iri>> {
        let mut found = Vec::new();
        let mut stack = vec![vec![start]];
        while let Some(path) = stack.pop() {
            let last = *path.last().unwrap();
            if self.rooted(last, roots) {
                found.push(path.iter().map(|&k| Self::name(k)).collect::<Vec<_>>());
                continue;
            }
            if path.len() as u32 > max_depth {
                continue;
            }
            for &e in &self.edges[last] {
                if e < self.sources.len() && !path.contains(&e) {
                    let mut next = path.clone();
                    next.push(e);
                    stack.push(next);
                }
            }
        }
        found.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        found
    }

    pub fn roots_iris(roots: &BTreeSet<usize>) -> BTreeSet<Iri> {
        roots.iter().map(|&a| iri(&agent(a))).collect()
    }
}

pub fn random_roots(rng: &mut ChaCha8Rng) -> BTreeSet<usize> {
    (0..4).filter(|_| rng.gen_bool(0.4)).collect()
}
