//! Evidence-chain resolution.
//!
//! A claim is anchored when its own source is one of the trusted root agents,
//! or, within a hop budget, when the claims it cites as evidence are anchored:
//! any one of them in [`ChainMode::Any`], every one (of a non-empty list) in
//! [`ChainMode::All`]. Circular citation never anchors anything.
//!
//! Resolution is a dynamic program over `(claim, remaining hops)`. The
//! path-local cycle rule needs no visited set there: in `Any` mode the
//! shortest anchoring walk is always a simple path, and in `All` mode any
//! expansion that returns to a claim on its own path can only end by running
//! out of hops, which already fails.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::iri::Iri;
use crate::nanopub::{extract_meta_lenient, MetaError};
use crate::policy::ChainMode;
use crate::store::Snapshot;
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvidenceRef {
    pub target: Iri,
    /// The cited claim is not registered in the snapshot.
    pub dangling: bool,
}

#[derive(Debug, Clone)]
pub struct ClaimNode {
    pub claim: Iri,
    pub source: Option<Iri>,
    /// Set when the source could not be determined (for example two
    /// attribution statements); such a claim never anchors by its source.
    pub source_issue: Option<MetaError>,
    /// Sorted by target IRI.
    pub evidence: Vec<EvidenceRef>,
}

#[derive(Debug, Default)]
pub struct EvidenceGraph {
    nodes: Vec<ClaimNode>,
    index: HashMap<Iri, usize>,
    /// Per node, per evidence entry: index of the cited node, if registered.
    targets: Vec<Vec<Option<usize>>>,
    components: OnceLock<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("unknown claim {0}")]
    UnknownClaim(Iri),
}

/// One node per registered nanopublication, with sources and evidence taken
/// from the provenance graphs.
pub fn build_evidence_graph(snap: &Snapshot, vocab: &Vocabulary) -> EvidenceGraph {
    let parts = snap.nanopubs().map(|np| {
        let (meta, errors) = extract_meta_lenient(snap, np, vocab);
        let source_issue = errors
            .into_iter()
            .find(|e| matches!(e, MetaError::AmbiguousSource { .. } | MetaError::InvalidSource { .. }));
        (meta.claim, meta.source, source_issue, meta.evidence)
    });
    EvidenceGraph::from_claims(parts)
}

impl EvidenceGraph {
    /// Builds a graph from `(claim, source, source issue, evidence)` records.
    /// Evidence pointing at claims not in the input is kept and marked dangling.
    pub fn from_claims(
        claims: impl IntoIterator<Item = (Iri, Option<Iri>, Option<MetaError>, Vec<Iri>)>,
    ) -> Self {
        type Record = (Option<Iri>, Option<MetaError>, BTreeSet<Iri>);
        let mut raw: BTreeMap<Iri, Record> = BTreeMap::new();
        for (claim, source, issue, evidence) in claims {
            let evidence = evidence.into_iter().filter(|e| e != &claim).collect();
            raw.insert(claim, (source, issue, evidence));
        }
        let index: HashMap<Iri, usize> = raw.keys().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut nodes = Vec::with_capacity(raw.len());
        let mut targets = Vec::with_capacity(raw.len());
        for (claim, (source, source_issue, evidence)) in raw {
            let refs: Vec<EvidenceRef> = evidence
                .into_iter()
                .map(|target| EvidenceRef { dangling: !index.contains_key(&target), target })
                .collect();
            targets.push(refs.iter().map(|r| index.get(&r.target).copied()).collect());
            let source = if source_issue.is_some() { None } else { source };
            nodes.push(ClaimNode { claim, source, source_issue, evidence: refs });
        }
        EvidenceGraph { nodes, index, targets, components: OnceLock::new() }
    }

    /// Convenience constructor: `(claim, source, evidence)` triples.
    pub fn from_edges<'a>(claims: impl IntoIterator<Item = (&'a Iri, Option<&'a Iri>, &'a [Iri])>) -> Self {
        Self::from_claims(
            claims.into_iter().map(|(c, s, e)| (c.clone(), s.cloned(), None, e.to_vec())),
        )
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, claim: &Iri) -> bool {
        self.index.contains_key(claim)
    }

    pub fn node(&self, claim: &Iri) -> Option<&ClaimNode> {
        self.index.get(claim).map(|&i| &self.nodes[i])
    }

    /// Nodes in claim order.
    pub fn nodes(&self) -> impl Iterator<Item = &ClaimNode> {
        self.nodes.iter()
    }

    /// Strongly connected component id per node (Kosaraju, iterative).
    fn components(&self) -> &[usize] {
        self.components.get_or_init(|| {
            let n = self.nodes.len();
            let succ = |i: usize| self.targets[i].iter().flatten().copied();
            let mut order = Vec::with_capacity(n);
            let mut seen = vec![false; n];
            for start in 0..n {
                if seen[start] {
                    continue;
                }
                seen[start] = true;
                let mut stack = vec![(start, 0usize)];
                while let Some(&mut (v, ref mut k)) = stack.last_mut() {
                    let next = succ(v).nth(*k);
                    *k += 1;
                    match next {
                        Some(w) if !seen[w] => {
                            seen[w] = true;
                            stack.push((w, 0));
                        }
                        Some(_) => {}
                        None => {
                            order.push(v);
                            stack.pop();
                        }
                    }
                }
            }
            let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
            for v in 0..n {
                for w in succ(v) {
                    pred[w].push(v);
                }
            }
            let mut comp = vec![usize::MAX; n];
            let mut next_id = 0;
            for &root in order.iter().rev() {
                if comp[root] != usize::MAX {
                    continue;
                }
                comp[root] = next_id;
                let mut stack = vec![root];
                while let Some(v) = stack.pop() {
                    for &w in &pred[v] {
                        if comp[w] == usize::MAX {
                            comp[w] = next_id;
                            stack.push(w);
                        }
                    }
                }
                next_id += 1;
            }
            comp
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockReason {
    Cycle,
    Dangling,
    DepthExceeded,
    UntrustedSource,
    NoEvidence,
}

impl BlockReason {
    pub fn as_str(self) -> &'static str {
        match self {
            BlockReason::Cycle => "cycle",
            BlockReason::Dangling => "dangling",
            BlockReason::DepthExceeded => "depth-exceeded",
            BlockReason::UntrustedSource => "untrusted-source",
            BlockReason::NoEvidence => "no-evidence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Blocker {
    pub claim: Iri,
    pub reason: BlockReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainResult {
    pub anchored: bool,
    pub anchor_agent: Option<Iri>,
    /// Evidence hops from the queried claim to the anchored claim.
    pub depth: Option<u32>,
    /// Queried claim first, anchored claim last.
    pub path: Option<Vec<Iri>>,
    /// Why no anchoring chain was found; empty when anchored.
    pub blockers: Vec<Blocker>,
}

/// Anchoring table for one `(roots, max_depth, mode)` query over a graph.
pub struct ChainResolver<'g> {
    graph: &'g EvidenceGraph,
    max_depth: u32,
    is_root: Vec<bool>,
    /// `levels[r][i]`: shortest witness length for node `i` with `r` hops
    /// left. Stops growing once a level repeats.
    levels: Vec<Vec<Option<u32>>>,
    next: Vec<Vec<Option<usize>>>,
}

impl<'g> ChainResolver<'g> {
    pub fn new(graph: &'g EvidenceGraph, roots: &BTreeSet<Iri>, max_depth: u32, mode: ChainMode) -> Self {
        let n = graph.nodes.len();
        let is_root: Vec<bool> = graph
            .nodes
            .iter()
            .map(|node| node.source.as_ref().is_some_and(|s| roots.contains(s)))
            .collect();
        let base: Vec<Option<u32>> = is_root.iter().map(|&r| r.then_some(0)).collect();
        let mut levels = vec![base];
        let mut next = vec![vec![None; n]];
        // Witnesses never revisit a claim, so n hops are always enough.
        let bound = (max_depth as usize).min(n);
        for _ in 0..bound {
            let prev = levels.last().expect("base level");
            let mut cur = vec![None; n];
            let mut via = vec![None; n];
            for i in 0..n {
                if is_root[i] {
                    cur[i] = Some(0);
                    continue;
                }
                let targets = &graph.targets[i];
                let mut best: Option<(u32, usize)> = None;
                let mut all_ok = !targets.is_empty();
                for t in targets {
                    match t.and_then(|j| prev[j].map(|len| (len, j))) {
                        Some((len, j)) => {
                            if best.is_none_or(|(b, _)| len < b) {
                                best = Some((len, j));
                            }
                        }
                        None => all_ok = false,
                    }
                }
                if mode == ChainMode::All && !all_ok {
                    continue;
                }
                if let Some((len, j)) = best {
                    cur[i] = Some(len + 1);
                    via[i] = Some(j);
                }
            }
            let fixpoint = &cur == prev;
            levels.push(cur);
            next.push(via);
            if fixpoint {
                break;
            }
        }
        ChainResolver { graph, max_depth, is_root, levels, next }
    }

    fn level(&self, remaining: u32) -> usize {
        (remaining as usize).min(self.levels.len() - 1)
    }

    pub fn resolve(&self, claim: &Iri) -> Result<ChainResult, ChainError> {
        let &start = self.graph.index.get(claim).ok_or_else(|| ChainError::UnknownClaim(claim.clone()))?;
        let top = self.level(self.max_depth);
        let Some(depth) = self.levels[top][start] else {
            return Ok(ChainResult {
                anchored: false,
                anchor_agent: None,
                depth: None,
                path: None,
                blockers: self.blockers(start),
            });
        };
        let mut path = vec![self.graph.nodes[start].claim.clone()];
        let (mut i, mut r) = (start, top);
        while self.levels[r][i] != Some(0) {
            i = self.next[r][i].expect("witness step");
            r -= 1;
            path.push(self.graph.nodes[i].claim.clone());
        }
        Ok(ChainResult {
            anchored: true,
            anchor_agent: self.graph.nodes[i].source.clone(),
            depth: Some(depth),
            path: Some(path),
            blockers: Vec::new(),
        })
    }

    /// Breadth-first walk over the failing part of the expansion, recording
    /// terminal reasons. Each claim is expanded once, at its largest budget.
    fn blockers(&self, start: usize) -> Vec<Blocker> {
        let comp = self.graph.components();
        let mut out = BTreeSet::new();
        let mut seen = vec![false; self.graph.nodes.len()];
        let mut queue = VecDeque::from([(start, self.max_depth)]);
        seen[start] = true;
        while let Some((i, remaining)) = queue.pop_front() {
            let node = &self.graph.nodes[i];
            if self.is_root[i] || self.levels[self.level(remaining)][i].is_some() {
                continue;
            }
            let block = |claim: &Iri, reason| Blocker { claim: claim.clone(), reason };
            if node.evidence.is_empty() {
                let reason = if node.source.is_some() || node.source_issue.is_some() {
                    BlockReason::UntrustedSource
                } else {
                    BlockReason::NoEvidence
                };
                out.insert(block(&node.claim, reason));
                continue;
            }
            if remaining == 0 {
                out.insert(block(&node.claim, BlockReason::DepthExceeded));
                continue;
            }
            for (edge, target) in node.evidence.iter().zip(&self.graph.targets[i]) {
                match *target {
                    None => {
                        out.insert(block(&edge.target, BlockReason::Dangling));
                    }
                    Some(j) if seen[j] => {
                        if comp[j] == comp[i] {
                            out.insert(block(&edge.target, BlockReason::Cycle));
                        }
                    }
                    Some(j) => {
                        seen[j] = true;
                        queue.push_back((j, remaining - 1));
                    }
                }
            }
        }
        out.into_iter().collect()
    }
}

pub fn resolve_chain(
    graph: &EvidenceGraph,
    claim: &Iri,
    roots: &BTreeSet<Iri>,
    max_depth: u32,
    mode: ChainMode,
) -> Result<ChainResult, ChainError> {
    if !graph.contains(claim) {
        return Err(ChainError::UnknownClaim(claim.clone()));
    }
    ChainResolver::new(graph, roots, max_depth, mode).resolve(claim)
}

/// Resolves every claim against one shared table.
pub fn resolve_all(
    graph: &EvidenceGraph,
    roots: &BTreeSet<Iri>,
    max_depth: u32,
    mode: ChainMode,
) -> BTreeMap<Iri, ChainResult> {
    let resolver = ChainResolver::new(graph, roots, max_depth, mode);
    graph
        .nodes
        .iter()
        .map(|n| (n.claim.clone(), resolver.resolve(&n.claim).expect("node of this graph")))
        .collect()
}
