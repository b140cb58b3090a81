//! In-memory named-graph quad store.
//!
//! Writers go through [`Store`]; readers take a [`Snapshot`], which is an
//! immutable, cheaply clonable view that can be shared across threads.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::iri::Iri;
use crate::nanopub::{validate_nanopub, GraphView, Nanopublication, Violation, ViolationKind};
use crate::nquads::{parse_nquads, SyntaxError};
use crate::term::{Quad, Term};
use crate::vocab::{
    reserved, NP_HAS_ASSERTION, NP_HAS_PROVENANCE, NP_HAS_PUBINFO, NP_NANOPUBLICATION, RDF_TYPE,
};

/// A quad pattern; `None` positions are wildcards.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pattern {
    pub subject: Option<Term>,
    pub predicate: Option<Iri>,
    pub object: Option<Term>,
    pub graph: Option<Iri>,
}

impl Pattern {
    pub fn any() -> Self {
        Pattern::default()
    }

    pub fn subject(mut self, s: impl Into<Term>) -> Self {
        self.subject = Some(s.into());
        self
    }

    pub fn predicate(mut self, p: Iri) -> Self {
        self.predicate = Some(p);
        self
    }

    pub fn object(mut self, o: impl Into<Term>) -> Self {
        self.object = Some(o.into());
        self
    }

    pub fn graph(mut self, g: Iri) -> Self {
        self.graph = Some(g);
        self
    }

    pub fn matches(&self, q: &Quad) -> bool {
        self.subject.as_ref().is_none_or(|s| s == &q.subject)
            && self.predicate.as_ref().is_none_or(|p| p == &q.predicate)
            && self.object.as_ref().is_none_or(|o| o == &q.object)
            && self.graph.as_ref().is_none_or(|g| g == &q.graph)
    }
}

#[derive(Debug, Clone, Default)]
struct StoreData {
    quads: BTreeSet<Quad>,
    by_graph: HashMap<Iri, BTreeSet<Quad>>,
    by_predicate_graph: HashMap<(Iri, Iri), BTreeSet<Quad>>,
    nanopubs: BTreeMap<Iri, Nanopublication>,
}

impl StoreData {
    fn insert(&mut self, q: Quad) -> bool {
        if self.quads.contains(&q) {
            return false;
        }
        self.by_graph.entry(q.graph.clone()).or_default().insert(q.clone());
        self.by_predicate_graph
            .entry((q.predicate.clone(), q.graph.clone()))
            .or_default()
            .insert(q.clone());
        self.quads.insert(q);
        true
    }

    fn query(&self, p: &Pattern) -> Vec<&Quad> {
        let candidates: Box<dyn Iterator<Item = &Quad>> = match (&p.predicate, &p.graph) {
            (Some(pred), Some(g)) => match self.by_predicate_graph.get(&(pred.clone(), g.clone())) {
                Some(set) => Box::new(set.iter()),
                None => return Vec::new(),
            },
            (None, Some(g)) => match self.by_graph.get(g) {
                Some(set) => Box::new(set.iter()),
                None => return Vec::new(),
            },
            _ => Box::new(self.quads.iter()),
        };
        candidates.filter(|q| p.matches(q)).collect()
    }
}

impl GraphView for StoreData {
    fn graph_quads(&self, graph: &Iri) -> Vec<&Quad> {
        self.by_graph.get(graph).map(|s| s.iter().collect()).unwrap_or_default()
    }
}

/// Existing store contents plus a pending batch, used to validate before commit.
struct Pending<'a> {
    base: &'a StoreData,
    extra: BTreeMap<&'a Iri, Vec<&'a Quad>>,
}

impl GraphView for Pending<'_> {
    fn graph_quads(&self, graph: &Iri) -> Vec<&Quad> {
        let mut out = self.base.graph_quads(graph);
        if let Some(extra) = self.extra.get(graph) {
            out.extend(extra.iter().copied());
        }
        out
    }
}

/// Head declaration quads rendered from the nanopublication index.
fn head_quads(np: &Nanopublication) -> [Quad; 4] {
    let id = Term::iri(np.id.clone());
    let q = |p: &'static str, o: Term| Quad {
        subject: id.clone(),
        predicate: reserved(p),
        object: o,
        graph: np.id.clone(),
    };
    [
        q(RDF_TYPE, Term::iri(reserved(NP_NANOPUBLICATION))),
        q(NP_HAS_ASSERTION, Term::iri(np.assertion.clone())),
        q(NP_HAS_PROVENANCE, Term::iri(np.provenance.clone())),
        q(NP_HAS_PUBINFO, Term::iri(np.pubinfo.clone())),
    ]
}

/// Immutable view of the store at one ingestion boundary.
#[derive(Debug, Clone)]
pub struct Snapshot {
    data: Arc<StoreData>,
    digest: Arc<OnceLock<String>>,
}

impl Snapshot {
    /// All quads matching the pattern, in canonical quad order.
    pub fn query(&self, p: &Pattern) -> Vec<&Quad> {
        self.data.query(p)
    }

    pub fn quads(&self) -> impl Iterator<Item = &Quad> {
        self.data.quads.iter()
    }

    pub fn len(&self) -> usize {
        self.data.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.quads.is_empty() && self.data.nanopubs.is_empty()
    }

    pub fn nanopub(&self, id: &Iri) -> Option<&Nanopublication> {
        self.data.nanopubs.get(id)
    }

    /// Registered nanopublications ordered by id.
    pub fn nanopubs(&self) -> impl Iterator<Item = &Nanopublication> {
        self.data.nanopubs.values()
    }

    /// Canonical serialization: head declarations and data quads, one N-Quads
    /// line each, sorted bytewise.
    pub fn canonical_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .data
            .nanopubs
            .values()
            .flat_map(head_quads)
            .chain(self.data.quads.iter().cloned())
            .map(|q| q.to_string())
            .collect();
        lines.sort();
        lines.dedup();
        lines
    }

    pub fn to_nquads(&self) -> String {
        let mut out = String::new();
        for line in self.canonical_lines() {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// `sha256:<hex>` over the canonical serialization. Independent of the
    /// order in which quads were ingested.
    pub fn digest(&self) -> &str {
        self.digest.get_or_init(|| {
            let mut h = Sha256::new();
            for line in self.canonical_lines() {
                h.update(line.as_bytes());
                h.update(b"\n");
            }
            format!("sha256:{}", hex::encode(h.finalize()))
        })
    }
}

impl GraphView for Snapshot {
    fn graph_quads(&self, graph: &Iri) -> Vec<&Quad> {
        self.data.graph_quads(graph)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestOptions {
    /// Rename blank nodes so labels from different documents never collide.
    pub scope_blank_nodes: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { scope_blank_nodes: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    /// Data quads new to the store.
    pub added: usize,
    /// Data quads already present (in the store or earlier in the document).
    pub duplicates: usize,
    /// Nanopublications registered by this document, sorted.
    pub nanopubs: Vec<Iri>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("document rejected: {} violation(s)", .0.len())]
    ValidationFailed(Vec<Violation>),
    #[error("quad log: {0}")]
    Log(#[from] io::Error),
}

#[derive(Debug)]
struct QuadLog {
    path: PathBuf,
    file: File,
}

/// The single writer. Ingestion is all-or-nothing per document.
#[derive(Debug, Default)]
pub struct Store {
    data: Arc<StoreData>,
    log: Option<QuadLog>,
}

#[derive(Default)]
struct HeadParts {
    typed: bool,
    assertion: BTreeSet<Iri>,
    provenance: BTreeSet<Iri>,
    pubinfo: BTreeSet<Iri>,
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    /// Opens (creating if needed) an append-only quad log, replays it, and
    /// writes every later accepted batch through to it.
    pub fn open_log(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        let path = path.as_ref().to_path_buf();
        let mut store = Store::new();
        if path.exists() {
            let text = std::fs::read_to_string(&path)?;
            for section in split_log_sections(&text) {
                store.ingest_with(section, IngestOptions { scope_blank_nodes: false })?;
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        store.log = Some(QuadLog { path, file });
        Ok(store)
    }

    pub fn log_path(&self) -> Option<&Path> {
        self.log.as_ref().map(|l| l.path.as_path())
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot { data: Arc::clone(&self.data), digest: Arc::new(OnceLock::new()) }
    }

    pub fn ingest_document(&mut self, text: &str) -> Result<IngestReport, IngestError> {
        self.ingest_with(text, IngestOptions::default())
    }

    pub fn ingest_with(
        &mut self,
        text: &str,
        options: IngestOptions,
    ) -> Result<IngestReport, IngestError> {
        let mut quads = parse_nquads(text)?;
        if options.scope_blank_nodes {
            scope_blank_nodes(&mut quads);
        }

        let rdf_type = reserved(RDF_TYPE);
        let np_class = Term::iri(reserved(NP_NANOPUBLICATION));
        let has_assertion = reserved(NP_HAS_ASSERTION);
        let has_provenance = reserved(NP_HAS_PROVENANCE);
        let has_pubinfo = reserved(NP_HAS_PUBINFO);

        let mut violations = Vec::new();
        let mut heads: BTreeMap<Iri, HeadParts> = BTreeMap::new();
        let mut data = Vec::new();
        for q in quads {
            let is_type = q.predicate == rdf_type && q.object == np_class;
            let slot = [&has_assertion, &has_provenance, &has_pubinfo]
                .iter()
                .position(|p| *p == &q.predicate);
            if !is_type && slot.is_none() {
                data.push(q);
                continue;
            }
            let id = match q.subject.as_iri() {
                Some(id) if id == &q.graph => id.clone(),
                _ => {
                    violations.push(Violation {
                        nanopub: q.subject.as_iri().unwrap_or(&q.graph).clone(),
                        kind: ViolationKind::MisplacedHead,
                        graph: q.graph.clone(),
                    });
                    continue;
                }
            };
            let parts = heads.entry(id).or_default();
            match (slot, q.object.as_iri()) {
                (None, _) => parts.typed = true,
                (Some(i), Some(g)) => {
                    let target = [&mut parts.assertion, &mut parts.provenance, &mut parts.pubinfo];
                    target.into_iter().nth(i).expect("three slots").insert(g.clone());
                }
                (Some(_), None) => violations.push(Violation {
                    nanopub: q.graph.clone(),
                    kind: ViolationKind::IncompleteHead,
                    graph: q.graph.clone(),
                }),
            }
        }

        let mut declared = Vec::new();
        for (id, parts) in heads {
            let single = |s: &BTreeSet<Iri>| if s.len() == 1 { s.first().cloned() } else { None };
            let conflicting = [&parts.assertion, &parts.provenance, &parts.pubinfo]
                .iter()
                .any(|s| s.len() > 1);
            let kind = if conflicting {
                Some(ViolationKind::ConflictingHead)
            } else if !parts.typed {
                Some(ViolationKind::IncompleteHead)
            } else {
                None
            };
            match (kind, single(&parts.assertion), single(&parts.provenance), single(&parts.pubinfo)) {
                (None, Some(a), Some(p), Some(i)) => {
                    let np = Nanopublication::new(id.clone(), a, p, i);
                    match self.data.nanopubs.get(&id) {
                        Some(existing) if existing == &np => {}
                        Some(_) => violations.push(Violation {
                            nanopub: id.clone(),
                            kind: ViolationKind::ConflictingHead,
                            graph: id,
                        }),
                        None => declared.push(np),
                    }
                }
                (kind, ..) => violations.push(Violation {
                    nanopub: id.clone(),
                    kind: kind.unwrap_or(ViolationKind::IncompleteHead),
                    graph: id,
                }),
            }
        }

        let mut fresh: BTreeSet<Quad> = BTreeSet::new();
        let mut duplicates = 0;
        for q in data {
            if self.data.quads.contains(&q) || !fresh.insert(q) {
                duplicates += 1;
            }
        }

        {
            let mut extra: BTreeMap<&Iri, Vec<&Quad>> = BTreeMap::new();
            for q in &fresh {
                extra.entry(&q.graph).or_default().push(q);
            }
            let view = Pending { base: &self.data, extra };
            for np in &declared {
                violations.extend(validate_nanopub(&view, np));
            }
        }
        if !violations.is_empty() {
            violations.sort();
            violations.dedup();
            return Err(IngestError::ValidationFailed(violations));
        }

        if let Some(log) = &mut self.log {
            let mut section = format!(
                "# batch {}\n",
                Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
            );
            for np in &declared {
                for q in head_quads(np) {
                    section.push_str(&q.to_string());
                    section.push('\n');
                }
            }
            for q in &fresh {
                section.push_str(&q.to_string());
                section.push('\n');
            }
            log.file.write_all(section.as_bytes())?;
            log.file.flush()?;
        }

        let report = IngestReport {
            added: fresh.len(),
            duplicates,
            nanopubs: declared.iter().map(|np| np.id.clone()).collect(),
        };
        let data = Arc::make_mut(&mut self.data);
        for q in fresh {
            data.insert(q);
        }
        for np in declared {
            data.nanopubs.insert(np.id.clone(), np);
        }
        Ok(report)
    }
}

/// Splits a quad log into batches at `# batch` header lines.
fn split_log_sections(text: &str) -> Vec<&str> {
    let mut sections = Vec::new();
    let mut start = None;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if line.starts_with("# batch") {
            if let Some(s) = start {
                sections.push(&text[s..offset]);
            }
            start = Some(offset);
        }
        offset += line.len();
    }
    if let Some(s) = start {
        sections.push(&text[s..]);
    } else if !text.trim().is_empty() {
        sections.push(text);
    }
    sections
}

/// Prefixes blank labels with a digest of the document's statement set, so
/// the renaming does not depend on line order.
fn scope_blank_nodes(quads: &mut [Quad]) {
    if !quads.iter().any(|q| q.subject.is_blank() || q.object.is_blank()) {
        return;
    }
    let mut lines: Vec<String> = quads.iter().map(|q| q.to_string()).collect();
    lines.sort();
    lines.dedup();
    let mut h = Sha256::new();
    for l in &lines {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    let scope = hex::encode(&h.finalize()[..6]);
    let rename = |t: &mut Term| {
        if let Term::Blank { label } = t {
            *label = format!("d{scope}_{label}");
        }
    };
    for q in quads {
        rename(&mut q.subject);
        rename(&mut q.object);
    }
}
