//! Reserved head-declaration IRIs and the configurable provenance vocabulary.
//!
//! The reserved IRIs are listed in `docs/reserved-iris.md`; keep the two in sync.

use serde::{Deserialize, Serialize};

use crate::iri::Iri;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const NP_NANOPUBLICATION: &str = "http://www.nanopub.org/nschema#Nanopublication";
pub const NP_HAS_ASSERTION: &str = "http://www.nanopub.org/nschema#hasAssertion";
pub const NP_HAS_PROVENANCE: &str = "http://www.nanopub.org/nschema#hasProvenance";
pub const NP_HAS_PUBINFO: &str = "http://www.nanopub.org/nschema#hasPublicationInfo";

pub const PROV_ATTRIBUTED_TO: &str = "http://www.w3.org/ns/prov#wasAttributedTo";
pub const PROV_DERIVED_FROM: &str = "http://www.w3.org/ns/prov#wasDerivedFrom";
pub const PROV_GENERATED_AT: &str = "http://www.w3.org/ns/prov#generatedAtTime";

pub(crate) fn reserved(s: &'static str) -> Iri {
    Iri::parse(s).expect("reserved IRI is canonical")
}

/// The three predicates trust metadata is read from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    /// Links a claim to the agent it is attributed to (provenance graph).
    pub attribution: Iri,
    /// Links a claim to a claim it cites as evidence (provenance graph).
    pub derivation: Iri,
    /// Links a claim to its publication time (publication-info graph).
    pub published: Iri,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary {
            attribution: reserved(PROV_ATTRIBUTED_TO),
            derivation: reserved(PROV_DERIVED_FROM),
            published: reserved(PROV_GENERATED_AT),
        }
    }
}
