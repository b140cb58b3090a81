//! Deterministic workloads for the benchmarks.

use nanotrust_core::vocab::{
    NP_HAS_ASSERTION, NP_HAS_PROVENANCE, NP_HAS_PUBINFO, NP_NANOPUBLICATION, PROV_ATTRIBUTED_TO, PROV_DERIVED_FROM,
    PROV_GENERATED_AT, RDF_TYPE,
};
use std::fmt::Write;

pub const AGENTS: usize = 50;

pub fn agent(k: usize) -> String {
    format!("http://bench.example/agent/{k}")
}

pub fn claim(k: usize) -> String {
    format!("http://bench.example/claim/{k:06}")
}

/// `n` claims. Every tenth claim's source is one of the first five agents;
/// claims cite up to three earlier claims, so chains run back toward claim 0.
pub fn document(n: usize) -> String {
    let mut out = String::with_capacity(n * 900);
    for k in 0..n {
        let id = claim(k);
        let (a, p, i) = (format!("{id}/a"), format!("{id}/p"), format!("{id}/i"));
        let _ = writeln!(out, "<{id}> <{RDF_TYPE}> <{NP_NANOPUBLICATION}> <{id}> .");
        let _ = writeln!(out, "<{id}> <{NP_HAS_ASSERTION}> <{a}> <{id}> .");
        let _ = writeln!(out, "<{id}> <{NP_HAS_PROVENANCE}> <{p}> <{id}> .");
        let _ = writeln!(out, "<{id}> <{NP_HAS_PUBINFO}> <{i}> <{id}> .");
        let _ = writeln!(out, "<http://bench.example/s/{}> <http://bench.example/p/{}> \"v{k}\" <{a}> .", k % 97, k % 7);
        let source = if k % 10 == 0 { k % 5 } else { 5 + k % (AGENTS - 5) };
        let _ = writeln!(out, "<{id}> <{PROV_ATTRIBUTED_TO}> <{}> <{p}> .", agent(source));
        for step in [1, 3, 7] {
            if k >= step && (k + step) % 3 != 0 {
                let _ = writeln!(out, "<{id}> <{PROV_DERIVED_FROM}> <{}> <{p}> .", claim(k - step));
            }
        }
        let _ = writeln!(out, "<{id}> <{PROV_GENERATED_AT}> \"2018-{:02}-{:02}T12:00:00Z\" <{i}> .", 1 + k % 12, 1 + k % 28);
    }
    out
}

/// A policy exercising every atom kind, with a chain rule last.
pub fn policy() -> String {
    let roots: Vec<String> = (0..5).map(|k| format!("<{}>", agent(k))).collect();
    format!(
        "policy bench for <http://bench.example/me> default reject\n\
         set roots {{ {} }}\n\
         rule fresh reject when published before 2018-02-01T00:00:00Z and not source in roots\n\
         rule direct accept when source in roots\n\
         rule topical reject when assertion matches pred=<http://bench.example/p/3> and not has evidence\n\
         rule gated accept when context purpose = \"research\" and chain anchored in roots depth 2 all\n\
         rule chained accept when chain anchored in roots depth 4 any\n",
        roots.join(", ")
    )
}
