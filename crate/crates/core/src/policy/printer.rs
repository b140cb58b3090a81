use std::fmt::{self, Write};

use super::{is_word, AssertionPattern, Condition, Policy};
use crate::term::{write_escaped, Term};

/// Canonical text of a policy: header line, one line per set, one line per
/// rule. Parsing the output yields a structurally equal policy.
pub fn print_policy(p: &Policy) -> String {
    let mut out = String::new();
    writeln!(out, "policy {} for <{}> default {}", p.name, p.owner, p.default).expect("string write");
    for set in &p.sets {
        out.push_str("set ");
        out.push_str(&set.name);
        if set.members.is_empty() {
            out.push_str(" { }\n");
        } else {
            let members: Vec<String> = set.members.iter().map(|m| format!("<{m}>")).collect();
            writeln!(out, " {{ {} }}", members.join(", ")).expect("string write");
        }
    }
    for rule in &p.rules {
        writeln!(out, "rule {} {} when {}", rule.name, rule.effect, rule.condition).expect("string write");
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Top,
    InOr,
    InAnd,
    InNot,
}

fn quoted(f: &mut impl Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    write_escaped(f, s)?;
    f.write_char('"')
}

fn write_term(f: &mut impl Write, t: &Term) -> fmt::Result {
    match t {
        Term::Iri { value } => write!(f, "<{value}>"),
        Term::Literal { value } => {
            quoted(f, &value.lexical)?;
            if let Some(dt) = &value.datatype {
                write!(f, "^^<{dt}>")?;
            }
            if let Some(lang) = &value.language {
                write!(f, "@{lang}")?;
            }
            Ok(())
        }
        // Not expressible in the policy language; check_policy reports it.
        Term::Blank { label } => write!(f, "_:{label}"),
    }
}

fn write_cond(f: &mut impl Write, c: &Condition, slot: Slot) -> fmt::Result {
    match c {
        Condition::SourceIs(iri) => write!(f, "source is <{iri}>"),
        Condition::SourceIn(set) => write!(f, "source in {set}"),
        Condition::HasSource => f.write_str("has source"),
        Condition::HasEvidence => f.write_str("has evidence"),
        Condition::PublishedAfter(ts) => write!(f, "published after {ts}"),
        Condition::PublishedBefore(ts) => write!(f, "published before {ts}"),
        Condition::ChainAnchored { roots, max_depth, mode } => {
            write!(f, "chain anchored in {roots} depth {max_depth} {mode}")
        }
        Condition::ContextEquals { key, value } => {
            f.write_str("context ")?;
            write_key(f, key)?;
            f.write_str(" = ")?;
            quoted(f, value)
        }
        Condition::ContextDefined(key) => {
            f.write_str("context ")?;
            write_key(f, key)?;
            f.write_str(" defined")
        }
        Condition::AssertionMatches(AssertionPattern { predicate, object }) => {
            f.write_str("assertion matches")?;
            if let Some(p) = predicate {
                write!(f, " pred=<{p}>")?;
            }
            if let Some(o) = object {
                f.write_str(" obj=")?;
                write_term(f, o)?;
            }
            Ok(())
        }
        Condition::Not(inner) => {
            f.write_str("not ")?;
            write_cond(f, inner, Slot::InNot)
        }
        Condition::And(items) => {
            let paren = matches!(slot, Slot::InAnd | Slot::InNot);
            write_list(f, items, " and ", Slot::InAnd, paren)
        }
        Condition::Or(items) => {
            let paren = slot != Slot::Top;
            write_list(f, items, " or ", Slot::InOr, paren)
        }
    }
}

fn write_key(f: &mut impl Write, key: &str) -> fmt::Result {
    if is_word(key) {
        f.write_str(key)
    } else {
        quoted(f, key)
    }
}

fn write_list(f: &mut impl Write, items: &[Condition], sep: &str, slot: Slot, paren: bool) -> fmt::Result {
    if paren {
        f.write_char('(')?;
    }
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write_cond(f, item, slot)?;
    }
    if paren {
        f.write_char(')')?;
    }
    Ok(())
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_cond(f, self, Slot::Top)
    }
}
