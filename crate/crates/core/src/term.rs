//! RDF terms, quads and the second-precision timestamps used in provenance.

use std::fmt;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iri::Iri;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub lexical: String,
    pub datatype: Option<Iri>,
    pub language: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("literal may not carry both a datatype and a language tag")]
pub struct LiteralError;

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: None, language: None }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal { lexical: lexical.into(), datatype: Some(datatype), language: None }
    }

    /// Language tags are stored lowercased.
    pub fn lang(lexical: impl Into<String>, language: &str) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: Some(language.to_ascii_lowercase()),
        }
    }

    pub fn new(
        lexical: impl Into<String>,
        datatype: Option<Iri>,
        language: Option<&str>,
    ) -> Result<Self, LiteralError> {
        match (datatype, language) {
            (Some(_), Some(_)) => Err(LiteralError),
            (Some(dt), None) => Ok(Literal::typed(lexical, dt)),
            (None, Some(lang)) => Ok(Literal::lang(lexical, lang)),
            (None, None) => Ok(Literal::plain(lexical)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Term {
    Iri { value: Iri },
    Literal { value: Literal },
    Blank { label: String },
}

impl Term {
    pub fn iri(iri: Iri) -> Self {
        Term::Iri { value: iri }
    }

    pub fn literal(lit: Literal) -> Self {
        Term::Literal { value: lit }
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::Blank { label: label.into() }
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri { value } => Some(value),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal { value } => Some(value),
            _ => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank { .. })
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::literal(lit)
    }
}

/// Writes `s` as the body of an N-Quads string literal.
pub(crate) fn write_escaped(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\r' => f.write_str("\\r")?,
            '\t' => f.write_str("\\t")?,
            '\u{8}' => f.write_str("\\b")?,
            '\u{c}' => f.write_str("\\f")?,
            c if c.is_control() => write!(f, "\\u{:04X}", c as u32)?,
            c => f.write_char(c)?,
        }
    }
    Ok(())
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        write_escaped(f, &self.lexical)?;
        f.write_str("\"")?;
        if let Some(dt) = &self.datatype {
            write!(f, "^^<{dt}>")?;
        }
        if let Some(lang) = &self.language {
            write!(f, "@{lang}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri { value } => write!(f, "<{value}>"),
            Term::Literal { value } => value.fmt(f),
            Term::Blank { label } => write!(f, "_:{label}"),
        }
    }
}

/// One statement placed in a named graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Quad {
    pub subject: Term,
    pub predicate: Iri,
    pub object: Term,
    pub graph: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("a literal cannot be the subject of a quad")]
pub struct LiteralSubject;

impl Quad {
    pub fn new(
        subject: impl Into<Term>,
        predicate: Iri,
        object: impl Into<Term>,
        graph: Iri,
    ) -> Result<Self, LiteralSubject> {
        let subject = subject.into();
        if subject.as_literal().is_some() {
            return Err(LiteralSubject);
        }
        Ok(Quad { subject, predicate, object: object.into(), graph })
    }
}

/// N-Quads line without the trailing newline.
impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <{}> {} <{}> .", self.subject, self.predicate, self.object, self.graph)
    }
}

/// A UTC instant at second precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed timestamp {0:?}")]
pub struct TimestampError(pub String);

impl Timestamp {
    pub fn from_unix(seconds: i64) -> Option<Self> {
        DateTime::<Utc>::from_timestamp(seconds, 0).map(|_| Timestamp(seconds))
    }

    pub fn unix(self) -> i64 {
        self.0
    }

    /// Parses an ISO-8601 / RFC 3339 date-time. Offsets are folded into UTC and
    /// fractional seconds are truncated.
    pub fn parse(raw: &str) -> Result<Self, TimestampError> {
        let parsed = DateTime::parse_from_rfc3339(raw.trim())
            .map_err(|_| TimestampError(raw.to_string()))?;
        Ok(Timestamp(parsed.timestamp()))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dt = DateTime::<Utc>::from_timestamp(self.0, 0).expect("timestamp in range");
        f.write_str(&dt.to_rfc3339_opts(SecondsFormat::Secs, true))
    }
}

impl Serialize for Timestamp {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        Timestamp::parse(&raw).map_err(serde::de::Error::custom)
    }
}
