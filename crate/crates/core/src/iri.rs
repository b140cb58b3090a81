//! Absolute IRIs and their canonical form.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An absolute IRI in canonical form.
///
/// Values are only constructed through [`canonicalize_iri`], so two `Iri`s are
/// equal exactly when their canonical bytes are equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(Arc<str>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IriError {
    #[error("empty IRI")]
    Empty,
    #[error("missing scheme separator ':'")]
    MissingScheme,
    #[error("invalid scheme character at position {position}")]
    BadScheme { position: usize },
    #[error("forbidden character {found:?} at position {position}")]
    Forbidden { position: usize, found: char },
}

impl IriError {
    /// Character offset of the offending character, when there is one.
    pub fn position(&self) -> Option<usize> {
        match self {
            IriError::Empty | IriError::MissingScheme => None,
            IriError::BadScheme { position } | IriError::Forbidden { position, .. } => {
                Some(*position)
            }
        }
    }
}

/// Characters that may never appear in an IRI. Besides whitespace and angle
/// brackets this covers the remaining characters N-Quads forbids inside an
/// IRIREF, so every `Iri` serializes without escaping.
fn forbidden(c: char) -> bool {
    c.is_whitespace()
        || c.is_control()
        || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

/// Trims, validates and canonicalizes a raw IRI string.
///
/// The scheme and the host are lowercased; userinfo, port, path, query and
/// fragment are kept byte for byte.
pub fn canonicalize_iri(raw: &str) -> Result<Iri, IriError> {
    let lead = raw.len() - raw.trim_start().len();
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(IriError::Empty);
    }
    // Positions are reported relative to the untrimmed input.
    let lead_chars = raw[..lead].chars().count();
    for (i, c) in trimmed.chars().enumerate() {
        if forbidden(c) {
            return Err(IriError::Forbidden { position: lead_chars + i, found: c });
        }
    }
    let colon = trimmed.find(':').ok_or(IriError::MissingScheme)?;
    let scheme = &trimmed[..colon];
    if scheme.is_empty() {
        return Err(IriError::BadScheme { position: lead_chars });
    }
    for (i, c) in scheme.chars().enumerate() {
        let ok = if i == 0 {
            c.is_ascii_alphabetic()
        } else {
            c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')
        };
        if !ok {
            return Err(IriError::BadScheme { position: lead_chars + i });
        }
    }

    let rest = &trimmed[colon + 1..];
    let mut out = String::with_capacity(trimmed.len());
    out.push_str(&scheme.to_ascii_lowercase());
    out.push(':');
    if let Some(after) = rest.strip_prefix("//") {
        let end = after.find(['/', '?', '#']).unwrap_or(after.len());
        let authority = &after[..end];
        out.push_str("//");
        let host_start = authority.rfind('@').map(|i| i + 1).unwrap_or(0);
        out.push_str(&authority[..host_start]);
        let hostport = &authority[host_start..];
        // The port is the digit run after the last ':' outside an IP literal.
        let port_at = match hostport.rfind(':') {
            Some(i) if !hostport[i..].contains(']') => i,
            _ => hostport.len(),
        };
        out.push_str(&hostport[..port_at].to_lowercase());
        out.push_str(&hostport[port_at..]);
        out.push_str(&after[end..]);
    } else {
        out.push_str(rest);
    }
    Ok(Iri(out.into()))
}

impl Iri {
    pub fn parse(raw: &str) -> Result<Self, IriError> {
        canonicalize_iri(raw)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::str::FromStr for Iri {
    type Err = IriError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        canonicalize_iri(s)
    }
}

impl Serialize for Iri {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Iri {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        canonicalize_iri(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lowercases_scheme_and_host() {
        assert_eq!(canonicalize_iri("HTTP://Ex.org/A").unwrap().as_str(), "http://ex.org/A");
    }

    #[test]
    fn identity_on_canonical_input() {
        assert_eq!(canonicalize_iri("http://ex.org/a").unwrap().as_str(), "http://ex.org/a");
    }

    #[test]
    fn whitespace_is_rejected_with_position() {
        let err = canonicalize_iri("not an iri").unwrap_err();
        assert_eq!(err, IriError::Forbidden { position: 3, found: ' ' });
    }

    #[test]
    fn surrounding_whitespace_is_trimmed() {
        assert_eq!(canonicalize_iri("  urn:x:1\n").unwrap().as_str(), "urn:x:1");
    }

    #[test]
    fn userinfo_port_and_path_preserved() {
        let iri = canonicalize_iri("HTTPS://User:Pw@Example.COM:8080/P?Q=1#F").unwrap();
        assert_eq!(iri.as_str(), "https://User:Pw@example.com:8080/P?Q=1#F");
    }

    #[test]
    fn rejects_missing_or_bad_scheme() {
        assert_eq!(canonicalize_iri("example.org/a"), Err(IriError::MissingScheme));
        assert_eq!(canonicalize_iri(":x"), Err(IriError::BadScheme { position: 0 }));
        assert_eq!(canonicalize_iri("1a:x"), Err(IriError::BadScheme { position: 0 }));
        assert!(matches!(canonicalize_iri("http://a/<b>"), Err(IriError::Forbidden { .. })));
        assert_eq!(canonicalize_iri("   "), Err(IriError::Empty));
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent(raw in "[ ]{0,2}[a-zA-Z][a-zA-Z0-9+.-]{0,5}:(//)?[a-zA-Z0-9@:./?#_-]{0,20}") {
            if let Ok(once) = canonicalize_iri(&raw) {
                let twice = canonicalize_iri(once.as_str()).unwrap();
                prop_assert_eq!(once, twice);
            }
        }
    }
}
