use std::fmt;

use thiserror::Error;

use super::lexer::{tokenize, Spanned, Tok};
use super::{AgentSet, AssertionPattern, ChainMode, Condition, Policy, Rule, Verdict};
use crate::iri::{canonicalize_iri, Iri};
use crate::term::{Literal, Term, Timestamp};

/// Deepest allowed nesting of `not` and parentheses.
pub const MAX_NESTING: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    /// What the parser would have accepted at this position.
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: expected ", self.line, self.column)?;
        match self.expected.as_slice() {
            [one] => write!(f, "{one}")?,
            many => write!(f, "one of {}", many.join(", "))?,
        }
        write!(f, ", found {}", self.found)
    }
}

pub fn parse_policy(text: &str) -> Result<Policy, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, depth: 0 };
    let policy = p.policy()?;
    p.expect_eof()?;
    Ok(policy)
}

/// Parses raw bytes; invalid UTF-8 is reported as a parse error at the
/// offending byte.
pub fn parse_policy_bytes(bytes: &[u8]) -> Result<Policy, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_policy(text),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).expect("valid prefix");
            let line = valid.matches('\n').count() + 1;
            let column = valid.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            Err(ParseError {
                line,
                column,
                expected: vec!["UTF-8 text".into()],
                found: format!("byte {:#04x}", bytes[e.valid_up_to()]),
            })
        }
    }
}

/// Parses a document holding only `set` declarations.
pub fn parse_sets(text: &str) -> Result<Vec<AgentSet>, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, depth: 0 };
    let mut sets = Vec::new();
    while p.peek_kw("set") {
        sets.push(p.set()?);
    }
    p.expect_eof()?;
    Ok(sets)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn advance(&mut self) -> Spanned {
        let t = self.peek().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        })
    }

    fn fail_at<T>(&self, at: &Spanned, expected: &str, found: String) -> Result<T, ParseError> {
        Err(ParseError { line: at.line, column: at.column, expected: vec![expected.into()], found })
    }

    fn peek_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.peek_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.fail(&[&format!("'{kw}'")])
        }
    }

    fn punct(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.advance();
            Ok(())
        } else {
            self.fail(&[&tok.describe()])
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Eof {
            Ok(())
        } else {
            self.fail(&["'rule'", "end of input"])
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Word(w) => {
                let w = w.clone();
                self.advance();
                Ok(w)
            }
            _ => self.fail(&["name"]),
        }
    }

    fn iri(&mut self) -> Result<Iri, ParseError> {
        let at = self.peek().clone();
        match &at.tok {
            Tok::Iri(raw) => {
                self.advance();
                canonicalize_iri(raw).or_else(|e| self.fail_at(&at, "valid IRI", e.to_string()))
            }
            _ => self.fail(&["IRI"]),
        }
    }

    fn effect(&mut self) -> Result<Verdict, ParseError> {
        if self.eat_kw("accept") {
            Ok(Verdict::Accept)
        } else if self.eat_kw("reject") {
            Ok(Verdict::Reject)
        } else {
            self.fail(&["'accept'", "'reject'"])
        }
    }

    fn policy(&mut self) -> Result<Policy, ParseError> {
        self.kw("policy")?;
        let name = self.name()?;
        self.kw("for")?;
        let owner = self.iri()?;
        let default = if self.eat_kw("default") { self.effect()? } else { Verdict::Reject };
        let mut sets = Vec::new();
        while self.peek_kw("set") {
            sets.push(self.set()?);
        }
        let mut rules = Vec::new();
        while self.peek_kw("rule") {
            rules.push(self.rule()?);
        }
        Ok(Policy { name, owner, default, sets, rules })
    }

    fn set(&mut self) -> Result<AgentSet, ParseError> {
        self.kw("set")?;
        let name = self.name()?;
        self.punct(Tok::LBrace)?;
        let mut members = std::collections::BTreeSet::new();
        if self.peek().tok != Tok::RBrace {
            loop {
                members.insert(self.iri()?);
                if self.peek().tok == Tok::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        if self.peek().tok != Tok::RBrace {
            return self.fail(&["','", "'}'"]);
        }
        self.advance();
        Ok(AgentSet { name, members })
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        self.kw("rule")?;
        let name = self.name()?;
        let effect = self.effect()?;
        self.kw("when")?;
        let condition = self.disjunction()?;
        Ok(Rule { name, effect, condition })
    }

    fn disjunction(&mut self) -> Result<Condition, ParseError> {
        let first = self.conjunction()?;
        if !self.peek_kw("or") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_kw("or") {
            items.push(self.conjunction()?);
        }
        Ok(Condition::Or(items))
    }

    fn conjunction(&mut self) -> Result<Condition, ParseError> {
        let first = self.unary()?;
        if !self.peek_kw("and") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_kw("and") {
            items.push(self.unary()?);
        }
        Ok(Condition::And(items))
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T, ParseError>) -> Result<T, ParseError> {
        if self.depth >= MAX_NESTING {
            return self.fail(&["shallower nesting"]);
        }
        self.depth += 1;
        let r = f(self);
        self.depth -= 1;
        r
    }

    fn unary(&mut self) -> Result<Condition, ParseError> {
        if self.eat_kw("not") {
            return self.nested(|p| Ok(Condition::Not(Box::new(p.unary()?))));
        }
        if self.peek().tok == Tok::LParen {
            self.advance();
            let inner = self.nested(|p| p.disjunction())?;
            self.punct(Tok::RParen)?;
            return Ok(inner);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Condition, ParseError> {
        if self.eat_kw("source") {
            if self.eat_kw("is") {
                return Ok(Condition::SourceIs(self.iri()?));
            }
            if self.eat_kw("in") {
                return Ok(Condition::SourceIn(self.name()?));
            }
            return self.fail(&["'is'", "'in'"]);
        }
        if self.eat_kw("has") {
            if self.eat_kw("source") {
                return Ok(Condition::HasSource);
            }
            if self.eat_kw("evidence") {
                return Ok(Condition::HasEvidence);
            }
            return self.fail(&["'source'", "'evidence'"]);
        }
        if self.eat_kw("published") {
            let after = if self.eat_kw("after") {
                true
            } else if self.eat_kw("before") {
                false
            } else {
                return self.fail(&["'after'", "'before'"]);
            };
            let ts = self.timestamp()?;
            return Ok(if after { Condition::PublishedAfter(ts) } else { Condition::PublishedBefore(ts) });
        }
        if self.eat_kw("chain") {
            self.kw("anchored")?;
            self.kw("in")?;
            let roots = self.name()?;
            self.kw("depth")?;
            let max_depth = self.depth_bound()?;
            let mode = if self.eat_kw("all") {
                ChainMode::All
            } else {
                self.eat_kw("any");
                ChainMode::Any
            };
            return Ok(Condition::ChainAnchored { roots, max_depth, mode });
        }
        if self.eat_kw("context") {
            let key = match &self.peek().tok {
                Tok::Word(w) | Tok::Str(w) => w.clone(),
                _ => return self.fail(&["context key"]),
            };
            self.advance();
            if self.eat_kw("defined") {
                return Ok(Condition::ContextDefined(key));
            }
            if self.peek().tok != Tok::Eq {
                return self.fail(&["'='", "'defined'"]);
            }
            self.advance();
            let value = match &self.peek().tok {
                Tok::Str(s) | Tok::Iri(s) => s.clone(),
                _ => return self.fail(&["string", "IRI"]),
            };
            self.advance();
            return Ok(Condition::ContextEquals { key, value });
        }
        if self.eat_kw("assertion") {
            self.kw("matches")?;
            let mut pattern = AssertionPattern { predicate: None, object: None };
            if self.eat_kw("pred") {
                self.punct(Tok::Eq)?;
                pattern.predicate = Some(self.iri()?);
            }
            if self.eat_kw("obj") {
                self.punct(Tok::Eq)?;
                pattern.object = Some(self.term()?);
            }
            if pattern.predicate.is_none() && pattern.object.is_none() {
                return self.fail(&["'pred'", "'obj'"]);
            }
            return Ok(Condition::AssertionMatches(pattern));
        }
        self.fail(&["'source'", "'has'", "'published'", "'chain'", "'context'", "'assertion'", "'not'", "'('"])
    }

    fn timestamp(&mut self) -> Result<Timestamp, ParseError> {
        let at = self.peek().clone();
        match &at.tok {
            Tok::Number(raw) | Tok::Str(raw) => {
                let raw = raw.clone();
                self.advance();
                Timestamp::parse(&raw).or_else(|_| self.fail_at(&at, "ISO-8601 timestamp", format!("'{raw}'")))
            }
            _ => self.fail(&["timestamp"]),
        }
    }

    fn depth_bound(&mut self) -> Result<u32, ParseError> {
        let at = self.peek().clone();
        match &at.tok {
            Tok::Number(raw) => match raw.parse::<u32>() {
                Ok(n) if n >= 1 => {
                    self.advance();
                    Ok(n)
                }
                _ => self.fail_at(&at, "positive integer", format!("'{raw}'")),
            },
            _ => self.fail(&["positive integer"]),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match &self.peek().tok {
            Tok::Iri(_) => Ok(Term::iri(self.iri()?)),
            Tok::Str(s) => {
                let lexical = s.clone();
                self.advance();
                match self.peek().tok {
                    Tok::Carets => {
                        self.advance();
                        Ok(Term::literal(Literal::typed(lexical, self.iri()?)))
                    }
                    Tok::At => {
                        self.advance();
                        let tag = self.name()?;
                        Ok(Term::literal(Literal::lang(lexical, &tag)))
                    }
                    _ => Ok(Term::literal(Literal::plain(lexical))),
                }
            }
            _ => self.fail(&["IRI", "string"]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::parse(s).unwrap()
    }

    #[test]
    fn minimal_policy() {
        let p = parse_policy("policy p for <http://ex.org/alice> default reject").unwrap();
        assert_eq!(p, Policy::new("p", iri("http://ex.org/alice"), Verdict::Reject));
    }

    #[test]
    fn default_of_the_default_is_reject() {
        let p = parse_policy("policy p for <http://ex.org/alice>").unwrap();
        assert_eq!(p.default, Verdict::Reject);
    }

    #[test]
    fn source_is_rule() {
        let p = parse_policy(
            "policy p for <http://ex.org/alice> default reject\nrule r1 accept when source is <http://ex.org/gov>",
        )
        .unwrap();
        assert_eq!(p.rules, vec![Rule {
            name: "r1".into(),
            effect: Verdict::Accept,
            condition: Condition::SourceIs(iri("http://ex.org/gov")),
        }]);
    }

    #[test]
    fn chain_rule() {
        let p = parse_policy(
            "policy p for <http://ex.org/alice> default reject rule r2 accept when chain anchored in publicFaith depth 3 any",
        )
        .unwrap();
        assert_eq!(p.rules[0].condition, Condition::ChainAnchored {
            roots: "publicFaith".into(),
            max_depth: 3,
            mode: ChainMode::Any,
        });
    }

    #[test]
    fn keywords_are_case_insensitive_and_comments_ignored() {
        let p = parse_policy(
            "# header\nPOLICY p FOR <http://ex.org/a> DEFAULT Accept # trailing\nRule r Reject When NOT Has Evidence",
        )
        .unwrap();
        assert_eq!(p.default, Verdict::Accept);
        assert_eq!(p.rules[0].condition, Condition::Not(Box::new(Condition::HasEvidence)));
    }

    #[test]
    fn precedence_and_grouping() {
        let p = parse_policy(
            "policy p for <http://ex.org/a> rule r accept when has source and has evidence or not (context k defined or context \"odd key\" = \"v\")",
        )
        .unwrap();
        assert_eq!(p.rules[0].condition, Condition::Or(vec![
            Condition::And(vec![Condition::HasSource, Condition::HasEvidence]),
            Condition::Not(Box::new(Condition::Or(vec![
                Condition::ContextDefined("k".into()),
                Condition::ContextEquals { key: "odd key".into(), value: "v".into() },
            ]))),
        ]));
    }

    #[test]
    fn full_atom_surface() {
        let text = r#"
policy full for <http://ex.org/a> default accept
set gov { <http://ex.org/tse>, <http://ex.org/camara> }
set empty { }
rule a reject when published before 2018-01-01T00:00:00Z
rule b reject when published after "2020-01-01T00:00:00-03:00"
rule c accept when context requester.iri = <http://ex.org/eve>
rule d accept when assertion matches pred=<http://ex.org/memberOf> obj="PT"@pt-BR
rule e accept when assertion matches obj="3"^^<http://www.w3.org/2001/XMLSchema#integer>
rule f accept when chain anchored in gov depth 2 all
rule g accept when source in gov
"#;
        let p = parse_policy(text).unwrap();
        assert_eq!(p.sets.len(), 2);
        assert_eq!(p.sets[0].members.len(), 2);
        assert!(p.sets[1].members.is_empty());
        assert_eq!(p.rules.len(), 7);
        assert_eq!(
            p.rules[1].condition,
            Condition::PublishedAfter(Timestamp::parse("2020-01-01T03:00:00Z").unwrap())
        );
        assert_eq!(
            p.rules[2].condition,
            Condition::ContextEquals { key: "requester.iri".into(), value: "http://ex.org/eve".into() }
        );
        match &p.rules[3].condition {
            Condition::AssertionMatches(AssertionPattern { predicate: Some(_), object: Some(o) }) => {
                assert_eq!(o.as_literal().unwrap().language.as_deref(), Some("pt-br"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn depth_zero_is_a_parse_error() {
        let err = parse_policy("policy p for <http://ex.org/a> rule r accept when chain anchored in s depth 0")
            .unwrap_err();
        assert_eq!(err.expected, vec!["positive integer".to_string()]);
        assert_eq!((err.line, err.column), (1, 77));
    }

    #[test]
    fn errors_report_location_and_expected_tokens() {
        let err = parse_policy("policy p for <http://ex.org/a>\nrule r accept when source was <x:y>").unwrap_err();
        assert_eq!((err.line, err.column), (2, 27));
        assert_eq!(err.expected, vec!["'is'".to_string(), "'in'".to_string()]);
        assert!(err.to_string().starts_with("line 2, column 27: expected one of 'is', 'in'"));

        let err = parse_policy("policy p for <not an iri>").unwrap_err();
        assert_eq!(err.expected, vec!["valid IRI".to_string()]);

        let err = parse_policy("policy p for <http://ex.org/a> rule r accept when has source )").unwrap_err();
        assert_eq!(err.found, "')'");
    }

    #[test]
    fn empty_and_connective_operands_are_errors() {
        assert!(parse_policy("policy p for <http://ex.org/a> rule r accept when").is_err());
        assert!(parse_policy("policy p for <http://ex.org/a> rule r accept when has source and").is_err());
        assert!(parse_policy("policy p for <http://ex.org/a> rule r accept when assertion matches").is_err());
        assert!(parse_policy("").is_err());
    }

    #[test]
    fn deep_nesting_is_bounded() {
        let deep = format!("policy p for <http://ex.org/a> rule r accept when {}has source{}", "(".repeat(10_000), ")".repeat(10_000));
        let err = parse_policy(&deep).unwrap_err();
        assert_eq!(err.expected, vec!["shallower nesting".to_string()]);
        let nots = format!("policy p for <http://ex.org/a> rule r accept when {}has source", "not ".repeat(10_000));
        assert!(parse_policy(&nots).is_err());
        let ok = format!("policy p for <http://ex.org/a> rule r accept when {}has source{}", "(".repeat(MAX_NESTING), ")".repeat(MAX_NESTING));
        assert!(parse_policy(&ok).is_ok());
    }

    #[test]
    fn invalid_utf8_is_a_parse_error() {
        let err = parse_policy_bytes(b"policy p\nfor \xff").unwrap_err();
        assert_eq!((err.line, err.column), (2, 5));
    }

    #[test]
    fn sets_document() {
        let sets = parse_sets("set a { <http://ex.org/x> }\nset b { }").unwrap();
        assert_eq!(sets.len(), 2);
        assert!(parse_sets("rule x").is_err());
    }
}
