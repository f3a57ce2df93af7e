//! Boolean gate over fingerprints.
//!
//! A predicate is an `&&`/`||` tree (with `!` and parentheses) of
//! payload-equality atoms:
//!
//! ```text
//! gentleman.mantissa_bits == 53 && easy-computations == false,true,false,false
//! sin-k37-pi1 == lo:47257756 || !(sqrt-identity == true)
//! ```
//!
//! Whole-probe atoms take any signature expectation token (exact value,
//! `dec:`, `lo:` or `*`). Fields: `mantissa_bits`, `base` and `anomalous`
//! on the Gentleman pair; a numeric index into boolean vectors. The empty
//! predicate is true. Timing is not addressable.
//!
//! The gate is a pure function of its inputs. It exists to demonstrate and
//! test fingerprint-conditioned control flow, e.g. for detection research.

use thiserror::Error;

use super::db::Expectation;
use super::Fingerprint;
use crate::probes::{Payload, PayloadKind, ProbeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TargetError {
    #[error("specification error at token {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("specification error: unknown probe {0:?}")]
    UnknownProbe(String),
    #[error("specification error: probe {0} is timing and cannot be gated on")]
    Timing(String),
    #[error("specification error: {0}")]
    Field(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Whole,
    MantissaBits,
    Base,
    Anomalous,
    Index(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Want {
    Expect(Expectation),
    Int(i64),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub probe_id: String,
    pub field: Field,
    pub negated: bool,
    want: Want,
}

impl Atom {
    fn eval(&self, fp: &Fingerprint) -> bool {
        let backend = fp.backend_spec();
        let hit = match (fp.get(&self.probe_id), &self.want) {
            (None, _) => false,
            (Some(p), Want::Expect(e)) => e.matches(p, backend.as_ref()),
            (Some(Payload::IntPair { first, second, .. }), Want::Int(v)) => match self.field {
                Field::MantissaBits => first == v,
                Field::Base => second == v,
                _ => false,
            },
            (Some(Payload::IntPair { anomalous, .. }), Want::Bool(b)) => anomalous == b,
            (Some(Payload::Bools(vs)), Want::Bool(b)) => match self.field {
                Field::Index(i) => vs.get(i) == Some(b),
                _ => false,
            },
            _ => false,
        };
        hit != self.negated
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    True,
    Atom(Atom),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
}

impl Node {
    fn eval(&self, fp: &Fingerprint) -> bool {
        match self {
            Self::True => true,
            Self::Atom(a) => a.eval(fp),
            Self::Not(n) => !n.eval(fp),
            Self::And(ns) => ns.iter().all(|n| n.eval(fp)),
            Self::Or(ns) => ns.iter().any(|n| n.eval(fp)),
        }
    }
}

/// A parsed, validated predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    root: Node,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    And,
    Or,
    Not,
    Eq,
    Ne,
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, TargetError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let special = |c: char| c.is_whitespace() || "()&|=!".contains(c);
    while i < chars.len() {
        let c = chars[i];
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, step) = match (c, two.as_str()) {
            (c, _) if c.is_whitespace() => {
                i += 1;
                continue;
            }
            (_, "&&") => (Tok::And, 2),
            (_, "||") => (Tok::Or, 2),
            (_, "==") => (Tok::Eq, 2),
            (_, "!=") => (Tok::Ne, 2),
            ('!', _) => (Tok::Not, 1),
            ('(', _) => (Tok::Open, 1),
            (')', _) => (Tok::Close, 1),
            (c, _) if special(c) => {
                return Err(TargetError::Syntax {
                    pos: out.len(),
                    msg: format!("unexpected {c:?}"),
                })
            }
            _ => {
                let start = i;
                while i < chars.len() && !special(chars[i]) {
                    i += 1;
                }
                out.push(Tok::Word(chars[start..i].iter().collect()));
                continue;
            }
        };
        out.push(tok);
        i += step;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn err(&self, msg: impl Into<String>) -> TargetError {
        TargetError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn or(&mut self) -> Result<Node, TargetError> {
        let mut items = vec![self.and()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            items.push(self.and()?);
        }
        Ok(if items.len() == 1 {
            items.remove(0)
        } else {
            Node::Or(items)
        })
    }

    fn and(&mut self) -> Result<Node, TargetError> {
        let mut items = vec![self.unary()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 {
            items.remove(0)
        } else {
            Node::And(items)
        })
    }

    fn unary(&mut self) -> Result<Node, TargetError> {
        match self.next() {
            Some(Tok::Not) => Ok(Node::Not(Box::new(self.unary()?))),
            Some(Tok::Open) => {
                let n = self.or()?;
                match self.next() {
                    Some(Tok::Close) => Ok(n),
                    _ => Err(self.err("expected `)`")),
                }
            }
            Some(Tok::Word(path)) => {
                let negated = match self.next() {
                    Some(Tok::Eq) => false,
                    Some(Tok::Ne) => true,
                    _ => return Err(self.err("expected `==` or `!=`")),
                };
                let value = match self.next() {
                    Some(Tok::Word(v)) => v,
                    _ => return Err(self.err("expected a value")),
                };
                Ok(Node::Atom(atom(&path, &value, negated)?))
            }
            _ => Err(self.err("expected a comparison")),
        }
    }
}

fn atom(path: &str, value: &str, negated: bool) -> Result<Atom, TargetError> {
    let (id, field) = match path.split_once('.') {
        Some((id, f)) => (id, Some(f)),
        None => (path, None),
    };
    let pid: ProbeId = id.parse().map_err(|_| TargetError::UnknownProbe(id.into()))?;
    if !pid.is_deterministic() {
        return Err(TargetError::Timing(id.into()));
    }
    let kind = pid.kind();
    let bad_field = |f: &str| TargetError::Field(format!("probe {id} ({kind}) has no field {f:?}"));
    let bad_value = |what: &str| TargetError::Field(format!("{path} needs {what}, got {value:?}"));
    let parse_bool = || match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad_value("true or false")),
    };
    let (field, want) = match (field, kind) {
        (None, _) => (
            Field::Whole,
            Want::Expect(Expectation::parse(kind, value).map_err(TargetError::Field)?),
        ),
        (Some(f @ ("mantissa_bits" | "base")), PayloadKind::IntPair) => (
            if f == "base" { Field::Base } else { Field::MantissaBits },
            Want::Int(value.parse().map_err(|_| bad_value("an integer"))?),
        ),
        (Some("anomalous"), PayloadKind::IntPair) => (Field::Anomalous, Want::Bool(parse_bool()?)),
        (Some(f), PayloadKind::Bools) => {
            let i: usize = f.parse().map_err(|_| bad_field(f))?;
            (Field::Index(i), Want::Bool(parse_bool()?))
        }
        (Some(f), _) => return Err(bad_field(f)),
    };
    Ok(Atom {
        probe_id: id.into(),
        field,
        negated,
        want,
    })
}

impl TargetSpec {
    pub fn parse(predicate: &str) -> Result<Self, TargetError> {
        let toks = tokenize(predicate)?;
        if toks.is_empty() {
            return Ok(Self { root: Node::True });
        }
        let mut p = Parser { toks, pos: 0 };
        let root = p.or()?;
        if p.pos != p.toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(Self { root })
    }

    pub fn eval(&self, fp: &Fingerprint) -> bool {
        self.root.eval(fp)
    }
}

/// Parses `predicate` and evaluates it on `fp`.
pub fn matches_target(fp: &Fingerprint, predicate: &str) -> Result<bool, TargetError> {
    Ok(TargetSpec::parse(predicate)?.eval(fp))
}
