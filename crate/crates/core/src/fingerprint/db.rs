//! Signature database and weighted matching.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::{
    digest_lines, numbered_lines, parse_digest_value, parse_version, probe_fields, Fingerprint, FingerprintError,
    SCHEMA_VERSION,
};
use crate::emul::EmuValue;
use crate::fpcore::bits::BitPattern;
use crate::probes::{render_decimal, Backend, Payload, PayloadKind, ProbeId};

pub const DB_MAGIC: &str = "procscope-db";

pub const WEIGHT_EXACT: u32 = 4;
pub const WEIGHT_SUFFIX: u32 = 4;
pub const WEIGHT_DECIMAL: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    PaperTable,
    Measured,
    SyntheticEmulated,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Self::PaperTable => "paper-table",
            Self::Measured => "measured",
            Self::SyntheticEmulated => "synthetic-emulated",
        }
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Self::PaperTable, Self::Measured, Self::SyntheticEmulated]
            .into_iter()
            .find(|p| p.tag() == s)
            .ok_or_else(|| format!("unknown provenance {s:?}"))
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// What a signature expects of one probe.
#[derive(Debug, Clone, PartialEq)]
pub enum Expectation {
    /// `*`: no opinion.
    Any,
    /// The canonical payload value, matched exactly.
    Exact(Payload),
    /// `dec:<prefix>[,<prefix>]`: truncated decimal rendering of each bit
    /// pattern, as printed in a hand-made table. Weak evidence.
    Decimal(Vec<String>),
    /// `lo:<hex>[,<hex>]`: trailing hex digits of each bit pattern.
    Suffix(Vec<String>),
}

/// Significant digits in a rendered decimal such as `-0.837` or `8.05e8`.
fn significant_digits(prefix: &str) -> usize {
    let mant = prefix.split(['e', 'E']).next().unwrap_or("");
    let digits: String = mant.chars().filter(char::is_ascii_digit).collect();
    digits.trim_start_matches('0').len().max(1)
}

fn valid_decimal(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    let (mant, exp) = match body.split_once('e') {
        Some((m, e)) => (m, Some(e)),
        None => (body, None),
    };
    let mant_ok = !mant.is_empty()
        && mant.chars().any(|c| c.is_ascii_digit())
        && mant.chars().all(|c| c.is_ascii_digit() || c == '.')
        && mant.matches('.').count() <= 1;
    let exp_ok = exp.is_none_or(|e| e.strip_prefix('-').unwrap_or(e).parse::<u32>().is_ok());
    mant_ok && exp_ok || matches!(s, "nan" | "inf" | "-inf")
}

/// Decodes a bit pattern to the nearest binary64 value, using the
/// backend's format when the width is not a native one.
pub fn decode_pattern(p: &BitPattern, backend: Option<&Backend>) -> Option<f64> {
    if let Some(Backend::Emulated(cfg)) = backend {
        if cfg.width() == p.width() {
            return EmuValue::from_bits(p, cfg).ok().map(|v| v.to_f64(cfg));
        }
    }
    match p.width() {
        64 => p.to_f64().ok(),
        32 => p.to_f32().ok().map(f64::from),
        _ => None,
    }
}

impl Expectation {
    pub fn default_weight(&self) -> u32 {
        match self {
            Self::Any => 0,
            Self::Exact(_) => WEIGHT_EXACT,
            Self::Suffix(_) => WEIGHT_SUFFIX,
            Self::Decimal(_) => WEIGHT_DECIMAL,
        }
    }

    /// `0` wildcard, `1` exact, `2` decimal, `3` suffix. A class may hold
    /// one expectation of each form per probe.
    pub fn form(&self) -> u8 {
        match self {
            Self::Any => 0,
            Self::Exact(_) => 1,
            Self::Decimal(_) => 2,
            Self::Suffix(_) => 3,
        }
    }

    pub fn is_weak(&self) -> bool {
        matches!(self, Self::Decimal(_))
    }

    /// Parses an expectation token for a probe of the given kind.
    pub fn parse(kind: PayloadKind, token: &str) -> Result<Self, String> {
        if token == "*" {
            return Ok(Self::Any);
        }
        let patterns = match kind {
            PayloadKind::Bits | PayloadKind::Residual => 1,
            PayloadKind::ResidualPair => 2,
            _ => 0,
        };
        let list = |body: &str| -> Result<Vec<String>, String> {
            let items: Vec<String> = body.split(',').map(str::to_owned).collect();
            if patterns == 0 || items.len() != patterns {
                Err(format!("{token:?} needs {patterns} item(s) for a {kind} probe"))
            } else {
                Ok(items)
            }
        };
        if let Some(body) = token.strip_prefix("dec:") {
            let items = list(body)?;
            if let Some(bad) = items.iter().find(|s| !valid_decimal(s)) {
                return Err(format!("bad decimal prefix {bad:?}"));
            }
            return Ok(Self::Decimal(items));
        }
        if let Some(body) = token.strip_prefix("lo:") {
            let items = list(body)?;
            if let Some(bad) = items
                .iter()
                .find(|s| s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)))
            {
                return Err(format!("bad hex suffix {bad:?}"));
            }
            return Ok(Self::Suffix(items));
        }
        Payload::parse(kind.tag(), token)
            .map(Self::Exact)
            .map_err(|e| e.to_string())
    }

    pub fn token(&self) -> String {
        match self {
            Self::Any => "*".into(),
            Self::Exact(p) => p.canonical_value(),
            Self::Decimal(v) => format!("dec:{}", v.join(",")),
            Self::Suffix(v) => format!("lo:{}", v.join(",")),
        }
    }

    /// Whether `payload` meets this expectation. `backend` is used to
    /// decode non-native bit patterns for decimal prefixes.
    pub fn matches(&self, payload: &Payload, backend: Option<&Backend>) -> bool {
        match self {
            Self::Any => true,
            Self::Exact(p) => p == payload,
            Self::Suffix(v) => {
                let ps = payload.patterns();
                ps.len() == v.len() && ps.iter().zip(v).all(|(p, s)| p.has_hex_suffix(s))
            }
            Self::Decimal(v) => {
                let ps = payload.patterns();
                ps.len() == v.len()
                    && ps.iter().zip(v).all(|(p, s)| {
                        decode_pattern(p, backend).is_some_and(|x| render_decimal(x, significant_digits(s)) == *s)
                    })
            }
        }
    }
}

/// One class of the signature database.
#[derive(Debug, Clone, PartialEq)]
pub struct DbEntry {
    pub class: String,
    pub provenance: Provenance,
    /// `(probe_id, expectation, weight)` in canonical probe order. A probe
    /// may appear once per expectation form.
    pub expected: Vec<(String, Expectation, u32)>,
}

impl DbEntry {
    pub fn new(class: impl Into<String>, provenance: Provenance) -> Self {
        Self {
            class: class.into(),
            provenance,
            expected: Vec::new(),
        }
    }

    /// Adds an expectation with its default weight.
    pub fn expect(mut self, probe_id: &str, e: Expectation) -> Self {
        let w = e.default_weight();
        self.expected.push((probe_id.to_owned(), e, w));
        self
    }

    fn validate(&self) -> Result<(), String> {
        if self.class.is_empty() || self.class.chars().any(|c| c.is_whitespace() || c == '=') {
            return Err(format!("bad class name {:?}", self.class));
        }
        let mut seen = BTreeSet::new();
        for (id, e, _) in &self.expected {
            let pid: ProbeId = id.parse().map_err(|_| format!("unknown probe {id:?}"))?;
            if !pid.is_deterministic() {
                return Err(format!("{}: probe {id} cannot be matched", self.class));
            }
            if !seen.insert((pid.rank(), e.form())) {
                return Err(format!("{}: duplicate probe {id}", self.class));
            }
            if let Expectation::Exact(p) = e {
                if p.kind() != pid.kind() && p.kind() != PayloadKind::Error {
                    return Err(format!("{}: probe {id} expects kind {}", self.class, pid.kind()));
                }
            }
        }
        Ok(())
    }
}

/// Named expected-result profiles.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignatureDb {
    entries: Vec<DbEntry>,
}

impl SignatureDb {
    pub fn new(mut entries: Vec<DbEntry>) -> Result<Self, FingerprintError> {
        let mut names = BTreeSet::new();
        for e in &entries {
            e.validate().map_err(FingerprintError::Schema)?;
            if !names.insert(e.class.clone()) {
                return Err(FingerprintError::Schema(format!("duplicate class {}", e.class)));
            }
        }
        for e in &mut entries {
            e.expected
                .sort_by_key(|(id, _, _)| id.parse::<ProbeId>().map(|p| p.rank()).unwrap_or(usize::MAX));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[DbEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, class: &str) -> Option<&DbEntry> {
        self.entries.iter().find(|e| e.class == class)
    }

    fn lines(&self) -> Vec<String> {
        let mut lines = vec![format!("{DB_MAGIC} v{SCHEMA_VERSION}")];
        for e in &self.entries {
            lines.push(format!("class={} provenance={}", e.class, e.provenance));
            for (id, exp, w) in &e.expected {
                let kind: ProbeId = id.parse().expect("validated id");
                let mut l = format!("probe={id} kind={} value={}", kind.kind(), exp.token());
                if *w != exp.default_weight() {
                    l.push_str(&format!(" weight={w}"));
                }
                lines.push(l);
            }
        }
        lines
    }

    pub fn serialize(&self) -> String {
        let lines = self.lines();
        let mut out = String::new();
        for l in &lines {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str(&format!("digest={}\n", digest_lines(&lines)));
        out
    }

    pub fn parse(text: &str) -> Result<Self, FingerprintError> {
        let mut lines = numbered_lines(text)?;
        let (n, head) = lines
            .next()
            .ok_or_else(|| FingerprintError::parse(1, "empty document"))?;
        let parts: Vec<&str> = head.split(' ').collect();
        if parts.len() != 2 {
            return Err(FingerprintError::parse(n, "header must be `procscope-db v<N>`"));
        }
        parse_version(n, DB_MAGIC, parts[0], parts[1])?;
        let mut entries: Vec<DbEntry> = Vec::new();
        let mut stated = None;
        for (n, line) in lines {
            if stated.is_some() {
                return Err(FingerprintError::parse(n, "content after digest line"));
            }
            if let Some(d) = line.strip_prefix("digest=") {
                stated = Some(parse_digest_value(n, d)?);
            } else if line.starts_with("class=") {
                let fs = super::fields(n, line)?;
                if fs.len() != 2 || fs[1].0 != "provenance" {
                    return Err(FingerprintError::parse(n, "expected `class=<name> provenance=<tag>`"));
                }
                let prov = fs[1].1.parse().map_err(|m: String| FingerprintError::parse(n, m))?;
                entries.push(DbEntry::new(fs[0].1, prov));
            } else {
                let entry = entries
                    .last_mut()
                    .ok_or_else(|| FingerprintError::parse(n, "probe line outside a class block"))?;
                let (id, kind, value, rest) = probe_fields(n, line)?;
                let pid: ProbeId = id.parse().expect("checked by probe_fields");
                if kind != pid.kind().tag() {
                    return Err(FingerprintError::parse(
                        n,
                        format!("probe {id} has kind {}", pid.kind()),
                    ));
                }
                let exp = Expectation::parse(pid.kind(), value).map_err(|m| FingerprintError::parse(n, m))?;
                let mut weight = exp.default_weight();
                for (k, v) in rest {
                    match k {
                        "weight" => weight = v.parse().map_err(|_| FingerprintError::parse(n, "bad weight"))?,
                        _ => return Err(FingerprintError::parse(n, format!("unexpected field {k:?}"))),
                    }
                }
                entry.expected.push((id.to_owned(), exp, weight));
            }
        }
        let stated = stated.ok_or_else(|| FingerprintError::parse(text.lines().count(), "missing digest line"))?;
        let db = Self::new(entries)?;
        let actual = digest_lines(&db.lines());
        if actual != stated {
            return Err(FingerprintError::DigestMismatch { stated, actual });
        }
        Ok(db)
    }
}

/// Score of one class against a fingerprint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassScore {
    pub class: String,
    pub provenance: Provenance,
    pub score: u32,
    pub max_score: u32,
    pub matched: usize,
    /// Non-wildcard expectations.
    pub total: usize,
    /// Matches that rest only on decimal prefixes.
    pub weak: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Class(String),
    Ambiguous,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Class(c) => f.write_str(c),
            Self::Ambiguous => f.write_str("ambiguous"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchReport {
    pub ranked: Vec<ClassScore>,
    pub verdict: Verdict,
}

impl MatchReport {
    pub fn is_ambiguous(&self) -> bool {
        self.verdict == Verdict::Ambiguous
    }

    pub fn top(&self) -> &ClassScore {
        &self.ranked[0]
    }
}

impl fmt::Display for MatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<4} {:<28} {:<19} {:>9} {:>9} {:>4}",
            "rank", "class", "provenance", "score", "matched", "weak"
        )?;
        for (i, c) in self.ranked.iter().enumerate() {
            writeln!(
                f,
                "{:<4} {:<28} {:<19} {:>9} {:>9} {:>4}",
                i + 1,
                c.class,
                c.provenance.tag(),
                format!("{}/{}", c.score, c.max_score),
                format!("{}/{}", c.matched, c.total),
                c.weak
            )?;
        }
        write!(f, "verdict={}", self.verdict)
    }
}

/// Scores every class: the sum of weights of the expectations the
/// fingerprint meets. Ranked by score, then class name.
pub fn match_fingerprint(fp: &Fingerprint, db: &SignatureDb) -> Result<MatchReport, FingerprintError> {
    if db.is_empty() {
        return Err(FingerprintError::Config("signature database is empty".into()));
    }
    let backend = fp.backend_spec();
    let mut ranked: Vec<ClassScore> = db
        .entries()
        .iter()
        .map(|e| {
            let mut s = ClassScore {
                class: e.class.clone(),
                provenance: e.provenance,
                score: 0,
                max_score: 0,
                matched: 0,
                total: 0,
                weak: 0,
            };
            for (id, exp, w) in &e.expected {
                if *exp == Expectation::Any {
                    continue;
                }
                s.total += 1;
                s.max_score += w;
                if fp.get(id).is_some_and(|p| exp.matches(p, backend.as_ref())) {
                    s.matched += 1;
                    s.score += w;
                    if exp.is_weak() {
                        s.weak += 1;
                    }
                }
            }
            s
        })
        .collect();
    ranked.sort_by(|a, b| match b.score.cmp(&a.score) {
        Ordering::Equal => a.class.cmp(&b.class),
        o => o,
    });
    let verdict = match ranked.get(1) {
        Some(second) if second.score == ranked[0].score => Verdict::Ambiguous,
        _ => Verdict::Class(ranked[0].class.clone()),
    };
    Ok(MatchReport { ranked, verdict })
}
