//! Fingerprints: the canonical, bit-exact record of one battery run, its
//! line-oriented text format, signature matching, and a boolean gate.
//!
//! Text format (UTF-8, LF line endings):
//!
//! ```text
//! procscope-fp v1 backend=native-binary64
//! created=1700000000
//! probe=sqrt-identity kind=bool value=false
//! probe=gentleman kind=int-pair value=53,2
//! ...
//! digest=<sha256 hex>
//! ```
//!
//! The `created` line is optional. The digest covers the header and every
//! non-timing probe line, each followed by `\n`.

mod db;
mod published;
mod target;

use std::collections::BTreeSet;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use db::{
    decode_pattern, match_fingerprint, ClassScore, DbEntry, Expectation, MatchReport, Provenance, SignatureDb, Verdict,
    DB_MAGIC, WEIGHT_DECIMAL, WEIGHT_EXACT, WEIGHT_SUFFIX,
};
pub use published::{
    from_fingerprint, published_rows, shipped_db, shipped_db_text, synthetic_class_name, synthetic_entry, SHIPPED_DB,
    SHIPPED_SYNTHETIC,
};
pub use target::{matches_target, Atom, Field, TargetError, TargetSpec};

use crate::probes::{Backend, Payload, ProbeId, ProbeResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const FP_MAGIC: &str = "procscope-fp";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FingerprintError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: unsupported schema version {found} (expected {SCHEMA_VERSION})")]
    Version { line: usize, found: String },
    #[error("digest mismatch: file says {stated}, content hashes to {actual}")]
    DigestMismatch { stated: String, actual: String },
    #[error("configuration error: {0}")]
    Config(String),
}

impl FingerprintError {
    fn parse(line: usize, msg: impl Into<String>) -> Self {
        Self::Parse { line, msg: msg.into() }
    }
}

/// Canonical record of every probe result on one backend.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    pub schema_version: u32,
    pub backend: String,
    /// Unix seconds; never part of the digest.
    pub created: Option<u64>,
    results: Vec<ProbeResult>,
}

/// Checks ids and kinds against the registry and sorts into battery order.
fn canonicalize(mut results: Vec<ProbeResult>) -> Result<Vec<ProbeResult>, FingerprintError> {
    let mut seen = BTreeSet::new();
    let mut keyed = Vec::with_capacity(results.len());
    for r in results.drain(..) {
        let id: ProbeId = r
            .probe_id
            .parse()
            .map_err(|_| FingerprintError::Schema(format!("unknown probe {:?}", r.probe_id)))?;
        if !seen.insert(id.rank()) {
            return Err(FingerprintError::Schema(format!("duplicate probe {id}")));
        }
        let kind = r.payload.kind();
        if kind != id.kind() && kind != crate::probes::PayloadKind::Error {
            return Err(FingerprintError::Schema(format!(
                "probe {id} carries a {kind} payload, expected {}",
                id.kind()
            )));
        }
        keyed.push((id.rank(), r));
    }
    for id in ProbeId::registry() {
        if id.is_deterministic() && !seen.contains(&id.rank()) {
            return Err(FingerprintError::Schema(format!("missing probe {id}")));
        }
    }
    keyed.sort_by_key(|(rank, _)| *rank);
    Ok(keyed.into_iter().map(|(_, r)| r).collect())
}

fn check_backend_name(name: &str) -> Result<(), String> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '=') {
        Err(format!("bad backend name {name:?}"))
    } else {
        Ok(())
    }
}

impl Fingerprint {
    /// Builds a fingerprint from battery output. Every deterministic probe
    /// must appear exactly once; the timing probe is optional.
    pub fn assemble(backend: &Backend, results: Vec<ProbeResult>) -> Result<Self, FingerprintError> {
        Self::from_parts(&backend.label(), results)
    }

    /// As [`Fingerprint::assemble`] with a free-form backend name.
    pub fn from_parts(backend: &str, results: Vec<ProbeResult>) -> Result<Self, FingerprintError> {
        check_backend_name(backend).map_err(FingerprintError::Schema)?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            backend: backend.to_owned(),
            created: None,
            results: canonicalize(results)?,
        })
    }

    pub fn with_created(mut self, unix_secs: u64) -> Self {
        self.created = Some(unix_secs);
        self
    }

    pub fn results(&self) -> &[ProbeResult] {
        &self.results
    }

    pub fn get(&self, probe_id: &str) -> Option<&Payload> {
        self.results.iter().find(|r| r.probe_id == probe_id).map(|r| &r.payload)
    }

    /// Results that take part in digests, matching and gating.
    pub fn canonical_results(&self) -> impl Iterator<Item = &ProbeResult> {
        self.results.iter().filter(|r| !r.is_timing())
    }

    /// The backend as a runnable selector, when the name is one.
    pub fn backend_spec(&self) -> Option<Backend> {
        self.backend.parse().ok()
    }

    fn header(&self) -> String {
        format!("{FP_MAGIC} v{} backend={}", self.schema_version, self.backend)
    }

    fn probe_line(r: &ProbeResult) -> String {
        format!(
            "probe={} kind={} value={}",
            r.probe_id,
            r.payload.kind(),
            r.payload.canonical_value()
        )
    }

    /// Lines covered by the digest.
    pub fn canonical_lines(&self) -> Vec<String> {
        let mut lines = vec![self.header()];
        lines.extend(self.canonical_results().map(Self::probe_line));
        lines
    }

    pub fn digest(&self) -> String {
        digest_lines(&self.canonical_lines())
    }

    /// Equal canonical content: backend, version and non-timing payloads.
    pub fn canonical_eq(&self, other: &Self) -> bool {
        self.canonical_lines() == other.canonical_lines()
    }

    pub fn serialize(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        if let Some(t) = self.created {
            out.push_str(&format!("created={t}\n"));
        }
        for r in &self.results {
            out.push_str(&Self::probe_line(r));
            out.push('\n');
        }
        out.push_str(&format!("digest={}\n", self.digest()));
        out
    }

    /// Parses and verifies the digest line.
    pub fn parse(text: &str) -> Result<Self, FingerprintError> {
        let (fp, stated) = Self::parse_unverified(text)?;
        let actual = fp.digest();
        if stated != actual {
            return Err(FingerprintError::DigestMismatch { stated, actual });
        }
        Ok(fp)
    }

    /// Parses without checking the digest; returns the stated digest too.
    pub fn parse_unverified(text: &str) -> Result<(Self, String), FingerprintError> {
        let mut lines = numbered_lines(text)?;
        let (n, head) = lines
            .next()
            .ok_or_else(|| FingerprintError::parse(1, "empty document"))?;
        let (version, backend) = parse_fp_header(n, head)?;
        let mut created = None;
        let mut results = Vec::new();
        let mut stated = None;
        for (n, line) in lines {
            if stated.is_some() {
                return Err(FingerprintError::parse(n, "content after digest line"));
            }
            if let Some(d) = line.strip_prefix("digest=") {
                stated = Some(parse_digest_value(n, d)?);
            } else if let Some(t) = line.strip_prefix("created=") {
                if created.is_some() || !results.is_empty() {
                    return Err(FingerprintError::parse(n, "misplaced created line"));
                }
                created = Some(t.parse().map_err(|_| FingerprintError::parse(n, "bad timestamp"))?);
            } else {
                let (r, extra) = parse_probe_line(n, line, &backend)?;
                if let Some((k, _)) = extra.first() {
                    return Err(FingerprintError::parse(n, format!("unexpected field {k:?}")));
                }
                results.push(r);
            }
        }
        let stated = stated.ok_or_else(|| FingerprintError::parse(text.lines().count(), "missing digest line"))?;
        let mut fp = Self::from_parts(&backend, results)?;
        fp.schema_version = version;
        fp.created = created;
        Ok((fp, stated))
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

pub(crate) fn digest_lines(lines: &[String]) -> String {
    let mut h = Sha256::new();
    for l in lines {
        h.update(l.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

/// Non-empty lines with 1-based numbers; rejects CR and trailing-space noise.
pub(crate) fn numbered_lines(text: &str) -> Result<impl Iterator<Item = (usize, &str)>, FingerprintError> {
    for (i, l) in text.split('\n').enumerate() {
        if l.ends_with('\r') {
            return Err(FingerprintError::parse(i + 1, "CR line ending"));
        }
    }
    Ok(text
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.is_empty()))
}

pub(crate) fn parse_digest_value(n: usize, d: &str) -> Result<String, FingerprintError> {
    if d.len() != 64 || !d.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
        return Err(FingerprintError::parse(n, "digest must be 64 lowercase hex digits"));
    }
    Ok(d.to_owned())
}

/// Parses `magic vN` and checks the version.
pub(crate) fn parse_version(n: usize, magic: &str, token_magic: &str, version: &str) -> Result<u32, FingerprintError> {
    if token_magic != magic {
        return Err(FingerprintError::parse(n, format!("expected {magic} header")));
    }
    let v = version
        .strip_prefix('v')
        .ok_or_else(|| FingerprintError::parse(n, "missing version"))?;
    match v.parse::<u32>() {
        Ok(SCHEMA_VERSION) => Ok(SCHEMA_VERSION),
        _ => Err(FingerprintError::Version {
            line: n,
            found: v.to_owned(),
        }),
    }
}

fn parse_fp_header(n: usize, line: &str) -> Result<(u32, String), FingerprintError> {
    let parts: Vec<&str> = line.split(' ').collect();
    if parts.len() != 3 {
        return Err(FingerprintError::parse(
            n,
            "header must be `procscope-fp v<N> backend=<name>`",
        ));
    }
    let version = parse_version(n, FP_MAGIC, parts[0], parts[1])?;
    let backend = parts[2]
        .strip_prefix("backend=")
        .ok_or_else(|| FingerprintError::parse(n, "missing backend="))?;
    check_backend_name(backend).map_err(|m| FingerprintError::parse(n, m))?;
    Ok((version, backend.to_owned()))
}

/// Splits `key=value` fields separated by single spaces.
pub(crate) fn fields(n: usize, line: &str) -> Result<Vec<(&str, &str)>, FingerprintError> {
    line.split(' ')
        .map(|f| {
            f.split_once('=')
                .ok_or_else(|| FingerprintError::parse(n, format!("malformed field {f:?}")))
        })
        .collect()
}

type Extras<'a> = Vec<(&'a str, &'a str)>;
type ProbeFields<'a> = (&'a str, &'a str, &'a str, Extras<'a>);

/// Parses `probe=<id> kind=<kind> value=<v>`; remaining fields are returned.
pub(crate) fn parse_probe_line<'a>(
    n: usize,
    line: &'a str,
    backend: &str,
) -> Result<(ProbeResult, Extras<'a>), FingerprintError> {
    let (id, kind, value, rest) = probe_fields(n, line)?;
    let payload = Payload::parse(kind, value).map_err(|e| FingerprintError::parse(n, e.to_string()))?;
    Ok((ProbeResult::new(id, backend, payload), rest))
}

/// Raw `(id, kind, value, rest)` of a probe line, id checked against the registry.
pub(crate) fn probe_fields(n: usize, line: &str) -> Result<ProbeFields<'_>, FingerprintError> {
    let fs = fields(n, line)?;
    if fs.len() < 3 || fs[0].0 != "probe" || fs[1].0 != "kind" || fs[2].0 != "value" {
        return Err(FingerprintError::parse(
            n,
            "expected `probe=<id> kind=<kind> value=<value>`",
        ));
    }
    if fs[0].1.parse::<ProbeId>().is_err() {
        return Err(FingerprintError::parse(n, format!("unknown probe {:?}", fs[0].1)));
    }
    Ok((fs[0].1, fs[1].1, fs[2].1, fs[3..].to_vec()))
}

/// One row of a probe-by-probe comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffRow {
    pub probe_id: String,
    pub left: String,
    pub right: String,
}

impl DiffRow {
    pub fn differs(&self) -> bool {
        self.left != self.right
    }
}

/// Compares canonical payloads probe by probe. Timing is skipped.
pub fn diff(a: &Fingerprint, b: &Fingerprint) -> Vec<DiffRow> {
    let mut ids: Vec<ProbeId> = ProbeId::registry()
        .into_iter()
        .filter(ProbeId::is_deterministic)
        .collect();
    ids.sort_by_key(ProbeId::rank);
    ids.into_iter()
        .map(|id| {
            let key = id.to_string();
            let render = |fp: &Fingerprint| {
                fp.get(&key)
                    .map(|p| format!("{}:{}", p.kind(), p.canonical_value()))
                    .unwrap_or_else(|| "-".into())
            };
            DiffRow {
                left: render(a),
                right: render(b),
                probe_id: key,
            }
        })
        .collect()
}
