use std::fmt;

use thiserror::Error;

use crate::fpcore::bits::{BitPattern, EncodingError};

/// Stable payload type tags used in the fingerprint text format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PayloadKind {
    Bool,
    Bools,
    Bits,
    IntPair,
    Residual,
    ResidualPair,
    Timing,
    Error,
}

impl PayloadKind {
    pub const ALL: [PayloadKind; 8] = [
        Self::Bool,
        Self::Bools,
        Self::Bits,
        Self::IntPair,
        Self::Residual,
        Self::ResidualPair,
        Self::Timing,
        Self::Error,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Bool => "bool",
            Self::Bools => "bools",
            Self::Bits => "bits",
            Self::IntPair => "int-pair",
            Self::Residual => "residual",
            Self::ResidualPair => "residual-pair",
            Self::Timing => "timing",
            Self::Error => "error",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == s)
    }
}

impl fmt::Display for PayloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Summary of the popcount timing probe. Times are nanoseconds per full
/// pass over the input sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingStats {
    pub iterations: u64,
    pub software_median_ns: f64,
    pub software_iqr_ns: f64,
    pub hardware_median_ns: f64,
    pub hardware_iqr_ns: f64,
    /// software median / hardware median
    pub ratio: f64,
    /// Sum of all popcounts; a pure function of the seed and iteration count.
    pub checksum: u64,
    pub hardware_method: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimingOutcome {
    Measured(TimingStats),
    Unsupported,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Bool(bool),
    Bools(Vec<bool>),
    Bits(BitPattern),
    /// Gentleman result: `(mantissa_bits, base)`; `anomalous` when an
    /// iteration cap was hit.
    IntPair {
        first: i64,
        second: i64,
        anomalous: bool,
    },
    Residual(BitPattern),
    ResidualPair(BitPattern, BitPattern),
    Timing(TimingOutcome),
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PayloadError {
    #[error("unknown payload kind {0:?}")]
    Kind(String),
    #[error("malformed {kind} value {value:?}")]
    Value { kind: &'static str, value: String },
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b':' | b'/' | b'-') {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02x}"));
        }
    }
    out
}

fn unescape(s: &str) -> Option<String> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let h = s.get(i + 1..i + 3)?;
            out.push(u8::from_str_radix(h, 16).ok()?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).ok()
}

impl Payload {
    pub fn kind(&self) -> PayloadKind {
        match self {
            Self::Bool(_) => PayloadKind::Bool,
            Self::Bools(_) => PayloadKind::Bools,
            Self::Bits(_) => PayloadKind::Bits,
            Self::IntPair { .. } => PayloadKind::IntPair,
            Self::Residual(_) => PayloadKind::Residual,
            Self::ResidualPair(..) => PayloadKind::ResidualPair,
            Self::Timing(_) => PayloadKind::Timing,
            Self::Error(_) => PayloadKind::Error,
        }
    }

    /// Bit patterns carried by this payload, in order.
    pub fn patterns(&self) -> Vec<&BitPattern> {
        match self {
            Self::Bits(p) | Self::Residual(p) => vec![p],
            Self::ResidualPair(a, b) => vec![a, b],
            _ => vec![],
        }
    }

    /// Canonical single-token rendering (no spaces).
    pub fn canonical_value(&self) -> String {
        match self {
            Self::Bool(b) => b.to_string(),
            Self::Bools(v) => v.iter().map(bool::to_string).collect::<Vec<_>>().join(","),
            Self::Bits(p) | Self::Residual(p) => p.to_string(),
            Self::IntPair {
                first,
                second,
                anomalous,
            } => {
                if *anomalous {
                    format!("{first},{second},anomalous")
                } else {
                    format!("{first},{second}")
                }
            }
            Self::ResidualPair(a, b) => format!("{a},{b}"),
            Self::Timing(TimingOutcome::Unsupported) => "unsupported".into(),
            Self::Timing(TimingOutcome::Measured(t)) => format!(
                "n={};sw={}/{};hw={}/{};ratio={};sum={};method={}",
                t.iterations,
                t.software_median_ns,
                t.software_iqr_ns,
                t.hardware_median_ns,
                t.hardware_iqr_ns,
                t.ratio,
                t.checksum,
                escape(&t.hardware_method)
            ),
            Self::Error(msg) => escape(msg),
        }
    }

    pub fn parse(kind: &str, value: &str) -> Result<Self, PayloadError> {
        let kind = PayloadKind::from_tag(kind).ok_or_else(|| PayloadError::Kind(kind.into()))?;
        let bad = || PayloadError::Value {
            kind: kind.tag(),
            value: value.into(),
        };
        let parse_bool = |s: &str| match s {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(bad()),
        };
        Ok(match kind {
            PayloadKind::Bool => Self::Bool(parse_bool(value)?),
            PayloadKind::Bools => {
                if value.is_empty() {
                    Self::Bools(vec![])
                } else {
                    Self::Bools(value.split(',').map(parse_bool).collect::<Result<_, _>>()?)
                }
            }
            PayloadKind::Bits => Self::Bits(value.parse()?),
            PayloadKind::Residual => Self::Residual(value.parse()?),
            PayloadKind::ResidualPair => {
                let (a, b) = value.split_once(',').ok_or_else(bad)?;
                Self::ResidualPair(a.parse()?, b.parse()?)
            }
            PayloadKind::IntPair => {
                let parts: Vec<&str> = value.split(',').collect();
                let anomalous = match parts.len() {
                    2 => false,
                    3 if parts[2] == "anomalous" => true,
                    _ => return Err(bad()),
                };
                Self::IntPair {
                    first: parts[0].parse().map_err(|_| bad())?,
                    second: parts[1].parse().map_err(|_| bad())?,
                    anomalous,
                }
            }
            PayloadKind::Timing => {
                if value == "unsupported" {
                    Self::Timing(TimingOutcome::Unsupported)
                } else {
                    Self::Timing(TimingOutcome::Measured(parse_timing(value).ok_or_else(bad)?))
                }
            }
            PayloadKind::Error => Self::Error(unescape(value).ok_or_else(bad)?),
        })
    }
}

fn parse_timing(value: &str) -> Option<TimingStats> {
    let mut fields = std::collections::HashMap::new();
    for part in value.split(';') {
        let (k, v) = part.split_once('=')?;
        fields.insert(k, v);
    }
    let pair = |k: &str| -> Option<(f64, f64)> {
        let (a, b) = fields.get(k)?.split_once('/')?;
        Some((a.parse().ok()?, b.parse().ok()?))
    };
    let (sm, si) = pair("sw")?;
    let (hm, hi) = pair("hw")?;
    Some(TimingStats {
        iterations: fields.get("n")?.parse().ok()?,
        software_median_ns: sm,
        software_iqr_ns: si,
        hardware_median_ns: hm,
        hardware_iqr_ns: hi,
        ratio: fields.get("ratio")?.parse().ok()?,
        checksum: fields.get("sum")?.parse().ok()?,
        hardware_method: unescape(fields.get("method")?)?,
    })
}

/// One probe's outcome on one backend.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub probe_id: String,
    pub backend: String,
    pub payload: Payload,
}

impl ProbeResult {
    pub fn new(probe_id: impl Into<String>, backend: impl Into<String>, payload: Payload) -> Self {
        Self {
            probe_id: probe_id.into(),
            backend: backend.into(),
            payload,
        }
    }

    pub fn is_timing(&self) -> bool {
        self.payload.kind() == PayloadKind::Timing
    }
}
