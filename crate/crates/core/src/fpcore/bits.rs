//! Exact bit-level capture of floating-point results.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported encoding width. Emulated formats top out at
/// 1 + 15 exponent bits + 63 trailing significand bits = 79.
pub const MAX_WIDTH: u32 = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("unsupported width {0} (expected 1..={MAX_WIDTH})")]
    Width(u32),
    #[error("expected {expected} hex digits for width {width}, found {found}")]
    Length { width: u32, expected: usize, found: usize },
    #[error("invalid hex digit {0:?}")]
    Digit(char),
    #[error("value does not fit in {0} bits")]
    Overflow(u32),
    #[error("malformed bit-pattern token {0:?}")]
    Token(String),
    #[error("width {0} cannot be decoded as a native float")]
    NotNative(u32),
}

/// Interchange encoding of one floating-point value: a bit width and the
/// lowercase, zero-padded, big-endian hex rendering of those bits.
///
/// Widths 32 and 64 are the IEEE binary32/binary64 formats. Emulated
/// formats use `exponent_bits + significand_bits` (sign, biased exponent,
/// trailing significand), rendered with `ceil(width / 4)` digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitPattern {
    width: u32,
    hex: String,
}

fn hex_len(width: u32) -> usize {
    width.div_ceil(4) as usize
}

impl BitPattern {
    pub fn from_raw(width: u32, bits: u128) -> Result<Self, EncodingError> {
        if width == 0 || width > MAX_WIDTH {
            return Err(EncodingError::Width(width));
        }
        if width < 128 && bits >> width != 0 {
            return Err(EncodingError::Overflow(width));
        }
        let digits = hex_len(width);
        Ok(Self {
            width,
            hex: format!("{bits:0digits$x}"),
        })
    }

    pub fn from_f64(x: f64) -> Self {
        Self {
            width: 64,
            hex: format!("{:016x}", x.to_bits()),
        }
    }

    pub fn from_f32(x: f32) -> Self {
        Self {
            width: 32,
            hex: format!("{:08x}", x.to_bits()),
        }
    }

    /// Builds a pattern from an explicit width and hex string.
    pub fn from_hex(width: u32, hex: &str) -> Result<Self, EncodingError> {
        if width == 0 || width > MAX_WIDTH {
            return Err(EncodingError::Width(width));
        }
        let expected = hex_len(width);
        if hex.len() != expected {
            return Err(EncodingError::Length {
                width,
                expected,
                found: hex.len(),
            });
        }
        if let Some(c) = hex.chars().find(|c| !matches!(c, '0'..='9' | 'a'..='f')) {
            return Err(EncodingError::Digit(c));
        }
        let bits = u128::from_str_radix(hex, 16).map_err(|_| EncodingError::Token(hex.into()))?;
        if width < 128 && bits >> width != 0 {
            return Err(EncodingError::Overflow(width));
        }
        Ok(Self {
            width,
            hex: hex.to_owned(),
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn hex(&self) -> &str {
        &self.hex
    }

    pub fn bits(&self) -> u128 {
        // validated at construction
        u128::from_str_radix(&self.hex, 16).unwrap_or(0)
    }

    pub fn to_f64(&self) -> Result<f64, EncodingError> {
        match self.width {
            64 => Ok(f64::from_bits(self.bits() as u64)),
            w => Err(EncodingError::NotNative(w)),
        }
    }

    pub fn to_f32(&self) -> Result<f32, EncodingError> {
        match self.width {
            32 => Ok(f32::from_bits(self.bits() as u32)),
            w => Err(EncodingError::NotNative(w)),
        }
    }

    /// True when the low `4 * suffix.len()` bits render as `suffix`.
    pub fn has_hex_suffix(&self, suffix: &str) -> bool {
        let suffix = suffix.to_ascii_lowercase();
        if suffix.len() > self.hex.len() {
            let (head, tail) = suffix.split_at(suffix.len() - self.hex.len());
            head.chars().all(|c| c == '0') && tail == self.hex
        } else {
            self.hex.ends_with(&suffix)
        }
    }

    /// Folds the pattern into 64 bits (XOR of 64-bit limbs from the bottom).
    pub fn fold64(&self) -> u64 {
        let bits = self.bits();
        (bits as u64) ^ ((bits >> 64) as u64)
    }
}

impl fmt::Display for BitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}:{}", self.width, self.hex)
    }
}

impl FromStr for BitPattern {
    type Err = EncodingError;

    /// Parses the `b<width>:<hex>` token form.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || EncodingError::Token(s.to_owned());
        let rest = s.strip_prefix('b').ok_or_else(bad)?;
        let (w, hex) = rest.split_once(':').ok_or_else(bad)?;
        let width: u32 = w.parse().map_err(|_| bad())?;
        Self::from_hex(width, hex)
    }
}

/// Encodes a binary64 value.
pub fn to_bits(x: f64) -> BitPattern {
    BitPattern::from_f64(x)
}

/// Encodes a binary32 value.
pub fn to_bits32(x: f32) -> BitPattern {
    BitPattern::from_f32(x)
}

/// Decodes a 64-bit pattern.
pub fn from_bits(p: &BitPattern) -> Result<f64, EncodingError> {
    p.to_f64()
}

/// Decodes a 32-bit pattern.
pub fn from_bits32(p: &BitPattern) -> Result<f32, EncodingError> {
    p.to_f32()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encodes_one_and_negative_zero() {
        assert_eq!(to_bits(1.0).hex(), "3ff0000000000000");
        assert_eq!(to_bits(-0.0).hex(), "8000000000000000");
        assert_eq!(to_bits(1.0).to_string(), "b64:3ff0000000000000");
        assert_eq!(to_bits32(1.0).to_string(), "b32:3f800000");
    }

    #[test]
    fn decodes_quiet_nan() {
        let p: BitPattern = "b64:7ff8000000000000".parse().unwrap();
        let x = from_bits(&p).unwrap();
        assert!(x.is_nan());
        assert_eq!(x.to_bits(), 0x7ff8_0000_0000_0000);
        assert_eq!(from_bits(&"b64:3ff0000000000000".parse().unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(
            BitPattern::from_hex(64, "3ff"),
            Err(EncodingError::Length { .. })
        ));
        assert!(matches!(
            BitPattern::from_hex(32, "3F800000"),
            Err(EncodingError::Digit('F'))
        ));
        assert!(matches!(
            BitPattern::from_hex(32, "3g800000"),
            Err(EncodingError::Digit('g'))
        ));
        assert!("x64:00".parse::<BitPattern>().is_err());
        assert!("b64".parse::<BitPattern>().is_err());
        // 79-bit pattern: top digit may only use 3 bits
        assert!(matches!(
            BitPattern::from_hex(79, "80000000000000000000"),
            Err(EncodingError::Overflow(79))
        ));
        assert!(BitPattern::from_hex(79, "7fffffffffffffffffff").is_ok());
    }

    #[test]
    fn odd_widths_pad_to_whole_digits() {
        let p = BitPattern::from_raw(79, 1).unwrap();
        assert_eq!(p.hex().len(), 20);
        let q = BitPattern::from_raw(16, 0x3c00).unwrap();
        assert_eq!(q.to_string(), "b16:3c00");
        assert!(q.to_f64().is_err());
    }

    #[test]
    fn suffix_matching() {
        let p = BitPattern::from_hex(64, "bfeaa18947257756").unwrap();
        assert!(p.has_hex_suffix("47257756"));
        assert!(p.has_hex_suffix("7756"));
        assert!(!p.has_hex_suffix("47257757"));
        let q = BitPattern::from_hex(64, "3fe3cda4099f9067").unwrap();
        assert!(q.has_hex_suffix("99f9067"));
    }
}
