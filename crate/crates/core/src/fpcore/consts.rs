//! Truncated decimal approximations of π used by the sine probes.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PiConstant {
    Pi1,
    Pi2,
    Pi3,
    Pi4,
}

impl PiConstant {
    pub const ALL: [PiConstant; 4] = [Self::Pi1, Self::Pi2, Self::Pi3, Self::Pi4];

    /// Decimal literal exactly as a C test program would spell it.
    pub fn literal(self) -> &'static str {
        match self {
            Self::Pi1 => "3.141592653",
            Self::Pi2 => "3.141592653589",
            Self::Pi3 => "3.141592653589793",
            Self::Pi4 => "3.1415926535897932385",
        }
    }

    /// Round-to-nearest-even binary64 value of the literal.
    pub fn value(self) -> f64 {
        // std's parser is correctly rounded
        self.literal().parse().expect("static literal")
    }

    /// Lowercase tag used in probe identifiers (`pi1`..`pi4`).
    pub fn tag(self) -> &'static str {
        match self {
            Self::Pi1 => "pi1",
            Self::Pi2 => "pi2",
            Self::Pi3 => "pi3",
            Self::Pi4 => "pi4",
        }
    }
}

impl fmt::Display for PiConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PiConstant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown pi constant {s:?}"))
    }
}
