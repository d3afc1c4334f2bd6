//! Linear rules over the 5×5 neighborhood.
//!
//! A rule is a 25-bit number; each set bit selects one neighbor, and the next
//! state of a cell is the XOR of the selected neighbors. The bit-to-offset
//! table below is laid out exactly as the neighborhood is drawn, with the top
//! row at `di = -2` and the left column at `dj = -2`:
//!
//! ```text
//!  1048576  2097152  4194304  8388608 16777216
//!   524288       64      128      256      512
//!   262144       32        1        2     1024
//!   131072       16        8        4     2048
//!    65536    32768    16384     8192     4096
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RULE_BITS: u32 = 25;
/// Largest valid rule number, `2^25 - 1`.
pub const MAX_RULE: u32 = (1 << RULE_BITS) - 1;

/// The six two-term rules exposed as the `paper` preset.
pub const PAPER_RULES: [LinearRule; 6] = [
    LinearRule(1025),
    LinearRule(1040),
    LinearRule(1088),
    LinearRule(131073),
    LinearRule(262145),
    LinearRule(262176),
];

/// Basic rule values indexed by `(di + 2, dj + 2)`.
const LAYOUT: [[u32; 5]; 5] = [
    [1048576, 2097152, 4194304, 8388608, 16777216],
    [524288, 64, 128, 256, 512],
    [262144, 32, 1, 2, 1024],
    [131072, 16, 8, 4, 2048],
    [65536, 32768, 16384, 8192, 4096],
];

/// Offsets indexed by bit position, derived from `LAYOUT` at compile time.
const OFFSETS: [NeighborOffset; 25] = {
    let mut table = [NeighborOffset { di: 0, dj: 0 }; 25];
    let mut r = 0;
    while r < 5 {
        let mut c = 0;
        while c < 5 {
            let bit = LAYOUT[r][c].trailing_zeros() as usize;
            table[bit] = NeighborOffset {
                di: r as i8 - 2,
                dj: c as i8 - 2,
            };
            c += 1;
        }
        r += 1;
    }
    table
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NeighborOffset {
    pub di: i8,
    pub dj: i8,
}

impl NeighborOffset {
    pub fn new(di: i8, dj: i8) -> Result<Self> {
        if !(-2..=2).contains(&di) || !(-2..=2).contains(&dj) {
            return Err(Error::Dimension(format!(
                "offset ({di}, {dj}) outside the 5x5 window"
            )));
        }
        Ok(NeighborOffset { di, dj })
    }

    /// The basic rule value that selects this offset.
    pub fn basic(self) -> u32 {
        LAYOUT[(self.di + 2) as usize][(self.dj + 2) as usize]
    }
}

/// Looks up the neighbor selected by a single-bit rule value.
pub fn offset_of_basic(basic: u32) -> Result<NeighborOffset> {
    if !basic.is_power_of_two() || basic > MAX_RULE {
        return Err(Error::InvalidBasic(basic as u64));
    }
    Ok(OFFSETS[basic.trailing_zeros() as usize])
}

/// All 25 basic rule values in ascending order.
pub fn basics() -> impl Iterator<Item = u32> {
    (0..RULE_BITS).map(|b| 1u32 << b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct LinearRule(u32);

impl LinearRule {
    pub fn new(number: u32) -> Result<Self> {
        if number > MAX_RULE {
            return Err(Error::OutOfRange(number as u64));
        }
        Ok(LinearRule(number))
    }

    #[inline]
    pub fn number(self) -> u32 {
        self.0
    }

    /// Number of XOR terms.
    #[inline]
    pub fn term_count(self) -> u32 {
        self.0.count_ones()
    }

    /// The basic rules whose XOR is this rule, largest first.
    pub fn decompose(self) -> Vec<u32> {
        let mut terms: Vec<u32> = self.basics().collect();
        terms.reverse();
        terms
    }

    /// Basic rules in ascending order.
    pub fn basics(self) -> impl Iterator<Item = u32> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let low = bits & bits.wrapping_neg();
            bits ^= low;
            Some(low)
        })
    }

    /// Neighbor offsets read by this rule, in ascending basic order.
    pub fn offsets(self) -> impl Iterator<Item = NeighborOffset> {
        self.basics().map(|b| OFFSETS[b.trailing_zeros() as usize])
    }

    /// Sums distinct basic rules into one rule.
    pub fn compose(basics: &[u32]) -> Result<Self> {
        let mut number = 0u32;
        for &b in basics {
            if !b.is_power_of_two() || b > MAX_RULE || number & b != 0 {
                return Err(Error::InvalidBasic(b as u64));
            }
            number |= b;
        }
        Ok(LinearRule(number))
    }

    pub fn conforms_to(self, model: NeighborhoodModel) -> bool {
        self.0 & !model.mask() == 0
    }
}

impl From<LinearRule> for u32 {
    fn from(r: LinearRule) -> u32 {
        r.0
    }
}

impl TryFrom<u32> for LinearRule {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        LinearRule::new(n)
    }
}

impl fmt::Display for LinearRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Accepts either a decimal rule number (`"262176"`) or a `+`-separated list
/// of distinct basic rules (`"262144+32"`).
impl FromStr for LinearRule {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.contains('+') {
            let terms = text
                .split('+')
                .map(parse_number)
                .collect::<Result<Vec<u64>>>()?;
            let mut basics = Vec::with_capacity(terms.len());
            for t in terms {
                if t > MAX_RULE as u64 {
                    return Err(Error::OutOfRange(t));
                }
                basics.push(t as u32);
            }
            LinearRule::compose(&basics)
        } else {
            let n = parse_number(text)?;
            if n > MAX_RULE as u64 {
                return Err(Error::OutOfRange(n));
            }
            Ok(LinearRule(n as u32))
        }
    }
}

pub fn parse_rule(text: &str) -> Result<LinearRule> {
    text.parse()
}

fn parse_number(s: &str) -> Result<u64> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!(
            "expected a decimal rule number, got {s:?}"
        )));
    }
    // Saturate so huge literals still report as out of range.
    Ok(s.parse::<u64>().unwrap_or(u64::MAX))
}

/// Classical neighborhood shapes as subsets of the 5×5 window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NeighborhoodModel {
    VonNeumann,
    Moore,
    ExtendedMoore,
}

impl NeighborhoodModel {
    /// Bitwise OR of the basic rules inside this neighborhood.
    pub fn mask(self) -> u32 {
        OFFSETS
            .iter()
            .enumerate()
            .filter(|(_, o)| self.contains(**o))
            .fold(0, |m, (bit, _)| m | (1 << bit))
    }

    pub fn contains(self, o: NeighborOffset) -> bool {
        let (di, dj) = (o.di.unsigned_abs(), o.dj.unsigned_abs());
        match self {
            NeighborhoodModel::VonNeumann => di + dj <= 1,
            NeighborhoodModel::Moore => di <= 1 && dj <= 1,
            NeighborhoodModel::ExtendedMoore => di <= 2 && dj <= 2,
        }
    }
}
