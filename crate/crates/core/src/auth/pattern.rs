use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::bitkit::BitVec;

use super::{PatternError, PictureCatalog};

pub const SELECTION_LEN: usize = 3;

/// The 24-bit concatenation of three picture codes, in selection order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GraphicalPattern(BitVec);

impl GraphicalPattern {
    pub const WIDTH: usize = 24;

    pub fn bits(&self) -> &BitVec {
        &self.0
    }

    /// Hex SHA-256 of the pattern bytes; serves as the user id.
    ///
    /// The pattern space is tiny (at most 2^24), so the digest hides the raw
    /// pattern from casual inspection only, not from a brute-force search.
    pub fn digest(&self) -> String {
        let bytes = self.0.to_uint().expect("24 bits").to_be_bytes();
        let mut h = Sha256::new();
        h.update(b"duet/graphical-pattern/v1\0");
        h.update(&bytes[5..]);
        hex::encode(h.finalize())
    }
}

impl TryFrom<BitVec> for GraphicalPattern {
    type Error = PatternError;

    fn try_from(bits: BitVec) -> Result<Self, PatternError> {
        if bits.len() != Self::WIDTH {
            return Err(PatternError::Width(bits.len()));
        }
        Ok(GraphicalPattern(bits))
    }
}

impl FromStr for GraphicalPattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, PatternError> {
        let bits: BitVec = s
            .parse()
            .map_err(|e| PatternError::Catalog(format!("bad pattern text: {e}")))?;
        GraphicalPattern::try_from(bits)
    }
}

impl fmt::Display for GraphicalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for GraphicalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GraphicalPattern({})", self.0)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SelectionPolicy {
    /// Accept the same picture more than once in a selection.
    pub allow_repeats: bool,
}

/// Concatenates the codes of exactly three distinct pictures.
pub fn build_pattern<S: AsRef<str>>(
    catalog: &PictureCatalog,
    selection: &[S],
) -> Result<GraphicalPattern, PatternError> {
    build_pattern_with(catalog, selection, SelectionPolicy::default())
}

pub fn build_pattern_with<S: AsRef<str>>(
    catalog: &PictureCatalog,
    selection: &[S],
    policy: SelectionPolicy,
) -> Result<GraphicalPattern, PatternError> {
    if selection.len() != SELECTION_LEN {
        return Err(PatternError::WrongCount(selection.len()));
    }
    let mut bits = BitVec::default();
    for (i, id) in selection.iter().enumerate() {
        let id = id.as_ref();
        if !policy.allow_repeats && selection[..i].iter().any(|prev| prev.as_ref() == id) {
            return Err(PatternError::RepeatedPicture(id.to_owned()));
        }
        let pic = catalog
            .get(id)
            .ok_or_else(|| PatternError::UnknownPicture(id.to_owned()))?;
        bits = bits.concat(&pic.code);
    }
    GraphicalPattern::try_from(bits)
}

/// Bitwise equality, examined in full regardless of where the first
/// difference lies.
pub fn verify_pattern(stored: &GraphicalPattern, candidate: &GraphicalPattern) -> bool {
    constant_time_eq(
        &stored.0.to_uint().expect("24 bits").to_be_bytes(),
        &candidate.0.to_uint().expect("24 bits").to_be_bytes(),
    )
}

pub(crate) fn constant_time_eq(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}
