//! Fixed-length bit vectors and table-driven bit permutations.
//!
//! Bit positions are 1-based everywhere a position is visible to callers:
//! table literals, [`BitVec::bit`], and the textual form, where bit 1 is the
//! leftmost digit. `"1000001100"` is a 10-bit value whose 1st bit is set.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitError {
    #[error("length mismatch: expected {expected} bits, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cannot split a {0}-bit vector into equal halves")]
    OddLength(usize),
    #[error("value {value} does not fit in {width} bits")]
    Overflow { value: u64, width: usize },
    #[error("{0}-bit vector is too wide for an integer conversion")]
    TooWide(usize),
    #[error("invalid character {found:?} at position {position}; expected '0' or '1'")]
    Parse { position: usize, found: char },
    #[error("table entry {entry} at position {position} is outside 1..={input_width}")]
    EntryOutOfRange {
        position: usize,
        entry: usize,
        input_width: usize,
    },
    #[error("table has no entries")]
    EmptyTable,
    #[error("table is not a bijection on 1..={0} and cannot be inverted")]
    NotBijective(usize),
}

/// An ordered, fixed-length sequence of bits.
///
/// Bits are packed most-significant-first into 64-bit words, so bit 1 is the
/// top bit of the first word. Unused trailing bits of the last word are
/// always zero, which keeps derived equality and hashing exact.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in &mut v.words {
            *w = u64::MAX;
        }
        v.clear_tail();
        v
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = BitVec::default();
        for b in bits {
            v.push(b);
        }
        v
    }

    /// Renders `value` as a `width`-bit big-endian vector.
    pub fn from_uint(value: u64, width: usize) -> Result<Self, BitError> {
        if width > WORD {
            return Err(BitError::TooWide(width));
        }
        if width < WORD && value >> width != 0 {
            return Err(BitError::Overflow { value, width });
        }
        let mut v = Self::zeros(width);
        if width > 0 {
            v.words[0] = value << (WORD - width);
        }
        Ok(v)
    }

    /// Big-endian positional value: bit 1 is the most significant.
    pub fn to_uint(&self) -> Result<u64, BitError> {
        match self.len {
            0 => Ok(0),
            n if n <= WORD => Ok(self.words[0] >> (WORD - n)),
            n => Err(BitError::TooWide(n)),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The bit at 1-based `position`.
    ///
    /// Panics when `position` is 0 or past the end.
    pub fn bit(&self, position: usize) -> bool {
        assert!(
            (1..=self.len).contains(&position),
            "bit position {position} out of range 1..={}",
            self.len
        );
        self.get0(position - 1)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get0(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Output bit `i` is input bit `table.entries()[i]`.
    pub fn permute(&self, table: &PermTable) -> Result<BitVec, BitError> {
        self.expect_len(table.input_width())?;
        Ok(BitVec::from_bools(
            table.entries().iter().map(|&src| self.get0(src - 1)),
        ))
    }

    /// Circular left rotation by `k` positions; `k` is reduced modulo the length.
    pub fn rotate_left(&self, k: usize) -> BitVec {
        if self.len == 0 {
            return self.clone();
        }
        let k = k % self.len;
        BitVec::from_bools((0..self.len).map(|i| self.get0((i + k) % self.len)))
    }

    /// Splits an even-length vector into its first and second halves.
    pub fn split(&self) -> Result<(BitVec, BitVec), BitError> {
        if self.len % 2 != 0 {
            return Err(BitError::OddLength(self.len));
        }
        let half = self.len / 2;
        Ok((self.slice(0, half), self.slice(half, self.len)))
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        for b in other.iter() {
            out.push(b);
        }
        out
    }

    pub fn xor(&self, other: &BitVec) -> Result<BitVec, BitError> {
        self.expect_len(other.len)?;
        Ok(BitVec {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// Number of positions at which the two vectors differ.
    pub fn hamming_distance(&self, other: &BitVec) -> Result<usize, BitError> {
        self.expect_len(other.len)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Returns a copy with the bit at 1-based `position` inverted.
    pub fn with_flipped(&self, position: usize) -> BitVec {
        assert!((1..=self.len).contains(&position));
        let mut out = self.clone();
        let i = position - 1;
        out.words[i / WORD] ^= 1 << (WORD - 1 - i % WORD);
        out
    }

    /// Bits `start..end` (0-based, half-open).
    fn slice(&self, start: usize, end: usize) -> BitVec {
        BitVec::from_bools((start..end).map(|i| self.get0(i)))
    }

    fn get0(&self, i: usize) -> bool {
        (self.words[i / WORD] >> (WORD - 1 - i % WORD)) & 1 == 1
    }

    fn push(&mut self, bit: bool) {
        if self.len % WORD == 0 {
            self.words.push(0);
        }
        if bit {
            let i = self.len;
            self.words[i / WORD] |= 1 << (WORD - 1 - i % WORD);
        }
        self.len += 1;
    }

    fn clear_tail(&mut self) {
        let used = self.len % WORD;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX << (WORD - used);
            }
        }
    }

    fn expect_len(&self, expected: usize) -> Result<(), BitError> {
        if self.len == expected {
            Ok(())
        } else {
            Err(BitError::LengthMismatch {
                expected,
                found: self.len,
            })
        }
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.pad(&s)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = BitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                found => Err(BitError::Parse {
                    position: i + 1,
                    found,
                }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitVec::from_bools)
    }
}

impl serde::Serialize for BitVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BitVec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <std::borrow::Cow<'de, str>>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A bit-selection table: output bit `i` takes input bit `entries[i]`.
///
/// Entries are 1-based source positions. A table may repeat entries (an
/// expansion) or omit some (a compression); only tables that are a
/// permutation of `1..=input_width` can be inverted. Tables are validated on
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermTable {
    entries: Vec<usize>,
    input_width: usize,
    bijective: bool,
}

impl PermTable {
    pub fn new(entries: &[usize], input_width: usize) -> Result<Self, BitError> {
        if entries.is_empty() {
            return Err(BitError::EmptyTable);
        }
        if let Some((position, &entry)) = entries
            .iter()
            .enumerate()
            .find(|(_, &e)| e == 0 || e > input_width)
        {
            return Err(BitError::EntryOutOfRange {
                position: position + 1,
                entry,
                input_width,
            });
        }
        let bijective = entries.len() == input_width && {
            let mut seen = vec![false; input_width];
            entries
                .iter()
                .all(|&e| !std::mem::replace(&mut seen[e - 1], true))
        };
        Ok(PermTable {
            entries: entries.to_vec(),
            input_width,
            bijective,
        })
    }

    pub fn identity(width: usize) -> Self {
        let entries: Vec<usize> = (1..=width).collect();
        PermTable::new(&entries, width).expect("identity table is valid")
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        self.entries.len()
    }

    pub fn is_bijective(&self) -> bool {
        self.bijective
    }

    /// The table undoing this one: output position `j` of the inverse names
    /// the position at which source bit `j` landed.
    pub fn invert(&self) -> Result<PermTable, BitError> {
        if !self.bijective {
            return Err(BitError::NotBijective(self.input_width));
        }
        let mut inverse = vec![0; self.input_width];
        for (position, &source) in self.entries.iter().enumerate() {
            inverse[source - 1] = position + 1;
        }
        PermTable::new(&inverse, self.input_width)
    }

    /// Applies the table to the low `input_width` bits of `word`, read
    /// most-significant-first. The packed counterpart of [`BitVec::permute`].
    pub fn apply_word(&self, word: u64) -> u64 {
        let n = self.input_width;
        self.entries
            .iter()
            .fold(0, |acc, &src| (acc << 1) | ((word >> (n - src)) & 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    fn table(entries: &[usize], width: usize) -> PermTable {
        PermTable::new(entries, width).unwrap()
    }

    #[test]
    fn permute_p10_and_expansion() {
        let p10 = table(&[3, 5, 2, 7, 4, 10, 1, 9, 8, 6], 10);
        assert_eq!(bv("1010000010").permute(&p10).unwrap(), bv("1000001100"));
        let ep = table(&[4, 1, 2, 3, 2, 3, 4, 1], 4);
        assert_eq!(bv("1110").permute(&ep).unwrap(), bv("01111101"));
        let v = bv("0110101");
        assert_eq!(v.permute(&PermTable::identity(7)).unwrap(), v);
    }

    #[test]
    fn permute_rejects_width_mismatch() {
        let ep = table(&[4, 1, 2, 3, 2, 3, 4, 1], 4);
        assert_eq!(
            bv("10101").permute(&ep),
            Err(BitError::LengthMismatch {
                expected: 4,
                found: 5
            })
        );
    }

    #[test]
    fn tables_are_validated() {
        assert!(matches!(
            PermTable::new(&[1, 5], 4),
            Err(BitError::EntryOutOfRange {
                position: 2,
                entry: 5,
                ..
            })
        ));
        assert!(matches!(
            PermTable::new(&[0, 1], 2),
            Err(BitError::EntryOutOfRange { entry: 0, .. })
        ));
        assert_eq!(PermTable::new(&[], 3), Err(BitError::EmptyTable));
        assert!(!table(&[1, 1, 2], 3).is_bijective());
        assert!(!table(&[2, 1], 3).is_bijective());
        assert!(table(&[2, 3, 1], 3).is_bijective());
    }

    #[test]
    fn invert_ip_matches_published_final_permutation() {
        let ip = table(&[2, 6, 3, 1, 4, 8, 5, 7], 8);
        assert_eq!(ip.invert().unwrap().entries(), &[4, 1, 3, 5, 7, 2, 8, 6]);
        assert_eq!(
            PermTable::identity(5).invert().unwrap(),
            PermTable::identity(5)
        );
        let ep = table(&[4, 1, 2, 3, 2, 3, 4, 1], 4);
        assert_eq!(ep.invert(), Err(BitError::NotBijective(4)));
    }

    #[test]
    fn rotate_wraps() {
        assert_eq!(bv("10000").rotate_left(1), bv("00001"));
        assert_eq!(bv("01100").rotate_left(1), bv("11000"));
        assert_eq!(bv("01100").rotate_left(0), bv("01100"));
        assert_eq!(bv("01100").rotate_left(6), bv("11000"));
        assert_eq!(BitVec::default().rotate_left(3), BitVec::default());
    }

    #[test]
    fn split_and_concat() {
        assert_eq!(
            bv("0000111000").split().unwrap(),
            (bv("00001"), bv("11000"))
        );
        assert_eq!(bv("01111110").split().unwrap(), (bv("0111"), bv("1110")));
        assert_eq!(bv("00").split().unwrap(), (bv("0"), bv("0")));
        assert_eq!(bv("010").split(), Err(BitError::OddLength(3)));
        assert_eq!(bv("00001").concat(&bv("11000")), bv("0000111000"));
        assert_eq!(bv("11").concat(&bv("10")), bv("1110"));
        assert_eq!(bv("101").concat(&BitVec::default()), bv("101"));
    }

    #[test]
    fn xor_cases() {
        assert_eq!(bv("01111101").xor(&bv("10100100")).unwrap(), bv("11011001"));
        let a = bv("10110");
        assert_eq!(a.xor(&a).unwrap(), BitVec::zeros(5));
        assert_eq!(a.xor(&BitVec::zeros(5)).unwrap(), a);
        assert!(a.xor(&bv("1")).is_err());
    }

    #[test]
    fn uint_conversions() {
        assert_eq!(bv("11").to_uint().unwrap(), 3);
        assert_eq!(BitVec::from_uint(2, 2).unwrap(), bv("10"));
        assert_eq!(
            BitVec::from_uint(4, 2),
            Err(BitError::Overflow { value: 4, width: 2 })
        );
        assert_eq!(BitVec::from_uint(0, 0).unwrap(), BitVec::default());
        assert_eq!(BitVec::from_uint(u64::MAX, 64).unwrap(), BitVec::ones(64));
        assert_eq!(BitVec::zeros(65).to_uint(), Err(BitError::TooWide(65)));
        for w in 0..=10 {
            for n in 0..(1u64 << w) {
                assert_eq!(BitVec::from_uint(n, w).unwrap().to_uint().unwrap(), n);
            }
        }
    }

    #[test]
    fn parse_reports_position() {
        assert_eq!(
            "0102".parse::<BitVec>(),
            Err(BitError::Parse {
                position: 4,
                found: '2'
            })
        );
        assert_eq!(bv("").len(), 0);
    }

    #[test]
    fn wide_vectors_cross_word_boundaries() {
        let v = BitVec::from_bools((0..200).map(|i| i % 3 == 0));
        assert_eq!(v.len(), 200);
        assert_eq!(v.to_string().parse::<BitVec>().unwrap(), v);
        assert_eq!(v.count_ones(), 67);
        let flipped = v.with_flipped(130);
        assert_eq!(v.hamming_distance(&flipped).unwrap(), 1);
        assert_eq!(BitVec::ones(70).count_ones(), 70);
        assert_eq!(BitVec::ones(70).rotate_left(13), BitVec::ones(70));
    }

    #[test]
    fn apply_word_agrees_with_permute() {
        let p8 = table(&[6, 3, 7, 4, 8, 5, 10, 9], 10);
        for n in 0..1024u64 {
            let v = BitVec::from_uint(n, 10).unwrap();
            let expect = v.permute(&p8).unwrap().to_uint().unwrap();
            assert_eq!(p8.apply_word(n), expect);
        }
    }
}
