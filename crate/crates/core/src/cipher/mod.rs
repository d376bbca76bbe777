//! Two-key block cipher over 8-bit blocks.
//!
//! Two independent 10-bit seeds run through the same key schedule to give
//! two 8-bit round keys. A block passes an initial permutation, two
//! Feistel-style rounds (one per round key), and the inverse permutation.
//! Decryption is the same network with the round keys swapped.
//!
//! [`network`] is the step-by-step reference built from [`BitVec`]
//! operations and can emit a full trace of intermediates. [`PackedCipher`]
//! is a table-driven equivalent for exhaustive key searches; the two are
//! checked against each other in tests.

mod analysis;
mod message;
mod network;
mod packed;
mod params;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::bitkit::{BitError, BitVec};

pub use analysis::{
    avalanche_report, brute_force_recover, brute_force_recover_seeds, flip_count, AvalancheReport,
    KnownPair,
};
pub use message::{decrypt_message, encrypt_message, Codebook};
pub use network::{
    decrypt_block, decrypt_block_traced, derive_round_key, encrypt_block, encrypt_block_traced,
    round_function, Trace, TRACE_LABELS,
};
pub use packed::PackedCipher;
pub use params::{CipherParams, SBox};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CipherError {
    #[error(transparent)]
    Bits(#[from] BitError),
    #[error("{what} must be {expected} bits, got {found}")]
    Width {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("S-box cell [{row}][{col}] = {value} does not fit in 2 bits")]
    SBoxCell { row: usize, col: usize, value: u8 },
    #[error("invalid cipher parameters: {0}")]
    Params(String),
    #[error("at least one known plaintext/ciphertext pair is required")]
    NoPairs,
    #[error("trial count must be at least 1")]
    NoTrials,
}

macro_rules! bit_newtype {
    ($(#[$doc:meta])* $name:ident, $repr:ty, $width:expr, $what:expr) => {
        $(#[$doc])*
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name($repr);

        impl $name {
            pub const WIDTH: usize = $width;

            pub fn new(value: $repr) -> Result<Self, CipherError> {
                if u64::from(value) >> $width != 0 {
                    return Err(BitError::Overflow {
                        value: u64::from(value),
                        width: $width,
                    }
                    .into());
                }
                Ok($name(value))
            }

            pub fn value(self) -> $repr {
                self.0
            }

            pub fn bits(self) -> BitVec {
                BitVec::from_uint(u64::from(self.0), $width).expect("value fits its width")
            }
        }

        impl TryFrom<&BitVec> for $name {
            type Error = CipherError;

            fn try_from(bits: &BitVec) -> Result<Self, CipherError> {
                if bits.len() != $width {
                    return Err(CipherError::Width {
                        what: $what,
                        expected: $width,
                        found: bits.len(),
                    });
                }
                Ok($name(bits.to_uint()? as $repr))
            }
        }

        impl FromStr for $name {
            type Err = CipherError;

            fn from_str(s: &str) -> Result<Self, CipherError> {
                $name::try_from(&s.parse::<BitVec>()?)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.bits(), f)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($name), self.bits())
            }
        }
    };
}

bit_newtype!(
    /// A 10-bit key-schedule seed.
    Seed10, u16, 10, "seed"
);
bit_newtype!(
    /// An 8-bit round key produced by the key schedule.
    RoundKey8, u8, 8, "round key"
);
bit_newtype!(
    /// One 8-bit cipher block.
    Block8, u8, 8, "block"
);

impl Seed10 {
    /// All 1024 seeds in ascending order.
    pub fn all() -> impl Iterator<Item = Seed10> {
        (0..1024u16).map(Seed10)
    }
}

impl RoundKey8 {
    pub fn all() -> impl Iterator<Item = RoundKey8> {
        (0..=255u8).map(RoundKey8)
    }
}

impl From<u8> for RoundKey8 {
    fn from(v: u8) -> Self {
        RoundKey8(v)
    }
}

impl From<u8> for Block8 {
    fn from(v: u8) -> Self {
        Block8(v)
    }
}

impl From<Block8> for u8 {
    fn from(b: Block8) -> u8 {
        b.0
    }
}
