//! Picture-sequence and voice-fingerprint authentication with a two-key
//! 8-bit block cipher.
//!
//! - [`bitkit`]: fixed-length bit vectors and permutation tables.
//! - [`cipher`]: key schedule, block network, message mode, cryptanalysis.
//! - [`auth`]: graphical patterns, voice fingerprints, enrollment and login.
//! - [`store`]: append-only JSON-lines user records.

pub mod auth;
pub mod bitkit;
pub mod cipher;
pub mod store;
