//! Byte-wise message encryption.
//!
//! Each byte is one block, encrypted independently (codebook mode). Equal
//! plaintext bytes always produce equal ciphertext bytes, so message
//! structure leaks; this mode offers no more than the block cipher itself.

use super::{
    decrypt_block, derive_round_key, encrypt_block, Block8, CipherParams, RoundKey8, Seed10,
};

/// Full forward and inverse substitution tables for one key pair.
#[derive(Clone)]
pub struct Codebook {
    forward: [u8; 256],
    inverse: [u8; 256],
}

impl Codebook {
    pub fn new(k1: RoundKey8, k2: RoundKey8, params: &CipherParams) -> Self {
        let mut forward = [0u8; 256];
        let mut inverse = [0u8; 256];
        for byte in 0..=255u8 {
            forward[usize::from(byte)] = encrypt_block(Block8::from(byte), k1, k2, params).into();
            inverse[usize::from(byte)] = decrypt_block(Block8::from(byte), k1, k2, params).into();
        }
        Codebook { forward, inverse }
    }

    pub fn from_seeds(seed_a: Seed10, seed_b: Seed10, params: &CipherParams) -> Self {
        Codebook::new(
            derive_round_key(seed_a, params),
            derive_round_key(seed_b, params),
            params,
        )
    }

    pub fn encrypt(&self, data: &[u8]) -> Vec<u8> {
        data.iter().map(|&b| self.forward[usize::from(b)]).collect()
    }

    pub fn decrypt(&self, data: &[u8]) -> Vec<u8> {
        data.iter().map(|&b| self.inverse[usize::from(b)]).collect()
    }
}

pub fn encrypt_message(
    data: &[u8],
    seed_a: Seed10,
    seed_b: Seed10,
    params: &CipherParams,
) -> Vec<u8> {
    Codebook::from_seeds(seed_a, seed_b, params).encrypt(data)
}

pub fn decrypt_message(
    data: &[u8],
    seed_a: Seed10,
    seed_b: Seed10,
    params: &CipherParams,
) -> Vec<u8> {
    Codebook::from_seeds(seed_a, seed_b, params).decrypt(data)
}
