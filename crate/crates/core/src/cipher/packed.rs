use super::{Block8, CipherParams, RoundKey8, Seed10};

/// Table-driven form of the cipher for exhaustive searches.
///
/// Precomputes the initial and final permutations over all 256 blocks and
/// the round function over every (key, half-block) pair, all with packed
/// integer arithmetic rather than [`BitVec`](crate::bitkit::BitVec)
/// operations.
#[derive(Clone)]
pub struct PackedCipher {
    ip: [u8; 256],
    ip_inv: [u8; 256],
    round: Box<[[u8; 16]; 256]>,
    keys: [u8; 1024],
}

impl PackedCipher {
    pub fn new(params: &CipherParams) -> Self {
        let mut ip = [0u8; 256];
        let mut ip_inv = [0u8; 256];
        for v in 0..256u64 {
            ip[v as usize] = params.ip().apply_word(v) as u8;
            ip_inv[v as usize] = params.ip_inv().apply_word(v) as u8;
        }

        let s1 = params.s1().cells();
        let s2 = params.s2().cells();
        let mut round = Box::new([[0u8; 16]; 256]);
        for (k, row) in round.iter_mut().enumerate() {
            for (h, out) in row.iter_mut().enumerate() {
                let e = params.ep().apply_word(h as u64) as u8 ^ k as u8;
                let bit = |n: u8| (e >> (8 - n)) & 1;
                let a = s1[usize::from(bit(1) << 1 | bit(4))][usize::from(bit(2) << 1 | bit(3))];
                let b = s2[usize::from(bit(5) << 1 | bit(8))][usize::from(bit(6) << 1 | bit(7))];
                *out = params.p4().apply_word(u64::from(a << 2 | b)) as u8;
            }
        }

        let mut keys = [0u8; 1024];
        for (seed, k) in keys.iter_mut().enumerate() {
            let shifted = params.p10().apply_word(seed as u64);
            let rot5 = |x: u64| ((x << 1) | (x >> 4)) & 0x1f;
            let merged = rot5(shifted >> 5) << 5 | rot5(shifted & 0x1f);
            *k = params.p8().apply_word(merged) as u8;
        }

        PackedCipher {
            ip,
            ip_inv,
            round,
            keys,
        }
    }

    pub fn round_key(&self, seed: Seed10) -> RoundKey8 {
        RoundKey8::from(self.keys[usize::from(seed.value())])
    }

    #[inline]
    pub fn encrypt(&self, block: u8, k1: u8, k2: u8) -> u8 {
        let x = self.ip[usize::from(block)];
        let (left, right) = (x >> 4, x & 0xf);
        let a = self.round[usize::from(k1)][usize::from(right)] ^ left;
        let b = self.round[usize::from(k2)][usize::from(a)] ^ right;
        self.ip_inv[usize::from(b << 4 | a)]
    }

    #[inline]
    pub fn decrypt(&self, block: u8, k1: u8, k2: u8) -> u8 {
        self.encrypt(block, k2, k1)
    }

    pub fn encrypt_block(&self, p: Block8, k1: RoundKey8, k2: RoundKey8) -> Block8 {
        Block8::from(self.encrypt(p.value(), k1.value(), k2.value()))
    }

    pub fn decrypt_block(&self, c: Block8, k1: RoundKey8, k2: RoundKey8) -> Block8 {
        Block8::from(self.decrypt(c.value(), k1.value(), k2.value()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::{decrypt_block, derive_round_key, encrypt_block};

    #[test]
    fn matches_reference_schedule_for_every_seed() {
        let params = CipherParams::default();
        let packed = PackedCipher::new(&params);
        for seed in Seed10::all() {
            assert_eq!(packed.round_key(seed), derive_round_key(seed, &params));
        }
    }

    #[test]
    fn matches_reference_network_on_sampled_keys() {
        let params = CipherParams::default();
        let packed = PackedCipher::new(&params);
        for k1 in (0..=255u8).step_by(17) {
            for k2 in (3..=255u8).step_by(23) {
                let (k1, k2) = (RoundKey8::from(k1), RoundKey8::from(k2));
                for p in 0..=255u8 {
                    let p = Block8::from(p);
                    assert_eq!(
                        packed.encrypt_block(p, k1, k2),
                        encrypt_block(p, k1, k2, &params)
                    );
                    assert_eq!(
                        packed.decrypt_block(p, k1, k2),
                        decrypt_block(p, k1, k2, &params)
                    );
                }
            }
        }
    }
}
