//! Known-plaintext key search and diffusion measurement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{encrypt_block, Block8, CipherError, CipherParams, PackedCipher, RoundKey8, Seed10};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnownPair {
    pub plain: Block8,
    pub cipher: Block8,
}

/// Every round-key pair `(k1, k2)` that maps each `plain` to its `cipher`.
///
/// Scans all 2^16 pairs. Work is split by `k1` across the rayon pool and
/// reassembled in order, so the result is sorted by `(k1, k2)` whatever the
/// thread count.
pub fn brute_force_recover(
    pairs: &[KnownPair],
    params: &CipherParams,
) -> Result<Vec<(RoundKey8, RoundKey8)>, CipherError> {
    if pairs.is_empty() {
        return Err(CipherError::NoPairs);
    }
    let packed = PackedCipher::new(params);
    let pairs: Vec<(u8, u8)> = pairs
        .iter()
        .map(|p| (p.plain.value(), p.cipher.value()))
        .collect();
    Ok((0..=255u8)
        .into_par_iter()
        .flat_map_iter(|k1| {
            let packed = &packed;
            let pairs = &pairs;
            (0..=255u8)
                .filter(move |&k2| pairs.iter().all(|&(p, c)| packed.encrypt(p, k1, k2) == c))
                .map(move |k2| (RoundKey8::from(k1), RoundKey8::from(k2)))
        })
        .collect())
}

/// Seed-level variant of [`brute_force_recover`]: every `(seed_a, seed_b)`
/// whose derived round keys are consistent with `pairs`, ascending.
///
/// The key schedule is not injective, so several seeds usually share a
/// round key and this list is larger than the round-key result.
pub fn brute_force_recover_seeds(
    pairs: &[KnownPair],
    params: &CipherParams,
) -> Result<Vec<(Seed10, Seed10)>, CipherError> {
    let keys = brute_force_recover(pairs, params)?;
    let packed = PackedCipher::new(params);
    let mut by_key: Vec<Vec<Seed10>> = vec![Vec::new(); 256];
    for seed in Seed10::all() {
        by_key[usize::from(packed.round_key(seed).value())].push(seed);
    }
    let mut out: Vec<(Seed10, Seed10)> = keys
        .iter()
        .flat_map(|(k1, k2)| {
            let seconds = &by_key[usize::from(k2.value())];
            by_key[usize::from(k1.value())]
                .iter()
                .flat_map(move |&a| seconds.iter().map(move |&b| (a, b)))
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Ciphertext bits that differ between the encryptions of `a` and `b`.
pub fn flip_count(
    a: Block8,
    b: Block8,
    k1: RoundKey8,
    k2: RoundKey8,
    params: &CipherParams,
) -> u32 {
    let ca = encrypt_block(a, k1, k2, params).value();
    let cb = encrypt_block(b, k1, k2, params).value();
    (ca ^ cb).count_ones()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AvalancheReport {
    pub trials: u64,
    pub mean: f64,
    /// `histogram[n]` counts trials in which exactly `n` ciphertext bits flipped.
    pub histogram: [u64; 9],
}

/// Flips one random plaintext bit under random keys `trials` times and
/// tallies how many ciphertext bits change. Deterministic in `rng_seed`.
pub fn avalanche_report(
    trials: u64,
    rng_seed: u64,
    params: &CipherParams,
) -> Result<AvalancheReport, CipherError> {
    if trials == 0 {
        return Err(CipherError::NoTrials);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let samples: Vec<(u8, u8, u8, u8)> = (0..trials)
        .map(|_| (rng.gen(), rng.gen(), rng.gen(), 1u8 << rng.gen_range(0..8)))
        .collect();
    let packed = PackedCipher::new(params);
    let histogram = samples
        .par_iter()
        .fold(
            || [0u64; 9],
            |mut h, &(p, k1, k2, mask)| {
                let d = packed.encrypt(p, k1, k2) ^ packed.encrypt(p ^ mask, k1, k2);
                h[d.count_ones() as usize] += 1;
                h
            },
        )
        .reduce(
            || [0u64; 9],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let total: u64 = histogram
        .iter()
        .enumerate()
        .map(|(n, c)| n as u64 * c)
        .sum();
    Ok(AvalancheReport {
        trials,
        mean: total as f64 / trials as f64,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs_under(k1: u8, k2: u8, plains: &[u8]) -> Vec<KnownPair> {
        let params = CipherParams::default();
        plains
            .iter()
            .map(|&p| KnownPair {
                plain: Block8::from(p),
                cipher: encrypt_block(Block8::from(p), k1.into(), k2.into(), &params),
            })
            .collect()
    }

    #[test]
    fn recovers_generating_pair() {
        let params = CipherParams::default();
        let pairs = pairs_under(0xa4, 0x43, &[0x00, 0x5c, 0xbd, 0xff]);
        let found = brute_force_recover(&pairs, &params).unwrap();
        assert!(found.contains(&(RoundKey8::from(0xa4), RoundKey8::from(0x43))));
        assert!(found.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_pairs_rejected() {
        assert_eq!(
            brute_force_recover(&[], &CipherParams::default()),
            Err(CipherError::NoPairs)
        );
    }

    #[test]
    fn single_pair_counts_sum_to_keyspace() {
        let params = CipherParams::default();
        let plain = Block8::from(0x3c);
        let total: usize = (0..=255u8)
            .map(|c| {
                brute_force_recover(
                    &[KnownPair {
                        plain,
                        cipher: Block8::from(c),
                    }],
                    &params,
                )
                .unwrap()
                .len()
            })
            .sum();
        assert_eq!(total, 65536);
    }

    #[test]
    fn result_independent_of_thread_count() {
        let params = CipherParams::default();
        let pairs = pairs_under(0x11, 0xe7, &[0x42]);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| brute_force_recover(&pairs, &params).unwrap())
        };
        let one = run(1);
        assert!(one.len() > 1);
        assert_eq!(one, run(4));
    }

    #[test]
    fn seed_variant_contains_generating_seeds() {
        let params = CipherParams::default();
        let (sa, sb): (Seed10, Seed10) =
            ("1010000010".parse().unwrap(), "0110011001".parse().unwrap());
        let packed = PackedCipher::new(&params);
        let (k1, k2) = (packed.round_key(sa).value(), packed.round_key(sb).value());
        let pairs = pairs_under(k1, k2, &[1, 2, 3, 4]);
        let seeds = brute_force_recover_seeds(&pairs, &params).unwrap();
        assert!(seeds.contains(&(sa, sb)));
        assert!(seeds.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn avalanche_basics() {
        let params = CipherParams::default();
        assert_eq!(avalanche_report(0, 1, &params), Err(CipherError::NoTrials));
        let b = Block8::from(0x9d);
        assert_eq!(flip_count(b, b, 0x12.into(), 0x34.into(), &params), 0);
        let r = avalanche_report(1000, 7, &params).unwrap();
        assert_eq!(r.histogram.iter().sum::<u64>(), 1000);
        assert_eq!(
            r.histogram[0], 0,
            "a bijection never maps distinct blocks together"
        );
        assert_eq!(r, avalanche_report(1000, 7, &params).unwrap());
    }
}
