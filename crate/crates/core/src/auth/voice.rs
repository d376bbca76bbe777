//! Voice-sample fingerprints.
//!
//! The pipeline is deliberately simple and fully deterministic:
//!
//! 1. peak-normalize amplitudes to [-1, 1] (optional);
//! 2. drop leading and trailing samples quieter than the silence threshold;
//! 3. cut the rest into `frames` equal frames, zero-padding the last;
//! 4. take each frame's mean absolute amplitude;
//! 5. quantize each mean linearly over [0, 1] to `bits_per_frame` bits,
//!    `q = min(floor(m * 2^Q), 2^Q - 1)`;
//! 6. concatenate.
//!
//! Identical sample sequences give identical fingerprints. Two recordings of
//! the same phrase will not; compare those with a nonzero Hamming tolerance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitkit::BitVec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VoiceError {
    #[error("no voice detected")]
    NoVoice,
    #[error("sample {0} is not a finite number")]
    NonFinite(usize),
    #[error("invalid fingerprint parameters: {0}")]
    Params(String),
    #[error("fingerprints were extracted with different parameters")]
    ParamsMismatch,
    #[error("fingerprint has {found} bits, parameters require {expected}")]
    Length { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FingerprintParams {
    pub frames: usize,
    pub bits_per_frame: u32,
    /// Absolute amplitude, after normalization, below which leading and
    /// trailing samples are trimmed. Zero disables trimming.
    pub silence_threshold: f64,
    pub peak_normalize: bool,
}

impl Default for FingerprintParams {
    fn default() -> Self {
        FingerprintParams {
            frames: 256,
            bits_per_frame: 8,
            silence_threshold: 0.02,
            peak_normalize: true,
        }
    }
}

impl FingerprintParams {
    pub fn fingerprint_len(&self) -> usize {
        self.frames * self.bits_per_frame as usize
    }

    fn validate(&self) -> Result<(), VoiceError> {
        if self.frames == 0 {
            return Err(VoiceError::Params("frames must be at least 1".into()));
        }
        if !(1..=16).contains(&self.bits_per_frame) {
            return Err(VoiceError::Params("bits per frame must be 1..=16".into()));
        }
        if self.fingerprint_len() > 65536 {
            return Err(VoiceError::Params(
                "fingerprint longer than 65536 bits".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.silence_threshold) {
            return Err(VoiceError::Params(
                "silence threshold must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoiceFingerprint {
    bits: BitVec,
    params: FingerprintParams,
}

impl VoiceFingerprint {
    /// Reassembles a persisted fingerprint, checking its length against
    /// `params`.
    pub fn from_parts(bits: BitVec, params: FingerprintParams) -> Result<Self, VoiceError> {
        params.validate()?;
        if bits.len() != params.fingerprint_len() {
            return Err(VoiceError::Length {
                expected: params.fingerprint_len(),
                found: bits.len(),
            });
        }
        Ok(VoiceFingerprint { bits, params })
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn params(&self) -> &FingerprintParams {
        &self.params
    }
}

pub fn extract_fingerprint(
    samples: &[f64],
    params: &FingerprintParams,
) -> Result<VoiceFingerprint, VoiceError> {
    params.validate()?;
    if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
        return Err(VoiceError::NonFinite(i));
    }
    let peak = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if peak == 0.0 {
        return Err(VoiceError::NoVoice);
    }
    let scale = if params.peak_normalize {
        1.0 / peak
    } else {
        1.0
    };
    let level: Vec<f64> = samples.iter().map(|s| (s * scale).abs().min(1.0)).collect();

    let loud = |x: &f64| *x >= params.silence_threshold;
    let start = level.iter().position(loud).ok_or(VoiceError::NoVoice)?;
    let end = level.iter().rposition(loud).ok_or(VoiceError::NoVoice)? + 1;
    let voiced = &level[start..end];

    let frame_len = voiced.len().div_ceil(params.frames);
    let levels = 1u64 << params.bits_per_frame;
    let mut bits = BitVec::default();
    for f in 0..params.frames {
        let lo = (f * frame_len).min(voiced.len());
        let hi = ((f + 1) * frame_len).min(voiced.len());
        let mean = voiced[lo..hi].iter().sum::<f64>() / frame_len as f64;
        let q = ((mean * levels as f64).floor() as u64).min(levels - 1);
        bits = bits
            .concat(&BitVec::from_uint(q, params.bits_per_frame as usize).expect("q below 2^Q"));
    }
    VoiceFingerprint::from_parts(bits, *params)
}

/// True iff the fingerprints differ in at most `tau` bits. `tau = 0` is an
/// exact match.
pub fn match_fingerprint(
    a: &VoiceFingerprint,
    b: &VoiceFingerprint,
    tau: usize,
) -> Result<bool, VoiceError> {
    if a.params != b.params {
        return Err(VoiceError::ParamsMismatch);
    }
    let d = a
        .bits
        .hamming_distance(&b.bits)
        .map_err(|_| VoiceError::Length {
            expected: a.bits.len(),
            found: b.bits.len(),
        })?;
    Ok(d <= tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(frames: usize, q: u32, threshold: f64) -> FingerprintParams {
        FingerprintParams {
            frames,
            bits_per_frame: q,
            silence_threshold: threshold,
            peak_normalize: true,
        }
    }

    #[test]
    fn silence_is_rejected() {
        let p = FingerprintParams::default();
        assert_eq!(
            extract_fingerprint(&[0.0; 500], &p),
            Err(VoiceError::NoVoice)
        );
        assert_eq!(extract_fingerprint(&[], &p), Err(VoiceError::NoVoice));
        let quiet = FingerprintParams {
            peak_normalize: false,
            ..p
        };
        assert_eq!(
            extract_fingerprint(&[0.001; 50], &quiet),
            Err(VoiceError::NoVoice)
        );
    }

    #[test]
    fn full_scale_saturates() {
        let fp = extract_fingerprint(&[1.0; 64], &small(4, 2, 0.0)).unwrap();
        assert_eq!(fp.bits().to_string(), "11111111");
        let fp = extract_fingerprint(&[-0.3, 0.3, -0.3, 0.3], &small(4, 2, 0.0)).unwrap();
        assert_eq!(fp.bits().to_string(), "11111111");
    }

    #[test]
    fn two_frame_quantization() {
        let samples = [0.5, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0];
        let fp = extract_fingerprint(&samples, &small(2, 2, 0.0)).unwrap();
        // floor(0.5 * 4) = 2, and 1.0 saturates at 3.
        assert_eq!(fp.bits().to_string(), "1011");
    }

    #[test]
    fn trimming_and_padding() {
        let mut s = vec![0.0; 10];
        s.extend([1.0, 1.0, 1.0]);
        s.extend(vec![0.0; 10]);
        // Three voiced samples over two frames: frame length 2, the second
        // frame holds one sample plus one zero of padding.
        let fp = extract_fingerprint(&s, &small(2, 2, 0.1)).unwrap();
        assert_eq!(fp.bits().to_string(), "1110");
        // More frames than samples: trailing frames are pure padding.
        let fp = extract_fingerprint(&[1.0, 1.0], &small(4, 1, 0.0)).unwrap();
        assert_eq!(fp.bits().to_string(), "1100");
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            extract_fingerprint(&[0.2, f64::NAN], &small(2, 2, 0.0)),
            Err(VoiceError::NonFinite(1))
        );
        assert!(matches!(
            extract_fingerprint(&[1.0], &small(0, 2, 0.0)),
            Err(VoiceError::Params(_))
        ));
        assert!(matches!(
            extract_fingerprint(&[1.0], &small(2, 17, 0.0)),
            Err(VoiceError::Params(_))
        ));
    }

    #[test]
    fn matching_threshold_is_inclusive() {
        let a = extract_fingerprint(&[0.1, 0.9, 0.4, 0.7], &small(4, 4, 0.0)).unwrap();
        let b = VoiceFingerprint::from_parts(a.bits().with_flipped(3).with_flipped(9), *a.params())
            .unwrap();
        assert!(match_fingerprint(&a, &a, 0).unwrap());
        assert!(!match_fingerprint(&a, &b, 1).unwrap());
        assert!(match_fingerprint(&a, &b, 2).unwrap());
        assert!(match_fingerprint(&b, &a, 2).unwrap());
    }

    #[test]
    fn mismatched_params_error() {
        let a = extract_fingerprint(&[0.5, 1.0], &small(2, 2, 0.0)).unwrap();
        let b = extract_fingerprint(&[0.5, 1.0], &small(2, 2, 0.01)).unwrap();
        assert_eq!(
            match_fingerprint(&a, &b, 4),
            Err(VoiceError::ParamsMismatch)
        );
    }

    #[test]
    fn from_parts_checks_length() {
        let p = small(2, 2, 0.0);
        assert_eq!(
            VoiceFingerprint::from_parts(BitVec::zeros(5), p),
            Err(VoiceError::Length {
                expected: 4,
                found: 5
            })
        );
    }
}
