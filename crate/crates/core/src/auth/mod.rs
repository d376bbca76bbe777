//! Two-factor login: an ordered picture selection, then a voice sample.
//!
//! A user picks three pictures from a [`PictureCatalog`]; the concatenation
//! of their hidden 8-bit codes is the user's [`GraphicalPattern`] and also
//! their identity. The voice factor compares [`VoiceFingerprint`]s within a
//! Hamming tolerance. [`authenticate`] checks the graphical factor first and
//! only looks at the voice sample if the pictures matched.

mod catalog;
mod pattern;
mod voice;

use thiserror::Error;

pub use catalog::{Picture, PictureCatalog, DEFAULT_CATALOG_SIZE};
pub use pattern::{
    build_pattern, build_pattern_with, verify_pattern, GraphicalPattern, SelectionPolicy,
    SELECTION_LEN,
};
pub use voice::{
    extract_fingerprint, match_fingerprint, FingerprintParams, VoiceError, VoiceFingerprint,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("selection must name exactly {SELECTION_LEN} pictures, got {0}")]
    WrongCount(usize),
    #[error("unknown picture id {0:?}")]
    UnknownPicture(String),
    #[error("picture {0:?} is selected more than once")]
    RepeatedPicture(String),
    #[error("pattern must be 24 bits, got {0}")]
    Width(usize),
    #[error("{0}")]
    Catalog(String),
}

/// Errors are tagged by the factor whose input was malformed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AuthError {
    #[error("graphical factor: {0}")]
    Graphical(#[from] PatternError),
    #[error("voice factor: {0}")]
    Voice(#[from] VoiceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Graphical,
    Voice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accepted,
    Refused(Factor),
}

/// An enrolled user. `pattern` is `None` when the store was configured to
/// keep only the digest; the pattern can still be checked against `user_id`.
#[derive(Debug, Clone, PartialEq)]
pub struct UserRecord {
    pub user_id: String,
    pub pattern: Option<GraphicalPattern>,
    pub fingerprint: VoiceFingerprint,
    /// UTC seconds since the Unix epoch.
    pub created_at: u64,
}

impl UserRecord {
    pub fn new(pattern: GraphicalPattern, fingerprint: VoiceFingerprint, created_at: u64) -> Self {
        UserRecord {
            user_id: pattern.digest(),
            pattern: Some(pattern),
            fingerprint,
            created_at,
        }
    }

    pub fn matches_pattern(&self, candidate: &GraphicalPattern) -> bool {
        match &self.pattern {
            Some(stored) => verify_pattern(stored, candidate),
            None => {
                pattern::constant_time_eq(self.user_id.as_bytes(), candidate.digest().as_bytes())
            }
        }
    }

    /// Drops the raw pattern, leaving only its digest.
    pub fn redacted(mut self) -> Self {
        self.pattern = None;
        self
    }
}

pub fn enroll<S: AsRef<str>>(
    catalog: &PictureCatalog,
    selection: &[S],
    samples: &[f64],
    params: &FingerprintParams,
    created_at: u64,
) -> Result<UserRecord, AuthError> {
    let pattern = build_pattern(catalog, selection)?;
    let fingerprint = extract_fingerprint(samples, params)?;
    Ok(UserRecord::new(pattern, fingerprint, created_at))
}

/// Checks both factors against `stored`, graphical first.
///
/// The voice sample is fingerprinted with the stored fingerprint's
/// parameters and accepted within `tau` differing bits. When the pictures do
/// not match, the voice sample is not examined at all.
pub fn authenticate<S: AsRef<str>>(
    catalog: &PictureCatalog,
    selection: &[S],
    samples: &[f64],
    stored: &UserRecord,
    tau: usize,
) -> Result<Decision, AuthError> {
    let candidate = build_pattern(catalog, selection)?;
    if !stored.matches_pattern(&candidate) {
        return Ok(Decision::Refused(Factor::Graphical));
    }
    verify_voice(samples, stored, tau)
}

/// The voice half of [`authenticate`], for callers that verified the
/// pictures in an earlier step.
pub fn verify_voice(
    samples: &[f64],
    stored: &UserRecord,
    tau: usize,
) -> Result<Decision, AuthError> {
    let fp = extract_fingerprint(samples, stored.fingerprint.params())?;
    Ok(if match_fingerprint(&stored.fingerprint, &fp, tau)? {
        Decision::Accepted
    } else {
        Decision::Refused(Factor::Voice)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn voice(seed: u32) -> Vec<f64> {
        (0..4000)
            .map(|i| ((i as f64) * 0.01 * f64::from(seed)).sin() * (1.0 + (i % 97) as f64 / 97.0))
            .collect()
    }

    #[test]
    fn enroll_then_authenticate() {
        let cat = PictureCatalog::generate(DEFAULT_CATALOG_SIZE, 1).unwrap();
        let p = FingerprintParams::default();
        let rec = enroll(
            &cat,
            &["pic-03", "pic-17", "pic-40"],
            &voice(3),
            &p,
            1_700_000_000,
        )
        .unwrap();
        assert_eq!(rec.user_id, rec.pattern.as_ref().unwrap().digest());

        let ok = authenticate(&cat, &["pic-03", "pic-17", "pic-40"], &voice(3), &rec, 0).unwrap();
        assert_eq!(ok, Decision::Accepted);

        let wrong_voice =
            authenticate(&cat, &["pic-03", "pic-17", "pic-40"], &voice(7), &rec, 0).unwrap();
        assert_eq!(wrong_voice, Decision::Refused(Factor::Voice));
    }

    #[test]
    fn graphical_failure_short_circuits_voice() {
        let cat = PictureCatalog::generate(DEFAULT_CATALOG_SIZE, 1).unwrap();
        let p = FingerprintParams::default();
        let rec = enroll(&cat, &["pic-03", "pic-17", "pic-40"], &voice(3), &p, 0).unwrap();
        // Silent audio would be a voice error if it were examined.
        let d = authenticate(&cat, &["pic-17", "pic-03", "pic-40"], &[0.0; 10], &rec, 0).unwrap();
        assert_eq!(d, Decision::Refused(Factor::Graphical));
        let e =
            authenticate(&cat, &["pic-03", "pic-17", "pic-40"], &[0.0; 10], &rec, 0).unwrap_err();
        assert_eq!(e, AuthError::Voice(VoiceError::NoVoice));
        let e = authenticate(&cat, &["pic-03", "pic-17"], &voice(3), &rec, 0).unwrap_err();
        assert_eq!(e, AuthError::Graphical(PatternError::WrongCount(2)));
    }

    #[test]
    fn redacted_record_still_verifies_pattern() {
        let cat = PictureCatalog::generate(10, 5).unwrap();
        let rec = enroll(
            &cat,
            &["pic-01", "pic-02", "pic-03"],
            &voice(2),
            &FingerprintParams::default(),
            0,
        )
        .unwrap()
        .redacted();
        assert!(rec.pattern.is_none());
        let good = build_pattern(&cat, &["pic-01", "pic-02", "pic-03"]).unwrap();
        let bad = build_pattern(&cat, &["pic-01", "pic-03", "pic-02"]).unwrap();
        assert!(rec.matches_pattern(&good));
        assert!(!rec.matches_pattern(&bad));
    }
}
