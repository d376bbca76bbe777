use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitkit::BitVec;

use super::PatternError;

pub const DEFAULT_CATALOG_SIZE: usize = 50;

/// One selectable picture. `code` is server-side metadata and never leaves
/// the service; clients only see `picture_id` and `image_ref`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Picture {
    pub picture_id: String,
    pub image_ref: String,
    pub code: BitVec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PictureCatalog {
    entries: Vec<Picture>,
    by_id: HashMap<String, usize>,
}

impl PictureCatalog {
    /// Validates 3..=256 entries, 8-bit codes, and distinct ids and codes.
    pub fn new(entries: Vec<Picture>) -> Result<Self, PatternError> {
        if !(3..=256).contains(&entries.len()) {
            return Err(PatternError::Catalog(format!(
                "catalog needs 3 to 256 pictures, got {}",
                entries.len()
            )));
        }
        let mut by_id = HashMap::with_capacity(entries.len());
        let mut codes = HashSet::with_capacity(entries.len());
        for (i, pic) in entries.iter().enumerate() {
            if pic.code.len() != 8 {
                return Err(PatternError::Catalog(format!(
                    "picture {} has a {}-bit code; codes are 8 bits",
                    pic.picture_id,
                    pic.code.len()
                )));
            }
            if !codes.insert(pic.code.clone()) {
                return Err(PatternError::Catalog(format!(
                    "picture {} reuses code {}",
                    pic.picture_id, pic.code
                )));
            }
            if by_id.insert(pic.picture_id.clone(), i).is_some() {
                return Err(PatternError::Catalog(format!(
                    "duplicate picture id {}",
                    pic.picture_id
                )));
            }
        }
        Ok(PictureCatalog { entries, by_id })
    }

    /// A reproducible catalog of `size` pictures with distinct random codes
    /// drawn from `seed`. Ids are `pic-01`, `pic-02`, ...
    pub fn generate(size: usize, seed: u64) -> Result<Self, PatternError> {
        let mut codes: Vec<u8> = (0..=255).collect();
        codes.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let entries = codes
            .into_iter()
            .take(size)
            .enumerate()
            .map(|(i, code)| {
                let picture_id = format!("pic-{:02}", i + 1);
                Picture {
                    image_ref: format!("images/{picture_id}.svg"),
                    picture_id,
                    code: BitVec::from_uint(u64::from(code), 8).expect("8-bit code"),
                }
            })
            .collect();
        PictureCatalog::new(entries)
    }

    /// Parses a manifest: one JSON object per line with `picture_id`,
    /// `image_ref` and `code`. Blank lines and `#` comments are skipped.
    pub fn from_manifest(text: &str) -> Result<Self, PatternError> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let pic: Picture = serde_json::from_str(line)
                .map_err(|e| PatternError::Catalog(format!("manifest line {}: {e}", n + 1)))?;
            entries.push(pic);
        }
        PictureCatalog::new(entries)
    }

    pub fn to_manifest(&self) -> String {
        self.entries
            .iter()
            .map(|p| serde_json::to_string(p).expect("picture serializes") + "\n")
            .collect()
    }

    pub fn get(&self, picture_id: &str) -> Option<&Picture> {
        self.by_id.get(picture_id).map(|&i| &self.entries[i])
    }

    pub fn entries(&self) -> &[Picture] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
