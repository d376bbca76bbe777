use std::fs;

use duet_core::auth::{enroll, FingerprintParams, PictureCatalog, UserRecord};
use duet_core::store::UserStore;

fn records() -> Vec<UserRecord> {
    let cat = PictureCatalog::generate(30, 11).unwrap();
    let params = FingerprintParams {
        frames: 16,
        ..FingerprintParams::default()
    };
    (0..5)
        .map(|i| {
            let ids = [
                format!("pic-{:02}", i + 1),
                format!("pic-{:02}", i + 10),
                format!("pic-{:02}", i + 20),
            ];
            let samples: Vec<f64> = (0..800)
                .map(|n| (((n * (i + 2)) % 31) as f64 - 15.0) / 15.0)
                .collect();
            enroll(&cat, &ids, &samples, &params, 1_700_000_000 + i as u64).unwrap()
        })
        .collect()
}

#[test]
fn any_byte_prefix_reopens_to_committed_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("users.jsonl");
    let all = records();
    {
        let mut store = UserStore::open(&path).unwrap();
        for r in &all {
            store.insert(r.clone()).unwrap();
        }
    }
    let full = fs::read(&path).unwrap();
    let ends: Vec<usize> = full
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == b'\n')
        .map(|(i, _)| i + 1)
        .collect();
    assert_eq!(ends.len(), all.len());

    let probe = dir.path().join("probe.jsonl");
    for cut in (0..=full.len()).step_by(37).chain(ends.iter().copied()) {
        fs::write(&probe, &full[..cut]).unwrap();
        let committed = ends.iter().filter(|&&e| e <= cut).count();
        let store = UserStore::open(&probe).unwrap();
        assert_eq!(store.list(), &all[..committed], "cut at byte {cut}");
        // The torn tail is gone, so a new insert lands on a clean line.
        drop(store);
        let mut store = UserStore::open(&probe).unwrap();
        if committed < all.len() {
            store.insert(all[committed].clone()).unwrap();
            let reopened = UserStore::open(&probe).unwrap();
            assert_eq!(reopened.list(), &all[..=committed]);
        }
    }
}

#[test]
fn fingerprints_survive_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("users.jsonl");
    let all = records();
    let mut store = UserStore::open(&path).unwrap();
    for r in &all {
        store.insert(r.clone()).unwrap();
    }
    let reopened = UserStore::open(&path).unwrap();
    for r in &all {
        let got = reopened
            .find_by_pattern(r.pattern.as_ref().unwrap())
            .unwrap();
        assert_eq!(got.fingerprint.bits(), r.fingerprint.bits());
        assert_eq!(got, r);
    }
}

#[test]
fn line_format_uses_fixed_field_names() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("users.jsonl");
    let mut store = UserStore::open(&path).unwrap();
    store.insert(records().remove(0)).unwrap();
    let line = fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "created_at",
            "fingerprint",
            "fp_params",
            "pattern",
            "user_id"
        ]
    );
    assert_eq!(v["pattern"].as_str().unwrap().len(), 24);
    assert_eq!(v["fingerprint"].as_str().unwrap().len(), 16 * 8);
}
