#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdout, Command, Stdio};

use duet_core::auth::PictureCatalog;
use duet_server::audio::encode_wav;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

pub const DUET: &str = env!("CARGO_BIN_EXE_duet");

/// A voiced-sounding test signal: a few decaying harmonics over noise.
pub fn voice_samples(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f0 = rng.gen_range(90.0..220.0);
    (0..len)
        .map(|i| {
            let t = i as f64 / 16_000.0;
            let env = (std::f64::consts::PI * i as f64 / len as f64).sin();
            let tone: f64 = (1..=4)
                .map(|h| (2.0 * std::f64::consts::PI * f0 * h as f64 * t).sin() / h as f64)
                .sum();
            env * (0.5 * tone + 0.1 * rng.gen_range(-1.0..1.0))
        })
        .collect()
}

pub struct WavFile {
    _dir: TempDir,
    path: PathBuf,
}

impl WavFile {
    pub fn path_str(&self) -> &str {
        self.path.to_str().unwrap()
    }

    pub fn bytes(&self) -> Vec<u8> {
        std::fs::read(&self.path).unwrap()
    }
}

pub fn voice_wav(seed: u64) -> WavFile {
    let pcm: Vec<i16> = voice_samples(seed, 16_000)
        .iter()
        .map(|s| (s.clamp(-1.0, 1.0) * 20_000.0) as i16)
        .collect();
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("voice.wav");
    std::fs::write(&path, encode_wav(&pcm, 16_000)).unwrap();
    WavFile { _dir: dir, path }
}

/// A `duet serve` child on an ephemeral port, killed on drop.
pub struct Server {
    child: Child,
    _stdout: BufReader<ChildStdout>,
    pub base: String,
    pub dir: TempDir,
}

impl Server {
    pub fn start() -> Result<Server, String> {
        let dir = TempDir::new().map_err(|e| e.to_string())?;
        let manifest = dir.path().join("catalog.jsonl");
        let out = Command::new(DUET)
            .args(["catalog", "--size", "12", "--seed", "4"])
            .output()
            .map_err(|e| e.to_string())?;
        std::fs::write(&manifest, &out.stdout).map_err(|e| e.to_string())?;
        Self::start_with(dir, &manifest)
    }

    pub fn start_with(dir: TempDir, manifest: &Path) -> Result<Server, String> {
        let mut child = Command::new(DUET)
            .arg("serve")
            .arg("--store")
            .arg(dir.path().join("users.jsonl"))
            .arg("--catalog")
            .arg(manifest)
            .args(["--port", "0"])
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| format!("spawn duet serve: {e}"))?;
        let mut stdout = BufReader::new(child.stdout.take().unwrap());
        let mut line = String::new();
        stdout.read_line(&mut line).map_err(|e| e.to_string())?;
        let Some(base) = line.trim().strip_prefix("listening on ") else {
            let _ = child.kill();
            return Err(format!("unexpected serve output {line:?}"));
        };
        Ok(Server {
            base: base.to_owned(),
            child,
            _stdout: stdout,
            dir,
        })
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    /// The first `n` picture ids of the served catalog.
    pub fn pictures(&self, n: usize) -> Vec<String> {
        let text = std::fs::read_to_string(self.dir.path().join("catalog.jsonl")).unwrap();
        let cat = PictureCatalog::from_manifest(&text).unwrap();
        cat.entries()
            .iter()
            .take(n)
            .map(|p| p.picture_id.clone())
            .collect()
    }

    /// Runs `duet client --server <base> <args>` and returns trimmed stdout.
    pub fn duet(&self, args: &[&str]) -> Result<String, String> {
        let out = Command::new(DUET)
            .args(["client", "--server", &self.base])
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!(
                "duet client {} exited {}: {}",
                args.first().unwrap_or(&""),
                out.status,
                String::from_utf8_lossy(&out.stderr).trim()
            ));
        }
        Ok(String::from_utf8_lossy(&out.stdout).trim().to_owned())
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
