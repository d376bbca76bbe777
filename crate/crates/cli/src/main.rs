mod client;
mod error;

use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use duet_core::auth::{
    extract_fingerprint, FingerprintParams, PictureCatalog, DEFAULT_CATALOG_SIZE,
};
use duet_core::cipher::{
    avalanche_report, brute_force_recover, brute_force_recover_seeds, decrypt_block_traced,
    decrypt_message, derive_round_key, encrypt_block_traced, encrypt_message, Block8, CipherParams,
    KnownPair, RoundKey8, Seed10, Trace,
};
use duet_core::store::{StoreOptions, UserStore};
use duet_server::audio::decode_wav;
use duet_server::{AppState, ServerConfig};
use serde_json::{json, Value};

use client::ApiClient;
use error::CliError;

#[derive(Parser)]
#[command(
    name = "duet",
    version,
    about = "Picture/voice two-factor login and a two-key 8-bit block cipher"
)]
struct Cli {
    /// Emit machine-readable JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive an 8-bit round key from a 10-bit seed.
    Keygen {
        #[arg(value_parser = parse_seed)]
        seed: Seed10,
    },
    /// Encrypt one 8-bit block under round keys k1, k2.
    EncryptBlock(BlockArgs),
    /// Decrypt one 8-bit block under round keys k1, k2.
    DecryptBlock(BlockArgs),
    /// Encrypt a hex message byte by byte under two 10-bit seeds.
    EncryptMsg(MessageArgs),
    /// Decrypt a hex message byte by byte under two 10-bit seeds.
    DecryptMsg(MessageArgs),
    /// Recover every round-key pair consistent with known plaintext/ciphertext pairs.
    Crack {
        /// File with one "plain cipher" pair of 8-bit strings per line.
        pairs: PathBuf,
        /// Report seed pairs instead of round-key pairs.
        #[arg(long)]
        seeds: bool,
    },
    /// Measure how many ciphertext bits flip per flipped plaintext bit.
    Avalanche {
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the fingerprint of a mono 16-bit PCM WAV file.
    Fingerprint {
        wav: PathBuf,
        #[command(flatten)]
        params: FingerprintArgs,
    },
    /// Write a picture catalog manifest with distinct random codes.
    Catalog {
        #[arg(long, default_value_t = DEFAULT_CATALOG_SIZE)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Talk to a running service.
    Client {
        #[arg(long, env = "DUET_SERVER", default_value = "http://127.0.0.1:8080")]
        server: String,
        #[command(subcommand)]
        action: ClientAction,
    },
}

#[derive(Args)]
struct BlockArgs {
    #[arg(value_parser = parse_block)]
    block: Block8,
    #[arg(value_parser = parse_key)]
    k1: RoundKey8,
    #[arg(value_parser = parse_key)]
    k2: RoundKey8,
    /// Print every named intermediate of the network.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct MessageArgs {
    #[arg(value_parser = parse_hex)]
    hex: HexBytes,
    #[arg(value_parser = parse_seed)]
    seed_a: Seed10,
    #[arg(value_parser = parse_seed)]
    seed_b: Seed10,
}

#[derive(Args)]
struct FingerprintArgs {
    #[arg(long, default_value_t = FingerprintParams::default().frames)]
    frames: usize,
    #[arg(long, default_value_t = FingerprintParams::default().bits_per_frame)]
    qbits: u32,
    #[arg(long, default_value_t = FingerprintParams::default().silence_threshold)]
    threshold: f64,
    /// Skip peak normalization.
    #[arg(long)]
    no_normalize: bool,
}

impl FingerprintArgs {
    fn params(&self) -> FingerprintParams {
        FingerprintParams {
            frames: self.frames,
            bits_per_frame: self.qbits,
            silence_threshold: self.threshold,
            peak_normalize: !self.no_normalize,
        }
    }
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    catalog: PathBuf,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Accepted fingerprint bit differences at login.
    #[arg(long, default_value_t = 0)]
    tau: usize,
    /// Store only pattern digests, not raw patterns.
    #[arg(long)]
    digest_only: bool,
    #[arg(long, default_value_t = 15 * 60)]
    session_ttl: u64,
    #[command(flatten)]
    fingerprint: FingerprintArgs,
}

#[derive(Subcommand)]
enum ClientAction {
    /// List picture ids and image references.
    Catalog,
    Signup {
        #[arg(long, value_delimiter = ',', required = true)]
        pictures: Vec<String>,
        #[arg(long)]
        audio: PathBuf,
    },
    /// Run both login phases and print the session token.
    Login {
        #[arg(long, value_delimiter = ',', required = true)]
        pictures: Vec<String>,
        #[arg(long)]
        audio: PathBuf,
    },
    Encrypt(RemoteCipherArgs),
    Decrypt(RemoteCipherArgs),
}

#[derive(Args)]
struct RemoteCipherArgs {
    #[arg(long, env = "DUET_SESSION")]
    session: String,
    #[arg(long, value_parser = parse_seed)]
    seed_a: Seed10,
    #[arg(long, value_parser = parse_seed)]
    seed_b: Seed10,
    /// Hex payload; `@path` reads it from a file.
    hex: String,
}

#[derive(Clone)]
struct HexBytes(Vec<u8>);

fn parse_bits<T: std::str::FromStr>(s: &str, width: usize, example: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse()
        .map_err(|e| format!("{e} (expected {width} binary digits, e.g. {example})"))
}

fn parse_seed(s: &str) -> Result<Seed10, String> {
    parse_bits(s, 10, "1010000010")
}

fn parse_key(s: &str) -> Result<RoundKey8, String> {
    parse_bits(s, 8, "10100100")
}

fn parse_block(s: &str) -> Result<Block8, String> {
    parse_bits(s, 8, "10111101")
}

fn parse_hex(s: &str) -> Result<HexBytes, String> {
    hex::decode(s.trim())
        .map(HexBytes)
        .map_err(|e| format!("{e} (expected an even number of hex digits, e.g. 00ff10)"))
}

struct Out {
    json: bool,
}

impl Out {
    /// A closed pipe (`duet ... | head`) is not an error worth reporting.
    fn emit(&self, text: impl std::fmt::Display, value: Value) {
        let mut stdout = std::io::stdout().lock();
        let _ = if self.json {
            writeln!(stdout, "{value}")
        } else {
            writeln!(stdout, "{text}")
        };
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Out { json: cli.json };
    match run(cli.command, &out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if out.json {
                println!(
                    "{}",
                    json!({ "error": e.to_string(), "exit_code": e.code() })
                );
            }
            eprintln!("duet: {e}");
            e.exit_code()
        }
    }
}

fn run(command: Command, out: &Out) -> Result<(), CliError> {
    let params = CipherParams::default();
    match command {
        Command::Keygen { seed } => {
            let key = derive_round_key(seed, &params);
            out.emit(
                key,
                json!({ "seed": seed.to_string(), "key": key.to_string() }),
            );
        }
        Command::EncryptBlock(a) => block_command(a, &params, out, encrypt_block_traced),
        Command::DecryptBlock(a) => block_command(a, &params, out, decrypt_block_traced),
        Command::EncryptMsg(a) => {
            let c = encrypt_message(&a.hex.0, a.seed_a, a.seed_b, &params);
            let h = hex::encode_upper(c);
            out.emit(&h, json!({ "ciphertext": h }));
        }
        Command::DecryptMsg(a) => {
            let p = decrypt_message(&a.hex.0, a.seed_a, a.seed_b, &params);
            let h = hex::encode_upper(p);
            out.emit(&h, json!({ "plaintext": h }));
        }
        Command::Crack { pairs, seeds } => crack(&pairs, seeds, &params, out)?,
        Command::Avalanche { trials, seed } => {
            let r = avalanche_report(trials, seed, &params)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let hist: Vec<String> = r
                .histogram
                .iter()
                .enumerate()
                .map(|(n, c)| format!("{n} {c}"))
                .collect();
            out.emit(
                format!(
                    "trials {}\nmean {:.4}\n{}",
                    r.trials,
                    r.mean,
                    hist.join("\n")
                ),
                serde_json::to_value(&r).expect("report serializes"),
            );
        }
        Command::Fingerprint { wav, params: fp } => {
            let samples = read_wav(&wav)?;
            let fpp = fp.params();
            let f =
                extract_fingerprint(&samples, &fpp).map_err(|e| CliError::Input(e.to_string()))?;
            out.emit(
                f.bits(),
                json!({ "fingerprint": f.bits().to_string(), "fp_params": fpp }),
            );
        }
        Command::Catalog { size, seed } => {
            let cat =
                PictureCatalog::generate(size, seed).map_err(|e| CliError::Usage(e.to_string()))?;
            print!("{}", cat.to_manifest());
        }
        Command::Serve(a) => serve(a)?,
        Command::Client { server, action } => {
            client_command(&ApiClient::new(&server), action, out)?
        }
    }
    Ok(())
}

fn block_command(
    a: BlockArgs,
    params: &CipherParams,
    out: &Out,
    op: fn(Block8, RoundKey8, RoundKey8, &CipherParams) -> (Block8, Trace),
) {
    let (result, trace) = op(a.block, a.k1, a.k2, params);
    if a.trace {
        let steps: Vec<Value> = trace
            .steps()
            .iter()
            .map(|(l, v)| json!({ "label": l, "value": v }))
            .collect();
        out.emit(
            trace.to_string().trim_end(),
            json!({ "result": result.to_string(), "trace": steps }),
        );
    } else {
        out.emit(result, json!({ "result": result.to_string() }));
    }
}

fn read_pairs(path: &Path) -> Result<Vec<KnownPair>, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let bad = |why: String| {
            CliError::Usage(format!(
                "{}:{}: {why}; expected two 8-bit strings per line, e.g. `10111101 01110101`",
                path.display(),
                n + 1
            ))
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [plain, cipher] = fields[..] else {
            return Err(bad(format!("found {} fields", fields.len())));
        };
        pairs.push(KnownPair {
            plain: plain.parse().map_err(|e| bad(format!("{e}")))?,
            cipher: cipher.parse().map_err(|e| bad(format!("{e}")))?,
        });
    }
    Ok(pairs)
}

fn crack(path: &Path, seeds: bool, params: &CipherParams, out: &Out) -> Result<(), CliError> {
    let pairs = read_pairs(path)?;
    let err =
        |e: duet_core::cipher::CipherError| CliError::Usage(format!("{}: {e}", path.display()));
    let found: Vec<(String, String)> = if seeds {
        brute_force_recover_seeds(&pairs, params)
            .map_err(err)?
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    } else {
        brute_force_recover(&pairs, params)
            .map_err(err)?
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    };
    let (fa, fb) = if seeds {
        ("seed_a", "seed_b")
    } else {
        ("k1", "k2")
    };
    let text: Vec<String> = found.iter().map(|(a, b)| format!("{a} {b}")).collect();
    let rows: Vec<Value> = found.iter().map(|(a, b)| json!({ fa: a, fb: b })).collect();
    if !out.json {
        eprintln!(
            "{} candidate {} pair(s)",
            found.len(),
            if seeds { "seed" } else { "key" }
        );
    }
    out.emit(
        text.join("\n"),
        json!({ "count": found.len(), "candidates": rows }),
    );
    Ok(())
}

fn read_wav(path: &Path) -> Result<Vec<f64>, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    decode_wav(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn serve(a: ServeArgs) -> Result<(), CliError> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let manifest = fs::read_to_string(&a.catalog)
        .map_err(|e| CliError::Io(format!("{}: {e}", a.catalog.display())))?;
    let catalog =
        PictureCatalog::from_manifest(&manifest).map_err(|e| CliError::Usage(e.to_string()))?;
    let store = UserStore::open_with(
        &a.store,
        StoreOptions {
            keep_raw_pattern: !a.digest_only,
        },
    )
    .map_err(|e| CliError::Io(e.to_string()))?;
    let config = ServerConfig {
        fingerprint: a.fingerprint.params(),
        voice_tolerance: a.tau,
        session_ttl_secs: a.session_ttl,
        ..ServerConfig::default()
    };
    let state = AppState::new(catalog, store, config);
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((a.host.as_str(), a.port)).await?;
        let addr: SocketAddr = listener.local_addr()?;
        println!("listening on http://{addr}");
        std::io::stdout().flush()?;
        duet_server::serve(listener, state).await
    })?;
    Ok(())
}

fn client_command(api: &ApiClient, action: ClientAction, out: &Out) -> Result<(), CliError> {
    match action {
        ClientAction::Catalog => {
            let v = api.catalog()?;
            let lines: Vec<String> = v["pictures"]
                .as_array()
                .into_iter()
                .flatten()
                .map(|p| {
                    format!(
                        "{} {}",
                        p["picture_id"].as_str().unwrap_or(""),
                        p["image_ref"].as_str().unwrap_or("")
                    )
                })
                .collect();
            out.emit(lines.join("\n"), v);
        }
        ClientAction::Signup { pictures, audio } => {
            let v = api.signup(&pictures, read_file(&audio)?)?;
            out.emit(v["user_id"].as_str().unwrap_or_default(), v.clone());
        }
        ClientAction::Login { pictures, audio } => {
            let v = api.login(&pictures, read_file(&audio)?)?;
            out.emit(v["session_token"].as_str().unwrap_or_default(), v.clone());
        }
        ClientAction::Encrypt(a) => {
            remote_cipher(api, a, "/encrypt", "plaintext", "ciphertext", out)?
        }
        ClientAction::Decrypt(a) => {
            remote_cipher(api, a, "/decrypt", "ciphertext", "plaintext", out)?
        }
    }
    Ok(())
}

fn remote_cipher(
    api: &ApiClient,
    a: RemoteCipherArgs,
    path: &str,
    field: &str,
    result: &str,
    out: &Out,
) -> Result<(), CliError> {
    let payload = match a.hex.strip_prefix('@') {
        Some(file) => fs::read_to_string(file).map_err(|e| CliError::Io(format!("{file}: {e}")))?,
        None => a.hex,
    };
    let body = json!({
        "session_token": a.session,
        "seed_a": a.seed_a.to_string(),
        "seed_b": a.seed_b.to_string(),
        field: payload.trim(),
    });
    let v = api.cipher(path, body)?;
    out.emit(v[result].as_str().unwrap_or_default(), v.clone());
    Ok(())
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
