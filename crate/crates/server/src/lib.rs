//! HTTP service for two-phase login and session-gated encryption.
//!
//! A client first posts an ordered picture selection to
//! `/login/graphical`. If it matches an enrolled user, the reply carries a
//! single-use challenge token. Posting that token with a voice sample to
//! `/login/voice` yields a session token, and only a session token unlocks
//! `/encrypt` and `/decrypt`.
//!
//! All state is the user store (on disk) plus the in-memory session table.

pub mod api;
pub mod audio;
pub mod session;

use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use duet_core::auth::{FingerprintParams, PictureCatalog};
use duet_core::cipher::CipherParams;
use duet_core::store::UserStore;
use tokio::net::TcpListener;

pub use api::{router, ApiError};
pub use session::{Phase, Session, SessionTable};

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Parameters for fingerprints taken at signup.
    pub fingerprint: FingerprintParams,
    /// Maximum differing fingerprint bits accepted at login. Zero demands a
    /// bit-exact match, which only a byte-identical recording satisfies.
    pub voice_tolerance: usize,
    pub challenge_ttl_secs: u64,
    pub session_ttl_secs: u64,
    /// Every login response, success or refusal, takes at least this long.
    pub login_floor: Duration,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            fingerprint: FingerprintParams::default(),
            voice_tolerance: 0,
            challenge_ttl_secs: 120,
            session_ttl_secs: 15 * 60,
            login_floor: Duration::from_millis(50),
        }
    }
}

pub type Clock = Arc<dyn Fn() -> u64 + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    })
}

struct Shared {
    catalog: PictureCatalog,
    cipher: CipherParams,
    config: ServerConfig,
    clock: Clock,
    store: Mutex<UserStore>,
    sessions: Mutex<SessionTable>,
}

#[derive(Clone)]
pub struct AppState(Arc<Shared>);

impl AppState {
    pub fn new(catalog: PictureCatalog, store: UserStore, config: ServerConfig) -> Self {
        Self::with_clock(catalog, store, config, system_clock())
    }

    pub fn with_clock(
        catalog: PictureCatalog,
        store: UserStore,
        config: ServerConfig,
        clock: Clock,
    ) -> Self {
        AppState(Arc::new(Shared {
            catalog,
            cipher: CipherParams::default(),
            config,
            clock,
            store: Mutex::new(store),
            sessions: Mutex::new(SessionTable::default()),
        }))
    }

    pub fn catalog(&self) -> &PictureCatalog {
        &self.0.catalog
    }

    pub fn config(&self) -> &ServerConfig {
        &self.0.config
    }

    pub fn cipher_params(&self) -> &CipherParams {
        &self.0.cipher
    }

    pub fn now(&self) -> u64 {
        (self.0.clock)()
    }

    /// Runs `f` with exclusive access to the user store.
    pub fn with_store<T>(&self, f: impl FnOnce(&mut UserStore) -> T) -> T {
        f(&mut self.0.store.lock().unwrap_or_else(|e| e.into_inner()))
    }

    pub fn with_sessions<T>(&self, f: impl FnOnce(&mut SessionTable) -> T) -> T {
        f(&mut self.0.sessions.lock().unwrap_or_else(|e| e.into_inner()))
    }

    async fn pad_login_response(&self, started: Instant) {
        let floor = self.0.config.login_floor;
        if let Some(rest) = floor.checked_sub(started.elapsed()) {
            tokio::time::sleep(rest).await;
        }
    }
}

/// Serves the API on `listener` until the task is dropped.
pub async fn serve(listener: TcpListener, state: AppState) -> std::io::Result<()> {
    let addr: SocketAddr = listener.local_addr()?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(state)).await
}
