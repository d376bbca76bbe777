use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Multipart, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use duet_core::auth::{
    build_pattern, extract_fingerprint, match_fingerprint, AuthError, PatternError, UserRecord,
    VoiceError,
};
use duet_core::cipher::{Codebook, Seed10};
use duet_core::store::StoreError;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::audio::{decode_wav, AudioError};
use crate::session::Phase;
use crate::AppState;

const MAX_UPLOAD: usize = 32 * 1024 * 1024;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/catalog", get(catalog))
        .route("/signup", post(signup))
        .route("/login/graphical", post(login_graphical))
        .route("/login/voice", post(login_voice))
        .route("/encrypt", post(encrypt))
        .route("/decrypt", post(decrypt))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD))
        .with_state(state)
}

/// Every failure response: `{"error": <code>, "message": <text>}`.
#[derive(Debug)]
pub enum ApiError {
    Validation(String),
    BadAudio(String),
    NoVoice,
    Conflict,
    /// Uniform login refusal; carries nothing about which stored value
    /// came close.
    Refused,
    UnknownChallenge,
    Unauthorized,
    Internal(String),
}

impl ApiError {
    fn parts(&self) -> (StatusCode, &'static str, String) {
        match self {
            ApiError::Validation(m) => (StatusCode::UNPROCESSABLE_ENTITY, "validation", m.clone()),
            ApiError::BadAudio(m) => (StatusCode::UNPROCESSABLE_ENTITY, "bad_audio", m.clone()),
            ApiError::NoVoice => (
                StatusCode::UNPROCESSABLE_ENTITY,
                "no_voice",
                "no voice detected".into(),
            ),
            ApiError::Conflict => (
                StatusCode::CONFLICT,
                "conflict",
                "a user with this picture sequence already exists".into(),
            ),
            ApiError::Refused => (StatusCode::UNAUTHORIZED, "refused", "login refused".into()),
            ApiError::UnknownChallenge => (
                StatusCode::UNAUTHORIZED,
                "unknown_challenge",
                "challenge token is unknown, used or expired".into(),
            ),
            ApiError::Unauthorized => (
                StatusCode::UNAUTHORIZED,
                "unauthorized",
                "a fully authenticated session is required".into(),
            ),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, "internal", m.clone()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code, message) = self.parts();
        if status.is_server_error() {
            tracing::error!(%message, "request failed");
        }
        (status, Json(json!({ "error": code, "message": message }))).into_response()
    }
}

impl From<PatternError> for ApiError {
    fn from(e: PatternError) -> Self {
        ApiError::Validation(e.to_string())
    }
}

impl From<VoiceError> for ApiError {
    fn from(e: VoiceError) -> Self {
        match e {
            VoiceError::NoVoice => ApiError::NoVoice,
            other => ApiError::BadAudio(other.to_string()),
        }
    }
}

impl From<AuthError> for ApiError {
    fn from(e: AuthError) -> Self {
        match e {
            AuthError::Graphical(p) => p.into(),
            AuthError::Voice(v) => v.into(),
        }
    }
}

impl From<AudioError> for ApiError {
    fn from(e: AudioError) -> Self {
        ApiError::BadAudio(e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Conflict => ApiError::Conflict,
            other => ApiError::Internal(other.to_string()),
        }
    }
}

#[derive(Serialize)]
struct CatalogEntry<'a> {
    picture_id: &'a str,
    image_ref: &'a str,
}

async fn catalog(State(state): State<AppState>) -> Response {
    let pictures: Vec<_> = state
        .catalog()
        .entries()
        .iter()
        .map(|p| CatalogEntry {
            picture_id: &p.picture_id,
            image_ref: &p.image_ref,
        })
        .collect();
    Json(json!({ "pictures": pictures })).into_response()
}

/// Multipart fields of the voice-bearing requests.
#[derive(Default)]
struct Upload {
    selection: Option<Vec<String>>,
    challenge_token: Option<String>,
    audio: Option<Vec<u8>>,
}

async fn read_upload(mut form: Multipart) -> Result<Upload, ApiError> {
    let bad = |e: axum::extract::multipart::MultipartError| ApiError::Validation(e.body_text());
    let mut up = Upload::default();
    while let Some(field) = form.next_field().await.map_err(bad)? {
        match field.name().unwrap_or_default() {
            "selection" => {
                let text = field.text().await.map_err(bad)?;
                up.selection = Some(parse_selection(&text)?);
            }
            "challenge_token" => up.challenge_token = Some(field.text().await.map_err(bad)?),
            "audio" => up.audio = Some(field.bytes().await.map_err(bad)?.to_vec()),
            _ => {}
        }
    }
    Ok(up)
}

/// Accepts a JSON array of ids or a comma-separated list.
fn parse_selection(text: &str) -> Result<Vec<String>, ApiError> {
    let text = text.trim();
    if text.starts_with('[') {
        serde_json::from_str(text).map_err(|e| ApiError::Validation(format!("selection: {e}")))
    } else {
        Ok(text
            .split(',')
            .map(|s| s.trim().to_owned())
            .filter(|s| !s.is_empty())
            .collect())
    }
}

fn samples_from(audio: Option<Vec<u8>>) -> Result<Vec<f64>, ApiError> {
    let bytes = audio.ok_or_else(|| ApiError::Validation("missing audio field".into()))?;
    Ok(decode_wav(&bytes)?)
}

async fn signup(State(state): State<AppState>, form: Multipart) -> Result<Response, ApiError> {
    let up = read_upload(form).await?;
    let selection = up
        .selection
        .ok_or_else(|| ApiError::Validation("missing selection field".into()))?;
    let pattern = build_pattern(state.catalog(), &selection)?;
    let samples = samples_from(up.audio)?;
    let fingerprint = extract_fingerprint(&samples, &state.config().fingerprint)?;
    let record = UserRecord::new(pattern, fingerprint, state.now());
    let user_id = record.user_id.clone();
    state.with_store(|s| s.insert(record))?;
    tracing::info!(%user_id, "user enrolled");
    Ok((StatusCode::CREATED, Json(json!({ "user_id": user_id }))).into_response())
}

#[derive(Deserialize)]
struct GraphicalLogin {
    selection: Vec<String>,
}

async fn login_graphical(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let started = Instant::now();
    let result = (|| {
        let body: GraphicalLogin = serde_json::from_slice(&body)
            .map_err(|e| ApiError::Validation(format!("request body: {e}")))?;
        let pattern = build_pattern(state.catalog(), &body.selection)?;
        let user_id = state
            .with_store(|s| {
                s.find_by_pattern(&pattern)
                    .filter(|r| r.matches_pattern(&pattern))
                    .map(|r| r.user_id.clone())
            })
            .ok_or(ApiError::Refused)?;
        let now = state.now();
        let challenge = state.with_sessions(|t| {
            t.issue(
                &user_id,
                Phase::GraphicalPassed,
                now,
                state.config().challenge_ttl_secs,
            )
        });
        Ok(Json(json!({
            "challenge_token": challenge.token,
            "expires_at": challenge.expires_at,
        }))
        .into_response())
    })();
    state.pad_login_response(started).await;
    result
}

async fn login_voice(State(state): State<AppState>, form: Multipart) -> Result<Response, ApiError> {
    let started = Instant::now();
    let result = voice_step(&state, form).await;
    state.pad_login_response(started).await;
    result
}

async fn voice_step(state: &AppState, form: Multipart) -> Result<Response, ApiError> {
    let up = read_upload(form).await?;
    let token = up
        .challenge_token
        .ok_or_else(|| ApiError::Validation("missing challenge_token field".into()))?;
    let now = state.now();
    let challenge = state
        .with_sessions(|t| t.peek_challenge(&token, now))
        .ok_or(ApiError::UnknownChallenge)?;
    let stored = state
        .with_store(|s| {
            s.find_by_id(&challenge.user_id)
                .map(|r| r.fingerprint.clone())
        })
        .ok_or(ApiError::UnknownChallenge)?;

    // Malformed or silent audio leaves the challenge usable: nothing has
    // been compared yet.
    let samples = samples_from(up.audio)?;
    let candidate = extract_fingerprint(&samples, stored.params())?;

    let now = state.now();
    let challenge = state
        .with_sessions(|t| t.take_challenge(&token, now))
        .ok_or(ApiError::UnknownChallenge)?;
    if !match_fingerprint(&stored, &candidate, state.config().voice_tolerance)? {
        return Err(ApiError::Refused);
    }
    let session = state.with_sessions(|t| {
        t.issue(
            &challenge.user_id,
            Phase::FullyAuthenticated,
            now,
            state.config().session_ttl_secs,
        )
    });
    Ok(Json(json!({
        "session_token": session.token,
        "expires_at": session.expires_at,
    }))
    .into_response())
}

#[derive(Deserialize)]
struct CipherRequest {
    session_token: Option<String>,
    seed_a: Option<String>,
    seed_b: Option<String>,
    plaintext: Option<String>,
    ciphertext: Option<String>,
}

#[derive(Clone, Copy)]
enum Direction {
    Encrypt,
    Decrypt,
}

async fn encrypt(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    cipher_endpoint(&state, &body, Direction::Encrypt)
}

async fn decrypt(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    cipher_endpoint(&state, &body, Direction::Decrypt)
}

fn cipher_endpoint(state: &AppState, body: &[u8], dir: Direction) -> Result<Response, ApiError> {
    // Authorization is decided before any field is validated; a body that
    // does not parse carries no session.
    let req: CipherRequest = serde_json::from_slice(body).map_err(|_| ApiError::Unauthorized)?;
    let token = req.session_token.as_deref().ok_or(ApiError::Unauthorized)?;
    let now = state.now();
    state
        .with_sessions(|t| t.authenticated(token, now))
        .ok_or(ApiError::Unauthorized)?;

    let seed = |name: &str, v: &Option<String>| -> Result<Seed10, ApiError> {
        v.as_deref()
            .ok_or_else(|| ApiError::Validation(format!("missing {name}")))?
            .parse()
            .map_err(|e| ApiError::Validation(format!("{name}: {e}")))
    };
    let seed_a = seed("seed_a", &req.seed_a)?;
    let seed_b = seed("seed_b", &req.seed_b)?;
    let (field, input, output) = match dir {
        Direction::Encrypt => ("plaintext", &req.plaintext, "ciphertext"),
        Direction::Decrypt => ("ciphertext", &req.ciphertext, "plaintext"),
    };
    let data = hex::decode(
        input
            .as_deref()
            .ok_or_else(|| ApiError::Validation(format!("missing {field}")))?
            .trim(),
    )
    .map_err(|e| ApiError::Validation(format!("{field}: {e}")))?;

    let book = Codebook::from_seeds(seed_a, seed_b, state.cipher_params());
    let result = match dir {
        Direction::Encrypt => book.encrypt(&data),
        Direction::Decrypt => book.decrypt(&data),
    };
    Ok(Json(json!({ output: hex::encode_upper(result) })).into_response())
}
