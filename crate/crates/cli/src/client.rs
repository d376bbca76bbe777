//! Blocking client for the service endpoints.

use reqwest::blocking::{multipart, Client, Response};
use reqwest::StatusCode;
use serde_json::{json, Value};

use crate::error::CliError;

pub struct ApiClient {
    base: String,
    http: Client,
}

impl ApiClient {
    pub fn new(base: &str) -> Self {
        ApiClient {
            base: base.trim_end_matches('/').to_owned(),
            http: Client::new(),
        }
    }

    pub fn catalog(&self) -> Result<Value, CliError> {
        finish(self.http.get(self.url("/catalog")).send())
    }

    pub fn signup(&self, pictures: &[String], wav: Vec<u8>) -> Result<Value, CliError> {
        let form = multipart::Form::new()
            .text("selection", pictures.join(","))
            .part("audio", audio_part(wav)?);
        finish(self.http.post(self.url("/signup")).multipart(form).send())
    }

    pub fn login_graphical(&self, pictures: &[String]) -> Result<Value, CliError> {
        finish(
            self.http
                .post(self.url("/login/graphical"))
                .json(&json!({ "selection": pictures }))
                .send(),
        )
    }

    pub fn login_voice(&self, challenge: &str, wav: Vec<u8>) -> Result<Value, CliError> {
        let form = multipart::Form::new()
            .text("challenge_token", challenge.to_owned())
            .part("audio", audio_part(wav)?);
        finish(
            self.http
                .post(self.url("/login/voice"))
                .multipart(form)
                .send(),
        )
    }

    /// Both login phases; returns the session reply.
    pub fn login(&self, pictures: &[String], wav: Vec<u8>) -> Result<Value, CliError> {
        let challenge = self.login_graphical(pictures)?;
        let token = challenge["challenge_token"]
            .as_str()
            .ok_or_else(|| CliError::Transport("server reply lacks challenge_token".into()))?;
        self.login_voice(token, wav)
    }

    pub fn cipher(&self, path: &str, body: Value) -> Result<Value, CliError> {
        finish(self.http.post(self.url(path)).json(&body).send())
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }
}

fn audio_part(wav: Vec<u8>) -> Result<multipart::Part, CliError> {
    multipart::Part::bytes(wav)
        .file_name("voice.wav")
        .mime_str("audio/wav")
        .map_err(|e| CliError::Transport(e.to_string()))
}

fn finish(resp: reqwest::Result<Response>) -> Result<Value, CliError> {
    let resp = resp.map_err(|e| CliError::Transport(format!("request failed: {e}")))?;
    let status = resp.status();
    let body: Value = resp
        .json()
        .map_err(|e| CliError::Transport(format!("unreadable reply ({status}): {e}")))?;
    if status.is_success() {
        return Ok(body);
    }
    let message = format!(
        "{} ({}): {}",
        body["error"].as_str().unwrap_or("error"),
        status.as_u16(),
        body["message"].as_str().unwrap_or_default()
    );
    Err(match status {
        s if s.is_server_error() => CliError::Transport(message),
        StatusCode::UNPROCESSABLE_ENTITY => CliError::Input(message),
        _ => CliError::Rejected(message),
    })
}
