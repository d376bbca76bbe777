use std::collections::HashMap;

use rand::RngCore;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Pictures matched; the token is a single-use voice challenge.
    GraphicalPassed,
    FullyAuthenticated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub token: String,
    pub user_id: String,
    pub phase: Phase,
    /// UTC seconds; the session is dead at and after this instant.
    pub expires_at: u64,
}

/// Live challenges and sessions keyed by token. Expired entries are
/// indistinguishable from unknown ones and are purged on every access.
#[derive(Debug, Default)]
pub struct SessionTable {
    live: HashMap<String, Session>,
}

/// 128 random bits as 32 lowercase hex digits.
pub fn new_token() -> String {
    let mut bytes = [0u8; 16];
    rand::rngs::OsRng.fill_bytes(&mut bytes);
    hex::encode(bytes)
}

impl SessionTable {
    pub fn issue(&mut self, user_id: &str, phase: Phase, now: u64, ttl_secs: u64) -> Session {
        self.purge(now);
        let mut token = new_token();
        while self.live.contains_key(&token) {
            token = new_token();
        }
        let session = Session {
            token: token.clone(),
            user_id: user_id.to_owned(),
            phase,
            expires_at: now + ttl_secs,
        };
        self.live.insert(token, session.clone());
        session
    }

    /// A live voice challenge, left in place.
    pub fn peek_challenge(&mut self, token: &str, now: u64) -> Option<Session> {
        self.purge(now);
        self.live
            .get(token)
            .filter(|s| s.phase == Phase::GraphicalPassed)
            .cloned()
    }

    /// Removes and returns a live voice challenge. A challenge can be taken
    /// once.
    pub fn take_challenge(&mut self, token: &str, now: u64) -> Option<Session> {
        self.peek_challenge(token, now)?;
        self.live.remove(token)
    }

    pub fn authenticated(&mut self, token: &str, now: u64) -> Option<Session> {
        self.purge(now);
        self.live
            .get(token)
            .filter(|s| s.phase == Phase::FullyAuthenticated)
            .cloned()
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    fn purge(&mut self, now: u64) {
        self.live.retain(|_, s| s.expires_at > now);
    }
}
