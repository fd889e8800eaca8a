use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

/// Envelope shared by every command's JSON output. Field order is fixed by
/// declaration order, so identical runs give identical bytes.
#[derive(Serialize)]
pub struct Report<B: Serialize> {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub input_digest: String,
    pub pass: bool,
    #[serde(flatten)]
    pub body: B,
}

impl<B: Serialize> Report<B> {
    pub fn new(command: Vec<String>, input: &[u8], pass: bool, body: B) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            input_digest: digest(input),
            pass,
            body,
        }
    }

    pub fn write(&self, path: Option<&Path>) -> anyhow::Result<()> {
        let Some(path) = path else { return Ok(()) };
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing report to {}", path.display()))
    }
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

/// One named property of `verify`, with witnesses when it fails.
#[derive(Clone, Debug, Serialize)]
pub struct Property {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
}

impl Property {
    pub fn new(name: &'static str, pass: bool, detail: impl Into<String>, witnesses: Vec<String>) -> Self {
        Self {
            name,
            pass,
            detail: detail.into(),
            witnesses,
        }
    }
}
