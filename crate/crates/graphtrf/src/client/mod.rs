//! Model clients: a real OpenAI-compatible HTTP backend and a deterministic
//! simulation backend for offline runs and tests.

mod http;
mod sim;

pub use http::{build_payload, HttpClient, HttpConfig};
pub use sim::{SimCell, SimClient, SimProfile};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::QaInstance;
use crate::render::RenderedPrompt;
use crate::trf::TrfKind;

/// Identifies one run so simulated responses are reproducible even when a
/// probing session is interrupted and resumed out of order.
#[derive(Debug, Clone, Copy)]
pub struct RunKey<'a> {
    pub question_id: &'a str,
    pub trf: TrfKind,
    pub run_idx: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    pub completion_tokens: u64,
}

pub trait Client {
    fn complete(
        &self,
        instance: &QaInstance,
        prompt: &RenderedPrompt,
        key: RunKey<'_>,
    ) -> Result<ChatResponse>;
}

/// Fallback token count when the provider omits usage data: one token per
/// four characters, rounded up, never below one.
pub fn approx_tokens(text: &str) -> u64 {
    (text.len() as u64).div_ceil(4).max(1)
}
