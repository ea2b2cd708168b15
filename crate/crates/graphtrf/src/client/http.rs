//! OpenAI-compatible chat-completions backend. Visual prompts are rasterized
//! on demand and shipped as base64 PNG data URLs.

use std::time::Duration;

use base64::Engine as _;
use serde_json::{json, Value};

use crate::client::{approx_tokens, ChatResponse, Client, RunKey};
use crate::error::{Error, Result};
use crate::graph::QaInstance;
use crate::render::{RenderedPrompt, Rasterizer};

const RETRY_DELAYS: [Duration; 3] =
    [Duration::from_secs(1), Duration::from_secs(2), Duration::from_secs(4)];

#[derive(Debug, Clone)]
pub struct HttpConfig {
    pub base_url: String,
    pub api_key: String,
    pub model: String,
    pub temperature: f64,
}

pub struct HttpClient {
    config: HttpConfig,
    rasterizer: Rasterizer,
    http: reqwest::blocking::Client,
}

/// Request body for one completion. Pure so the wire format is testable
/// without a network; the image travels as a `data:image/png;base64,` URL
/// content part ahead of the text part.
pub fn build_payload(
    model: &str,
    temperature: f64,
    user_text: &str,
    image_png: Option<&[u8]>,
) -> Value {
    let mut content = Vec::new();
    if let Some(png) = image_png {
        let b64 = base64::engine::general_purpose::STANDARD.encode(png);
        content.push(json!({
            "type": "image_url",
            "image_url": { "url": format!("data:image/png;base64,{b64}") }
        }));
    }
    content.push(json!({ "type": "text", "text": user_text }));
    json!({
        "model": model,
        "temperature": temperature,
        "messages": [{ "role": "user", "content": content }]
    })
}

impl HttpClient {
    pub fn new(config: HttpConfig, rasterizer: Rasterizer) -> HttpClient {
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .expect("reqwest client");
        HttpClient { config, rasterizer, http }
    }

    fn post_with_retry(&self, payload: &Value) -> Result<Value> {
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let mut attempt = 0;
        loop {
            let outcome = self
                .http
                .post(&url)
                .bearer_auth(&self.config.api_key)
                .json(payload)
                .send();
            let retry_reason = match outcome {
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        return resp
                            .json::<Value>()
                            .map_err(|e| Error::MalformedResponse(e.to_string()));
                    }
                    let body = resp.text().unwrap_or_default();
                    if status.as_u16() == 401 || status.as_u16() == 403 {
                        return Err(Error::Auth(format!("{status}: {body}")));
                    }
                    if status.as_u16() == 429 || status.is_server_error() {
                        format!("{status}: {body}")
                    } else {
                        return Err(Error::Transport(format!("{status}: {body}")));
                    }
                }
                Err(e) => e.to_string(),
            };
            if attempt >= RETRY_DELAYS.len() {
                return Err(Error::RateLimited(retry_reason));
            }
            std::thread::sleep(RETRY_DELAYS[attempt]);
            attempt += 1;
        }
    }
}

impl Client for HttpClient {
    fn complete(
        &self,
        _instance: &QaInstance,
        prompt: &RenderedPrompt,
        _key: RunKey<'_>,
    ) -> Result<ChatResponse> {
        let image = match &prompt.dot_source {
            Some(dot) => Some(self.rasterizer.rasterize(dot)?),
            None => None,
        };
        let payload = build_payload(
            &self.config.model,
            self.config.temperature,
            &prompt.user_text(),
            image.as_deref(),
        );
        let body = self.post_with_retry(&payload)?;
        let text = body["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| Error::MalformedResponse("missing choices[0].message.content".into()))?
            .to_string();
        let completion_tokens = body["usage"]["completion_tokens"]
            .as_u64()
            .unwrap_or_else(|| approx_tokens(&text));
        Ok(ChatResponse { text, completion_tokens })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_only_payload_golden() {
        let payload = build_payload("test-model", 0.7, "Is there a cycle?", None);
        let expected = json!({
            "model": "test-model",
            "temperature": 0.7,
            "messages": [{
                "role": "user",
                "content": [{ "type": "text", "text": "Is there a cycle?" }]
            }]
        });
        assert_eq!(payload, expected);
    }

    #[test]
    fn image_payload_golden() {
        // 4-byte fake PNG; base64 of 89 50 4E 47 is iVBORw==.
        let payload = build_payload("m", 0.0, "look", Some(b"\x89PNG"));
        let expected = json!({
            "model": "m",
            "temperature": 0.0,
            "messages": [{
                "role": "user",
                "content": [
                    { "type": "image_url",
                      "image_url": { "url": "data:image/png;base64,iVBORw==" } },
                    { "type": "text", "text": "look" }
                ]
            }]
        });
        assert_eq!(payload, expected);
    }
}
