//! HTTP embedding backend.
//!
//! Wire contract: `POST {endpoint}/embed` with body
//! `{"model": string, "input": string}`; response `{"embedding": [3072 numbers]}`.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{validate_values, EmbeddingBackend, EMBEDDING_DIM};
use crate::error::{Error, Result};

const MAX_ATTEMPTS: usize = 3;
const DEFAULT_IN_FLIGHT: usize = 4;

#[derive(Debug, Serialize)]
struct EmbedRequest<'a> {
    model: &'a str,
    input: &'a str,
}

#[derive(Debug, Deserialize)]
struct EmbedResponse {
    embedding: Vec<f64>,
}

/// Environment variables the backend reads when flags leave them unset.
pub const ENV_ENDPOINT: &str = "DONGCAST_EMBED_ENDPOINT";
pub const ENV_MODEL: &str = "DONGCAST_EMBED_MODEL";
pub const ENV_TOKEN: &str = "DONGCAST_EMBED_TOKEN";

pub struct HttpBackend {
    endpoint: String,
    model_id: String,
    token: Option<String>,
    client: reqwest::blocking::Client,
    in_flight: Semaphore,
}

impl HttpBackend {
    pub fn new(endpoint: impl Into<String>, model_id: impl Into<String>, token: Option<String>) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| Error::Config(format!("cannot build http client: {e}")))?;
        Ok(HttpBackend {
            endpoint: endpoint.into().trim_end_matches('/').to_string(),
            model_id: model_id.into(),
            token,
            client,
            in_flight: Semaphore::new(DEFAULT_IN_FLIGHT),
        })
    }

    /// Construct from `DONGCAST_EMBED_*` environment variables.
    pub fn from_env() -> Result<Self> {
        let endpoint = std::env::var(ENV_ENDPOINT).map_err(|_| {
            Error::Config(format!("http backend selected but {ENV_ENDPOINT} is unset"))
        })?;
        let model = std::env::var(ENV_MODEL).unwrap_or_else(|_| "llama3-embed".to_string());
        let token = std::env::var(ENV_TOKEN).ok();
        HttpBackend::new(endpoint, model, token)
    }

    fn request_once(&self, prompt_text: &str) -> Result<Vec<f64>> {
        let url = format!("{}/embed", self.endpoint);
        let mut req = self.client.post(&url).json(&EmbedRequest {
            model: &self.model_id,
            input: prompt_text,
        });
        if let Some(token) = &self.token {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(|e| embed_err(format!("request failed: {e}")))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(embed_err(format!("server returned {status}")));
        }
        let body: EmbedResponse = resp
            .json()
            .map_err(|e| embed_err(format!("cannot parse response: {e}")))?;
        if body.embedding.len() != EMBEDDING_DIM {
            return Err(embed_err(format!(
                "response has {} values, expected {EMBEDDING_DIM}",
                body.embedding.len()
            )));
        }
        validate_values(&body.embedding).map_err(embed_err)?;
        Ok(body.embedding)
    }
}

fn embed_err(message: impl Into<String>) -> Error {
    Error::Embedding {
        key: "http".into(),
        message: message.into(),
    }
}

impl EmbeddingBackend for HttpBackend {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn embed(&self, prompt_text: &str) -> Result<Vec<f64>> {
        let _permit = self.in_flight.acquire();
        let mut backoff = Duration::from_millis(100);
        let mut last = None;
        for attempt in 0..MAX_ATTEMPTS {
            match self.request_once(prompt_text) {
                Ok(v) => return Ok(v),
                Err(e) => {
                    last = Some(e);
                    if attempt + 1 < MAX_ATTEMPTS {
                        std::thread::sleep(backoff);
                        backoff *= 2;
                    }
                }
            }
        }
        Err(last.expect("at least one attempt"))
    }

    fn parallelism_limit(&self) -> usize {
        DEFAULT_IN_FLIGHT
    }
}

/// Counting semaphore bounding concurrent requests.
struct Semaphore {
    state: Mutex<usize>,
    cv: Condvar,
}

struct Permit<'a>(&'a Semaphore);

impl Semaphore {
    fn new(permits: usize) -> Self {
        Semaphore {
            state: Mutex::new(permits),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut available = self.state.lock().unwrap();
        while *available == 0 {
            available = self.cv.wait(available).unwrap();
        }
        *available -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut available = self.0.state.lock().unwrap();
        *available += 1;
        self.0.cv.notify_one();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;

    /// Minimal one-shot HTTP server answering every POST with `body`.
    fn spawn_server(body: String, hits: usize) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        std::thread::spawn(move || {
            for _ in 0..hits {
                let (mut stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut content_length = 0usize;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                        content_length = v.trim().parse().unwrap();
                    }
                    if line == "\r\n" {
                        break;
                    }
                }
                let mut payload = vec![0u8; content_length];
                reader.read_exact(&mut payload).unwrap();
                let response = format!(
                    "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                    body.len(),
                    body
                );
                stream.write_all(response.as_bytes()).unwrap();
            }
        });
        format!("http://{addr}")
    }

    #[test]
    fn passthrough_of_valid_vector() {
        let values: Vec<String> = (0..EMBEDDING_DIM).map(|i| format!("{}.5", i % 7)).collect();
        let body = format!("{{\"embedding\":[{}]}}", values.join(","));
        let endpoint = spawn_server(body, 1);
        let backend = HttpBackend::new(endpoint, "m", None).unwrap();
        let v = backend.embed("hello").unwrap();
        assert_eq!(v.len(), EMBEDDING_DIM);
        assert_eq!(v[0], 0.5);
        assert_eq!(v[8], 1.5);
    }

    #[test]
    fn short_vector_is_shape_error() {
        let endpoint = spawn_server("{\"embedding\":[1,2,3]}".to_string(), MAX_ATTEMPTS);
        let backend = HttpBackend::new(endpoint, "m", None).unwrap();
        let err = backend.embed("hello").unwrap_err();
        assert!(err.to_string().contains("expected 3072"), "{err}");
    }

    #[test]
    fn non_finite_value_is_error() {
        // 1e999 overflows to infinity when parsed
        let mut values = vec!["0.0".to_string(); EMBEDDING_DIM];
        values[7] = "1e999".to_string();
        let body = format!("{{\"embedding\":[{}]}}", values.join(","));
        let endpoint = spawn_server(body, MAX_ATTEMPTS);
        let backend = HttpBackend::new(endpoint, "m", None).unwrap();
        assert!(backend.embed("hello").is_err());
    }
}
