//! HTTP embedding service client.
//!
//! Protocol: `POST {base}/embed` with `{"texts": [...]}`, answered by
//! `{"dimension": D, "vectors": [[...], ...], "oov": [indices]}`. Requests
//! are split into batches of `batch_size` texts.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EmbeddingProvider, EmbeddingVector, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteProviderConfig {
    pub url: String,
    pub batch_size: usize,
    pub timeout_secs: f64,
    pub retries: u32,
}

impl Default for RemoteProviderConfig {
    fn default() -> Self {
        RemoteProviderConfig {
            url: "http://127.0.0.1:8500".into(),
            batch_size: 64,
            timeout_secs: 30.0,
            retries: 2,
        }
    }
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct EmbedResponse {
    dimension: usize,
    #[serde(default)]
    vectors: Vec<Vec<f64>>,
    #[serde(default)]
    oov: Vec<usize>,
}

pub struct RemoteProvider {
    config: RemoteProviderConfig,
    client: reqwest::blocking::Client,
    endpoint: String,
    dimension: usize,
}

impl std::fmt::Debug for RemoteProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RemoteProvider")
            .field("endpoint", &self.endpoint)
            .field("dimension", &self.dimension)
            .finish()
    }
}

impl RemoteProvider {
    /// Connects and learns the model dimension with an empty request.
    pub fn connect(config: RemoteProviderConfig) -> Result<Self> {
        if config.batch_size == 0 {
            return Err(Error::validation("remote batch size must be positive"));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(config.timeout_secs.max(0.001)))
            .build()
            .map_err(|e| Error::Transport(e.to_string()))?;
        let endpoint = format!("{}/embed", config.url.trim_end_matches('/'));
        let mut provider = RemoteProvider {
            config,
            client,
            endpoint,
            dimension: 0,
        };
        let probe = provider.request(&[])?;
        if probe.dimension == 0 {
            return Err(Error::Transport("service reported dimension 0".into()));
        }
        provider.dimension = probe.dimension;
        Ok(provider)
    }

    pub fn config(&self) -> &RemoteProviderConfig {
        &self.config
    }

    fn request(&self, texts: &[&str]) -> Result<EmbedResponse> {
        let mut last_error = String::new();
        for _ in 0..=self.config.retries {
            let sent = self
                .client
                .post(&self.endpoint)
                .json(&EmbedRequest { texts })
                .send()
                .and_then(|r| r.error_for_status());
            match sent {
                Ok(resp) => {
                    return resp
                        .json::<EmbedResponse>()
                        .map_err(|e| Error::Transport(format!("malformed response: {e}")))
                }
                Err(e) => last_error = e.to_string(),
            }
        }
        Err(Error::Transport(format!(
            "{} failed after {} attempt(s): {last_error}",
            self.endpoint,
            self.config.retries + 1
        )))
    }
}

impl EmbeddingProvider for RemoteProvider {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn vocabulary(&self) -> Vocabulary {
        Vocabulary::Closed
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Option<EmbeddingVector>>> {
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(self.config.batch_size) {
            let resp = self.request(chunk)?;
            if resp.dimension != self.dimension {
                return Err(Error::Transport(format!(
                    "service switched dimension from {} to {}",
                    self.dimension, resp.dimension
                )));
            }
            let mut vectors: Vec<Option<Vec<f64>>> = resp.vectors.into_iter().map(Some).collect();
            vectors.resize(chunk.len(), None);
            for i in resp.oov {
                if let Some(slot) = vectors.get_mut(i) {
                    *slot = None;
                }
            }
            for (i, v) in vectors.into_iter().enumerate() {
                match v {
                    None => out.push(None),
                    Some(c) if c.len() == self.dimension => out.push(Some(
                        EmbeddingVector::new(c).map_err(|e| Error::Transport(e.to_string()))?,
                    )),
                    Some(c) => {
                        return Err(Error::Transport(format!(
                            "vector {i} has {} components, expected {}",
                            c.len(),
                            self.dimension
                        )))
                    }
                }
            }
        }
        Ok(out)
    }
}
