//! Layered configuration: built-in defaults, then the config file, then
//! environment variables and command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use schemamatch::config::MatchConfig;
use schemamatch::embedding::{CachedProvider, EmbeddingProvider, FixtureProvider, HashProvider, RemoteProvider, RemoteProviderConfig, DEFAULT_HASH_DIMENSION};
use schemamatch::Error;
use serde::Deserialize;

/// Which embedding backend to use.
#[derive(Debug, Clone, PartialEq)]
pub enum ProviderSpec {
    Hash(usize),
    Fixture(PathBuf),
    /// Remote service; the URL falls back to the configured one.
    Remote(Option<String>),
}

impl Default for ProviderSpec {
    fn default() -> Self {
        ProviderSpec::Hash(DEFAULT_HASH_DIMENSION)
    }
}

impl FromStr for ProviderSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        match (kind.trim().to_ascii_lowercase().as_str(), arg) {
            ("hash", None) => Ok(ProviderSpec::Hash(DEFAULT_HASH_DIMENSION)),
            ("hash", Some(d)) => match d.parse::<usize>() {
                Ok(d) if d > 0 => Ok(ProviderSpec::Hash(d)),
                _ => Err(Error::Validation(format!("invalid hash dimension `{d}`"))),
            },
            ("fixture", Some(p)) if !p.is_empty() => Ok(ProviderSpec::Fixture(PathBuf::from(p))),
            ("remote", None) => Ok(ProviderSpec::Remote(None)),
            ("remote", Some(url)) => Ok(ProviderSpec::Remote(Some(url.to_string()))),
            _ => Err(Error::Validation(format!(
                "unknown provider `{s}` (expected hash[:D], fixture:PATH or remote[:URL])"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderSection {
    /// Same syntax as `--provider`.
    pub spec: Option<String>,
    pub remote: RemoteProviderConfig,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "match")]
    pub matching: MatchConfig,
    pub provider: ProviderSection,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let content = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        toml::from_str(&content).map_err(|e| Error::Parse {
            location: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct ProviderSettings {
    pub spec: ProviderSpec,
    pub remote: RemoteProviderConfig,
}

impl ProviderSettings {
    /// Builds the provider, wrapped in a write-once cache.
    pub fn build(&self) -> Result<Arc<dyn EmbeddingProvider>, Error> {
        Ok(match &self.spec {
            ProviderSpec::Hash(d) => Arc::new(CachedProvider::new(HashProvider::new(*d))),
            ProviderSpec::Fixture(p) => Arc::new(CachedProvider::new(FixtureProvider::load(p)?)),
            ProviderSpec::Remote(url) => {
                let mut cfg = self.remote.clone();
                if let Some(u) = url {
                    cfg.url = u.clone();
                }
                Arc::new(CachedProvider::new(RemoteProvider::connect(cfg)?))
            }
        })
    }
}
