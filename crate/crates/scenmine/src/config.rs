//! Optional TOML configuration mirroring the command-line flags.
//!
//! ```toml
//! logs = "corpus/logs"
//! queries = "corpus/queries.json"
//! gt = "corpus/gt"
//! out = "run"
//! provider = "stub"            # or "http"
//! fixture = "corpus/fixtures/oracle.json"
//! endpoint = "http://localhost:8080/generate"
//! model = "my-model"
//! k = 5
//! epsrf = true
//! workers = 4
//! seed = 7
//! request_timeout = 120        # seconds, http provider
//! retry_backoff = 2            # seconds before the transport retry
//! categories = ["PEDESTRIAN", "REGULAR_VEHICLE", "EGO_VEHICLE", "BUS", "TRUCK", "BICYCLIST", "MOTORCYCLIST"]
//! ```
//!
//! Every key is optional. Flags win over the file; the environment only
//! supplies the API key.

use std::path::{Path, PathBuf};

use scenmine_core::{CategoryRegistry, Registry};
use serde::Deserialize;

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub logs: Option<PathBuf>,
    pub queries: Option<PathBuf>,
    pub gt: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub provider: Option<String>,
    pub fixture: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub k: Option<usize>,
    pub epsrf: Option<bool>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub request_timeout: Option<f64>,
    pub retry_backoff: Option<f64>,
    pub categories: Option<Vec<String>>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("categories: {0}")]
    Categories(#[from] scenmine_core::category::CategoryError),
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn registry(&self) -> Result<Registry, ConfigError> {
        Ok(match &self.categories {
            Some(names) => Registry::new(CategoryRegistry::new(names.iter().map(String::as_str))?),
            None => Registry::default(),
        })
    }
}
