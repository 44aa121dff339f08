//! Layered configuration for the `synthqa` binary.
//!
//! Every setting resolves with the same precedence: command-line flag, then
//! environment variable (provider credentials only), then the optional TOML
//! file passed via `--config`, then the built-in default. Unknown keys in the
//! file are rejected with the offending key named, so typos fail fast instead
//! of silently falling back to defaults.

use std::path::Path;

use serde::Deserialize;
use synthqa_core::error::{Error, Result};
use synthqa_core::transport::HttpConfig;

/// Top-level shape of the TOML configuration file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub llm: ProviderSection,
    #[serde(default)]
    pub embedding: ProviderSection,
    #[serde(default)]
    pub generation: GenerationSection,
    #[serde(default)]
    pub postprocess: PostprocessSection,
}

/// Connection settings for one HTTP provider (`[llm]` or `[embedding]`).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderSection {
    pub endpoint: Option<String>,
    pub token: Option<String>,
    pub model: Option<String>,
}

impl ProviderSection {
    pub fn is_empty(&self) -> bool {
        self.endpoint.is_none() && self.token.is_none() && self.model.is_none()
    }
}

/// Generation knobs (`[generation]`). All optional; unset keys keep defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationSection {
    pub max_questions: Option<usize>,
    pub max_tokens: Option<usize>,
    pub temperature: Option<f64>,
    pub concurrency: Option<usize>,
    pub checkpoint_interval: Option<usize>,
    pub truncation_budget: Option<usize>,
}

/// Filter thresholds (`[postprocess]`).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PostprocessSection {
    pub sentinel_threshold: Option<f64>,
    pub relatedness_threshold: Option<f64>,
    pub relatedness_basis: Option<String>,
}

impl FileConfig {
    /// Parse the file at `path`, rejecting unknown keys by name. Both an
    /// unreadable file and a malformed one are configuration errors.
    pub fn load(path: &Path) -> Result<FileConfig> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("config file {}: {e}", path.display())))?;
        toml::from_str(&raw)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }
}

/// Read an environment variable, treating empty values as unset.
pub fn env_var(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.trim().is_empty())
}

/// Resolve one provider's connection settings (flag > env > file) into an
/// HTTP configuration. `what` names the provider in error messages and
/// matches its config section; `env_prefix` is e.g. `SYNTHQA_LLM`.
pub fn resolve_provider(
    what: &str,
    env_prefix: &str,
    flag_endpoint: Option<&str>,
    flag_token: Option<&str>,
    flag_model: Option<&str>,
    file: &ProviderSection,
) -> Result<HttpConfig> {
    let pick = |flag: Option<&str>, suffix: &str, file_value: &Option<String>| {
        flag.map(str::to_owned)
            .or_else(|| env_var(&format!("{env_prefix}_{suffix}")))
            .or_else(|| file_value.clone())
    };
    let endpoint = pick(flag_endpoint, "ENDPOINT", &file.endpoint);
    let token = pick(flag_token, "TOKEN", &file.token);
    let model = pick(flag_model, "MODEL", &file.model);
    match (endpoint, token, model) {
        (Some(endpoint), Some(token), Some(model)) => Ok(HttpConfig::new(endpoint, token, model)),
        (endpoint, token, model) => {
            let mut missing = Vec::new();
            if endpoint.is_none() {
                missing.push("endpoint");
            }
            if token.is_none() {
                missing.push("token");
            }
            if model.is_none() {
                missing.push("model");
            }
            Err(Error::InvalidConfig(format!(
                "{what} provider needs {}; pass --{what}-* flags, set {env_prefix}_* \
                 environment variables, or fill the [{what}] config section (or use --mock)",
                missing.join(", ")
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_named_in_the_error() {
        let err = toml::from_str::<FileConfig>("[generation]\nmax_quesitons = 3\n").unwrap_err();
        assert!(err.to_string().contains("max_quesitons"), "{err}");
    }

    #[test]
    fn sections_are_all_optional() {
        let cfg: FileConfig = toml::from_str("").unwrap();
        assert!(cfg.llm.is_empty());
        assert!(cfg.generation.max_questions.is_none());
    }

    #[test]
    fn flags_beat_file_values() {
        let file = ProviderSection {
            endpoint: Some("http://file.example".into()),
            token: Some("file-token".into()),
            model: Some("file-model".into()),
        };
        let cfg = resolve_provider(
            "llm",
            "SYNTHQA_TEST_NONE",
            Some("http://flag.example"),
            None,
            None,
            &file,
        )
        .unwrap();
        assert_eq!(cfg.endpoint, "http://flag.example");
        assert_eq!(cfg.model, "file-model");
    }

    #[test]
    fn missing_fields_are_listed() {
        let err = resolve_provider("embedding", "SYNTHQA_TEST_NONE", None, None, None, &ProviderSection::default())
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("endpoint, token, model"), "{msg}");
        assert!(msg.contains("embedding"), "{msg}");
    }
}
