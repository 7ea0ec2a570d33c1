//! TOML run config. Precedence: command-line flag, then this file, then defaults.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;
use umf_core::rerank::{ModelScoreMode, RerankConfig};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub activation_threshold: Option<f64>,
    pub top_k: Option<usize>,
    pub beam_width: Option<usize>,
    pub boost: Option<f64>,
    pub penalty: Option<f64>,
    pub score_all: Option<bool>,
    pub model_scores: Option<ModelScoreMode>,
    pub concurrency: Option<usize>,
    pub source_lang: Option<String>,
    pub target_lang: Option<String>,
    pub lexicon: Option<PathBuf>,
    pub weights: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut config: FileConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        // Paths in the file are relative to the file.
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut config.lexicon, &mut config.weights].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }
}

/// Flag values as given on the command line; `None` when absent.
#[derive(Debug, Clone, Default)]
pub struct RerankFlags {
    pub alpha: Option<f64>,
    pub threshold: Option<f64>,
    pub top_k: Option<usize>,
    pub beam_width: Option<usize>,
    pub boost: Option<f64>,
    pub penalty: Option<f64>,
    pub score_all: bool,
}

pub fn merge(flags: &RerankFlags, file: &FileConfig) -> RerankConfig {
    let d = RerankConfig::default();
    RerankConfig {
        alpha: flags.alpha.or(file.alpha).unwrap_or(d.alpha),
        activation_threshold: flags
            .threshold
            .or(file.activation_threshold)
            .unwrap_or(d.activation_threshold),
        top_k: flags.top_k.or(file.top_k).unwrap_or(d.top_k),
        beam_width: flags.beam_width.or(file.beam_width).unwrap_or(d.beam_width),
        boost: flags.boost.or(file.boost).unwrap_or(d.boost),
        penalty: flags.penalty.or(file.penalty).unwrap_or(d.penalty),
        score_all: flags.score_all || file.score_all.unwrap_or(d.score_all),
        model_scores: file.model_scores.unwrap_or(d.model_scores),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_file_beats_default() {
        let file: FileConfig = toml::from_str("alpha = 0.3\ntop_k = 8\n").unwrap();
        let flags = RerankFlags {
            alpha: Some(0.9),
            ..Default::default()
        };
        let merged = merge(&flags, &file);
        assert_eq!(merged.alpha, 0.9);
        assert_eq!(merged.top_k, 8);
        assert_eq!(merged.beam_width, 32);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<FileConfig>("alpah = 0.3\n").is_err());
    }
}
