//! Pipeline configuration file. Relative paths resolve against the file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use presslens_core::aggregation::{
    DEFAULT_COMPOSITION_TOP_K, DEFAULT_MIN_MENTIONS, DEFAULT_RANKING_TOP_K,
};
use presslens_core::lexicon::{DEFAULT_MIN_FREQ, DEFAULT_SUFFIXES};
use presslens_core::sampler::{DEFAULT_IDENTITY_CAP, DEFAULT_NOMINAL_SHARE, DEFAULT_TOTAL};
use presslens_core::sentiment::BackendConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    /// Prompt template TOML; the bundled placeholder is used when unset.
    pub prompt: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub candidates: CandidateSection,
    pub sampler: SamplerSection,
    pub backend: BackendConfig,
    pub aggregate: AggregateSection,
    pub scope: ScopeSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CandidateSection {
    pub suffixes: Vec<String>,
    pub min_freq: u64,
}

impl Default for CandidateSection {
    fn default() -> Self {
        CandidateSection {
            suffixes: DEFAULT_SUFFIXES.iter().map(|s| s.to_string()).collect(),
            min_freq: DEFAULT_MIN_FREQ,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSection {
    pub total: usize,
    /// Empty means every newspaper in the mentions file, sorted.
    pub newspapers: Vec<String>,
    pub nominal_share: f64,
    pub identity_cap: f64,
}

impl Default for SamplerSection {
    fn default() -> Self {
        SamplerSection {
            total: DEFAULT_TOTAL,
            newspapers: Vec::new(),
            nominal_share: DEFAULT_NOMINAL_SHARE,
            identity_cap: DEFAULT_IDENTITY_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AggregateSection {
    pub min_mentions: u64,
    pub ranking_top_k: usize,
    pub composition_top_k: usize,
    /// Empty means every newspaper.
    pub newspapers: Vec<String>,
}

impl Default for AggregateSection {
    fn default() -> Self {
        AggregateSection {
            min_mentions: DEFAULT_MIN_MENTIONS,
            ranking_top_k: DEFAULT_RANKING_TOP_K,
            composition_top_k: DEFAULT_COMPOSITION_TOP_K,
            newspapers: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScopeSection {
    pub newspaper: Option<String>,
    pub themes: Vec<String>,
    pub min_weight: u64,
    pub from: Option<String>,
    pub to: Option<String>,
}

impl Default for ScopeSection {
    fn default() -> Self {
        ScopeSection {
            newspaper: None,
            themes: Vec::new(),
            min_weight: 1,
            from: None,
            to: None,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: PipelineConfig = toml::from_str(&text)
            .map_err(|e| crate::Invalid(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.corpus,
            &mut cfg.lexicon,
            &mut cfg.gold,
            &mut cfg.prompt,
            &mut cfg.output_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}
