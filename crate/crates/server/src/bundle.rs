//! The immutable data a running service answers from.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use presslens_core::aggregation::{build_profiles, ProfileSet};
use presslens_core::corpus::{read_corpus, write_corpus, Paragraph};
use presslens_core::graph::NodeKind;
use presslens_core::mentions::{read_mentions, write_mentions, MentionRecord};
use presslens_core::sentiment::{
    read_predictions, write_predictions, SentimentLabel, SentimentPrediction,
};
use sha2::{Digest, Sha256};

use crate::error::ServerError;

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const MENTIONS_FILE: &str = "mentions.jsonl";
pub const PREDICTIONS_FILE: &str = "predictions.jsonl";

/// Corpus, mentions and predictions plus the lookup tables built from them.
///
/// Paragraph lists in every index are in retrieval order: issue date, then paragraph id.
#[derive(Debug)]
pub struct AnalysisBundle {
    pub paragraphs: Vec<Paragraph>,
    pub mentions: Vec<MentionRecord>,
    pub predictions: Vec<SentimentPrediction>,
    pub profiles: ProfileSet,
    by_id: HashMap<String, usize>,
    labels: HashMap<String, SentimentLabel>,
    mentions_by_paragraph: HashMap<usize, Vec<usize>>,
    index: HashMap<(NodeKind, String), Vec<usize>>,
    newspapers: BTreeSet<String>,
    hash: String,
}

fn open(path: &Path) -> Result<BufReader<File>, ServerError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| ServerError::Io {
            path: path.to_path_buf(),
            source,
        })
}

impl AnalysisBundle {
    /// Loads `mentions.jsonl` and `predictions.jsonl` from `dir`, and the corpus from
    /// `corpus` or else `dir/corpus.jsonl`.
    pub fn load(dir: &Path, corpus: Option<&Path>) -> Result<Self, ServerError> {
        let corpus_path: PathBuf = corpus.map_or_else(|| dir.join(CORPUS_FILE), Path::to_path_buf);
        let (paragraphs, _) =
            read_corpus(open(&corpus_path)?).map_err(|e| ServerError::at(&corpus_path, e))?;
        let mentions_path = dir.join(MENTIONS_FILE);
        let mentions =
            read_mentions(open(&mentions_path)?).map_err(|e| ServerError::at(&mentions_path, e))?;
        let predictions_path = dir.join(PREDICTIONS_FILE);
        let predictions = read_predictions(open(&predictions_path)?)
            .map_err(|e| ServerError::at(&predictions_path, e))?;
        Self::from_parts(paragraphs, mentions, predictions)
    }

    pub fn from_parts(
        paragraphs: Vec<Paragraph>,
        mentions: Vec<MentionRecord>,
        predictions: Vec<SentimentPrediction>,
    ) -> Result<Self, ServerError> {
        let hash = content_hash(&paragraphs, &mentions, &predictions)?;
        let profiles = build_profiles(&mentions, &predictions)?;

        let mut by_id = HashMap::new();
        for (i, p) in paragraphs.iter().enumerate() {
            by_id.insert(p.paragraph_id.clone(), i);
        }
        let labels: HashMap<String, SentimentLabel> = predictions
            .iter()
            .filter_map(|p| p.label.map(|l| (p.mention_id.clone(), l)))
            .collect();

        let mut sets: HashMap<(NodeKind, String), BTreeSet<usize>> = HashMap::new();
        let mut mentions_by_paragraph: HashMap<usize, Vec<usize>> = HashMap::new();
        for (k, r) in mentions.iter().enumerate() {
            let m = &r.mention;
            let &i = by_id.get(&m.paragraph_id).ok_or_else(|| {
                ServerError::Invalid(format!(
                    "mention `{}` refers to unknown paragraph `{}`",
                    m.mention_id, m.paragraph_id
                ))
            })?;
            mentions_by_paragraph.entry(i).or_default().push(k);
            sets.entry((NodeKind::Identity, m.identity.clone()))
                .or_default()
                .insert(i);
            if let Some(l) = labels.get(&m.mention_id) {
                sets.entry((NodeKind::Sentiment, l.symbol().to_string()))
                    .or_default()
                    .insert(i);
            }
        }
        for (i, p) in paragraphs.iter().enumerate() {
            if let Some(t) = &p.theme {
                sets.entry((NodeKind::Theme, t.clone()))
                    .or_default()
                    .insert(i);
            }
            for loc in &p.locations {
                sets.entry((NodeKind::Location, loc.text.clone()))
                    .or_default()
                    .insert(i);
            }
        }
        let order = |i: &usize| {
            (
                paragraphs[*i].issue_date.date,
                paragraphs[*i].paragraph_id.clone(),
            )
        };
        let index = sets
            .into_iter()
            .map(|(key, set)| {
                let mut v: Vec<usize> = set.into_iter().collect();
                v.sort_by_cached_key(order);
                (key, v)
            })
            .collect();
        let newspapers = paragraphs.iter().map(|p| p.newspaper.clone()).collect();

        Ok(AnalysisBundle {
            paragraphs,
            mentions,
            predictions,
            profiles,
            by_id,
            labels,
            mentions_by_paragraph,
            index,
            newspapers,
            hash,
        })
    }

    /// Hex SHA-256 over the canonical serialization of corpus, mentions and predictions.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn newspapers(&self) -> &BTreeSet<String> {
        &self.newspapers
    }

    pub fn paragraph(&self, id: &str) -> Option<&Paragraph> {
        self.by_id.get(id).map(|&i| &self.paragraphs[i])
    }

    pub fn label(&self, mention_id: &str) -> Option<SentimentLabel> {
        self.labels.get(mention_id).copied()
    }

    /// Mentions of a paragraph in document order.
    pub fn paragraph_mentions(&self, id: &str) -> impl Iterator<Item = &MentionRecord> {
        self.by_id
            .get(id)
            .and_then(|i| self.mentions_by_paragraph.get(i))
            .into_iter()
            .flatten()
            .map(|&k| &self.mentions[k])
    }

    /// Paragraphs in which a node's entity occurs, in retrieval order.
    pub fn node_paragraphs(
        &self,
        kind: NodeKind,
        label: &str,
    ) -> Option<impl Iterator<Item = &Paragraph>> {
        self.index
            .get(&(kind, label.to_string()))
            .map(|v| v.iter().map(|&i| &self.paragraphs[i]))
    }

    /// Paragraph counts per theme, optionally for one newspaper.
    pub fn theme_counts(&self, newspaper: Option<&str>) -> BTreeMap<&str, u64> {
        let mut out = BTreeMap::new();
        for p in &self.paragraphs {
            if newspaper.is_some_and(|n| n != p.newspaper) {
                continue;
            }
            if let Some(t) = &p.theme {
                *out.entry(t.as_str()).or_default() += 1;
            }
        }
        out
    }
}

fn content_hash(
    paragraphs: &[Paragraph],
    mentions: &[MentionRecord],
    predictions: &[SentimentPrediction],
) -> Result<String, ServerError> {
    let mut buf = Vec::new();
    write_corpus(&mut buf, paragraphs)?;
    buf.push(0);
    write_mentions(&mut buf, mentions)?;
    buf.push(0);
    write_predictions(&mut buf, predictions)?;
    let digest = Sha256::digest(&buf);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
