//! Targeted sentiment classification of identity mentions.

mod backend;
mod label;
mod prompt;

use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde::{Deserialize, Serialize};

pub use backend::{
    mock_classify, Backend, BackendConfig, BackendError, BackendKind, CueRules, HttpBackend,
    MockBackend,
};
pub use label::{parse_label, SentimentLabel};
pub use prompt::{
    render_prompt, FewShotExample, PromptTemplate, CONTEXT_PLACEHOLDER, FEW_SHOT_PLACEHOLDER,
};

use crate::error::{Error, Result};
use crate::lexicon::GrammaticalCategory;
use crate::mentions::{MentionRecord, TARGET_CLOSE, TARGET_OPEN};

/// One classification request: the tagged context of a single mention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub mention_id: String,
    pub context: String,
    pub identity: String,
    pub category: GrammaticalCategory,
    /// Window lemmas, used by the mock backend.
    #[serde(default)]
    pub lemmas: Vec<String>,
}

impl TaskInstance {
    pub fn from_record(r: &MentionRecord) -> Result<Self> {
        let rendered = &r.context.rendered;
        if rendered.matches(TARGET_OPEN).count() != 1 || rendered.matches(TARGET_CLOSE).count() != 1
        {
            return Err(Error::malformed(
                0,
                format!(
                    "context of `{}` must tag exactly one target",
                    r.mention.mention_id
                ),
            ));
        }
        Ok(TaskInstance {
            mention_id: r.mention.mention_id.clone(),
            context: rendered.clone(),
            identity: r.mention.identity.clone(),
            category: r.mention.category,
            lemmas: r.context.lemmas.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentimentPrediction {
    pub mention_id: String,
    pub label: Option<SentimentLabel>,
    pub raw_output: String,
    pub backend: String,
    pub parse_ok: bool,
}

impl SentimentPrediction {
    pub fn from_output(mention_id: &str, backend: &str, raw: String) -> Self {
        let label = parse_label(&raw);
        SentimentPrediction {
            mention_id: mention_id.to_string(),
            label,
            raw_output: raw,
            backend: backend.to_string(),
            parse_ok: label.is_some(),
        }
    }

    fn failed(mention_id: &str, backend: &str, err: &BackendError) -> Self {
        SentimentPrediction {
            mention_id: mention_id.to_string(),
            label: None,
            raw_output: format!("error: {err}"),
            backend: backend.to_string(),
            parse_ok: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BatchOptions {
    pub concurrency: usize,
    /// Append-only log of completed predictions; existing entries are not re-queried.
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BatchSummary {
    pub resumed: usize,
    pub requested: usize,
    pub failed: usize,
    pub unparsed: usize,
}

/// Completed predictions persisted one JSON line at a time.
///
/// Only predictions that received a model response are stored, so transport failures are
/// retried on the next run.
pub struct CheckpointStore {
    path: PathBuf,
    file: Mutex<File>,
}

impl CheckpointStore {
    pub fn open(path: &Path) -> Result<(Self, HashMap<String, SentimentPrediction>)> {
        let mut done = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(path)?).lines() {
                let line = line?;
                // a torn final line from an interrupted write is skipped
                if let Ok(p) = serde_json::from_str::<SentimentPrediction>(&line) {
                    done.insert(p.mention_id.clone(), p);
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok((
            CheckpointStore {
                path: path.to_path_buf(),
                file: Mutex::new(file),
            },
            done,
        ))
    }

    pub fn record(&self, p: &SentimentPrediction) -> Result<()> {
        let mut line = serde_json::to_vec(p)?;
        line.push(b'\n');
        let mut f = self.file.lock().expect("checkpoint lock");
        f.write_all(&line)?;
        f.flush()?;
        Ok(())
    }

    /// Sorted ids of all completed predictions.
    pub fn completed_ids(path: &Path) -> Result<Vec<String>> {
        let (_, done) = Self::open(path)?;
        Ok(done
            .into_keys()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect())
    }

    pub fn remove(self) -> Result<()> {
        drop(self.file);
        fs::remove_file(&self.path)?;
        Ok(())
    }
}

/// Classifies every instance, returning predictions in input order.
///
/// Transport failures after retries become `parse_ok = false` predictions carrying the
/// error text; they never abort the batch.
pub fn classify_batch(
    instances: &[TaskInstance],
    backend: &dyn Backend,
    template: &PromptTemplate,
    options: &BatchOptions,
) -> Result<(Vec<SentimentPrediction>, BatchSummary)> {
    template.validate()?;
    let prompts = instances
        .iter()
        .map(|i| render_prompt(i, template))
        .collect::<Result<Vec<_>>>()?;

    let (store, mut done) = match &options.checkpoint {
        Some(path) => {
            let (s, d) = CheckpointStore::open(path)?;
            (Some(s), d)
        }
        None => (None, HashMap::new()),
    };

    let mut results: Vec<Option<SentimentPrediction>> = instances
        .iter()
        .map(|i| done.remove(&i.mention_id))
        .collect();
    let pending: Vec<usize> = (0..instances.len())
        .filter(|&k| results[k].is_none())
        .collect();
    let mut summary = BatchSummary {
        resumed: instances.len() - pending.len(),
        requested: pending.len(),
        ..Default::default()
    };

    let name = backend.name();
    let next = AtomicUsize::new(0);
    let slots = Mutex::new(&mut results);
    let write_error: Mutex<Option<Error>> = Mutex::new(None);
    let failures = AtomicUsize::new(0);
    let workers = options.concurrency.max(1).min(pending.len().max(1));

    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let n = next.fetch_add(1, Ordering::Relaxed);
                let Some(&k) = pending.get(n) else { break };
                let inst = &instances[k];
                let prediction = match backend.complete(inst, &prompts[k]) {
                    Ok(raw) => {
                        let p = SentimentPrediction::from_output(&inst.mention_id, &name, raw);
                        if let Some(store) = &store {
                            if let Err(e) = store.record(&p) {
                                write_error.lock().expect("lock").get_or_insert(e);
                            }
                        }
                        p
                    }
                    Err(e) => {
                        log::warn!("{}: {e}", inst.mention_id);
                        failures.fetch_add(1, Ordering::Relaxed);
                        SentimentPrediction::failed(&inst.mention_id, &name, &e)
                    }
                };
                slots.lock().expect("results lock")[k] = Some(prediction);
            });
        }
    });

    if let Some(e) = write_error.into_inner().expect("lock") {
        return Err(e);
    }
    let predictions: Vec<SentimentPrediction> = results
        .into_iter()
        .map(|p| p.expect("every instance classified"))
        .collect();
    summary.failed = failures.into_inner();
    summary.unparsed = predictions.iter().filter(|p| !p.parse_ok).count();

    if let Some(store) = store {
        if summary.failed == 0 {
            store.remove()?;
        }
    }
    Ok((predictions, summary))
}

pub fn write_predictions<W: Write>(mut out: W, predictions: &[SentimentPrediction]) -> Result<()> {
    for p in predictions {
        serde_json::to_writer(&mut out, p)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_predictions<R: BufRead>(input: R) -> Result<Vec<SentimentPrediction>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let p: SentimentPrediction =
            serde_json::from_str(&line).map_err(|e| Error::malformed(i + 1, e.to_string()))?;
        if p.parse_ok != p.label.is_some() {
            return Err(Error::malformed(i + 1, "parse_ok disagrees with label"));
        }
        out.push(p);
    }
    Ok(out)
}
