//! Collective-identity lexicon: suffix-based adjectival candidates, merging of curated
//! lists, and lemma → identity lookup.
//!
//! TSV format: `lemma<TAB>category<TAB>identity[<TAB>note]`, `#` comment lines skipped.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

pub const DEFAULT_SUFFIXES: [&str; 4] = ["ski", "ški", "zki", "žki"];
pub const DEFAULT_MIN_FREQ: u64 = 90;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrammaticalCategory {
    Nominal,
    Adjectival,
}

impl GrammaticalCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            GrammaticalCategory::Nominal => "nominal",
            GrammaticalCategory::Adjectival => "adjectival",
        }
    }
}

impl fmt::Display for GrammaticalCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GrammaticalCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nominal" => Ok(GrammaticalCategory::Nominal),
            "adjectival" => Ok(GrammaticalCategory::Adjectival),
            _ => Err(Error::UnknownCategory(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub lemma: String,
    pub category: GrammaticalCategory,
    pub identity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl LexiconEntry {
    pub fn new(lemma: &str, category: GrammaticalCategory, identity: &str) -> Self {
        LexiconEntry {
            lemma: lemma.to_lowercase(),
            category,
            identity: identity.to_string(),
            source: None,
        }
    }
}

/// Immutable lemma-indexed set of entries, kept sorted by lemma.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    index: HashMap<String, usize>,
}

impl Lexicon {
    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, lemma: &str) -> Option<&LexiconEntry> {
        self.index.get(lemma).map(|&i| &self.entries[i])
    }

    fn from_map(map: BTreeMap<String, LexiconEntry>) -> Self {
        let entries: Vec<LexiconEntry> = map.into_values().collect();
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.lemma.clone(), i))
            .collect();
        Lexicon { entries, index }
    }
}

fn suffix_matches(lemma: &str, suffixes: &[String]) -> bool {
    let lemma: String = lemma.nfc().collect();
    suffixes.iter().any(|s| lemma.ends_with(s.as_str()))
}

/// Lemmas ending in any of `suffixes` with at least `min_freq` occurrences, by descending
/// count then lemma.
///
/// Both sides are compared in NFC so a decomposed `š` still matches `-ški`.
pub fn extract_adjectival_candidates<S: AsRef<str>>(
    freqs: &BTreeMap<String, u64>,
    suffixes: &[S],
    min_freq: u64,
) -> Vec<(String, u64)> {
    let suffixes: Vec<String> = suffixes
        .iter()
        .map(|s| s.as_ref().nfc().collect())
        .filter(|s: &String| !s.is_empty())
        .collect();
    let mut out: Vec<(String, u64)> = freqs
        .iter()
        .filter(|(lemma, &count)| count >= min_freq.max(1) && suffix_matches(lemma, &suffixes))
        .map(|(l, &c)| (l.clone(), c))
        .collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

/// Merges entry lists into one lexicon. Identical lemmas collapse; a lemma mapped to two
/// identities (or categories) is an error.
pub fn merge_lexicons<I, P>(parts: I) -> Result<Lexicon>
where
    I: IntoIterator<Item = P>,
    P: IntoIterator<Item = LexiconEntry>,
{
    let mut map: BTreeMap<String, LexiconEntry> = BTreeMap::new();
    for part in parts {
        for entry in part {
            insert_entry(&mut map, entry)?;
        }
    }
    Ok(Lexicon::from_map(map))
}

fn insert_entry(map: &mut BTreeMap<String, LexiconEntry>, entry: LexiconEntry) -> Result<()> {
    match map.get_mut(&entry.lemma) {
        None => {
            map.insert(entry.lemma.clone(), entry);
        }
        Some(existing) => {
            if existing.identity != entry.identity || existing.category != entry.category {
                return Err(Error::LexiconConflict {
                    lemma: entry.lemma,
                    first: format!("{} ({})", existing.identity, existing.category),
                    second: format!("{} ({})", entry.identity, entry.category),
                });
            }
            if existing.source.is_none() {
                existing.source = entry.source;
            }
        }
    }
    Ok(())
}

pub fn map_to_identity<'a>(
    lemma: &str,
    lexicon: &'a Lexicon,
) -> Option<(&'a str, GrammaticalCategory)> {
    lexicon
        .get(lemma)
        .map(|e| (e.identity.as_str(), e.category))
}

pub fn load_lexicon<R: BufRead>(input: R) -> Result<Lexicon> {
    let mut map = BTreeMap::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&cols.len()) {
            return Err(Error::malformed(
                lineno,
                format!(
                    "expected 3 or 4 tab-separated columns, found {}",
                    cols.len()
                ),
            ));
        }
        let lemma = cols[0].trim();
        let identity = cols[2].trim();
        if lemma.is_empty() || identity.is_empty() {
            return Err(Error::malformed(lineno, "empty lemma or identity"));
        }
        let category: GrammaticalCategory = cols[1]
            .parse()
            .map_err(|e: Error| Error::malformed(lineno, e.to_string()))?;
        let mut entry = LexiconEntry::new(lemma, category, identity);
        entry.source = cols
            .get(3)
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(String::from);
        insert_entry(&mut map, entry)?;
    }
    Ok(Lexicon::from_map(map))
}

pub fn save_lexicon<W: Write>(lexicon: &Lexicon, mut out: W) -> Result<()> {
    writeln!(out, "# lemma\tcategory\tidentity\tnote")?;
    for e in &lexicon.entries {
        write!(out, "{}\t{}\t{}", e.lemma, e.category, e.identity)?;
        if let Some(note) = &e.source {
            write!(out, "\t{note}")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}
