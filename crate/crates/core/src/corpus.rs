//! Annotated corpus model and the JSONL interchange format.
//!
//! One paragraph per line:
//!
//! ```text
//! {"paragraph_id":"slovenec-1895-03-12-p0042","newspaper":"slovenec","issue_date":"1895-03-12",
//!  "theme":"Political life","sentences":[[{"form":"Nemci","lemma":"nemec","pos":"NOUN"}]],
//!  "locations":[{"sentence":0,"start":3,"end":4,"text":"Ljubljana"}]}
//! ```
//!
//! `theme` may be null. Unknown fields are ignored and counted. Sentence segmentation is
//! taken from the input as-is. An `issue_date` of the form `YYYY-MM` or `YYYY-MM-00` marks
//! an unknown day; it is stored as the first of the month and flagged in the
//! [`ValidationReport`].

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use chrono::NaiveDate;
use serde::de::IgnoredAny;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub form: String,
    pub lemma: String,
    #[serde(default)]
    pub pos: String,
}

impl Token {
    pub fn new(form: impl Into<String>, lemma: impl Into<String>, pos: impl Into<String>) -> Self {
        Token {
            form: form.into(),
            lemma: lemma.into(),
            pos: pos.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub index: usize,
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// Surface text with single spaces between tokens.
    pub fn text(&self) -> String {
        join_forms(&self.tokens)
    }
}

pub(crate) fn join_forms(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&t.form);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationAnnotation {
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
    pub text: String,
}

/// Whether the day of an issue date is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum DatePrecision {
    #[default]
    Day,
    /// Day unknown; the date holds the first of the month.
    Month,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IssueDate {
    pub date: NaiveDate,
    pub precision: DatePrecision,
}

impl IssueDate {
    pub fn day(date: NaiveDate) -> Self {
        IssueDate {
            date,
            precision: DatePrecision::Day,
        }
    }

    pub fn parse(s: &str) -> Option<IssueDate> {
        let parts: Vec<&str> = s.split('-').collect();
        let num = |p: &str, len: usize| {
            (p.len() == len && p.bytes().all(|b| b.is_ascii_digit()))
                .then(|| p.parse::<u32>().ok())
                .flatten()
        };
        let (year, month, day) = match parts.as_slice() {
            [y, m] => (num(y, 4)?, num(m, 2)?, 0),
            [y, m, d] => (num(y, 4)?, num(m, 2)?, num(d, 2)?),
            _ => return None,
        };
        let precision = if day == 0 {
            DatePrecision::Month
        } else {
            DatePrecision::Day
        };
        let date = NaiveDate::from_ymd_opt(year as i32, month, day.max(1))?;
        Some(IssueDate { date, precision })
    }
}

impl fmt::Display for IssueDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.precision {
            DatePrecision::Day => write!(f, "{}", self.date.format("%Y-%m-%d")),
            DatePrecision::Month => write!(f, "{}", self.date.format("%Y-%m")),
        }
    }
}

impl Serialize for IssueDate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paragraph {
    pub paragraph_id: String,
    pub newspaper: String,
    pub issue_date: IssueDate,
    pub theme: Option<String>,
    pub sentences: Vec<Sentence>,
    pub locations: Vec<LocationAnnotation>,
}

impl Paragraph {
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    /// Checks every structural invariant of a paragraph.
    pub fn validate(&self) -> Result<()> {
        let span_err = |reason: String| Error::InvalidSpan {
            paragraph_id: self.paragraph_id.clone(),
            reason,
        };
        if self.paragraph_id.is_empty() {
            return Err(span_err("empty paragraph_id".into()));
        }
        for (i, s) in self.sentences.iter().enumerate() {
            if s.index != i {
                return Err(span_err(format!(
                    "sentence index {} at position {i}",
                    s.index
                )));
            }
            if s.tokens.is_empty() {
                return Err(span_err(format!("sentence {i} has no tokens")));
            }
            for (j, t) in s.tokens.iter().enumerate() {
                if t.form.is_empty() || t.lemma.is_empty() {
                    return Err(span_err(format!(
                        "sentence {i} token {j} has empty form or lemma"
                    )));
                }
            }
        }
        for loc in &self.locations {
            let Some(sentence) = self.sentences.get(loc.sentence) else {
                return Err(span_err(format!(
                    "location `{}` references missing sentence {}",
                    loc.text, loc.sentence
                )));
            };
            if loc.start >= loc.end || loc.end > sentence.tokens.len() {
                return Err(span_err(format!(
                    "location `{}` span {}..{} invalid for sentence {} of {} tokens",
                    loc.text,
                    loc.start,
                    loc.end,
                    loc.sentence,
                    sentence.tokens.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct RawParagraph {
    paragraph_id: String,
    newspaper: String,
    issue_date: String,
    #[serde(default)]
    theme: Option<String>,
    sentences: Vec<Vec<Token>>,
    #[serde(default)]
    locations: Vec<LocationAnnotation>,
    #[serde(flatten)]
    unknown: BTreeMap<String, IgnoredAny>,
}

#[derive(Serialize)]
struct WireParagraph<'a> {
    paragraph_id: &'a str,
    newspaper: &'a str,
    issue_date: IssueDate,
    theme: &'a Option<String>,
    sentences: Vec<&'a [Token]>,
    locations: &'a [LocationAnnotation],
}

impl Serialize for Paragraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WireParagraph {
            paragraph_id: &self.paragraph_id,
            newspaper: &self.newspaper,
            issue_date: self.issue_date,
            theme: &self.theme,
            sentences: self.sentences.iter().map(|s| s.tokens.as_slice()).collect(),
            locations: &self.locations,
        }
        .serialize(s)
    }
}

/// Problems that do not reject a record but are worth reporting.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub paragraphs: usize,
    pub unknown_fields: usize,
    /// Paragraphs whose issue date has no day.
    pub approximate_dates: Vec<String>,
}

/// Streaming reader over the JSONL interchange format.
///
/// Only the set of seen paragraph ids is retained between records.
pub struct CorpusReader<R> {
    input: R,
    line: usize,
    seen: HashSet<String>,
    report: ValidationReport,
    buf: String,
    failed: bool,
}

impl<R: BufRead> CorpusReader<R> {
    pub fn new(input: R) -> Self {
        CorpusReader {
            input,
            line: 0,
            seen: HashSet::new(),
            report: ValidationReport::default(),
            buf: String::new(),
            failed: false,
        }
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    fn parse_line(&mut self, line: &str) -> Result<Paragraph> {
        let raw: RawParagraph =
            serde_json::from_str(line).map_err(|e| Error::malformed(self.line, e.to_string()))?;
        let issue_date = IssueDate::parse(&raw.issue_date).ok_or_else(|| {
            Error::malformed(
                self.line,
                format!("invalid issue_date `{}`", raw.issue_date),
            )
        })?;
        if raw.newspaper.is_empty() {
            return Err(Error::malformed(self.line, "empty newspaper"));
        }
        let paragraph = Paragraph {
            paragraph_id: raw.paragraph_id,
            newspaper: raw.newspaper,
            issue_date,
            theme: raw.theme,
            sentences: raw
                .sentences
                .into_iter()
                .enumerate()
                .map(|(index, tokens)| Sentence { index, tokens })
                .collect(),
            locations: raw.locations,
        };
        paragraph.validate()?;
        if !self.seen.insert(paragraph.paragraph_id.clone()) {
            return Err(Error::DuplicateParagraph {
                line: self.line,
                paragraph_id: paragraph.paragraph_id,
            });
        }
        self.report.paragraphs += 1;
        self.report.unknown_fields += raw.unknown.len();
        if paragraph.issue_date.precision == DatePrecision::Month {
            self.report
                .approximate_dates
                .push(paragraph.paragraph_id.clone());
        }
        Ok(paragraph)
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<Paragraph>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e.into()));
                }
            }
            self.line += 1;
            let line = std::mem::take(&mut self.buf);
            let trimmed = line.trim();
            if trimmed.is_empty() {
                self.buf = line;
                continue;
            }
            let result = self.parse_line(trimmed);
            self.buf = line;
            if result.is_err() {
                self.failed = true;
            }
            return Some(result);
        }
    }
}

/// Streams paragraphs from a JSONL reader.
pub fn parse_corpus<R: BufRead>(input: R) -> CorpusReader<R> {
    CorpusReader::new(input)
}

/// Reads the whole corpus into memory, returning the paragraphs and the validation report.
pub fn read_corpus<R: BufRead>(input: R) -> Result<(Vec<Paragraph>, ValidationReport)> {
    let mut reader = parse_corpus(input);
    let paragraphs = reader.by_ref().collect::<Result<Vec<_>>>()?;
    Ok((paragraphs, reader.report().clone()))
}

pub fn write_corpus<'a, W: Write>(
    mut out: W,
    paragraphs: impl IntoIterator<Item = &'a Paragraph>,
) -> Result<()> {
    for p in paragraphs {
        serde_json::to_writer(&mut out, p)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    /// Every token entry, punctuation included.
    pub tokens: usize,
    pub paragraphs: usize,
    pub issues: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    #[serde(flatten)]
    pub total: Counts,
    pub per_newspaper: BTreeMap<String, Counts>,
}

pub fn corpus_stats<'a>(paragraphs: impl IntoIterator<Item = &'a Paragraph>) -> CorpusStats {
    let mut per: BTreeMap<String, Counts> = BTreeMap::new();
    // a month-only date and an exact first-of-month date name the same issue
    let mut issues: BTreeSet<(&str, NaiveDate)> = BTreeSet::new();
    for p in paragraphs {
        let c = per.entry(p.newspaper.clone()).or_default();
        c.tokens += p.token_count();
        c.paragraphs += 1;
        if issues.insert((&p.newspaper, p.issue_date.date)) {
            c.issues += 1;
        }
    }
    let total = per.values().fold(Counts::default(), |acc, c| Counts {
        tokens: acc.tokens + c.tokens,
        paragraphs: acc.paragraphs + c.paragraphs,
        issues: acc.issues + c.issues,
    });
    CorpusStats {
        total,
        per_newspaper: per,
    }
}

/// Counts lemma occurrences, optionally restricted to one newspaper.
pub fn lemma_frequencies<'a>(
    paragraphs: impl IntoIterator<Item = &'a Paragraph>,
    newspaper: Option<&str>,
) -> BTreeMap<String, u64> {
    let mut freqs = BTreeMap::new();
    for p in paragraphs {
        if newspaper.is_some_and(|n| n != p.newspaper) {
            continue;
        }
        for t in p.tokens() {
            *freqs.entry(t.lemma.clone()).or_insert(0) += 1;
        }
    }
    freqs
}
