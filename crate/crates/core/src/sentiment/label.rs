use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SentimentLabel {
    Positive,
    Neutral,
    Negative,
}

impl SentimentLabel {
    /// Table order: positive, neutral, negative.
    pub const ALL: [SentimentLabel; 3] = [
        SentimentLabel::Positive,
        SentimentLabel::Neutral,
        SentimentLabel::Negative,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "+",
            SentimentLabel::Neutral => "0",
            SentimentLabel::Negative => "-",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "positive",
            SentimentLabel::Neutral => "neutral",
            SentimentLabel::Negative => "negative",
        }
    }

    pub fn index(self) -> usize {
        match self {
            SentimentLabel::Positive => 0,
            SentimentLabel::Neutral => 1,
            SentimentLabel::Negative => 2,
        }
    }

    /// Accepts the canonical symbols and the English class names.
    pub fn from_symbol(s: &str) -> Option<Self> {
        match s.trim() {
            "+" | "pos" | "positive" => Some(SentimentLabel::Positive),
            "0" | "neu" | "neutral" => Some(SentimentLabel::Neutral),
            "-" | "neg" | "negative" => Some(SentimentLabel::Negative),
            _ => None,
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for SentimentLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::from_symbol(s).ok_or_else(|| format!("unknown sentiment label `{s}`"))
    }
}

impl Serialize for SentimentLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for SentimentLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

const WORDS: [(&str, SentimentLabel); 6] = [
    ("pozitivno", SentimentLabel::Positive),
    ("negativno", SentimentLabel::Negative),
    ("nevtralno", SentimentLabel::Neutral),
    ("positive", SentimentLabel::Positive),
    ("negative", SentimentLabel::Negative),
    ("neutral", SentimentLabel::Neutral),
];

/// Extracts a label from free-form model output.
///
/// Scans left to right and returns the first hit. At each position a standalone symbol
/// (`+`, `-`, `0` not touching letters or digits) is tried first, then the Slovene and
/// English class words, case-insensitively and starting at a word boundary.
pub fn parse_label(raw: &str) -> Option<SentimentLabel> {
    let chars: Vec<char> = raw.chars().collect();
    let is_word = |c: char| c.is_alphanumeric();
    for i in 0..chars.len() {
        let prev_ok = i == 0 || !is_word(chars[i - 1]);
        let next_ok = i + 1 == chars.len() || !is_word(chars[i + 1]);
        let symbol = match chars[i] {
            '+' => Some(SentimentLabel::Positive),
            '-' => Some(SentimentLabel::Negative),
            '0' => Some(SentimentLabel::Neutral),
            _ => None,
        };
        if let Some(label) = symbol {
            // a '.' or ',' followed by a digit makes it part of a number ("0.5", "-0,3")
            let numeric_tail = chars.get(i + 1).is_some_and(|&c| c == '.' || c == ',')
                && chars.get(i + 2).is_some_and(|c| c.is_ascii_digit());
            if prev_ok && next_ok && !numeric_tail {
                return Some(label);
            }
        }
        if prev_ok && is_word(chars[i]) {
            for (word, label) in WORDS {
                let matches = word.chars().enumerate().all(|(k, w)| {
                    chars
                        .get(i + k)
                        .is_some_and(|c| c.to_lowercase().eq(std::iter::once(w)))
                });
                if matches {
                    return Some(label);
                }
            }
        }
    }
    None
}
