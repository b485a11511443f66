//! Identity mentions and their tagged context windows.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{join_forms, Paragraph};
use crate::error::{Error, Result};
use crate::lexicon::{GrammaticalCategory, Lexicon};

pub const TARGET_OPEN: &str = "<target>";
pub const TARGET_CLOSE: &str = "</target>";

/// Sentences on each side of the target included in a context window.
pub const CONTEXT_RADIUS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityMention {
    pub mention_id: String,
    pub paragraph_id: String,
    pub newspaper: String,
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
    pub lemma: String,
    pub identity: String,
    pub category: GrammaticalCategory,
}

pub fn mention_id(paragraph_id: &str, sentence: usize, start: usize, end: usize) -> String {
    format!("{paragraph_id}:{sentence}:{start}-{end}")
}

/// Whether an identity expression denotes a collective actor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferentialType {
    Group,
    NonGroup,
    Unspecified,
}

impl ReferentialType {
    /// Nominal mentions are group references unless annotated otherwise; adjectival ones
    /// stay unspecified until an annotator decides.
    pub fn default_for(category: GrammaticalCategory) -> Self {
        match category {
            GrammaticalCategory::Nominal => ReferentialType::Group,
            GrammaticalCategory::Adjectival => ReferentialType::Unspecified,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ReferentialType::Group => "group",
            ReferentialType::NonGroup => "non-group",
            ReferentialType::Unspecified => "unspecified",
        }
    }
}

impl fmt::Display for ReferentialType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReferentialType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "group" => Ok(ReferentialType::Group),
            "non-group" | "nongroup" => Ok(ReferentialType::NonGroup),
            "unspecified" | "" => Ok(ReferentialType::Unspecified),
            other => Err(format!("unknown referential type `{other}`")),
        }
    }
}

/// Emits one mention per token whose lemma is in the lexicon, in document order.
///
/// Adjectival and nominal matches inside one noun phrase are both emitted.
pub fn extract_mentions<'a>(
    paragraphs: impl IntoIterator<Item = &'a Paragraph>,
    lexicon: &Lexicon,
) -> Vec<IdentityMention> {
    let mut out = Vec::new();
    for p in paragraphs {
        paragraph_mentions(p, lexicon, &mut out);
    }
    out
}

pub fn paragraph_mentions(p: &Paragraph, lexicon: &Lexicon, out: &mut Vec<IdentityMention>) {
    for s in &p.sentences {
        for (i, t) in s.tokens.iter().enumerate() {
            if let Some(entry) = lexicon.get(&t.lemma) {
                out.push(IdentityMention {
                    mention_id: mention_id(&p.paragraph_id, s.index, i, i + 1),
                    paragraph_id: p.paragraph_id.clone(),
                    newspaper: p.newspaper.clone(),
                    sentence: s.index,
                    start: i,
                    end: i + 1,
                    lemma: entry.lemma.clone(),
                    identity: entry.identity.clone(),
                    category: entry.category,
                });
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextWindow {
    /// Paragraph index of the first sentence in the window.
    pub first_sentence: usize,
    /// Surface text of each window sentence, untagged.
    pub sentences: Vec<String>,
    pub target_sentence_offset: usize,
    pub rendered: String,
    /// Lemmas of every token in the window, in order.
    pub lemmas: Vec<String>,
}

impl ContextWindow {
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn sentence_range(&self) -> std::ops::Range<usize> {
        self.first_sentence..self.first_sentence + self.sentences.len()
    }
}

/// Window bounds `[t-2, t+2]` clamped to the paragraph, as a half-open range.
pub fn window_bounds(target: usize, sentence_count: usize) -> std::ops::Range<usize> {
    target.saturating_sub(CONTEXT_RADIUS)..(target + CONTEXT_RADIUS + 1).min(sentence_count)
}

pub fn build_context(mention: &IdentityMention, paragraph: &Paragraph) -> Result<ContextWindow> {
    let mismatch = |reason: String| Error::MentionMismatch {
        mention_id: mention.mention_id.clone(),
        paragraph_id: paragraph.paragraph_id.clone(),
        reason,
    };
    if mention.paragraph_id != paragraph.paragraph_id {
        return Err(mismatch(format!(
            "mention is in `{}`",
            mention.paragraph_id
        )));
    }
    let Some(target) = paragraph.sentences.get(mention.sentence) else {
        return Err(mismatch(format!("no sentence {}", mention.sentence)));
    };
    if mention.start >= mention.end || mention.end > target.tokens.len() {
        return Err(mismatch(format!(
            "span {}..{} outside sentence of {} tokens",
            mention.start,
            mention.end,
            target.tokens.len()
        )));
    }

    let range = window_bounds(mention.sentence, paragraph.sentences.len());
    let window = &paragraph.sentences[range.clone()];
    let sentences: Vec<String> = window.iter().map(|s| s.text()).collect();

    let mut rendered = String::new();
    for (k, s) in window.iter().enumerate() {
        if k > 0 {
            rendered.push(' ');
        }
        if s.index == mention.sentence {
            let before = join_forms(&s.tokens[..mention.start]);
            let inside = join_forms(&s.tokens[mention.start..mention.end]);
            let after = join_forms(&s.tokens[mention.end..]);
            if !before.is_empty() {
                rendered.push_str(&before);
                rendered.push(' ');
            }
            rendered.push_str(TARGET_OPEN);
            rendered.push_str(&inside);
            rendered.push_str(TARGET_CLOSE);
            if !after.is_empty() {
                rendered.push(' ');
                rendered.push_str(&after);
            }
        } else {
            rendered.push_str(&sentences[k]);
        }
    }

    Ok(ContextWindow {
        first_sentence: range.start,
        target_sentence_offset: mention.sentence - range.start,
        lemmas: window
            .iter()
            .flat_map(|s| s.tokens.iter().map(|t| t.lemma.clone()))
            .collect(),
        sentences,
        rendered,
    })
}

/// Removes the target tags from a rendered window.
pub fn strip_target_tags(rendered: &str) -> String {
    rendered.replace(TARGET_OPEN, "").replace(TARGET_CLOSE, "")
}

/// One line of the mentions JSONL file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionRecord {
    #[serde(flatten)]
    pub mention: IdentityMention,
    pub context: ContextWindow,
}

/// Extracts mentions with their windows for every paragraph.
pub fn extract_with_context<'a>(
    paragraphs: impl IntoIterator<Item = &'a Paragraph>,
    lexicon: &Lexicon,
) -> Result<Vec<MentionRecord>> {
    let mut out = Vec::new();
    let mut buf = Vec::new();
    for p in paragraphs {
        buf.clear();
        paragraph_mentions(p, lexicon, &mut buf);
        for m in buf.drain(..) {
            let context = build_context(&m, p)?;
            out.push(MentionRecord {
                mention: m,
                context,
            });
        }
    }
    Ok(out)
}

pub fn write_mentions<W: Write>(mut out: W, records: &[MentionRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_mentions<R: BufRead>(input: R) -> Result<Vec<MentionRecord>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::malformed(i + 1, e.to_string()))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{IssueDate, Sentence, Token};
    use crate::lexicon::{merge_lexicons, LexiconEntry};

    fn paragraph(sentences: &[&[&str]]) -> Paragraph {
        Paragraph {
            paragraph_id: "p1".into(),
            newspaper: "slovenec".into(),
            issue_date: IssueDate::parse("1900-01-01").unwrap(),
            theme: None,
            sentences: sentences
                .iter()
                .enumerate()
                .map(|(index, lemmas)| Sentence {
                    index,
                    tokens: lemmas
                        .iter()
                        .map(|l| Token::new(l.to_uppercase(), *l, ""))
                        .collect(),
                })
                .collect(),
            locations: vec![],
        }
    }

    fn lexicon() -> Lexicon {
        merge_lexicons([vec![
            LexiconEntry::new("nemški", GrammaticalCategory::Adjectival, "Nemci"),
            LexiconEntry::new("nemec", GrammaticalCategory::Nominal, "Nemci"),
        ]])
        .unwrap()
    }

    fn mention_at(p: &Paragraph, sentence: usize, start: usize) -> IdentityMention {
        IdentityMention {
            mention_id: mention_id(&p.paragraph_id, sentence, start, start + 1),
            paragraph_id: p.paragraph_id.clone(),
            newspaper: p.newspaper.clone(),
            sentence,
            start,
            end: start + 1,
            lemma: "x".into(),
            identity: "X".into(),
            category: GrammaticalCategory::Nominal,
        }
    }

    #[test]
    fn single_adjective_mention() {
        let p = paragraph(&[&["nemški", "vojak"]]);
        let ms = extract_mentions([&p], &lexicon());
        assert_eq!(ms.len(), 1);
        assert_eq!((ms[0].start, ms[0].end), (0, 1));
        assert_eq!(ms[0].identity, "Nemci");
        assert_eq!(ms[0].mention_id, "p1:0:0-1");
    }

    #[test]
    fn no_lexicon_lemmas_no_mentions() {
        let p = paragraph(&[&["hiša", "stoji"]]);
        assert!(extract_mentions([&p], &lexicon()).is_empty());
    }

    #[test]
    fn adjective_and_noun_in_one_phrase_both_emitted() {
        let p = paragraph(&[&["nemški", "nemec"]]);
        assert_eq!(extract_mentions([&p], &lexicon()).len(), 2);
    }

    #[test]
    fn windows_truncate_at_paragraph_bounds() {
        let p = paragraph(&[&["a"]]);
        let w = build_context(&mention_at(&p, 0, 0), &p).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.rendered, "<target>A</target>");

        let p = paragraph(&[&["a"], &["b"], &["c", "d"], &["e"], &["f"]]);
        let w = build_context(&mention_at(&p, 2, 1), &p).unwrap();
        assert_eq!((w.sentence_range(), w.target_sentence_offset), (0..5, 2));
        assert_eq!(w.rendered, "A B C <target>D</target> E F");

        let w = build_context(&mention_at(&p, 4, 0), &p).unwrap();
        assert_eq!((w.sentence_range(), w.target_sentence_offset), (2..5, 2));
        assert_eq!(w.lemmas, vec!["c", "d", "e", "f"]);
    }

    #[test]
    fn mismatched_mention_is_rejected() {
        let p = paragraph(&[&["a", "b"]]);
        let mut m = mention_at(&p, 0, 1);
        m.end = 3;
        assert!(build_context(&m, &p).is_err());
        let mut m = mention_at(&p, 1, 0);
        assert!(build_context(&m, &p).is_err());
        m.sentence = 0;
        m.paragraph_id = "other".into();
        assert!(build_context(&m, &p).is_err());
    }

    #[test]
    fn referential_defaults() {
        assert_eq!(
            ReferentialType::default_for(GrammaticalCategory::Nominal),
            ReferentialType::Group
        );
        assert_eq!(
            ReferentialType::default_for(GrammaticalCategory::Adjectival),
            ReferentialType::Unspecified
        );
        assert_eq!("non-group".parse(), Ok(ReferentialType::NonGroup));
    }

    #[test]
    fn records_round_trip_through_jsonl() {
        let p = paragraph(&[&["x"], &["nemški", "vojak"], &["y"]]);
        let recs = extract_with_context([&p], &lexicon()).unwrap();
        let mut buf = Vec::new();
        write_mentions(&mut buf, &recs).unwrap();
        assert_eq!(read_mentions(buf.as_slice()).unwrap(), recs);
        assert_eq!(
            strip_target_tags(&recs[0].context.rendered),
            "X NEMŠKI VOJAK Y"
        );
    }
}
