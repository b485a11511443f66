//! Synthetic corpora and brute-force oracles shared by integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use presslens_core::corpus::{IssueDate, LocationAnnotation, Paragraph, Sentence, Token};
use presslens_core::lexicon::{merge_lexicons, GrammaticalCategory, Lexicon, LexiconEntry};
use presslens_core::rng::Xoshiro256;
use presslens_core::sentiment::{SentimentLabel, SentimentPrediction};

pub const NEWSPAPERS: [&str; 2] = ["slovenec", "narod"];
pub const THEMES: [&str; 4] = ["Political life", "Paratext", "Education", "Countries"];
pub const LOCATIONS: [&str; 4] = ["Ljubljana", "Dunaj", "Trst", "Praga"];
const PLAIN: [&str; 6] = ["biti", "mesto", "cesar", "dan", "hiša", "pisati"];

pub fn lexicon() -> Lexicon {
    use GrammaticalCategory::*;
    merge_lexicons([vec![
        LexiconEntry::new("nemec", Nominal, "Nemci"),
        LexiconEntry::new("nemški", Adjectival, "Nemci"),
        LexiconEntry::new("slovenec", Nominal, "Slovenci"),
        LexiconEntry::new("slovenski", Adjectival, "Slovenci"),
        LexiconEntry::new("italijanski", Adjectival, "Italijani"),
        LexiconEntry::new("čeh", Nominal, "Čehi"),
    ]])
    .unwrap()
}

const IDENTITY_LEMMAS: [&str; 6] = [
    "nemec",
    "nemški",
    "slovenec",
    "slovenski",
    "italijanski",
    "čeh",
];

/// A random paragraph corpus: 1-4 sentences of 1-6 tokens, some themes missing.
pub fn random_corpus(rng: &mut Xoshiro256, paragraphs: usize) -> Vec<Paragraph> {
    (0..paragraphs)
        .map(|i| {
            let n_sent = 1 + rng.below(4);
            let sentences: Vec<Sentence> = (0..n_sent)
                .map(|index| {
                    let n_tok = 1 + rng.below(6);
                    let tokens = (0..n_tok)
                        .map(|_| {
                            let lemma = if rng.below(3) == 0 {
                                IDENTITY_LEMMAS[rng.below(IDENTITY_LEMMAS.len())]
                            } else {
                                PLAIN[rng.below(PLAIN.len())]
                            };
                            Token::new(lemma.to_uppercase(), lemma, "")
                        })
                        .collect();
                    Sentence { index, tokens }
                })
                .collect();
            let locations = (0..rng.below(3))
                .map(|_| {
                    let s = rng.below(n_sent);
                    let len = sentences[s].tokens.len();
                    let start = rng.below(len);
                    LocationAnnotation {
                        sentence: s,
                        start,
                        end: start + 1,
                        text: LOCATIONS[rng.below(LOCATIONS.len())].to_string(),
                    }
                })
                .collect();
            let theme = match rng.below(5) {
                4 => None,
                k => Some(THEMES[k].to_string()),
            };
            Paragraph {
                paragraph_id: format!("p{i:03}"),
                newspaper: NEWSPAPERS[rng.below(2)].to_string(),
                issue_date: IssueDate::parse(&format!(
                    "1900-{:02}-{:02}",
                    1 + rng.below(12),
                    1 + rng.below(28)
                ))
                .unwrap(),
                theme,
                sentences,
                locations,
            }
        })
        .collect()
}

/// One prediction per mention id; about one in ten unparsed.
pub fn random_predictions(
    rng: &mut Xoshiro256,
    mention_ids: &[String],
) -> Vec<SentimentPrediction> {
    mention_ids
        .iter()
        .map(|id| {
            let raw = match rng.below(10) {
                0 => "nejasno".to_string(),
                k => SentimentLabel::ALL[k % 3].symbol().to_string(),
            };
            SentimentPrediction::from_output(id, "test", raw)
        })
        .collect()
}

/// Identity label of a lemma by linear scan over the lexicon entries.
pub fn identity_of(lexicon: &Lexicon, lemma: &str) -> Option<String> {
    lexicon
        .entries()
        .iter()
        .find(|e| e.lemma == lemma)
        .map(|e| e.identity.clone())
}

/// Unordered pair key, alphabetically sorted.
pub fn pair(x: &str, y: &str) -> (String, String) {
    if x <= y {
        (x.to_string(), y.to_string())
    } else {
        (y.to_string(), x.to_string())
    }
}

/// Brute-force co-occurrence counts straight from tokens, without the mention extractor.
/// Predictions are looked up by the `pid:sentence:start-end` mention id convention.
pub fn brute_force_edges(
    corpus: &[Paragraph],
    lexicon: &Lexicon,
    labels: &HashMap<String, SentimentLabel>,
    newspaper: Option<&str>,
    themes: &[&str],
) -> HashMap<(String, String), u64> {
    let mut counts = HashMap::new();
    for p in corpus {
        let Some(theme) = &p.theme else { continue };
        if newspaper.is_some_and(|n| n != p.newspaper) {
            continue;
        }
        if !themes.is_empty() && !themes.contains(&theme.as_str()) {
            continue;
        }
        let t = format!("theme:{theme}");
        for loc in &p.locations {
            *counts
                .entry(pair(&t, &format!("location:{}", loc.text)))
                .or_insert(0) += 1;
        }
        for s in &p.sentences {
            for (k, tok) in s.tokens.iter().enumerate() {
                let Some(identity) = identity_of(lexicon, &tok.lemma) else {
                    continue;
                };
                let i = format!("identity:{identity}");
                *counts.entry(pair(&t, &i)).or_insert(0) += 1;
                for loc in &p.locations {
                    *counts
                        .entry(pair(&i, &format!("location:{}", loc.text)))
                        .or_insert(0) += 1;
                }
                let id = format!("{}:{}:{}-{}", p.paragraph_id, s.index, k, k + 1);
                if let Some(label) = labels.get(&id) {
                    *counts
                        .entry(pair(&i, &format!("sentiment:{}", label.symbol())))
                        .or_insert(0) += 1;
                }
            }
        }
    }
    counts
}
