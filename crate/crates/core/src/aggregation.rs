//! Identity × newspaper sentiment profiles, neutrality rankings, sentiment composition and
//! theme distribution tables.
//!
//! The identity share of a theme is the fraction of that theme's paragraphs containing at
//! least one identity mention.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::Paragraph;
use crate::error::{Error, Result};
use crate::mentions::IdentityMention;
use crate::sentiment::{SentimentLabel, SentimentPrediction};

pub const DEFAULT_MIN_MENTIONS: u64 = 50;
pub const DEFAULT_COMPOSITION_TOP_K: usize = 5;
pub const DEFAULT_RANKING_TOP_K: usize = 10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub positive: u64,
    pub negative: u64,
    pub neutral: u64,
}

impl LabelCounts {
    pub fn add(&mut self, label: SentimentLabel) {
        match label {
            SentimentLabel::Positive => self.positive += 1,
            SentimentLabel::Negative => self.negative += 1,
            SentimentLabel::Neutral => self.neutral += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.positive + self.negative + self.neutral
    }

    /// `1 - neutral / total`; 0 for an empty tally.
    pub fn non_neutral_share(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            1.0 - self.neutral as f64 / total as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportions {
    pub positive: f64,
    pub negative: f64,
    pub neutral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitySentimentProfile {
    pub identity: String,
    pub newspaper: String,
    pub counts: LabelCounts,
    pub total: u64,
    pub proportions: Proportions,
    pub non_neutral_share: f64,
}

impl IdentitySentimentProfile {
    pub fn from_counts(identity: &str, newspaper: &str, counts: LabelCounts) -> Self {
        let total = counts.total();
        let share = |c: u64| {
            if total == 0 {
                0.0
            } else {
                c as f64 / total as f64
            }
        };
        IdentitySentimentProfile {
            identity: identity.to_string(),
            newspaper: newspaper.to_string(),
            counts,
            total,
            proportions: Proportions {
                positive: share(counts.positive),
                negative: share(counts.negative),
                neutral: share(counts.neutral),
            },
            non_neutral_share: counts.non_neutral_share(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseFailure {
    pub identity: String,
    pub newspaper: String,
    pub unparsed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSet {
    /// Sorted by identity, then newspaper.
    pub profiles: Vec<IdentitySentimentProfile>,
    pub parsed: u64,
    pub unparsed: Vec<ParseFailure>,
}

/// Tallies parsed predictions per (identity, newspaper). Unparsed predictions are left out
/// of the profiles and reported separately.
pub fn build_profiles<M: Borrow<IdentityMention>>(
    mentions: &[M],
    predictions: &[SentimentPrediction],
) -> Result<ProfileSet> {
    let by_id: HashMap<&str, &IdentityMention> = mentions
        .iter()
        .map(|m| {
            let m = m.borrow();
            (m.mention_id.as_str(), m)
        })
        .collect();
    let mut tallies: BTreeMap<(&str, &str), LabelCounts> = BTreeMap::new();
    let mut failures: BTreeMap<(&str, &str), u64> = BTreeMap::new();
    let mut parsed = 0;
    for p in predictions {
        let m = by_id
            .get(p.mention_id.as_str())
            .ok_or_else(|| Error::UnknownMention(p.mention_id.clone()))?;
        let key = (m.identity.as_str(), m.newspaper.as_str());
        match p.label {
            Some(label) => {
                tallies.entry(key).or_default().add(label);
                parsed += 1;
            }
            None => *failures.entry(key).or_default() += 1,
        }
    }
    Ok(ProfileSet {
        profiles: tallies
            .into_iter()
            .map(|((i, n), c)| IdentitySentimentProfile::from_counts(i, n, c))
            .collect(),
        parsed,
        unparsed: failures
            .into_iter()
            .map(|((i, n), unparsed)| ParseFailure {
                identity: i.to_string(),
                newspaper: n.to_string(),
                unparsed,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankDirection {
    MostNeutral,
    MostNonNeutral,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedIdentity {
    pub identity: String,
    /// Neutral (or non-neutral) proportion per newspaper.
    pub per_newspaper: BTreeMap<String, f64>,
    pub mean: f64,
}

/// Ranks identities having at least `min_mentions` parsed predictions in every selected
/// newspaper by the unweighted mean proportion across those newspapers, descending, ties by
/// identity label.
///
/// `newspapers = None` selects every newspaper present in `profiles`.
pub fn rank_by_neutrality(
    profiles: &[IdentitySentimentProfile],
    newspapers: Option<&[String]>,
    min_mentions: u64,
    direction: RankDirection,
    top_k: usize,
) -> Vec<RankedIdentity> {
    let selected: BTreeSet<&str> = match newspapers {
        Some(list) => list.iter().map(String::as_str).collect(),
        None => profiles.iter().map(|p| p.newspaper.as_str()).collect(),
    };
    if selected.is_empty() {
        return Vec::new();
    }
    let mut by_identity: BTreeMap<&str, BTreeMap<&str, &IdentitySentimentProfile>> =
        BTreeMap::new();
    for p in profiles {
        if selected.contains(p.newspaper.as_str()) {
            by_identity
                .entry(&p.identity)
                .or_default()
                .insert(&p.newspaper, p);
        }
    }
    let mut ranked: Vec<RankedIdentity> = by_identity
        .into_iter()
        .filter(|(_, per)| {
            per.len() == selected.len() && per.values().all(|p| p.total >= min_mentions.max(1))
        })
        .map(|(identity, per)| {
            let per_newspaper: BTreeMap<String, f64> = per
                .iter()
                .map(|(n, p)| {
                    let v = match direction {
                        RankDirection::MostNeutral => p.proportions.neutral,
                        RankDirection::MostNonNeutral => p.non_neutral_share,
                    };
                    (n.to_string(), v)
                })
                .collect();
            let mean = per_newspaper.values().sum::<f64>() / per_newspaper.len() as f64;
            RankedIdentity {
                identity: identity.to_string(),
                per_newspaper,
                mean,
            }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.mean
            .total_cmp(&a.mean)
            .then_with(|| a.identity.cmp(&b.identity))
    });
    ranked.truncate(top_k);
    ranked
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositionRow {
    pub identity: String,
    /// Parsed predictions for the identity across all newspapers.
    pub identity_total: u64,
    pub newspaper: String,
    pub count: u64,
    pub positive: f64,
    pub negative: f64,
    pub neutral: f64,
}

/// Per-newspaper label proportions for the `top_k` identities with the most parsed
/// predictions overall.
pub fn sentiment_composition(
    profiles: &[IdentitySentimentProfile],
    top_k: usize,
) -> Vec<CompositionRow> {
    let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
    for p in profiles {
        *totals.entry(&p.identity).or_default() += p.total;
    }
    let mut order: Vec<(&str, u64)> = totals.into_iter().collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    order.truncate(top_k);

    let mut rows = Vec::new();
    for (identity, identity_total) in order {
        let mut per: Vec<&IdentitySentimentProfile> =
            profiles.iter().filter(|p| p.identity == identity).collect();
        per.sort_by(|a, b| a.newspaper.cmp(&b.newspaper));
        for p in per {
            rows.push(CompositionRow {
                identity: identity.to_string(),
                identity_total,
                newspaper: p.newspaper.clone(),
                count: p.total,
                positive: p.proportions.positive,
                negative: p.proportions.negative,
                neutral: p.proportions.neutral,
            });
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThemeDistributionRow {
    pub theme: String,
    pub newspaper: String,
    pub paragraphs: u64,
    /// Share of the newspaper's themed paragraphs.
    pub relative: f64,
    /// Share of this theme's paragraphs with at least one identity mention.
    pub identity_share: f64,
    pub distinct_identities: u64,
}

/// One row per (theme, newspaper) for every newspaper with themed paragraphs. Paragraphs
/// without a theme are left out of every denominator.
pub fn theme_distribution<'a, M: Borrow<IdentityMention>>(
    paragraphs: impl IntoIterator<Item = &'a Paragraph>,
    mentions: &[M],
) -> Vec<ThemeDistributionRow> {
    let mut identities_by_paragraph: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for m in mentions {
        let m = m.borrow();
        identities_by_paragraph
            .entry(m.paragraph_id.as_str())
            .or_default()
            .insert(m.identity.as_str());
    }

    #[derive(Default)]
    struct Tally<'a> {
        paragraphs: u64,
        with_mentions: u64,
        identities: BTreeSet<&'a str>,
    }
    let mut themes: BTreeSet<&str> = BTreeSet::new();
    let mut per: BTreeMap<(&str, &str), Tally> = BTreeMap::new();
    let mut themed_totals: BTreeMap<&str, u64> = BTreeMap::new();
    for p in paragraphs {
        let Some(theme) = p.theme.as_deref() else {
            continue;
        };
        themes.insert(theme);
        *themed_totals.entry(&p.newspaper).or_default() += 1;
        let t = per.entry((theme, &p.newspaper)).or_default();
        t.paragraphs += 1;
        if let Some(ids) = identities_by_paragraph.get(p.paragraph_id.as_str()) {
            t.with_mentions += 1;
            t.identities.extend(ids.iter().copied());
        }
    }

    let mut rows = Vec::new();
    for &theme in &themes {
        for (&paper, &total) in &themed_totals {
            let t = per.get(&(theme, paper));
            let count = t.map_or(0, |t| t.paragraphs);
            rows.push(ThemeDistributionRow {
                theme: theme.to_string(),
                newspaper: paper.to_string(),
                paragraphs: count,
                relative: count as f64 / total as f64,
                identity_share: t.map_or(0.0, |t| t.with_mentions as f64 / t.paragraphs as f64),
                distinct_identities: t.map_or(0, |t| t.identities.len() as u64),
            });
        }
    }
    rows
}

fn tsv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .delimiter(b'\t')
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(out)
}

pub fn write_profiles_tsv<W: Write>(out: W, profiles: &[IdentitySentimentProfile]) -> Result<()> {
    let mut w = tsv_writer(out);
    w.write_record([
        "identity",
        "newspaper",
        "positive",
        "negative",
        "neutral",
        "total",
        "prop_positive",
        "prop_negative",
        "prop_neutral",
        "non_neutral_share",
    ])?;
    for p in profiles {
        w.write_record([
            p.identity.clone(),
            p.newspaper.clone(),
            p.counts.positive.to_string(),
            p.counts.negative.to_string(),
            p.counts.neutral.to_string(),
            p.total.to_string(),
            p.proportions.positive.to_string(),
            p.proportions.negative.to_string(),
            p.proportions.neutral.to_string(),
            p.non_neutral_share.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ranking_tsv<W: Write>(out: W, ranked: &[RankedIdentity]) -> Result<()> {
    let papers: BTreeSet<&String> = ranked.iter().flat_map(|r| r.per_newspaper.keys()).collect();
    let mut w = tsv_writer(out);
    let mut header = vec!["rank".to_string(), "identity".to_string()];
    header.extend(papers.iter().map(|p| p.to_string()));
    header.push("mean".into());
    w.write_record(&header)?;
    for (i, r) in ranked.iter().enumerate() {
        let mut row = vec![(i + 1).to_string(), r.identity.clone()];
        row.extend(papers.iter().map(|p| {
            r.per_newspaper
                .get(*p)
                .map(f64::to_string)
                .unwrap_or_default()
        }));
        row.push(r.mean.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_composition_tsv<W: Write>(out: W, rows: &[CompositionRow]) -> Result<()> {
    let mut w = tsv_writer(out);
    w.write_record([
        "identity",
        "identity_total",
        "newspaper",
        "count",
        "positive",
        "negative",
        "neutral",
    ])?;
    for r in rows {
        w.write_record([
            r.identity.clone(),
            r.identity_total.to_string(),
            r.newspaper.clone(),
            r.count.to_string(),
            r.positive.to_string(),
            r.negative.to_string(),
            r.neutral.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_theme_distribution_tsv<W: Write>(out: W, rows: &[ThemeDistributionRow]) -> Result<()> {
    let mut w = tsv_writer(out);
    w.write_record([
        "theme",
        "newspaper",
        "paragraphs",
        "relative",
        "identity_share",
        "distinct_identities",
    ])?;
    for r in rows {
        w.write_record([
            r.theme.clone(),
            r.newspaper.clone(),
            r.paragraphs.to_string(),
            r.relative.to_string(),
            r.identity_share.to_string(),
            r.distinct_identities.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
