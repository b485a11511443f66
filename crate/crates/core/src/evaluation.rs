//! Scoring predictions against gold annotations.
//!
//! Zero-division convention: precision with no predictions of a class is 0, F1 with
//! P = R = 0 is 0. Unparsed predictions are counted apart and never imputed.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::GrammaticalCategory;
use crate::mentions::ReferentialType;
use crate::sentiment::{SentimentLabel, SentimentPrediction};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub mention_id: String,
    pub gold: SentimentLabel,
    pub predicted: Option<SentimentLabel>,
    pub category: GrammaticalCategory,
    pub referential: ReferentialType,
    pub newspaper: String,
}

/// Counts indexed `[gold][predicted]` in [`SentimentLabel::ALL`] order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
    pub unparsed: u64,
}

impl ConfusionMatrix {
    pub fn add(&mut self, gold: SentimentLabel, predicted: Option<SentimentLabel>) {
        match predicted {
            Some(p) => self.counts[gold.index()][p.index()] += 1,
            None => self.unparsed += 1,
        }
    }

    pub fn get(&self, gold: SentimentLabel, predicted: SentimentLabel) -> u64 {
        self.counts[gold.index()][predicted.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|i| self.counts[i][i]).sum()
    }

    pub fn support(&self, c: SentimentLabel) -> u64 {
        self.counts[c.index()].iter().sum()
    }

    pub fn predicted(&self, c: SentimentLabel) -> u64 {
        self.counts.iter().map(|row| row[c.index()]).sum()
    }
}

pub fn score(records: &[EvalRecord]) -> Result<ConfusionMatrix> {
    if records.is_empty() {
        return Err(Error::Empty("no evaluation records"));
    }
    let mut m = ConfusionMatrix::default();
    for r in records {
        m.add(r.gold, r.predicted);
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: SentimentLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Positive, neutral, negative.
    pub classes: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    pub n: u64,
    pub unparsed: u64,
    pub confusion: ConfusionMatrix,
}

impl MetricsReport {
    pub fn class(&self, label: SentimentLabel) -> &ClassMetrics {
        &self.classes[label.index()]
    }

    /// Micro-averaged F1 from pooled TP/FP/FN.
    pub fn micro_f1(&self) -> f64 {
        let m = &self.confusion;
        let tp = m.trace() as f64;
        let fp: f64 = SentimentLabel::ALL
            .iter()
            .map(|&c| (m.predicted(c) - m.get(c, c)) as f64)
            .sum();
        let fn_: f64 = SentimentLabel::ALL
            .iter()
            .map(|&c| (m.support(c) - m.get(c, c)) as f64)
            .sum();
        let p = ratio(tp, tp + fp);
        let r = ratio(tp, tp + fn_);
        harmonic(p, r)
    }

    pub fn unparsed_rate(&self) -> f64 {
        ratio(self.unparsed as f64, (self.n + self.unparsed) as f64)
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn metrics(matrix: &ConfusionMatrix) -> MetricsReport {
    let n = matrix.total();
    let classes: Vec<ClassMetrics> = SentimentLabel::ALL
        .iter()
        .map(|&c| {
            let tp = matrix.get(c, c) as f64;
            let precision = ratio(tp, matrix.predicted(c) as f64);
            let recall = ratio(tp, matrix.support(c) as f64);
            ClassMetrics {
                label: c,
                precision,
                recall,
                f1: harmonic(precision, recall),
                support: matrix.support(c),
            }
        })
        .collect();
    let mean = |f: fn(&ClassMetrics) -> f64| classes.iter().map(f).sum::<f64>() / 3.0;
    let weighted = |f: fn(&ClassMetrics) -> f64| {
        ratio(
            classes.iter().map(|c| c.support as f64 * f(c)).sum::<f64>(),
            n as f64,
        )
    };
    MetricsReport {
        accuracy: ratio(matrix.trace() as f64, n as f64),
        macro_precision: mean(|c| c.precision),
        macro_recall: mean(|c| c.recall),
        macro_f1: mean(|c| c.f1),
        weighted_precision: weighted(|c| c.precision),
        weighted_recall: weighted(|c| c.recall),
        weighted_f1: weighted(|c| c.f1),
        classes,
        n,
        unparsed: matrix.unparsed,
        confusion: *matrix,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Category,
    Referential,
    Newspaper,
}

pub fn subset_report(records: &[EvalRecord], by: GroupBy) -> BTreeMap<String, MetricsReport> {
    let mut groups: BTreeMap<String, ConfusionMatrix> = BTreeMap::new();
    for r in records {
        let key = match by {
            GroupBy::Category => r.category.to_string(),
            GroupBy::Referential => r.referential.to_string(),
            GroupBy::Newspaper => r.newspaper.clone(),
        };
        groups.entry(key).or_default().add(r.gold, r.predicted);
    }
    groups.into_iter().map(|(k, m)| (k, metrics(&m))).collect()
}

/// Rounds half-up to three decimals for display.
pub fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn fmt3(x: f64) -> String {
    format!("{:.3}", round3(x))
}

/// Plain-text classification table.
pub fn render_report(title: &str, r: &MetricsReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{title} (N={})", r.n);
    let _ = writeln!(
        s,
        "{:<14}{:>8}{:>8}{:>8}{:>9}",
        "", "P", "R", "F1", "support"
    );
    for c in &r.classes {
        let name = format!("{} ({})", capitalize(c.label.name()), c.label.symbol());
        let _ = writeln!(
            s,
            "{:<14}{:>8}{:>8}{:>8}{:>9}",
            name,
            fmt3(c.precision),
            fmt3(c.recall),
            fmt3(c.f1),
            c.support
        );
    }
    let _ = writeln!(
        s,
        "{:<14}{:>8}{:>8}{:>8}{:>9}",
        "Accuracy",
        "",
        "",
        fmt3(r.accuracy),
        r.n
    );
    let _ = writeln!(
        s,
        "{:<14}{:>8}{:>8}{:>8}{:>9}",
        "Macro avg",
        fmt3(r.macro_precision),
        fmt3(r.macro_recall),
        fmt3(r.macro_f1),
        r.n
    );
    let _ = writeln!(
        s,
        "{:<14}{:>8}{:>8}{:>8}{:>9}",
        "Weighted avg",
        fmt3(r.weighted_precision),
        fmt3(r.weighted_recall),
        fmt3(r.weighted_f1),
        r.n
    );
    if r.unparsed > 0 {
        let _ = writeln!(
            s,
            "Unparsed      {} ({:.1}% of predictions, excluded)",
            r.unparsed,
            r.unparsed_rate() * 100.0
        );
    }
    s
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

/// A filled-in annotation row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldRecord {
    pub mention_id: String,
    pub newspaper: String,
    pub identity: String,
    pub category: GrammaticalCategory,
    pub gold: SentimentLabel,
    pub referential: ReferentialType,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GoldSummary {
    pub rows: usize,
    /// Rows marked unknown and excluded.
    pub unknown: usize,
}

fn truthy(s: &str) -> bool {
    matches!(
        s.trim().to_ascii_lowercase().as_str(),
        "1" | "true" | "yes" | "y" | "x"
    )
}

/// Reads an annotation TSV. Rows flagged `unknown` are dropped; nominal mentions without a
/// referential annotation default to group references.
pub fn read_gold_tsv<R: Read>(input: R) -> Result<(Vec<GoldRecord>, GoldSummary)> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .flexible(false)
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::malformed(1, format!("missing column `{name}`")))
    };
    let (id, paper, ident, cat, gold, refer, unknown) = (
        col("mention_id")?,
        col("newspaper")?,
        col("identity")?,
        col("category")?,
        col("gold_sentiment")?,
        col("referential_type")?,
        col("unknown")?,
    );
    let mut out = Vec::new();
    let mut summary = GoldSummary::default();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        summary.rows += 1;
        if truthy(&row[unknown]) {
            summary.unknown += 1;
            continue;
        }
        let category: GrammaticalCategory = row[cat]
            .parse()
            .map_err(|e: Error| Error::malformed(line, e.to_string()))?;
        let label = SentimentLabel::from_symbol(&row[gold]).ok_or_else(|| {
            Error::malformed(
                line,
                format!("gold_sentiment `{}` is not +, - or 0", &row[gold]),
            )
        })?;
        let referential = if row[refer].trim().is_empty() {
            ReferentialType::default_for(category)
        } else {
            row[refer]
                .parse()
                .map_err(|e: String| Error::malformed(line, e))?
        };
        out.push(GoldRecord {
            mention_id: row[id].to_string(),
            newspaper: row[paper].to_string(),
            identity: row[ident].to_string(),
            category,
            gold: label,
            referential,
        });
    }
    Ok((out, summary))
}

/// Pairs gold rows with predictions by mention id.
pub fn join_predictions(
    gold: &[GoldRecord],
    predictions: &[SentimentPrediction],
) -> Result<Vec<EvalRecord>> {
    let by_id: HashMap<&str, &SentimentPrediction> = predictions
        .iter()
        .map(|p| (p.mention_id.as_str(), p))
        .collect();
    gold.iter()
        .map(|g| {
            let p = by_id
                .get(g.mention_id.as_str())
                .ok_or_else(|| Error::UnknownMention(g.mention_id.clone()))?;
            Ok(EvalRecord {
                mention_id: g.mention_id.clone(),
                gold: g.gold,
                predicted: p.label,
                category: g.category,
                referential: g.referential,
                newspaper: g.newspaper.clone(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub overall: MetricsReport,
    pub by_category: BTreeMap<String, MetricsReport>,
    pub by_referential: BTreeMap<String, MetricsReport>,
    pub by_newspaper: BTreeMap<String, MetricsReport>,
    pub gold: GoldSummary,
}

pub fn evaluate(records: &[EvalRecord], gold: GoldSummary) -> Result<EvaluationReport> {
    Ok(EvaluationReport {
        overall: metrics(&score(records)?),
        by_category: subset_report(records, GroupBy::Category),
        by_referential: subset_report(records, GroupBy::Referential),
        by_newspaper: subset_report(records, GroupBy::Newspaper),
        gold,
    })
}

pub fn render_evaluation(report: &EvaluationReport) -> String {
    let mut s = render_report("Overall", &report.overall);
    for (title, groups) in [
        ("Category", &report.by_category),
        ("Referential", &report.by_referential),
        ("Newspaper", &report.by_newspaper),
    ] {
        for (k, r) in groups {
            s.push('\n');
            s.push_str(&render_report(&format!("{title}: {k}"), r));
        }
    }
    if report.gold.unknown > 0 {
        let _ = writeln!(
            s,
            "\n{} gold row(s) marked unknown were excluded.",
            report.gold.unknown
        );
    }
    s
}
