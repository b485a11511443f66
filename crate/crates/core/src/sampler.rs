//! Stratified evaluation sampling: per-newspaper quotas, a nominal/adjectival split inside
//! each newspaper, and a per-newspaper cap on any single identity.

use std::borrow::Borrow;
use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::GrammaticalCategory;
use crate::mentions::{IdentityMention, MentionRecord};
use crate::rng::Xoshiro256;

pub const DEFAULT_TOTAL: usize = 400;
pub const DEFAULT_IDENTITY_CAP: f64 = 0.15;
pub const DEFAULT_NOMINAL_SHARE: f64 = 0.5;
pub const MAX_RESAMPLING_ROUNDS: usize = 1000;

const CATEGORIES: [GrammaticalCategory; 2] = [
    GrammaticalCategory::Nominal,
    GrammaticalCategory::Adjectival,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub total: usize,
    pub newspapers: Vec<String>,
    /// Share of each newspaper's quota drawn from nominal mentions; adjectival gets the rest.
    pub nominal_share: f64,
    pub identity_cap: f64,
    pub seed: u64,
}

impl SamplingPlan {
    pub fn new(newspapers: Vec<String>, seed: u64) -> Self {
        SamplingPlan {
            total: DEFAULT_TOTAL,
            newspapers,
            nominal_share: DEFAULT_NOMINAL_SHARE,
            identity_cap: DEFAULT_IDENTITY_CAP,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total == 0 {
            return Err(Error::InvalidPlan("total must be at least 1".into()));
        }
        if self.newspapers.is_empty() {
            return Err(Error::InvalidPlan("no newspapers".into()));
        }
        let unique: HashSet<&String> = self.newspapers.iter().collect();
        if unique.len() != self.newspapers.len() {
            return Err(Error::InvalidPlan("newspaper listed twice".into()));
        }
        if !(self.identity_cap > 0.0 && self.identity_cap <= 1.0) {
            return Err(Error::InvalidPlan(format!(
                "identity cap {} outside (0, 1]",
                self.identity_cap
            )));
        }
        if !(0.0..=1.0).contains(&self.nominal_share) {
            return Err(Error::InvalidPlan(format!(
                "nominal share {} outside [0, 1]",
                self.nominal_share
            )));
        }
        Ok(())
    }

    /// Largest count an identity may reach in a newspaper subset of `subset` mentions.
    pub fn cap_limit(&self, subset: usize) -> usize {
        ((self.identity_cap * subset as f64 + 1e-9).floor() as usize).max(1)
    }
}

pub type Quotas = BTreeMap<(String, GrammaticalCategory), usize>;

/// Splits `total` over newspapers by largest remainder (equal weights, earlier newspapers
/// take the leftover units), then over categories with half-up rounding so an odd unit
/// goes to the nominal stratum.
pub fn allocate_quotas(plan: &SamplingPlan) -> Quotas {
    let k = plan.newspapers.len();
    let mut quotas = Quotas::new();
    if k == 0 {
        return quotas;
    }
    let base = plan.total / k;
    let remainder = plan.total % k;
    for (i, paper) in plan.newspapers.iter().enumerate() {
        let n = base + usize::from(i < remainder);
        let nominal = ((n as f64 * plan.nominal_share + 0.5).floor() as usize).min(n);
        quotas.insert((paper.clone(), GrammaticalCategory::Nominal), nominal);
        quotas.insert(
            (paper.clone(), GrammaticalCategory::Adjectival),
            n - nominal,
        );
    }
    quotas
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapWarning {
    pub newspaper: String,
    pub identity: String,
    pub count: usize,
    pub limit: usize,
}

#[derive(Debug, Clone)]
pub struct Sample<M> {
    pub items: Vec<M>,
    /// Identities still above the cap because the pool had no alternatives.
    pub warnings: Vec<CapWarning>,
    pub rounds: usize,
}

struct Stratum {
    selected: Vec<usize>,
    remaining: Vec<usize>,
}

/// Draws the stratified sample. The same pool order and seed give the same sample.
pub fn stratified_sample<M>(pool: &[M], plan: &SamplingPlan) -> Result<Sample<M>>
where
    M: Borrow<IdentityMention> + Clone,
{
    plan.validate()?;
    let quotas = allocate_quotas(plan);
    let mut rng = Xoshiro256::seed_from_u64(plan.seed);

    let mut seen_ids = HashSet::new();
    let mut by_stratum: BTreeMap<(&str, GrammaticalCategory), Vec<usize>> = BTreeMap::new();
    for (i, m) in pool.iter().enumerate() {
        let m = m.borrow();
        if seen_ids.insert(m.mention_id.as_str()) {
            by_stratum
                .entry((m.newspaper.as_str(), m.category))
                .or_default()
                .push(i);
        }
    }

    let identity = |i: usize| pool[i].borrow().identity.as_str();
    let mut items = Vec::new();
    let mut warnings = Vec::new();
    let mut rounds = 0;

    for paper in &plan.newspapers {
        let mut strata = Vec::with_capacity(2);
        for cat in CATEGORIES {
            let quota = quotas[&(paper.clone(), cat)];
            let mut candidates = by_stratum
                .get(&(paper.as_str(), cat))
                .cloned()
                .unwrap_or_default();
            if candidates.len() < quota {
                return Err(Error::InsufficientStratum {
                    newspaper: paper.clone(),
                    category: cat.to_string(),
                    available: candidates.len(),
                    quota,
                });
            }
            rng.partial_shuffle(&mut candidates, quota);
            let remaining = candidates.split_off(quota);
            strata.push(Stratum {
                selected: candidates,
                remaining,
            });
        }

        let subset: usize = strata.iter().map(|s| s.selected.len()).sum();
        let limit = plan.cap_limit(subset);
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for s in &strata {
            for &i in &s.selected {
                *counts.entry(identity(i)).or_default() += 1;
            }
        }

        for round in 0..MAX_RESAMPLING_ROUNDS {
            let over: Vec<(&str, usize)> = counts
                .iter()
                .filter(|(_, &c)| c > limit)
                .map(|(&id, &c)| (id, c - limit))
                .collect();
            if over.is_empty() {
                break;
            }
            rounds = rounds.max(round + 1);
            let mut changed = false;
            for (id, excess) in over {
                let mut members: Vec<(usize, usize)> = strata
                    .iter()
                    .enumerate()
                    .flat_map(|(si, s)| {
                        s.selected
                            .iter()
                            .enumerate()
                            .filter(|(_, &i)| identity(i) == id)
                            .map(move |(pos, _)| (si, pos))
                    })
                    .collect();
                rng.partial_shuffle(&mut members, excess);
                for &(si, pos) in &members[..excess] {
                    let stratum = &mut strata[si];
                    let eligible: Vec<usize> = (0..stratum.remaining.len())
                        .filter(|&r| {
                            let other = identity(stratum.remaining[r]);
                            other != id && counts.get(other).copied().unwrap_or(0) < limit
                        })
                        .collect();
                    if eligible.is_empty() {
                        continue;
                    }
                    let pick = eligible[rng.below(eligible.len())];
                    let replacement = stratum.remaining.remove(pick);
                    stratum.selected[pos] = replacement;
                    *counts.get_mut(id).expect("counted") -= 1;
                    *counts.entry(identity(replacement)).or_default() += 1;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        for (id, &count) in &counts {
            if count > limit {
                log::warn!(
                    "{paper}: identity {id} has {count} of {subset} mentions, cap is {limit}"
                );
                warnings.push(CapWarning {
                    newspaper: paper.clone(),
                    identity: id.to_string(),
                    count,
                    limit,
                });
            }
        }

        for s in strata {
            let mut chosen = s.selected;
            chosen.sort_unstable();
            items.extend(chosen.into_iter().map(|i| pool[i].clone()));
        }
    }

    Ok(Sample {
        items,
        warnings,
        rounds,
    })
}

impl Borrow<IdentityMention> for MentionRecord {
    fn borrow(&self) -> &IdentityMention {
        &self.mention
    }
}

pub const ANNOTATION_HEADER: [&str; 8] = [
    "mention_id",
    "newspaper",
    "identity",
    "category",
    "context",
    "gold_sentiment",
    "referential_type",
    "unknown",
];

/// Writes the annotation sheet with empty label columns.
pub fn write_annotation_tsv<W: Write>(out: W, records: &[MentionRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(out);
    w.write_record(ANNOTATION_HEADER)?;
    for r in records {
        let m = &r.mention;
        w.write_record([
            m.mention_id.as_str(),
            m.newspaper.as_str(),
            m.identity.as_str(),
            m.category.as_str(),
            r.context.rendered.as_str(),
            "",
            "",
            "",
        ])?;
    }
    w.flush()?;
    Ok(())
}
