//! Route handlers. Every handler reads from the shared bundle; only the graph cache mutates.

use std::str::FromStr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::header;
use axum::response::{IntoResponse, Response};
use axum::Json;
use chrono::NaiveDate;
use presslens_core::aggregation::{IdentitySentimentProfile, LabelCounts};
use presslens_core::corpus::{corpus_stats, IssueDate, LocationAnnotation, Paragraph};
use presslens_core::graph::{
    build_graph, export_graph, parse_node_id, ExportFormat, GraphScope, NodeKind,
};
use presslens_core::lexicon::GrammaticalCategory;
use presslens_core::sentiment::SentimentLabel;
use serde::{Deserialize, Serialize};

use crate::bundle::AnalysisBundle;
use crate::cache::GraphCache;
use crate::error::ApiError;

pub const DEFAULT_PAGE: usize = 20;
pub const MAX_PAGE: usize = 200;

pub struct AppState {
    pub bundle: Arc<AnalysisBundle>,
    pub cache: GraphCache,
}

type Shared = State<Arc<AppState>>;

fn query<T>(q: Result<Query<T>, QueryRejection>) -> Result<T, ApiError> {
    q.map(|Query(t)| t)
        .map_err(|e| ApiError::BadRequest(e.body_text()))
}

fn check_newspaper(bundle: &AnalysisBundle, newspaper: Option<&str>) -> Result<(), ApiError> {
    match newspaper {
        Some(n) if !bundle.newspapers().contains(n) => {
            Err(ApiError::BadRequest(format!("unknown newspaper `{n}`")))
        }
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct NewspaperSummary<'a> {
    newspaper: &'a str,
    paragraphs: usize,
    tokens: usize,
    issues: usize,
}

pub async fn newspapers(State(state): Shared) -> Json<serde_json::Value> {
    let stats = corpus_stats(&state.bundle.paragraphs);
    let list: Vec<NewspaperSummary> = stats
        .per_newspaper
        .iter()
        .map(|(n, c)| NewspaperSummary {
            newspaper: n,
            paragraphs: c.paragraphs,
            tokens: c.tokens,
            issues: c.issues,
        })
        .collect();
    Json(serde_json::to_value(list).expect("plain data"))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewspaperQuery {
    newspaper: Option<String>,
}

#[derive(Serialize)]
struct ThemeCount<'a> {
    theme: &'a str,
    paragraphs: u64,
}

pub async fn themes(
    State(state): Shared,
    q: Result<Query<NewspaperQuery>, QueryRejection>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let q = query(q)?;
    check_newspaper(&state.bundle, q.newspaper.as_deref())?;
    let counts = state.bundle.theme_counts(q.newspaper.as_deref());
    let list: Vec<ThemeCount> = counts
        .into_iter()
        .map(|(theme, paragraphs)| ThemeCount { theme, paragraphs })
        .collect();
    Ok(Json(serde_json::to_value(list).expect("plain data")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphQuery {
    newspaper: Option<String>,
    /// Comma-separated allow-list.
    themes: Option<String>,
    min_weight: Option<String>,
    from: Option<String>,
    to: Option<String>,
}

fn parse_date(field: &str, s: &str) -> Result<NaiveDate, ApiError> {
    IssueDate::parse(s)
        .map(|d| d.date)
        .ok_or_else(|| ApiError::BadRequest(format!("{field}: expected YYYY-MM-DD, got `{s}`")))
}

impl GraphQuery {
    fn scope(self, bundle: &AnalysisBundle) -> Result<GraphScope, ApiError> {
        let newspaper = self.newspaper.filter(|n| !n.is_empty());
        check_newspaper(bundle, newspaper.as_deref())?;
        let themes = self
            .themes
            .map(|t| {
                t.split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(String::from)
                    .collect()
            })
            .unwrap_or_default();
        let min_weight = match self.min_weight.as_deref() {
            None | Some("") => 1,
            Some(s) => u64::from_str(s).map_err(|_| {
                ApiError::BadRequest(format!("min_weight: expected an integer, got `{s}`"))
            })?,
        };
        let scope = GraphScope {
            newspaper,
            themes,
            min_weight,
            from: self
                .from
                .filter(|s| !s.is_empty())
                .map(|s| parse_date("from", &s))
                .transpose()?,
            to: self
                .to
                .filter(|s| !s.is_empty())
                .map(|s| parse_date("to", &s))
                .transpose()?,
        }
        .normalized();
        scope
            .validate()
            .map_err(|e| ApiError::BadRequest(e.to_string()))?;
        Ok(scope)
    }
}

/// Same bytes as `export_graph(build_graph(..), Json)` for the scope.
pub async fn graph(
    State(state): Shared,
    q: Result<Query<GraphQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let scope = query(q)?.scope(&state.bundle)?;
    let bundle = state.bundle.clone();
    let key = scope.clone();
    let bytes = state
        .cache
        .get_or_build(key, || async move {
            tokio::task::spawn_blocking(move || graph_bytes(&bundle, &scope))
                .await
                .map_err(|e| ApiError::Internal(e.to_string()))?
        })
        .await?;
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes).into_response())
}

pub fn graph_bytes(bundle: &AnalysisBundle, scope: &GraphScope) -> Result<Bytes, ApiError> {
    let g = build_graph(
        &bundle.paragraphs,
        &bundle.mentions,
        &bundle.predictions,
        scope,
    )
    .map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(Bytes::from(export_graph(&g, ExportFormat::Json)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PageQuery {
    limit: Option<usize>,
    offset: Option<usize>,
    sentiment: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MentionView {
    pub mention_id: String,
    pub identity: String,
    pub category: GrammaticalCategory,
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
    pub label: Option<SentimentLabel>,
    /// Whether this mention is an occurrence of the requested node.
    pub matched: bool,
}

/// A retrieved paragraph: token forms per sentence, with mention spans to highlight.
#[derive(Debug, Serialize, Deserialize)]
pub struct ParagraphHit {
    pub paragraph_id: String,
    pub newspaper: String,
    pub issue_date: String,
    pub theme: Option<String>,
    pub sentences: Vec<Vec<String>>,
    pub mentions: Vec<MentionView>,
    pub locations: Vec<LocationAnnotation>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ParagraphPage {
    pub node: String,
    pub total: usize,
    pub offset: usize,
    pub limit: usize,
    pub paragraphs: Vec<ParagraphHit>,
}

fn mention_views(
    bundle: &AnalysisBundle,
    p: &Paragraph,
    node: Option<(NodeKind, &str)>,
) -> Vec<MentionView> {
    bundle
        .paragraph_mentions(&p.paragraph_id)
        .map(|r| {
            let m = &r.mention;
            let label = bundle.label(&m.mention_id);
            let matched = match node {
                Some((NodeKind::Identity, l)) => m.identity == l,
                Some((NodeKind::Sentiment, l)) => label.is_some_and(|x| x.symbol() == l),
                _ => false,
            };
            MentionView {
                mention_id: m.mention_id.clone(),
                identity: m.identity.clone(),
                category: m.category,
                sentence: m.sentence,
                start: m.start,
                end: m.end,
                label,
                matched,
            }
        })
        .collect()
}

fn parse_sentiment(s: &str) -> Result<SentimentLabel, ApiError> {
    // a literal `+` arrives as a space after form decoding
    let s = if s == " " { "+" } else { s.trim() };
    SentimentLabel::from_symbol(s).ok_or_else(|| {
        ApiError::BadRequest(format!(
            "sentiment: expected +, -, 0, pos, neg or neu, got `{s}`"
        ))
    })
}

pub async fn node_paragraphs(
    State(state): Shared,
    Path(id): Path<String>,
    q: Result<Query<PageQuery>, QueryRejection>,
) -> Result<Json<ParagraphPage>, ApiError> {
    let q = query(q)?;
    let limit = q.limit.unwrap_or(DEFAULT_PAGE);
    if limit == 0 || limit > MAX_PAGE {
        return Err(ApiError::BadRequest(format!(
            "limit must be in 1..={MAX_PAGE}"
        )));
    }
    let offset = q.offset.unwrap_or(0);
    let sentiment = q
        .sentiment
        .as_deref()
        .filter(|s| !s.is_empty())
        .map(parse_sentiment)
        .transpose()?;

    let bundle = &state.bundle;
    let not_found = || ApiError::NotFound(format!("unknown node `{id}`"));
    let (kind, label) = parse_node_id(&id).map_err(|_| not_found())?;
    let candidates = bundle.node_paragraphs(kind, label).ok_or_else(not_found)?;

    let mut total = 0;
    let mut page = Vec::new();
    for p in candidates {
        let views = mention_views(bundle, p, Some((kind, label)));
        if let Some(want) = sentiment {
            let relevant = views
                .iter()
                .filter(|v| kind != NodeKind::Identity || v.matched)
                .any(|v| v.label == Some(want));
            if !relevant {
                continue;
            }
        }
        if total >= offset && page.len() < limit {
            page.push(ParagraphHit {
                paragraph_id: p.paragraph_id.clone(),
                newspaper: p.newspaper.clone(),
                issue_date: p.issue_date.to_string(),
                theme: p.theme.clone(),
                sentences: p
                    .sentences
                    .iter()
                    .map(|s| s.tokens.iter().map(|t| t.form.clone()).collect())
                    .collect(),
                mentions: views,
                locations: p.locations.clone(),
            });
        }
        total += 1;
    }
    Ok(Json(ParagraphPage {
        node: id,
        total,
        offset,
        limit,
        paragraphs: page,
    }))
}

pub async fn identity_profile(
    State(state): Shared,
    Path(label): Path<String>,
    q: Result<Query<NewspaperQuery>, QueryRejection>,
) -> Result<Json<IdentitySentimentProfile>, ApiError> {
    let q = query(q)?;
    let bundle = &state.bundle;
    check_newspaper(bundle, q.newspaper.as_deref())?;
    let profiles: Vec<&IdentitySentimentProfile> = bundle
        .profiles
        .profiles
        .iter()
        .filter(|p| p.identity == label)
        .collect();
    if profiles.is_empty() {
        return Err(ApiError::NotFound(format!(
            "no parsed predictions for identity `{label}`"
        )));
    }
    match q.newspaper {
        Some(n) => profiles
            .into_iter()
            .find(|p| p.newspaper == n)
            .cloned()
            .map(Json)
            .ok_or_else(|| {
                ApiError::NotFound(format!("no parsed predictions for `{label}` in `{n}`"))
            }),
        None => {
            let mut counts = LabelCounts::default();
            for p in profiles {
                counts.positive += p.counts.positive;
                counts.negative += p.counts.negative;
                counts.neutral += p.counts.neutral;
            }
            Ok(Json(IdentitySentimentProfile::from_counts(
                &label,
                ALL_NEWSPAPERS,
                counts,
            )))
        }
    }
}

/// Newspaper value of a profile pooled over every newspaper.
pub const ALL_NEWSPAPERS: &str = "*";

#[derive(Serialize)]
struct ParagraphRecord<'a> {
    #[serde(flatten)]
    paragraph: &'a Paragraph,
    mentions: Vec<MentionView>,
}

pub async fn paragraph(State(state): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let bundle = &state.bundle;
    let p = bundle
        .paragraph(&id)
        .ok_or_else(|| ApiError::NotFound(format!("unknown paragraph `{id}`")))?;
    let record = ParagraphRecord {
        paragraph: p,
        mentions: mention_views(bundle, p, None),
    };
    Ok(Json(record).into_response())
}

pub async fn fallback() -> ApiError {
    ApiError::NotFound("no such endpoint".into())
}
