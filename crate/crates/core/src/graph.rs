//! Typed co-occurrence graph over themes, identities, locations and sentiment labels.
//!
//! Counting happens per in-scope themed paragraph:
//!
//! - theme–identity: +1 per identity mention
//! - theme–location: +1 per location annotation
//! - identity–location: +1 per (mention, location) pair
//! - identity–sentiment: +1 per parsed prediction of a mention
//!
//! Repeated mentions of one identity in a paragraph each count. Edges below the scope's
//! minimum weight are dropped after counting, together with nodes left without edges.
//! Identity node size is `1 - neutral / parsed predictions` over the scope (0 with no
//! predictions); every other node has size 1.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::aggregation::LabelCounts;
use crate::corpus::Paragraph;
use crate::error::{Error, Result};
use crate::mentions::IdentityMention;
use crate::sentiment::{SentimentLabel, SentimentPrediction};

pub const DEFAULT_NODE_SIZE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Theme,
    Identity,
    Location,
    Sentiment,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Theme => "theme",
            NodeKind::Identity => "identity",
            NodeKind::Location => "location",
            NodeKind::Sentiment => "sentiment",
        }
    }

    /// Whether an edge may join the two kinds; the pair must be given in canonical order.
    pub fn admissible(a: NodeKind, b: NodeKind) -> bool {
        use NodeKind::*;
        matches!(
            (a, b),
            (Theme, Identity) | (Theme, Location) | (Identity, Location) | (Identity, Sentiment)
        )
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theme" => Ok(NodeKind::Theme),
            "identity" => Ok(NodeKind::Identity),
            "location" => Ok(NodeKind::Location),
            "sentiment" => Ok(NodeKind::Sentiment),
            other => Err(Error::Scope(format!("unknown node kind `{other}`"))),
        }
    }
}

pub fn node_id(kind: NodeKind, label: &str) -> String {
    format!("{kind}:{label}")
}

/// Splits `kind:label`.
pub fn parse_node_id(id: &str) -> Result<(NodeKind, &str)> {
    let (kind, label) = id
        .split_once(':')
        .ok_or_else(|| Error::Scope(format!("node id `{id}` lacks a kind prefix")))?;
    if label.is_empty() {
        return Err(Error::Scope(format!("node id `{id}` has an empty label")));
    }
    Ok((kind.parse()?, label))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCounts {
    pub pos: u64,
    pub neg: u64,
    pub neu: u64,
}

impl From<LabelCounts> for NodeCounts {
    fn from(c: LabelCounts) -> Self {
        NodeCounts {
            pos: c.positive,
            neg: c.negative,
            neu: c.neutral,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    pub size: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<NodeCounts>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub a: String,
    pub b: String,
    pub weight: u64,
    pub thickness: f64,
}

/// Simple undirected graph; edges are keyed by their endpoints in canonical kind order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoocGraph {
    nodes: BTreeMap<String, GraphNode>,
    edges: BTreeMap<(String, String), GraphEdge>,
}

impl CoocGraph {
    pub fn nodes(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &GraphEdge> {
        self.edges.values()
    }

    pub fn node(&self, id: &str) -> Option<&GraphNode> {
        self.nodes.get(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Weight of the edge between `x` and `y` in either order, 0 when absent.
    pub fn weight(&self, x: &str, y: &str) -> u64 {
        self.edges
            .get(&(x.to_string(), y.to_string()))
            .or_else(|| self.edges.get(&(y.to_string(), x.to_string())))
            .map_or(0, |e| e.weight)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphScope {
    pub newspaper: Option<String>,
    /// Empty means every theme.
    #[serde(default)]
    pub themes: Vec<String>,
    pub min_weight: u64,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
}

impl GraphScope {
    pub fn all() -> Self {
        GraphScope {
            min_weight: 1,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_weight < 1 {
            return Err(Error::Scope("min_weight must be at least 1".into()));
        }
        if let (Some(from), Some(to)) = (self.from, self.to) {
            if from > to {
                return Err(Error::Scope(format!("date range {from}..{to} is empty")));
            }
        }
        Ok(())
    }

    /// Sorted, deduplicated theme list so equal scopes compare equal.
    pub fn normalized(mut self) -> Self {
        self.themes.sort();
        self.themes.dedup();
        self
    }

    /// Whether a paragraph contributes to the graph (it must carry a theme).
    pub fn contains(&self, p: &Paragraph) -> bool {
        let Some(theme) = p.theme.as_deref() else {
            return false;
        };
        self.newspaper.as_deref().is_none_or(|n| n == p.newspaper)
            && (self.themes.is_empty() || self.themes.iter().any(|t| t == theme))
            && self.from.is_none_or(|d| p.issue_date.date >= d)
            && self.to.is_none_or(|d| p.issue_date.date <= d)
    }
}

/// Edge tallies before pruning, keyed by canonical endpoint pair.
#[derive(Debug, Default)]
struct Tally {
    edges: BTreeMap<(String, String), u64>,
    identity_counts: BTreeMap<String, LabelCounts>,
}

impl Tally {
    fn bump(&mut self, a: (NodeKind, &str), b: (NodeKind, &str)) {
        debug_assert!(NodeKind::admissible(a.0, b.0));
        *self
            .edges
            .entry((node_id(a.0, a.1), node_id(b.0, b.1)))
            .or_default() += 1;
    }
}

pub fn build_graph<'a, M: std::borrow::Borrow<IdentityMention>>(
    paragraphs: impl IntoIterator<Item = &'a Paragraph>,
    mentions: &[M],
    predictions: &[SentimentPrediction],
    scope: &GraphScope,
) -> Result<CoocGraph> {
    scope.validate()?;
    let mut by_paragraph: HashMap<&str, Vec<&IdentityMention>> = HashMap::new();
    let mut known: BTreeSet<&str> = BTreeSet::new();
    for m in mentions {
        let m = m.borrow();
        by_paragraph.entry(&m.paragraph_id).or_default().push(m);
        known.insert(&m.mention_id);
    }
    let mut labels: HashMap<&str, SentimentLabel> = HashMap::new();
    for p in predictions {
        if !known.contains(p.mention_id.as_str()) {
            return Err(Error::UnknownMention(p.mention_id.clone()));
        }
        if let Some(l) = p.label {
            labels.insert(&p.mention_id, l);
        }
    }

    let mut tally = Tally::default();
    let mut in_scope = 0usize;
    for p in paragraphs {
        if !scope.contains(p) {
            continue;
        }
        in_scope += 1;
        let theme = p
            .theme
            .as_deref()
            .expect("scope admits themed paragraphs only");
        let ms = by_paragraph
            .get(p.paragraph_id.as_str())
            .map_or(&[][..], Vec::as_slice);
        for m in ms {
            tally.bump((NodeKind::Theme, theme), (NodeKind::Identity, &m.identity));
            for loc in &p.locations {
                tally.bump(
                    (NodeKind::Identity, &m.identity),
                    (NodeKind::Location, &loc.text),
                );
            }
            if let Some(&label) = labels.get(m.mention_id.as_str()) {
                tally.bump(
                    (NodeKind::Identity, &m.identity),
                    (NodeKind::Sentiment, label.symbol()),
                );
                tally
                    .identity_counts
                    .entry(m.identity.clone())
                    .or_default()
                    .add(label);
            }
        }
        for loc in &p.locations {
            tally.bump((NodeKind::Theme, theme), (NodeKind::Location, &loc.text));
        }
    }
    if in_scope == 0 {
        log::warn!("graph scope {scope:?} matches no paragraphs");
    }
    Ok(assemble(tally, scope.min_weight))
}

fn assemble(tally: Tally, min_weight: u64) -> CoocGraph {
    let mut graph = CoocGraph::default();
    for ((a, b), weight) in tally.edges {
        if weight < min_weight {
            continue;
        }
        for id in [&a, &b] {
            if !graph.nodes.contains_key(id) {
                let (kind, label) = parse_node_id(id).expect("ids built by node_id");
                let (size, counts) = match kind {
                    NodeKind::Identity => {
                        let c = tally
                            .identity_counts
                            .get(label)
                            .copied()
                            .unwrap_or_default();
                        (c.non_neutral_share(), Some(c.into()))
                    }
                    _ => (DEFAULT_NODE_SIZE, None),
                };
                graph.nodes.insert(
                    id.clone(),
                    GraphNode {
                        id: id.clone(),
                        kind,
                        label: label.to_string(),
                        size,
                        counts,
                    },
                );
            }
        }
        graph.edges.insert(
            (a.clone(), b.clone()),
            GraphEdge {
                a,
                b,
                weight,
                thickness: (weight as f64).sqrt(),
            },
        );
    }
    graph
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    GraphMl,
}

/// Serializes with nodes and edges sorted by id, so equal graphs give equal bytes.
pub fn export_graph(graph: &CoocGraph, format: ExportFormat) -> Vec<u8> {
    match format {
        ExportFormat::Json => serde_json::to_vec(&GraphJson {
            nodes: graph.nodes.values().cloned().collect(),
            edges: graph.edges.values().cloned().collect(),
        })
        .expect("graph serializes"),
        ExportFormat::GraphMl => export_graphml(graph).into_bytes(),
    }
}

pub fn import_graph_json(bytes: &[u8]) -> Result<CoocGraph> {
    let raw: GraphJson = serde_json::from_slice(bytes)?;
    let mut graph = CoocGraph::default();
    for n in raw.nodes {
        let (kind, label) = parse_node_id(&n.id)?;
        if kind != n.kind || label != n.label {
            return Err(Error::Scope(format!(
                "node `{}` disagrees with its kind/label",
                n.id
            )));
        }
        graph.nodes.insert(n.id.clone(), n);
    }
    for e in raw.edges {
        let (ka, kb) = match (graph.nodes.get(&e.a), graph.nodes.get(&e.b)) {
            (Some(a), Some(b)) => (a.kind, b.kind),
            _ => {
                return Err(Error::Scope(format!(
                    "edge {}–{} has a missing endpoint",
                    e.a, e.b
                )))
            }
        };
        if !NodeKind::admissible(ka, kb) || e.weight == 0 {
            return Err(Error::Scope(format!(
                "edge {}–{} is not admissible",
                e.a, e.b
            )));
        }
        graph.edges.insert((e.a.clone(), e.b.clone()), e);
    }
    Ok(graph)
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn export_graphml(graph: &CoocGraph) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
         http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    );
    for (id, target, ty) in [
        ("kind", "node", "string"),
        ("label", "node", "string"),
        ("size", "node", "double"),
        ("pos", "node", "long"),
        ("neg", "node", "long"),
        ("neu", "node", "long"),
        ("weight", "edge", "long"),
        ("thickness", "edge", "double"),
    ] {
        let _ = writeln!(
            s,
            "  <key id=\"{id}\" for=\"{target}\" attr.name=\"{id}\" attr.type=\"{ty}\"/>"
        );
    }
    s.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
    for n in graph.nodes.values() {
        let _ = writeln!(s, "    <node id=\"{}\">", xml_escape(&n.id));
        let _ = writeln!(s, "      <data key=\"kind\">{}</data>", n.kind);
        let _ = writeln!(
            s,
            "      <data key=\"label\">{}</data>",
            xml_escape(&n.label)
        );
        let _ = writeln!(s, "      <data key=\"size\">{}</data>", n.size);
        if let Some(c) = n.counts {
            let _ = writeln!(s, "      <data key=\"pos\">{}</data>", c.pos);
            let _ = writeln!(s, "      <data key=\"neg\">{}</data>", c.neg);
            let _ = writeln!(s, "      <data key=\"neu\">{}</data>", c.neu);
        }
        s.push_str("    </node>\n");
    }
    for e in graph.edges.values() {
        let _ = writeln!(
            s,
            "    <edge source=\"{}\" target=\"{}\">",
            xml_escape(&e.a),
            xml_escape(&e.b)
        );
        let _ = writeln!(s, "      <data key=\"weight\">{}</data>", e.weight);
        let _ = writeln!(s, "      <data key=\"thickness\">{}</data>", e.thickness);
        s.push_str("    </edge>\n");
    }
    s.push_str("  </graph>\n</graphml>\n");
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharedEdge {
    pub a: String,
    pub b: String,
    pub weight_a: u64,
    pub weight_b: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GraphDiff {
    pub a_only: Vec<String>,
    pub b_only: Vec<String>,
    pub shared: Vec<String>,
    pub shared_edges: Vec<SharedEdge>,
    pub a_only_edges: Vec<(String, String)>,
    pub b_only_edges: Vec<(String, String)>,
}

/// Node and edge set comparison of two graphs built over otherwise equal scopes.
pub fn diff_scopes(a: &CoocGraph, b: &CoocGraph) -> GraphDiff {
    let na: BTreeSet<&String> = a.nodes.keys().collect();
    let nb: BTreeSet<&String> = b.nodes.keys().collect();
    let mut diff = GraphDiff {
        a_only: na.difference(&nb).map(|s| s.to_string()).collect(),
        b_only: nb.difference(&na).map(|s| s.to_string()).collect(),
        shared: na.intersection(&nb).map(|s| s.to_string()).collect(),
        ..Default::default()
    };
    for (key, ea) in &a.edges {
        match b.edges.get(key) {
            Some(eb) => diff.shared_edges.push(SharedEdge {
                a: key.0.clone(),
                b: key.1.clone(),
                weight_a: ea.weight,
                weight_b: eb.weight,
            }),
            None => diff.a_only_edges.push(key.clone()),
        }
    }
    diff.b_only_edges = b
        .edges
        .keys()
        .filter(|k| !a.edges.contains_key(*k))
        .cloned()
        .collect();
    diff
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{IssueDate, LocationAnnotation, Sentence, Token};
    use crate::lexicon::GrammaticalCategory;

    fn paragraph(id: &str, paper: &str, theme: &str, locations: &[&str]) -> Paragraph {
        Paragraph {
            paragraph_id: id.into(),
            newspaper: paper.into(),
            issue_date: IssueDate::parse("1900-05-01").unwrap(),
            theme: Some(theme.into()),
            sentences: vec![Sentence {
                index: 0,
                tokens: (0..4)
                    .map(|i| Token::new(format!("w{i}"), format!("w{i}"), ""))
                    .collect(),
            }],
            locations: locations
                .iter()
                .map(|l| LocationAnnotation {
                    sentence: 0,
                    start: 3,
                    end: 4,
                    text: l.to_string(),
                })
                .collect(),
        }
    }

    fn mention(id: &str, paragraph: &str, identity: &str) -> IdentityMention {
        IdentityMention {
            mention_id: id.into(),
            paragraph_id: paragraph.into(),
            newspaper: "s".into(),
            sentence: 0,
            start: 0,
            end: 1,
            lemma: "x".into(),
            identity: identity.into(),
            category: GrammaticalCategory::Nominal,
        }
    }

    fn pred(id: &str, label: SentimentLabel) -> SentimentPrediction {
        SentimentPrediction::from_output(id, "mock", label.symbol().into())
    }

    #[test]
    fn single_paragraph_enumeration() {
        let ps = [paragraph("p", "s", "T", &["L"])];
        let ms = [mention("m", "p", "I")];
        let g = build_graph(
            &ps,
            &ms,
            &[pred("m", SentimentLabel::Positive)],
            &GraphScope::all(),
        )
        .unwrap();
        let ids: Vec<&str> = g.nodes().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, ["identity:I", "location:L", "sentiment:+", "theme:T"]);
        assert_eq!(g.weight("theme:T", "identity:I"), 1);
        assert_eq!(g.weight("identity:I", "theme:T"), 1);
        assert_eq!(g.weight("theme:T", "location:L"), 1);
        assert_eq!(g.weight("identity:I", "location:L"), 1);
        assert_eq!(g.weight("identity:I", "sentiment:+"), 1);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.node("identity:I").unwrap().size, 1.0);
        assert_eq!(g.node("theme:T").unwrap().size, DEFAULT_NODE_SIZE);
    }

    #[test]
    fn all_neutral_identity_has_size_zero() {
        let ps = [paragraph("p", "s", "T", &[])];
        let ms: Vec<_> = (0..3)
            .map(|i| mention(&format!("m{i}"), "p", "I"))
            .collect();
        let preds: Vec<_> = (0..3)
            .map(|i| pred(&format!("m{i}"), SentimentLabel::Neutral))
            .collect();
        let g = build_graph(&ps, &ms, &preds, &GraphScope::all()).unwrap();
        assert_eq!(g.node("identity:I").unwrap().size, 0.0);
        assert_eq!(g.weight("identity:I", "sentiment:0"), 3);
        assert_eq!(g.weight("theme:T", "identity:I"), 3);
    }

    #[test]
    fn pruning_removes_isolated_nodes() {
        let ps = [
            paragraph("p", "s", "T", &["L"]),
            paragraph("q", "s", "T", &[]),
        ];
        let ms = [mention("m", "p", "I"), mention("n", "q", "I")];
        let scope = GraphScope {
            min_weight: 2,
            ..GraphScope::all()
        };
        let g = build_graph(&ps, &ms, &[], &scope).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.node("location:L").is_none());
        let scope = GraphScope {
            min_weight: 99,
            ..GraphScope::all()
        };
        assert!(build_graph(&ps, &ms, &[], &scope).unwrap().is_empty());
    }

    #[test]
    fn scope_filters() {
        let mut unthemed = paragraph("u", "s", "T", &["L"]);
        unthemed.theme = None;
        let ps = [
            paragraph("p", "s", "T", &["L"]),
            paragraph("q", "n", "U", &["M"]),
            unthemed,
        ];
        let scope = GraphScope {
            newspaper: Some("n".into()),
            ..GraphScope::all()
        };
        let g = build_graph(&ps, &[] as &[IdentityMention], &[], &scope).unwrap();
        assert_eq!(g.weight("theme:U", "location:M"), 1);
        assert_eq!(g.node_count(), 2);
        let scope = GraphScope {
            themes: vec!["T".into()],
            ..GraphScope::all()
        };
        let g = build_graph(&ps, &[] as &[IdentityMention], &[], &scope).unwrap();
        assert_eq!(g.weight("theme:T", "location:L"), 1);
        let scope = GraphScope {
            from: NaiveDate::from_ymd_opt(1901, 1, 1),
            ..GraphScope::all()
        };
        assert!(build_graph(&ps, &[] as &[IdentityMention], &[], &scope)
            .unwrap()
            .is_empty());
        assert!(GraphScope::default().validate().is_err());
    }

    #[test]
    fn unknown_prediction_is_an_error() {
        let ps = [paragraph("p", "s", "T", &[])];
        assert!(build_graph(
            &ps,
            &[mention("m", "p", "I")],
            &[pred("x", SentimentLabel::Neutral)],
            &GraphScope::all()
        )
        .is_err());
    }

    #[test]
    fn empty_graph_json() {
        let bytes = export_graph(&CoocGraph::default(), ExportFormat::Json);
        assert_eq!(bytes, br#"{"nodes":[],"edges":[]}"#);
    }

    #[test]
    fn json_round_trip_and_graphml_attributes() {
        let ps = [paragraph("p", "s", "T & Co", &["L"])];
        let ms = [mention("m", "p", "I")];
        let g = build_graph(
            &ps,
            &ms,
            &[pred("m", SentimentLabel::Negative)],
            &GraphScope::all(),
        )
        .unwrap();
        let back = import_graph_json(&export_graph(&g, ExportFormat::Json)).unwrap();
        assert_eq!(back, g);
        let xml = String::from_utf8(export_graph(&g, ExportFormat::GraphMl)).unwrap();
        assert!(xml.contains("<node id=\"theme:T &amp; Co\">"));
        assert!(xml.contains("attr.name=\"thickness\" attr.type=\"double\""));
        assert!(xml.contains("<data key=\"neg\">1</data>"));
    }

    #[test]
    fn diff_reports_exclusives_and_shared_weights() {
        let ps = [
            paragraph("p", "s", "T", &["L"]),
            paragraph("q", "n", "T", &["M"]),
        ];
        let ms = [mention("m", "p", "I"), mention("n", "q", "I")];
        let ga = build_graph(
            &ps,
            &ms,
            &[],
            &GraphScope {
                newspaper: Some("s".into()),
                ..GraphScope::all()
            },
        )
        .unwrap();
        let gb = build_graph(
            &ps,
            &ms,
            &[],
            &GraphScope {
                newspaper: Some("n".into()),
                ..GraphScope::all()
            },
        )
        .unwrap();
        let d = diff_scopes(&ga, &gb);
        assert_eq!(d.a_only, ["location:L"]);
        assert_eq!(d.b_only, ["location:M"]);
        assert_eq!(d.shared, ["identity:I", "theme:T"]);
        assert_eq!(d.shared_edges.len(), 1);
        assert_eq!(
            (d.shared_edges[0].weight_a, d.shared_edges[0].weight_b),
            (1, 1)
        );
        let same = diff_scopes(&ga, &ga);
        assert!(same.a_only.is_empty() && same.b_only.is_empty());
    }

    #[test]
    fn node_ids() {
        assert_eq!(
            parse_node_id("identity:Nemci").unwrap(),
            (NodeKind::Identity, "Nemci")
        );
        assert_eq!(
            parse_node_id("theme:a:b").unwrap(),
            (NodeKind::Theme, "a:b")
        );
        assert!(parse_node_id("Nemci").is_err());
        assert!(parse_node_id("planet:Mars").is_err());
        assert!(parse_node_id("theme:").is_err());
    }
}
