//! Acceptance suite: one PASS/FAIL line per criterion, with pinned tolerances and runtime
//! limits. Runs as a plain binary so the lines show up in `cargo test` output.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use presslens_core::aggregation::{
    build_profiles, rank_by_neutrality, IdentitySentimentProfile, LabelCounts, RankDirection,
};
use presslens_core::corpus::{IssueDate, Paragraph, Sentence, Token};
use presslens_core::evaluation::{metrics, ConfusionMatrix};
use presslens_core::graph::{
    build_graph, export_graph, CoocGraph, ExportFormat, GraphScope, NodeKind,
};
use presslens_core::lexicon::{extract_adjectival_candidates, GrammaticalCategory};
use presslens_core::mentions::{extract_mentions, extract_with_context, IdentityMention};
use presslens_core::rng::Xoshiro256;
use presslens_core::sampler::{stratified_sample, SamplingPlan};
use presslens_core::sentiment::SentimentLabel;
use presslens_server::{router, AnalysisBundle, ServeOptions};
use tower::ServiceExt;

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($fmt)+)),
        }
    };
}

fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn demo() -> PathBuf {
    workspace().join("data/demo")
}

// metric oracle

fn metric_oracle() -> Outcome {
    const TOL: f64 = 0.001;
    const ACC_TOL: f64 = 0.01;
    let m = ConfusionMatrix {
        counts: [[12, 27, 1], [15, 212, 60], [3, 8, 33]],
        unparsed: 0,
    };
    let supports = [40, 287, 44];
    let predicted = [30, 247, 94];
    for c in 0..3 {
        ensure!(
            m.counts[c].iter().sum::<u64>() == supports[c],
            "support row {c}"
        );
        ensure!(
            (0..3).map(|g| m.counts[g][c]).sum::<u64>() == predicted[c],
            "predicted column {c}"
        );
    }
    let r = metrics(&m);
    let printed = [
        (SentimentLabel::Positive, 0.400, 0.300, 0.343),
        (SentimentLabel::Neutral, 0.858, 0.739, 0.794),
        (SentimentLabel::Negative, 0.351, 0.750, 0.478),
    ];
    for (label, p, rec, f1) in printed {
        let c = r.class(label);
        ensure!(
            (c.precision - p).abs() <= TOL,
            "{label:?} precision {:.4} vs {p}",
            c.precision
        );
        ensure!(
            (c.recall - rec).abs() <= TOL,
            "{label:?} recall {:.4} vs {rec}",
            c.recall
        );
        ensure!((c.f1 - f1).abs() <= TOL, "{label:?} F1 {:.4} vs {f1}", c.f1);
    }
    ensure!(
        (r.macro_f1 - 0.538).abs() <= TOL,
        "macro F1 {:.4}",
        r.macro_f1
    );
    ensure!(
        (r.weighted_f1 - 0.708).abs() <= TOL,
        "weighted F1 {:.4}",
        r.weighted_f1
    );
    ensure!(
        (r.accuracy - 0.695).abs() <= ACC_TOL,
        "accuracy {:.4}",
        r.accuracy
    );
    Ok(format!(
        "class P/R/F1 within ±{TOL}; macro F1 {:.4}, weighted F1 {:.4} (±{TOL}); accuracy {:.4} vs 0.695 (±{ACC_TOL})",
        r.macro_f1, r.weighted_f1, r.accuracy
    ))
}

// graph formulas

fn edge_set(g: &CoocGraph) -> BTreeMap<(String, String), u64> {
    g.edges()
        .map(|e| ((e.a.clone(), e.b.clone()), e.weight))
        .collect()
}

fn graph_formulas() -> Outcome {
    const CORPORA: u64 = 200;
    const EPS: f64 = 1e-9;
    let lex = lexicon();
    let mut edges_checked = 0usize;
    for seed in 0..CORPORA {
        let mut rng = Xoshiro256::seed_from_u64(10_000 + seed);
        let n = 5 + rng.below(26);
        let corpus = random_corpus(&mut rng, n);
        let mentions = extract_mentions(&corpus, &lex);
        let ids: Vec<String> = mentions.iter().map(|m| m.mention_id.clone()).collect();
        let predictions = random_predictions(&mut rng, &ids);
        let labels: HashMap<String, SentimentLabel> = predictions
            .iter()
            .filter_map(|p| p.label.map(|l| (p.mention_id.clone(), l)))
            .collect();
        let newspaper = match seed % 3 {
            0 => None,
            k => Some(NEWSPAPERS[k as usize - 1]),
        };
        let themes: Vec<&str> = if seed % 4 == 0 {
            vec![THEMES[0], THEMES[2]]
        } else {
            vec![]
        };
        let scope = GraphScope {
            newspaper: newspaper.map(str::to_string),
            themes: themes.iter().map(|t| t.to_string()).collect(),
            ..GraphScope::all()
        };
        let g = build_graph(&corpus, &mentions, &predictions, &scope).map_err(|e| e.to_string())?;

        // (a) brute-force pair counts
        let expected = brute_force_edges(&corpus, &lex, &labels, newspaper, &themes);
        ensure!(
            g.edge_count() == expected.len(),
            "seed {seed}: {} edges vs {}",
            g.edge_count(),
            expected.len()
        );
        for ((x, y), w) in &expected {
            ensure!(
                g.weight(x, y) == *w,
                "seed {seed}: weight({x}, {y}) {} vs {w}",
                g.weight(x, y)
            );
        }
        edges_checked += expected.len();

        // (b) thickness
        for e in g.edges() {
            ensure!(
                (e.thickness * e.thickness - e.weight as f64).abs() <= EPS,
                "seed {seed}: thickness of {}-{}",
                e.a,
                e.b
            );
        }

        // (c) identity size from an independent label tally
        let mut tallies: HashMap<String, (u64, u64)> = HashMap::new();
        for p in &corpus {
            if !scope.contains(p) {
                continue;
            }
            for s in &p.sentences {
                for (k, t) in s.tokens.iter().enumerate() {
                    let Some(identity) = identity_of(&lex, &t.lemma) else {
                        continue;
                    };
                    let id = format!("{}:{}:{}-{}", p.paragraph_id, s.index, k, k + 1);
                    if let Some(l) = labels.get(&id) {
                        let e = tallies.entry(identity).or_default();
                        e.1 += 1;
                        if *l == SentimentLabel::Neutral {
                            e.0 += 1;
                        }
                    }
                }
            }
        }
        for n in g.nodes().filter(|n| n.kind == NodeKind::Identity) {
            let expected = match tallies.get(&n.label) {
                Some(&(neu, total)) if total > 0 => 1.0 - neu as f64 / total as f64,
                _ => 0.0,
            };
            ensure!(
                (n.size - expected).abs() <= EPS,
                "seed {seed}: size of {} {} vs {expected}",
                n.id,
                n.size
            );
        }

        // (d) raising the floor only removes edges and never changes surviving weights
        let max = g.edges().map(|e| e.weight).max().unwrap_or(0);
        let mut previous = edge_set(&g);
        for w in 2..=max + 1 {
            let gw = build_graph(
                &corpus,
                &mentions,
                &predictions,
                &GraphScope {
                    min_weight: w,
                    ..scope.clone()
                },
            )
            .map_err(|e| e.to_string())?;
            let current = edge_set(&gw);
            for (k, weight) in &current {
                ensure!(
                    previous.get(k) == Some(weight),
                    "seed {seed}: min_weight {w} changed edge {k:?}"
                );
                ensure!(*weight >= w, "seed {seed}: edge below floor {w}");
            }
            let nodes: BTreeSet<&str> = gw.nodes().map(|n| n.id.as_str()).collect();
            let endpoints: BTreeSet<&str> = current
                .keys()
                .flat_map(|(a, b)| [a.as_str(), b.as_str()])
                .collect();
            ensure!(
                nodes == endpoints,
                "seed {seed}: isolated nodes at min_weight {w}"
            );
            previous = current;
        }
        ensure!(
            previous.is_empty(),
            "seed {seed}: edges above the maximum weight"
        );
    }
    Ok(format!(
        "{CORPORA} corpora, {edges_checked} edges equal brute force; thickness² = weight and size = 1 - neu/total within {EPS:e}; min-weight monotone"
    ))
}

// sampler

fn mention(
    newspaper: &str,
    category: GrammaticalCategory,
    identity: &str,
    k: usize,
) -> IdentityMention {
    let pid = format!("{newspaper}-{identity}-{k}");
    IdentityMention {
        mention_id: format!("{pid}:0:0-1"),
        paragraph_id: pid,
        newspaper: newspaper.into(),
        sentence: 0,
        start: 0,
        end: 1,
        lemma: identity.to_lowercase(),
        identity: identity.into(),
        category,
    }
}

/// Per newspaper: a nominal stratum where one identity is 90% of the pool, and a flat
/// adjectival stratum. Every tenth mention appears twice.
fn adversarial_pool() -> Vec<IdentityMention> {
    let mut pool = Vec::new();
    for paper in ["a", "b"] {
        for k in 0..900 {
            pool.push(mention(paper, GrammaticalCategory::Nominal, "Dominant", k));
        }
        for k in 0..100 {
            pool.push(mention(
                paper,
                GrammaticalCategory::Nominal,
                &format!("N{:02}", k % 25),
                k,
            ));
        }
        for k in 0..200 {
            pool.push(mention(
                paper,
                GrammaticalCategory::Adjectival,
                &format!("A{:02}", k % 40),
                k,
            ));
        }
    }
    let dupes: Vec<IdentityMention> = pool.iter().step_by(10).cloned().collect();
    pool.extend(dupes);
    pool
}

fn sampler_constraints() -> Outcome {
    const RUNS: u64 = 100;
    const TOTAL: usize = 160;
    let pool = adversarial_pool();
    let dominant_share = 900.0 / 1000.0;
    let mut distinct_samples = HashSet::new();
    for seed in 0..RUNS {
        let mut plan = SamplingPlan::new(vec!["a".into(), "b".into()], seed);
        plan.total = TOTAL;
        let s = stratified_sample(&pool, &plan).map_err(|e| e.to_string())?;
        ensure!(
            s.items.len() == TOTAL,
            "seed {seed}: size {}",
            s.items.len()
        );
        ensure!(
            s.warnings.is_empty(),
            "seed {seed}: unexpected warnings {:?}",
            s.warnings
        );
        let ids: HashSet<&str> = s.items.iter().map(|m| m.mention_id.as_str()).collect();
        ensure!(ids.len() == TOTAL, "seed {seed}: duplicate mentions");
        let mut strata: HashMap<(&str, GrammaticalCategory), usize> = HashMap::new();
        let mut per_identity: HashMap<(&str, &str), usize> = HashMap::new();
        for m in &s.items {
            *strata
                .entry((m.newspaper.as_str(), m.category))
                .or_default() += 1;
            *per_identity
                .entry((m.newspaper.as_str(), m.identity.as_str()))
                .or_default() += 1;
        }
        for paper in ["a", "b"] {
            for cat in [
                GrammaticalCategory::Nominal,
                GrammaticalCategory::Adjectival,
            ] {
                let got = strata.get(&(paper, cat)).copied().unwrap_or(0);
                ensure!(
                    got == TOTAL / 4,
                    "seed {seed}: stratum ({paper}, {cat}) has {got}"
                );
            }
        }
        // 15% of each 80-mention newspaper subset
        let limit = (0.15f64 * (TOTAL / 2) as f64).floor() as usize;
        for ((paper, identity), n) in &per_identity {
            ensure!(
                *n <= limit,
                "seed {seed}: {identity} has {n} > {limit} in {paper}"
            );
        }
        let again = stratified_sample(&pool, &plan).map_err(|e| e.to_string())?;
        let first: Vec<&str> = s.items.iter().map(|m| m.mention_id.as_str()).collect();
        let second: Vec<&str> = again.items.iter().map(|m| m.mention_id.as_str()).collect();
        ensure!(first == second, "seed {seed}: not deterministic");
        distinct_samples.insert(first.join(","));
    }
    ensure!(
        distinct_samples.len() > RUNS as usize / 2,
        "seeds barely change the sample"
    );
    Ok(format!(
        "{RUNS} seeds on a pool with one identity at {:.0}% of a stratum: size {TOTAL}, quotas 40/40/40/40, cap 12 per 80, deterministic, no duplicates",
        dominant_share * 100.0
    ))
}

// lexicon induction

fn lexicon_induction() -> Outcome {
    const MAPS: usize = 1000;
    let stems = [
        "nem", "sloven", "hrva", "fran", "polj", "angle", "la", "če", "ru", "bel",
    ];
    let tails = [
        "ški",
        "ski",
        "žki",
        "zki",
        "s\u{30c}ki",
        "z\u{30c}ki",
        "ška",
        "ec",
        "i",
        "SKI",
        "šk",
        "ki",
        "ških",
    ];
    let suffixes = ["ski", "ški", "zki", "žki"];
    let mut rng = Xoshiro256::seed_from_u64(4242);
    let mut matched = 0usize;
    for round in 0..MAPS {
        let mut freqs = BTreeMap::new();
        for _ in 0..rng.below(16) {
            let lemma = format!(
                "{}{}",
                stems[rng.below(stems.len())],
                tails[rng.below(tails.len())]
            );
            freqs.insert(lemma, 80 + rng.below(20) as u64);
        }
        let mut expected = Vec::new();
        for (lemma, &n) in &freqs {
            let composed = lemma.replace("s\u{30c}", "š").replace("z\u{30c}", "ž");
            if n >= 90 && suffixes.iter().any(|s| composed.ends_with(s)) {
                expected.push((lemma.clone(), n));
            }
        }
        expected.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let got = extract_adjectival_candidates(&freqs, &suffixes, 90);
        ensure!(got == expected, "map {round}: {got:?} vs {expected:?}");
        matched += got.len();
    }
    let boundary = BTreeMap::from([("nemški".to_string(), 89u64), ("laški".to_string(), 90)]);
    let got = extract_adjectival_candidates(&boundary, &suffixes, 90);
    ensure!(got == [("laški".to_string(), 90)], "boundary: {got:?}");
    Ok(format!("{MAPS} random maps equal the brute-force filter ({matched} candidates, NFD š/ž included); 89 excluded, 90 kept"))
}

// context windows

fn context_windows() -> Outcome {
    let lex = lexicon();
    let mut cases = 0;
    for n in 1..=7usize {
        for t in 0..n {
            let sentences: Vec<Sentence> = (0..n)
                .map(|index| Sentence {
                    index,
                    tokens: vec![
                        Token::new(format!("s{index}"), "beseda", ""),
                        if index == t {
                            Token::new("Nemci", "nemec", "NOUN")
                        } else {
                            Token::new("mesto", "mesto", "")
                        },
                    ],
                })
                .collect();
            let p = Paragraph {
                paragraph_id: "p".into(),
                newspaper: "x".into(),
                issue_date: IssueDate::parse("1900-01-01").unwrap(),
                theme: None,
                sentences,
                locations: vec![],
            };
            let records = extract_with_context([&p], &lex).map_err(|e| e.to_string())?;
            ensure!(
                records.len() == 1,
                "n={n} t={t}: {} mentions",
                records.len()
            );
            let w = &records[0].context;
            let lo = t.saturating_sub(2);
            let hi = (t + 2).min(n - 1);
            ensure!(
                w.sentence_range() == (lo..hi + 1),
                "n={n} t={t}: window {:?}",
                w.sentence_range()
            );
            let expected: Vec<String> = (lo..=hi)
                .map(|i| {
                    if i == t {
                        format!("s{i} <target>Nemci</target>")
                    } else {
                        format!("s{i} mesto")
                    }
                })
                .collect();
            ensure!(
                w.rendered == expected.join(" "),
                "n={n} t={t}: rendered `{}`",
                w.rendered
            );
            ensure!(
                w.rendered.matches("<target>").count() == 1
                    && w.rendered.matches("</target>").count() == 1,
                "n={n} t={t}: tag count"
            );
            cases += 1;
        }
    }
    Ok(format!("all {cases} target positions in paragraphs of 1-7 sentences: window = clamp(t-2, t+2), one tag pair"))
}

// end-to-end golden run

const STAGES: [&[&str]; 8] = [
    &["stats"],
    &["extract"],
    &["sample"],
    &["classify", "--backend", "mock"],
    &["evaluate"],
    &["aggregate"],
    &["plot-data"],
    &["graph"],
];

fn run_pipeline(out: &Path) -> Result<(), String> {
    let config = demo().join("pipeline.toml");
    for stage in STAGES {
        let status = Command::new(env!("CARGO_BIN_EXE_presslens"))
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(out)
            .args(stage)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(
            status.status.success(),
            "{stage:?} failed: {}",
            String::from_utf8_lossy(&status.stderr)
        );
    }
    Ok(())
}

fn tree(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| e.to_string())? {
        let entry = entry.map_err(|e| e.to_string())?;
        let name = entry.file_name().to_string_lossy().into_owned();
        out.insert(name, fs::read(entry.path()).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn golden_run() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_pipeline(&a)?;
    run_pipeline(&b)?;
    let (ta, tb) = (tree(&a)?, tree(&b)?);
    let golden = tree(&demo().join("golden"))?;
    ensure!(ta == tb, "repeated runs differ");
    let names_a: Vec<&String> = ta.keys().collect();
    let names_g: Vec<&String> = golden.keys().collect();
    ensure!(
        names_a == names_g,
        "file sets differ: {names_a:?} vs {names_g:?}"
    );
    for (name, bytes) in &ta {
        ensure!(
            golden[name] == *bytes,
            "{name} differs from the committed golden tree"
        );
    }
    Ok(format!(
        "{} files byte-identical across two runs and the committed golden tree",
        ta.len()
    ))
}

// aggregation

fn aggregation() -> Outcome {
    const EPS: f64 = 1e-9;
    let lex = lexicon();
    let mut profiles_checked = 0;
    for seed in 0..50 {
        let mut rng = Xoshiro256::seed_from_u64(seed);
        let corpus = random_corpus(&mut rng, 40);
        let mentions = extract_mentions(&corpus, &lex);
        let ids: Vec<String> = mentions.iter().map(|m| m.mention_id.clone()).collect();
        let predictions = random_predictions(&mut rng, &ids);
        let set = build_profiles(&mentions, &predictions).map_err(|e| e.to_string())?;
        for p in &set.profiles {
            let s = p.proportions.positive + p.proportions.negative + p.proportions.neutral;
            ensure!(
                (s - 1.0).abs() <= EPS,
                "proportions of {}/{} sum to {s}",
                p.identity,
                p.newspaper
            );
            profiles_checked += 1;
        }
        // the floor excludes every identity short in any newspaper
        let floor = 3;
        let ranked = rank_by_neutrality(
            &set.profiles,
            None,
            floor,
            RankDirection::MostNeutral,
            usize::MAX,
        );
        for r in &ranked {
            for paper in NEWSPAPERS {
                let total = set
                    .profiles
                    .iter()
                    .find(|p| p.identity == r.identity && p.newspaper == paper)
                    .map_or(0, |p| p.total);
                ensure!(
                    total >= floor,
                    "{} ranked with {total} < {floor} in {paper}",
                    r.identity
                );
            }
        }
    }

    let profile = |i: &str, n: &str, pos, neg, neu| {
        IdentitySentimentProfile::from_counts(
            i,
            n,
            LabelCounts {
                positive: pos,
                negative: neg,
                neutral: neu,
            },
        )
    };
    let fixture = vec![
        profile("A", "a", 10, 10, 80),
        profile("A", "b", 30, 10, 60),
        profile("B", "a", 0, 10, 90),
        profile("B", "b", 0, 10, 90),
        profile("C", "a", 25, 25, 50),
        profile("C", "b", 25, 25, 50),
        profile("D", "a", 5, 5, 90),
        profile("D", "b", 5, 4, 40),
        profile("E", "a", 20, 20, 60),
        profile("E", "b", 10, 10, 80),
        profile("F", "a", 50, 50, 0),
        profile("F", "b", 40, 10, 50),
        profile("G", "a", 5, 5, 90),
        profile("H", "a", 30, 10, 60),
        profile("H", "b", 20, 0, 80),
        profile("I", "a", 0, 0, 100),
        profile("I", "b", 50, 0, 50),
        profile("J", "a", 45, 45, 10),
        profile("J", "b", 45, 45, 10),
    ];
    let order: Vec<String> = rank_by_neutrality(&fixture, None, 50, RankDirection::MostNeutral, 10)
        .into_iter()
        .map(|r| r.identity)
        .collect();
    ensure!(
        order == ["B", "I", "A", "E", "H", "C", "F", "J"],
        "hand-sorted fixture: {order:?}"
    );

    let mut rng = Xoshiro256::seed_from_u64(99);
    let matrices = 1000;
    for k in 0..matrices {
        let mut m = ConfusionMatrix::default();
        for g in 0..3 {
            for p in 0..3 {
                m.counts[g][p] = rng.below(if k % 7 == 0 { 3 } else { 60 }) as u64;
            }
        }
        if m.total() == 0 {
            continue;
        }
        let r = metrics(&m);
        ensure!(
            (r.micro_f1() - r.accuracy).abs() <= EPS,
            "matrix {:?}: micro F1 {} vs accuracy {}",
            m.counts,
            r.micro_f1(),
            r.accuracy
        );
    }
    Ok(format!(
        "{profiles_checked} profiles sum to 1 within {EPS:e}; floor respected; 10-identity fixture order B I A E H C F J; micro F1 = accuracy on {matrices} matrices"
    ))
}

// service

async fn fetch(app: &axum::Router, uri: &str) -> (StatusCode, Vec<u8>) {
    let res = app
        .clone()
        .oneshot(Request::get(uri).body(Body::empty()).unwrap())
        .await
        .unwrap();
    let status = res.status();
    (
        status,
        res.into_body().collect().await.unwrap().to_bytes().to_vec(),
    )
}

async fn service_checks() -> Outcome {
    let bundle = Arc::new(
        AnalysisBundle::load(&demo().join("golden"), Some(&demo().join("corpus.jsonl")))
            .map_err(|e| e.to_string())?,
    );
    let app = router(bundle.clone(), &ServeOptions::default()).map_err(|e| e.to_string())?;
    let date = |s: &str| IssueDate::parse(s).map(|d| d.date);
    let scopes = [
        ("/api/graph", GraphScope::all()),
        (
            "/api/graph?newspaper=slovenec",
            GraphScope {
                newspaper: Some("slovenec".into()),
                ..GraphScope::all()
            },
        ),
        (
            "/api/graph?newspaper=slovenski-narod&min_weight=2",
            GraphScope {
                newspaper: Some("slovenski-narod".into()),
                min_weight: 2,
                ..GraphScope::all()
            },
        ),
        (
            "/api/graph?themes=Foreign%20affairs,Economy",
            GraphScope {
                themes: vec!["Economy".into(), "Foreign affairs".into()],
                ..GraphScope::all()
            },
        ),
        (
            "/api/graph?from=1897-01-01&to=1903-12-31&min_weight=1",
            GraphScope {
                from: date("1897-01-01"),
                to: date("1903-12-31"),
                ..GraphScope::all()
            },
        ),
    ];
    for (uri, scope) in &scopes {
        let offline = export_graph(
            &build_graph(
                &bundle.paragraphs,
                &bundle.mentions,
                &bundle.predictions,
                scope,
            )
            .map_err(|e| e.to_string())?,
            ExportFormat::Json,
        );
        let (status, body) = fetch(&app, uri).await;
        ensure!(
            status == StatusCode::OK && body == offline,
            "{uri}: response differs from offline export"
        );
    }

    let mut pages_checked = 0;
    for node in [
        "identity:Slovenci",
        "location:Trst",
        "theme:Political%20life",
        "sentiment:-",
    ] {
        let (_, full) = fetch(&app, &format!("/api/nodes/{node}/paragraphs?limit=200")).await;
        let full: serde_json::Value = serde_json::from_slice(&full).map_err(|e| e.to_string())?;
        let full = full["paragraphs"].as_array().cloned().unwrap_or_default();
        ensure!(!full.is_empty(), "{node}: no paragraphs");
        for limit in [1, 2, 3] {
            let mut joined = Vec::new();
            let mut offset = 0;
            while offset < full.len() + limit {
                let (_, page) = fetch(
                    &app,
                    &format!("/api/nodes/{node}/paragraphs?limit={limit}&offset={offset}"),
                )
                .await;
                let page: serde_json::Value =
                    serde_json::from_slice(&page).map_err(|e| e.to_string())?;
                joined.extend(page["paragraphs"].as_array().cloned().unwrap_or_default());
                offset += limit;
                pages_checked += 1;
            }
            ensure!(
                joined == full,
                "{node}: pages of {limit} do not union to the full list"
            );
        }
    }

    let contract = [
        (
            "/api/paragraphs/unknown-id",
            StatusCode::NOT_FOUND,
            "not_found",
        ),
        (
            "/api/nodes/identity:Nobody/paragraphs",
            StatusCode::NOT_FOUND,
            "not_found",
        ),
        (
            "/api/identities/Nobody/profile",
            StatusCode::NOT_FOUND,
            "not_found",
        ),
        (
            "/api/graph?min_weight=0",
            StatusCode::BAD_REQUEST,
            "bad_request",
        ),
        (
            "/api/graph?from=yesterday",
            StatusCode::BAD_REQUEST,
            "bad_request",
        ),
        (
            "/api/nodes/identity:Nemci/paragraphs?limit=0",
            StatusCode::BAD_REQUEST,
            "bad_request",
        ),
    ];
    for (uri, want, code) in contract {
        let (status, body) = fetch(&app, uri).await;
        let v: serde_json::Value =
            serde_json::from_slice(&body).map_err(|e| format!("{uri}: {e}"))?;
        ensure!(
            status == want && v["error"]["code"] == code,
            "{uri}: {status} {v}"
        );
    }
    Ok(format!(
        "{} scopes byte-equal offline export; {pages_checked} pages union to full lists; {} 404/400 cases",
        scopes.len(),
        contract.len()
    ))
}

fn service_conformance() -> Outcome {
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(service_checks())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("metric oracle", Duration::from_secs(1), metric_oracle),
        (
            "graph formula suite",
            Duration::from_secs(30),
            graph_formulas,
        ),
        (
            "sampler constraints",
            Duration::from_secs(30),
            sampler_constraints,
        ),
        (
            "lexicon induction",
            Duration::from_secs(10),
            lexicon_induction,
        ),
        ("context windows", Duration::from_secs(5), context_windows),
        ("end-to-end golden run", Duration::from_secs(20), golden_run),
        ("aggregation", Duration::from_secs(10), aggregation),
        (
            "service conformance",
            Duration::from_secs(20),
            service_conformance,
        ),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; too slow")),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "{tag} {name}: {detail} [{} ms, limit {} s]",
            elapsed.as_millis(),
            limit.as_secs()
        );
        if outcome.is_err() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
