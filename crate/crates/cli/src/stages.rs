use std::collections::{BTreeSet, HashSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use presslens_core::aggregation::{
    build_profiles, rank_by_neutrality, sentiment_composition, theme_distribution,
    write_composition_tsv, write_profiles_tsv, write_ranking_tsv, write_theme_distribution_tsv,
    RankDirection,
};
use presslens_core::corpus::{corpus_stats, lemma_frequencies, read_corpus, IssueDate, Paragraph};
use presslens_core::evaluation::{evaluate, join_predictions, read_gold_tsv, render_evaluation};
use presslens_core::graph::{
    build_graph, diff_scopes, export_graph, import_graph_json, ExportFormat, GraphScope,
};
use presslens_core::lexicon::{extract_adjectival_candidates, load_lexicon};
use presslens_core::mentions::{
    extract_with_context, read_mentions, write_mentions, MentionRecord,
};
use presslens_core::sampler::{stratified_sample, write_annotation_tsv, SamplingPlan};
use presslens_core::sentiment::{
    classify_batch, read_predictions, write_predictions, BackendKind, BatchOptions, PromptTemplate,
    SentimentPrediction, TaskInstance,
};
use presslens_server::{AnalysisBundle, ServeOptions};
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::output::Stage;
use crate::{AnalysisArgs, BackendChoice, Cli, Command, CorpusArg, Invalid, ScopeArgs};

pub const STATS_FILE: &str = "stats.json";
pub const CANDIDATES_FILE: &str = "lexicon_candidates.tsv";
pub const MENTIONS_FILE: &str = "mentions.jsonl";
pub const SAMPLE_FILE: &str = "sample.tsv";
pub const PREDICTIONS_FILE: &str = "predictions.jsonl";
pub const CHECKPOINT_FILE: &str = "predictions.checkpoint.jsonl";

struct Ctx {
    cfg: PipelineConfig,
    out: PathBuf,
}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

impl Ctx {
    fn corpus_path(&self, arg: &CorpusArg) -> Result<PathBuf> {
        arg.corpus
            .clone()
            .or_else(|| self.cfg.corpus.clone())
            .ok_or_else(|| invalid("no corpus: pass --corpus or set `corpus` in the configuration"))
    }

    fn or_out(&self, path: &Option<PathBuf>, file: &str) -> PathBuf {
        path.clone().unwrap_or_else(|| self.out.join(file))
    }

    fn stage(&self, name: &'static str) -> Result<Stage> {
        Stage::new(name, &self.out, self.cfg.seed)
    }
}

fn load_corpus(stage: &mut Stage, path: &Path) -> Result<Vec<Paragraph>> {
    let path = stage.input(path)?;
    let (paragraphs, report) =
        read_corpus(open(path)?).with_context(|| format!("reading {}", path.display()))?;
    if report.unknown_fields > 0 || !report.approximate_dates.is_empty() {
        log::info!(
            "{}: {} unknown fields ignored, {} dates without day",
            path.display(),
            report.unknown_fields,
            report.approximate_dates.len()
        );
    }
    Ok(paragraphs)
}

fn load_mentions(stage: &mut Stage, path: &Path) -> Result<Vec<MentionRecord>> {
    let path = stage.input(path)?;
    read_mentions(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn load_predictions(stage: &mut Stage, path: &Path) -> Result<Vec<SentimentPrediction>> {
    let path = stage.input(path)?;
    read_predictions(open(path)?).with_context(|| format!("reading {}", path.display()))
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let ctx = Ctx { cfg, out };
    match cli.command {
        Command::Stats(corpus) => stats(&ctx, &corpus),
        Command::LexiconCandidates {
            corpus,
            newspaper,
            min_freq,
        } => lexicon_candidates(&ctx, &corpus, newspaper.as_deref(), min_freq),
        Command::Extract { corpus, lexicon } => extract(&ctx, &corpus, lexicon),
        Command::Sample { mentions, seed } => sample(&ctx, &mentions, seed),
        Command::Classify {
            mentions,
            backend,
            ids,
        } => classify(&ctx, &mentions, backend, ids.as_deref()),
        Command::Evaluate { gold, predictions } => evaluate_stage(&ctx, gold, &predictions),
        Command::Aggregate(args) => aggregate(&ctx, &args),
        Command::Graph {
            inputs,
            scope,
            name,
        } => graph(&ctx, &inputs, &scope, &name),
        Command::Diff { a, b } => diff(&ctx, &a, &b),
        Command::Serve {
            bundle,
            corpus,
            bind,
            cors_origin,
        } => serve(&ctx, bundle, &corpus, bind, cors_origin),
        Command::PlotData(args) => plot_data(&ctx, &args),
    }
}

#[derive(Serialize)]
struct StatsOutput<'a> {
    stats: presslens_core::corpus::CorpusStats,
    validation: &'a presslens_core::corpus::ValidationReport,
}

fn stats(ctx: &Ctx, arg: &CorpusArg) -> Result<()> {
    let mut stage = ctx.stage("stats")?;
    let path = ctx.corpus_path(arg)?;
    let path = stage.input(&path)?;
    let (paragraphs, report) =
        read_corpus(open(path)?).with_context(|| format!("reading {}", path.display()))?;
    let out = StatsOutput {
        stats: corpus_stats(&paragraphs),
        validation: &report,
    };
    stage.write_json(STATS_FILE, &out)?;
    let t = &out.stats.total;
    eprintln!(
        "{} paragraphs, {} tokens, {} issues",
        t.paragraphs, t.tokens, t.issues
    );
    Ok(())
}

fn lexicon_candidates(
    ctx: &Ctx,
    arg: &CorpusArg,
    newspaper: Option<&str>,
    min_freq: Option<u64>,
) -> Result<()> {
    let mut stage = ctx.stage("lexicon-candidates")?;
    let paragraphs = load_corpus(&mut stage, &ctx.corpus_path(arg)?)?;
    let mut section = ctx.cfg.candidates.clone();
    if let Some(m) = min_freq {
        section.min_freq = m;
    }
    let freqs = lemma_frequencies(&paragraphs, newspaper);
    let candidates = extract_adjectival_candidates(&freqs, &section.suffixes, section.min_freq);
    stage.config(serde_json::json!({ "candidates": section, "newspaper": newspaper }));
    let mut tsv = String::from("lemma\tcount\n");
    for (lemma, n) in &candidates {
        tsv.push_str(&format!("{lemma}\t{n}\n"));
    }
    stage.write(CANDIDATES_FILE, tsv.as_bytes())?;
    eprintln!("{} candidates", candidates.len());
    Ok(())
}

fn extract(ctx: &Ctx, arg: &CorpusArg, lexicon: Option<PathBuf>) -> Result<()> {
    let mut stage = ctx.stage("extract")?;
    let paragraphs = load_corpus(&mut stage, &ctx.corpus_path(arg)?)?;
    let lexicon_path = lexicon.or_else(|| ctx.cfg.lexicon.clone()).ok_or_else(|| {
        invalid("no lexicon: pass --lexicon or set `lexicon` in the configuration")
    })?;
    let lexicon_path = stage.input(&lexicon_path)?;
    let lexicon = load_lexicon(open(lexicon_path)?)
        .with_context(|| format!("reading {}", lexicon_path.display()))?;
    let records = extract_with_context(&paragraphs, &lexicon)?;
    let mut buf = Vec::new();
    write_mentions(&mut buf, &records)?;
    stage.write(MENTIONS_FILE, &buf)?;
    eprintln!(
        "{} mentions in {} paragraphs",
        records.len(),
        paragraphs.len()
    );
    Ok(())
}

fn sample(ctx: &Ctx, mentions: &Option<PathBuf>, seed: Option<u64>) -> Result<()> {
    let seed = seed.unwrap_or(ctx.cfg.seed);
    let mut stage = Stage::new("sample", &ctx.out, seed)?;
    let records = load_mentions(&mut stage, &ctx.or_out(mentions, MENTIONS_FILE))?;
    let section = &ctx.cfg.sampler;
    let newspapers = if section.newspapers.is_empty() {
        records
            .iter()
            .map(|r| r.mention.newspaper.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    } else {
        section.newspapers.clone()
    };
    let plan = SamplingPlan {
        total: section.total,
        newspapers,
        nominal_share: section.nominal_share,
        identity_cap: section.identity_cap,
        seed,
    };
    stage.config(&plan);
    let sample = stratified_sample(&records, &plan)?;
    for w in &sample.warnings {
        log::warn!(
            "{} in {}: {} sampled, cap {} (pool has no alternatives)",
            w.identity,
            w.newspaper,
            w.count,
            w.limit
        );
    }
    let mut buf = Vec::new();
    write_annotation_tsv(&mut buf, &sample.items)?;
    stage.write(SAMPLE_FILE, &buf)?;
    eprintln!(
        "{} mentions sampled, {} cap warnings",
        sample.items.len(),
        sample.warnings.len()
    );
    Ok(())
}

fn read_id_list(path: &Path) -> Result<HashSet<String>> {
    let mut ids = HashSet::new();
    for line in open(path)?.lines() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        let id = line.split('\t').next().unwrap_or("").trim();
        if !id.is_empty() && id != "mention_id" {
            ids.insert(id.to_string());
        }
    }
    Ok(ids)
}

fn classify(
    ctx: &Ctx,
    mentions: &Option<PathBuf>,
    backend: Option<BackendChoice>,
    ids: Option<&Path>,
) -> Result<()> {
    let mut stage = ctx.stage("classify")?;
    let mut records = load_mentions(&mut stage, &ctx.or_out(mentions, MENTIONS_FILE))?;
    if let Some(path) = ids {
        let keep = read_id_list(stage.input(path)?)?;
        records.retain(|r| keep.contains(&r.mention.mention_id));
    }
    let template = match &ctx.cfg.prompt {
        Some(path) => {
            let path = stage.input(path)?;
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            PromptTemplate::from_toml(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => PromptTemplate::placeholder(),
    };
    let mut backend_cfg = ctx.cfg.backend.clone();
    match backend {
        Some(BackendChoice::Mock) => backend_cfg.kind = BackendKind::Mock,
        Some(BackendChoice::Http) => backend_cfg.kind = BackendKind::Http,
        None => {}
    }
    stage.config(serde_json::json!({
        "backend": backend_cfg,
        "prompt": if ctx.cfg.prompt.is_some() { "file" } else { "placeholder" },
    }));
    let backend = backend_cfg.build()?;
    let instances = records
        .iter()
        .map(TaskInstance::from_record)
        .collect::<presslens_core::Result<Vec<_>>>()?;
    let options = BatchOptions {
        concurrency: backend_cfg.concurrency,
        checkpoint: Some(stage.path(CHECKPOINT_FILE)),
    };
    let (predictions, summary) = classify_batch(&instances, backend.as_ref(), &template, &options)?;
    let mut buf = Vec::new();
    write_predictions(&mut buf, &predictions)?;
    stage.write(PREDICTIONS_FILE, &buf)?;
    eprintln!(
        "{} predictions ({} resumed, {} requested, {} unparsed, {} failed)",
        predictions.len(),
        summary.resumed,
        summary.requested,
        summary.unparsed,
        summary.failed
    );
    if summary.failed > 0 {
        return Err(std::io::Error::other(format!(
            "{} requests failed after retries; rerun to resume from {}",
            summary.failed, CHECKPOINT_FILE
        ))
        .into());
    }
    Ok(())
}

fn evaluate_stage(ctx: &Ctx, gold: Option<PathBuf>, predictions: &Option<PathBuf>) -> Result<()> {
    let mut stage = ctx.stage("evaluate")?;
    let gold_path = gold.or_else(|| ctx.cfg.gold.clone()).ok_or_else(|| {
        invalid("no gold annotations: pass --gold or set `gold` in the configuration")
    })?;
    let gold_path = stage.input(&gold_path)?;
    let (gold, summary) = read_gold_tsv(open(gold_path)?)
        .with_context(|| format!("reading {}", gold_path.display()))?;
    let preds = load_predictions(&mut stage, &ctx.or_out(predictions, PREDICTIONS_FILE))?;
    let records = join_predictions(&gold, &preds)?;
    let report = evaluate(&records, summary)?;
    let text = render_evaluation(&report);
    stage.write_json("evaluation.json", &report)?;
    stage.write("evaluation.txt", text.as_bytes())?;
    print!("{text}");
    Ok(())
}

fn analysis_inputs(
    ctx: &Ctx,
    stage: &mut Stage,
    args: &AnalysisArgs,
    with_corpus: bool,
) -> Result<(Vec<Paragraph>, Vec<MentionRecord>, Vec<SentimentPrediction>)> {
    let paragraphs = if with_corpus {
        load_corpus(stage, &ctx.corpus_path(&args.corpus)?)?
    } else {
        Vec::new()
    };
    let mentions = load_mentions(stage, &ctx.or_out(&args.mentions, MENTIONS_FILE))?;
    let predictions = load_predictions(stage, &ctx.or_out(&args.predictions, PREDICTIONS_FILE))?;
    Ok((paragraphs, mentions, predictions))
}

fn aggregate(ctx: &Ctx, args: &AnalysisArgs) -> Result<()> {
    let mut stage = ctx.stage("aggregate")?;
    let (paragraphs, mentions, predictions) = analysis_inputs(ctx, &mut stage, args, true)?;
    let set = build_profiles(&mentions, &predictions)?;
    let mut buf = Vec::new();
    write_profiles_tsv(&mut buf, &set.profiles)?;
    stage.write("profiles.tsv", &buf)?;
    stage.write_json("profiles.json", &set)?;
    let dist = theme_distribution(&paragraphs, &mentions);
    let mut buf = Vec::new();
    write_theme_distribution_tsv(&mut buf, &dist)?;
    stage.write("theme_distribution.tsv", &buf)?;
    eprintln!(
        "{} profiles from {} parsed predictions ({} unparsed)",
        set.profiles.len(),
        set.parsed,
        set.unparsed.iter().map(|f| f.unparsed).sum::<u64>()
    );
    Ok(())
}

fn plot_data(ctx: &Ctx, args: &AnalysisArgs) -> Result<()> {
    let mut stage = ctx.stage("plot-data")?;
    let (_, mentions, predictions) = analysis_inputs(ctx, &mut stage, args, false)?;
    let section = &ctx.cfg.aggregate;
    stage.config(section);
    let set = build_profiles(&mentions, &predictions)?;
    let newspapers = (!section.newspapers.is_empty()).then_some(section.newspapers.as_slice());

    let mut buf = Vec::new();
    write_composition_tsv(
        &mut buf,
        &sentiment_composition(&set.profiles, section.composition_top_k),
    )?;
    stage.write("composition.tsv", &buf)?;
    for (file, direction) in [
        ("most_neutral.tsv", RankDirection::MostNeutral),
        ("most_non_neutral.tsv", RankDirection::MostNonNeutral),
    ] {
        let ranked = rank_by_neutrality(
            &set.profiles,
            newspapers,
            section.min_mentions,
            direction,
            section.ranking_top_k,
        );
        if ranked.is_empty() {
            log::warn!(
                "{file}: no identity reaches {} mentions in every newspaper",
                section.min_mentions
            );
        }
        let mut buf = Vec::new();
        write_ranking_tsv(&mut buf, &ranked)?;
        stage.write(file, &buf)?;
    }
    Ok(())
}

fn parse_date(field: &str, s: &str) -> Result<chrono::NaiveDate> {
    IssueDate::parse(s)
        .map(|d| d.date)
        .ok_or_else(|| invalid(format!("{field}: expected YYYY-MM-DD, got `{s}`")))
}

fn scope_from(ctx: &Ctx, args: &ScopeArgs) -> Result<GraphScope> {
    let base = &ctx.cfg.scope;
    let from = args.from.clone().or_else(|| base.from.clone());
    let to = args.to.clone().or_else(|| base.to.clone());
    let scope = GraphScope {
        newspaper: args.newspaper.clone().or_else(|| base.newspaper.clone()),
        themes: args.themes.clone().unwrap_or_else(|| base.themes.clone()),
        min_weight: args.min_weight.unwrap_or(base.min_weight),
        from: from.map(|s| parse_date("from", &s)).transpose()?,
        to: to.map(|s| parse_date("to", &s)).transpose()?,
    }
    .normalized();
    scope.validate()?;
    Ok(scope)
}

fn graph(ctx: &Ctx, args: &AnalysisArgs, scope: &ScopeArgs, name: &str) -> Result<()> {
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        return Err(invalid(format!(
            "--name `{name}` must be a plain file stem"
        )));
    }
    let mut stage = ctx.stage("graph")?;
    let scope = scope_from(ctx, scope)?;
    stage.config(&scope);
    let (paragraphs, mentions, predictions) = analysis_inputs(ctx, &mut stage, args, true)?;
    let g = build_graph(&paragraphs, &mentions, &predictions, &scope)?;
    stage.write(
        &format!("{name}.json"),
        &export_graph(&g, ExportFormat::Json),
    )?;
    stage.write(
        &format!("{name}.graphml"),
        &export_graph(&g, ExportFormat::GraphMl),
    )?;
    eprintln!("{} nodes, {} edges", g.node_count(), g.edge_count());
    Ok(())
}

fn diff(ctx: &Ctx, a: &Path, b: &Path) -> Result<()> {
    let mut stage = ctx.stage("diff")?;
    let mut load = |path: &Path| -> Result<_> {
        let path = stage.input(path)?;
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        import_graph_json(&bytes).with_context(|| format!("in {}", path.display()))
    };
    let (ga, gb) = (load(a)?, load(b)?);
    let d = diff_scopes(&ga, &gb);
    stage.write_json("diff.json", &d)?;
    let mut stdout = std::io::stdout().lock();
    writeln!(
        stdout,
        "nodes: {} only in a, {} only in b, {} shared; edges: {} only in a, {} only in b, {} shared",
        d.a_only.len(),
        d.b_only.len(),
        d.shared.len(),
        d.a_only_edges.len(),
        d.b_only_edges.len(),
        d.shared_edges.len()
    )?;
    Ok(())
}

fn serve(
    ctx: &Ctx,
    bundle: Option<PathBuf>,
    corpus: &CorpusArg,
    bind: std::net::SocketAddr,
    cors_origin: Option<String>,
) -> Result<()> {
    let dir = bundle.unwrap_or_else(|| ctx.out.clone());
    let corpus = corpus.corpus.clone().or_else(|| {
        (!dir.join(presslens_server::bundle::CORPUS_FILE).exists())
            .then(|| ctx.cfg.corpus.clone())
            .flatten()
    });
    let bundle = AnalysisBundle::load(&dir, corpus.as_deref())?;
    eprintln!(
        "bundle {}: {} paragraphs, {} mentions, {} predictions",
        bundle.hash(),
        bundle.paragraphs.len(),
        bundle.mentions.len(),
        bundle.predictions.len()
    );
    let options = ServeOptions {
        cors_origin,
        ..Default::default()
    };
    let runtime = tokio::runtime::Runtime::new().context("starting runtime")?;
    runtime.block_on(presslens_server::serve(bundle, bind, options))?;
    Ok(())
}
