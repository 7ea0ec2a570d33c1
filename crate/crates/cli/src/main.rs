mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use umf_core::analysis::{KeywordAnalyzer, SourceAnalyzer};
use umf_core::candidate::CandidateSet;
use umf_core::compute_divergence_vector;
use umf_core::directive::{build_directive, load_weight_overrides, WeightSet};
use umf_core::metrics::load_labels;
use umf_core::pipeline::{
    load_corpus, read_jsonl, run_evaluate, run_translate, write_jsonl, write_jsonl_to, CandidateSource, FileSource,
    HttpSource, TranslateOptions,
};
use umf_core::profile::{load_profile, shipped, validate_profile, LanguageProfile};
use umf_core::rerank::{RerankConfig, RerankRequest, RerankResult, Reranker};
use umf_core::scorers::{score_candidate, umf_from_plan, ScoringPlan};
use umf_core::semantic::SenseLexicon;

use config::{merge, FileConfig, RerankFlags};

#[derive(Parser)]
#[command(name = "umf", version, about = "Typology-guided reranking of translation candidates")]
struct Cli {
    /// Directory holding `<code>.profile.json` files. Shipped en/si profiles are used otherwise.
    #[arg(long, global = true)]
    profiles: Option<PathBuf>,
    /// TOML config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Accepted for compatibility; the pipeline has no randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Pair {
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    target: Option<String>,
}

#[derive(Args, Clone, Default)]
struct RerankArgs {
    #[arg(long)]
    alpha: Option<f64>,
    /// Activation threshold on raw divergence.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    beam_width: Option<usize>,
    #[arg(long)]
    score_all: bool,
    #[arg(long)]
    boost: Option<f64>,
    #[arg(long)]
    penalty: Option<f64>,
    /// Sense lexicon JSON. The shipped starter lexicon otherwise.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// JSON map of per-dimension weight overrides.
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Per-dimension divergence between two profiles.
    Divergence {
        #[command(flatten)]
        pair: Pair,
    },
    /// Normalized directive vector and active dimensions.
    Directive {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Per-dimension scores and UMF score for one candidate.
    Score {
        #[command(flatten)]
        pair: Pair,
        /// Source sentence.
        #[arg(long)]
        source_text: String,
        /// Candidate translation.
        #[arg(long)]
        candidate: String,
        #[arg(long)]
        formal: Option<bool>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Rerank candidate sets from a JSONL file.
    Rerank {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        candidates: PathBuf,
        /// Results JSONL; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        rerank: RerankArgs,
    },
    /// Run a corpus through generation and reranking.
    Translate {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        corpus: PathBuf,
        /// Candidate JSONL file; the HTTP generator from the environment is used otherwise.
        #[arg(long)]
        candidates: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        /// Sentences in flight at once.
        #[arg(long)]
        concurrency: Option<usize>,
        #[command(flatten)]
        rerank: RerankArgs,
    },
    /// Metrics over a results file and human labels.
    Evaluate {
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        /// Second annotator's labels; enables kappa.
        #[arg(long)]
        labels_b: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
        /// Row label in the text table.
        #[arg(long, default_value = "all")]
        language: String,
    },
    /// Check profile files against the schema.
    ValidateProfile {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

struct Ctx {
    profiles: Option<PathBuf>,
    file: FileConfig,
}

impl Ctx {
    fn profile(&self, code: &str) -> anyhow::Result<LanguageProfile> {
        if let Some(dir) = &self.profiles {
            let path = dir.join(format!("{code}.profile.json"));
            if path.exists() {
                return load_profile(&path).with_context(|| format!("loading {}", path.display()));
            }
        }
        shipped::by_code(code).with_context(|| format!("no profile for `{code}`"))
    }

    fn pair(&self, pair: &Pair) -> anyhow::Result<(LanguageProfile, LanguageProfile)> {
        let src = pair
            .source
            .as_deref()
            .or(self.file.source_lang.as_deref())
            .unwrap_or("en");
        let tgt = pair
            .target
            .as_deref()
            .or(self.file.target_lang.as_deref())
            .unwrap_or("si");
        Ok((self.profile(src)?, self.profile(tgt)?))
    }

    fn weights(&self, flag: Option<&Path>, target: &LanguageProfile) -> anyhow::Result<Option<WeightSet>> {
        match flag.or(self.file.weights.as_deref()) {
            None => Ok(None),
            Some(path) => {
                let overrides = load_weight_overrides(path)?;
                Ok(Some(WeightSet::from_profile(target).with_overrides(&overrides)))
            }
        }
    }

    fn threshold(&self, flag: Option<f64>) -> f64 {
        flag.or(self.file.activation_threshold)
            .unwrap_or(umf_core::DEFAULT_ACTIVATION_THRESHOLD)
    }

    fn lexicon(&self, flag: Option<&Path>) -> anyhow::Result<SenseLexicon> {
        match flag.or(self.file.lexicon.as_deref()) {
            Some(path) => Ok(SenseLexicon::load(path)?),
            None => Ok(SenseLexicon::starter()),
        }
    }

    fn rerank_config(&self, args: &RerankArgs) -> RerankConfig {
        let flags = RerankFlags {
            alpha: args.alpha,
            threshold: args.threshold,
            top_k: args.top_k,
            beam_width: args.beam_width,
            boost: args.boost,
            penalty: args.penalty,
            score_all: args.score_all,
        };
        merge(&flags, &self.file)
    }
}

fn print_json(value: &impl serde::Serialize) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let ctx = Ctx {
        profiles: cli.profiles,
        file,
    };
    match cli.command {
        Command::Divergence { pair } => {
            let (src, tgt) = ctx.pair(&pair)?;
            print_json(&compute_divergence_vector(&src, &tgt)?)?;
        }
        Command::Directive {
            pair,
            threshold,
            weights,
        } => {
            let (src, tgt) = ctx.pair(&pair)?;
            let weights = ctx
                .weights(weights.as_deref(), &tgt)?
                .unwrap_or_else(|| WeightSet::from_profile(&tgt));
            let directive = build_directive(&src, &tgt, &weights, ctx.threshold(threshold))?;
            print_json(&json!({
                "pair": directive.pair,
                "values": directive.values,
                "active": directive.active,
                "norm": directive.values.l2_norm(),
            }))?;
        }
        Command::Score {
            pair,
            source_text,
            candidate,
            formal,
            threshold,
            weights,
        } => {
            let (src, tgt) = ctx.pair(&pair)?;
            let weights = ctx
                .weights(weights.as_deref(), &tgt)?
                .unwrap_or_else(|| WeightSet::from_profile(&tgt));
            let directive = build_directive(&src, &tgt, &weights, ctx.threshold(threshold))?;
            let analysis = KeywordAnalyzer.analyze(&source_text, formal);
            let plan = ScoringPlan::build(&directive, &tgt, &analysis)?;
            let scores = score_candidate(&candidate, &tgt, &plan, &analysis)?;
            let umf = umf_from_plan(&scores, &plan)?;
            print_json(&json!({ "umf_score": umf, "scores": scores, "skipped": plan.skipped }))?;
        }
        Command::Rerank {
            pair,
            candidates,
            output,
            rerank,
        } => {
            let (src, tgt) = ctx.pair(&pair)?;
            let lexicon = ctx.lexicon(rerank.lexicon.as_deref())?;
            let mut reranker = Reranker::new(&src, &tgt, &lexicon, ctx.rerank_config(&rerank))?;
            if let Some(w) = ctx.weights(rerank.weights.as_deref(), &tgt)? {
                reranker = reranker.with_weights(w);
            }
            let sets: Vec<CandidateSet> = read_jsonl(&candidates)?;
            let mut results: Vec<RerankResult> = Vec::with_capacity(sets.len());
            for set in &sets {
                set.validate()
                    .with_context(|| format!("sentence `{}`", set.sentence_id))?;
                let result = reranker
                    .rerank(RerankRequest {
                        sentence_id: Some(&set.sentence_id),
                        source_text: &set.source_text,
                        formal: set.formal,
                        candidates: &set.candidates,
                    })
                    .with_context(|| format!("sentence `{}`", set.sentence_id))?;
                results.push(result);
            }
            match output {
                Some(path) => write_jsonl(path, &results)?,
                None => write_jsonl_to(&mut std::io::stdout().lock(), &results)?,
            }
        }
        Command::Translate {
            pair,
            corpus,
            candidates,
            output,
            concurrency,
            rerank,
        } => {
            let (src, tgt) = ctx.pair(&pair)?;
            let lexicon = ctx.lexicon(rerank.lexicon.as_deref())?;
            let mut reranker = Reranker::new(&src, &tgt, &lexicon, ctx.rerank_config(&rerank))?;
            if let Some(w) = ctx.weights(rerank.weights.as_deref(), &tgt)? {
                reranker = reranker.with_weights(w);
            }
            let corpus = load_corpus(&corpus)?;
            let source: Box<dyn CandidateSource> = match candidates {
                Some(path) => Box::new(FileSource::load(path)?),
                None => Box::new(HttpSource::from_env()?),
            };
            let options = TranslateOptions {
                source_lang: src.language_code().to_string(),
                target_lang: tgt.language_code().to_string(),
                concurrency: concurrency.or(ctx.file.concurrency).unwrap_or(8),
            };
            let out = run_translate(&corpus, source.as_ref(), &reranker, &options)?;
            write_jsonl(&output, &out.results)?;
            eprintln!("{}", out.summary.line());
            for f in &out.summary.failures {
                eprintln!("failed {}: {}", f.sentence_id, f.error);
            }
            if !out.summary.failures.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Evaluate {
            results,
            labels,
            labels_b,
            format,
            language,
        } => {
            let results: Vec<RerankResult> = read_jsonl(&results)?;
            let a = load_labels(&labels).with_context(|| format!("reading {}", labels.display()))?;
            let b = match &labels_b {
                Some(p) => Some(load_labels(p).with_context(|| format!("reading {}", p.display()))?),
                None => None,
            };
            let report = run_evaluate(&results, &a, b.as_deref())?;
            match format {
                ReportFormat::Json => print_json(&report)?,
                ReportFormat::Table => {
                    print!("{}", report.render_table(&language));
                    for w in &report.warnings {
                        println!("warning: {w}");
                    }
                }
            }
        }
        Command::ValidateProfile { files } => {
            let mut bad = false;
            for path in &files {
                let violations = match load_profile(path) {
                    Ok(p) => validate_profile(&p).into_iter().map(|v| v.to_string()).collect(),
                    Err(e) => vec![e.to_string()],
                };
                if violations.is_empty() {
                    println!("{}: ok", path.display());
                } else {
                    bad = true;
                    for v in violations {
                        println!("{}: {v}", path.display());
                    }
                }
            }
            if bad {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.seed.is_some() {
        log::debug!("--seed has no effect");
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
