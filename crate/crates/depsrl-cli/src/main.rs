//! Batch command-line surface over the depsrl library.
//!
//! Data artifacts go to files (or stdout for reports); progress and
//! warnings go to stderr, so pipelines stay clean. Every command is
//! deterministic for a fixed `--seed`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use depsrl::analyze::{oracle_roundtrip, pattern_stats, PatternBucket, ALL_BUCKETS};
use depsrl::convert::{decode_joint_with_stats, encode_sentence, ConversionOutcome};
use depsrl::core::AnnotatedSentence;
use depsrl::eval::{
    attachment_counts, per_label_report, per_pattern_report, srl_prf, AttachmentCounts, PrfScore,
};
use depsrl::io;
use depsrl::model::{
    grad_check, load_checkpoint, save_checkpoint, train, AblationOptions, DbaConfig,
    EncoderConfig, JointParser, TrainConfig,
};

#[derive(Parser)]
#[command(
    name = "depsrl",
    about = "Semantic role labeling as dependency parsing: conversion, analysis, training and evaluation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Kv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Language {
    /// English span heuristics.
    En,
    /// Chinese; currently shares the English (R)-span rule table.
    Zh,
}

#[derive(Args)]
struct ReportArgs {
    /// Report style: human-readable text or machine-readable key=value
    /// lines.
    #[arg(long, value_enum, default_value = "text")]
    report_format: ReportFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a FULL file (tree + SRL frames) into joint labels.
    Encode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Span-heuristic table to use.
        #[arg(long, value_enum, default_value = "en")]
        lang: Language,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Recover a FULL file from joint labels.
    Decode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "en")]
        lang: Language,
    },
    /// Structural pattern distribution of the gold relations.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Encode + decode the corpus against itself and score it.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Train the joint parser.
    Train {
        /// Training corpus in FULL format.
        #[arg(long)]
        input: PathBuf,
        /// Development corpus in FULL format (drives the LR schedule).
        #[arg(long)]
        dev: PathBuf,
        /// Checkpoint output path.
        #[arg(long)]
        model: PathBuf,
        /// Configuration: a TOML file or one of the presets
        /// `desk`, `paper`, `tiny`.
        #[arg(long, default_value = "desk")]
        config: String,
        /// Overrides both the initialization and shuffling seeds.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        single_root: bool,
    },
    /// Parse a FULL file with a trained model and write the predictions.
    Parse {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        single_root: bool,
        /// Replace heads and syntactic labels with gold.
        #[arg(long)]
        gold_syntax: bool,
        /// Replace the (D) slots with gold.
        #[arg(long, conflicts_with = "gold_rc")]
        gold_d: bool,
        /// Replace the (R) and (C) slots with gold.
        #[arg(long)]
        gold_rc: bool,
    },
    /// Score predicted frames (and trees) against gold.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Add the per-label breakdown.
        #[arg(long)]
        per_label: bool,
        /// Add the per-pattern breakdown.
        #[arg(long)]
        per_pattern: bool,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Verify analytic gradients against central finite differences.
    Gradcheck {
        /// Configuration: a TOML file or one of the presets.
        #[arg(long, default_value = "tiny")]
        config: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// On-disk configuration: any subset of the three sections.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    encoder: EncoderConfig,
    dba: DbaConfig,
    train: TrainConfig,
}

fn load_config(spec: &str) -> Result<FileConfig> {
    match spec {
        "desk" => Ok(FileConfig {
            encoder: EncoderConfig::desk_scale(),
            dba: DbaConfig::desk_scale(),
            train: TrainConfig::desk_scale(),
        }),
        "paper" => Ok(FileConfig {
            encoder: EncoderConfig::paper_scale(),
            dba: DbaConfig::paper_scale(),
            train: TrainConfig::paper_scale(),
        }),
        "tiny" => Ok(FileConfig {
            encoder: EncoderConfig::tiny(),
            dba: DbaConfig::tiny(),
            train: TrainConfig::desk_scale(),
        }),
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config file {path}"))?;
            toml::from_str(&text).with_context(|| format!("cannot parse config file {path}"))
        }
    }
}

fn progress(msg: impl AsRef<str>) {
    eprintln!("{}", msg.as_ref());
}

fn emit_prf(out: &mut impl Write, fmt: ReportFormat, prefix: &str, score: &PrfScore) -> Result<()> {
    match fmt {
        ReportFormat::Text => writeln!(
            out,
            "{prefix:<12} P {:6.2}  R {:6.2}  F {:6.2}  (matched {} / predicted {} / gold {})",
            score.precision, score.recall, score.f1, score.matched, score.predicted, score.gold
        )?,
        ReportFormat::Kv => {
            let key = if prefix.is_empty() { "overall" } else { prefix };
            writeln!(out, "{key}.precision={:.4}", score.precision)?;
            writeln!(out, "{key}.recall={:.4}", score.recall)?;
            writeln!(out, "{key}.f1={:.4}", score.f1)?;
            writeln!(out, "{key}.matched={}", score.matched)?;
            writeln!(out, "{key}.predicted={}", score.predicted)?;
            writeln!(out, "{key}.gold={}", score.gold)?;
        }
    }
    Ok(())
}

fn bucket_key(bucket: PatternBucket) -> &'static str {
    match bucket {
        PatternBucket::Direct => "d",
        PatternBucket::Common => "c",
        PatternBucket::Reverse => "r",
        PatternBucket::TwoHop => "r_two_hop",
        PatternBucket::Other => "other",
    }
}

fn cmd_encode(input: PathBuf, output: PathBuf, fmt: ReportFormat) -> Result<()> {
    let corpus = io::read_full(&input)?;
    let mut joint = Vec::with_capacity(corpus.len());
    let mut reports = Vec::with_capacity(corpus.len());
    for sentence in &corpus {
        let (js, report) = encode_sentence(sentence);
        joint.push(js);
        reports.push(report);
    }
    io::write_joint(&joint, &output)?;
    let merged = depsrl::convert::ConversionReport::merge(reports);
    let unconverted = merged.total() - merged.converted();
    let mut err = std::io::stderr().lock();
    match fmt {
        ReportFormat::Text => {
            writeln!(
                err,
                "encoded {} sentences, {} relations ({} converted, {} unconverted, {} recovered exactly)",
                corpus.len(),
                merged.total(),
                merged.converted(),
                unconverted,
                merged.recovered()
            )?;
            for (reason, count) in merged.by_reason() {
                if reason != ConversionOutcome::Ok {
                    writeln!(err, "  {reason}: {count}")?;
                }
            }
        }
        ReportFormat::Kv => {
            writeln!(err, "sentences={}", corpus.len())?;
            writeln!(err, "relations={}", merged.total())?;
            writeln!(err, "converted={}", merged.converted())?;
            writeln!(err, "unconverted={unconverted}")?;
            writeln!(err, "recovered={}", merged.recovered())?;
            for (reason, count) in merged.by_reason() {
                writeln!(err, "reason.{reason}={count}")?;
            }
        }
    }
    Ok(())
}

fn cmd_decode(input: PathBuf, output: PathBuf) -> Result<()> {
    let joint = io::read_joint(&input)?;
    let mut out = Vec::with_capacity(joint.len());
    let mut ignored = 0usize;
    for sentence in &joint {
        let (frames, stats) = decode_joint_with_stats(&sentence.tree, &sentence.predicates);
        ignored += stats.ignored_c_tuples;
        out.push(AnnotatedSentence::new(
            sentence.tokens.clone(),
            sentence.tree.syn_tree(),
            frames,
        ));
    }
    io::write_full(&out, &output)?;
    progress(format!(
        "decoded {} sentences ({} invalid (C) labels ignored)",
        out.len(),
        ignored
    ));
    Ok(())
}

fn cmd_analyze(input: PathBuf, fmt: ReportFormat) -> Result<()> {
    let corpus = io::read_full(&input)?;
    let dist = pattern_stats(&corpus);
    let mut out = std::io::stdout().lock();
    match fmt {
        ReportFormat::Text => {
            writeln!(out, "gold relations: {}", dist.total())?;
            for bucket in ALL_BUCKETS {
                writeln!(
                    out,
                    "{:<12} {:>7}  {:6.2}%",
                    bucket.to_string(),
                    dist.count(bucket),
                    100.0 * dist.fraction(bucket)
                )?;
            }
            for bucket in ALL_BUCKETS {
                let top = dist.top_relations(bucket, 5);
                if top.is_empty() {
                    continue;
                }
                let rendered: Vec<String> = top
                    .iter()
                    .map(|(rel, frac)| format!("{rel} {:.0}%", 100.0 * frac))
                    .collect();
                writeln!(out, "top {} relations: {}", bucket, rendered.join(", "))?;
            }
        }
        ReportFormat::Kv => {
            writeln!(out, "total={}", dist.total())?;
            for bucket in ALL_BUCKETS {
                let key = bucket_key(bucket);
                writeln!(out, "{key}.count={}", dist.count(bucket))?;
                writeln!(out, "{key}.fraction={:.6}", dist.fraction(bucket))?;
                for (rel, frac) in dist.top_relations(bucket, 5) {
                    writeln!(out, "{key}.top.{rel}={frac:.6}")?;
                }
            }
        }
    }
    Ok(())
}

fn cmd_oracle(input: PathBuf, fmt: ReportFormat) -> Result<()> {
    let corpus = io::read_full(&input)?;
    let outcome = oracle_roundtrip(&corpus);
    let mut out = std::io::stdout().lock();
    emit_prf(&mut out, fmt, "oracle", &outcome.score)?;
    match fmt {
        ReportFormat::Text => {
            for (reason, count) in outcome.report.by_reason() {
                writeln!(out, "  {reason}: {count}")?;
            }
        }
        ReportFormat::Kv => {
            for (reason, count) in outcome.report.by_reason() {
                writeln!(out, "reason.{reason}={count}")?;
            }
        }
    }
    Ok(())
}

fn cmd_train(
    input: PathBuf,
    dev: PathBuf,
    model: PathBuf,
    config: String,
    seed: Option<u64>,
    single_root: bool,
) -> Result<()> {
    let mut cfg = load_config(&config)?;
    if let Some(seed) = seed {
        cfg.encoder.seed = seed;
        cfg.train.shuffle_seed = seed;
    }
    cfg.train.single_root = single_root;
    let train_corpus = io::read_full(&input)?;
    let dev_corpus = io::read_full(&dev)?;
    let mut parser = JointParser::<f64>::from_corpus(&train_corpus, cfg.encoder, cfg.dba)?;
    progress(format!(
        "training on {} sentences (dev {}), config `{config}`",
        train_corpus.len(),
        dev_corpus.len()
    ));
    let metrics = train(&mut parser, &train_corpus, &dev_corpus, &cfg.train)?;
    for m in &metrics {
        progress(format!(
            "epoch {:4}  loss {:10.4}  dev F {:6.2}  lr {:.2e}",
            m.epoch, m.mean_loss, m.dev_f1, m.learning_rate
        ));
    }
    save_checkpoint(&mut parser, &model)?;
    let best = metrics.iter().map(|m| m.dev_f1).fold(f64::MIN, f64::max);
    progress(format!(
        "saved checkpoint to {} (best dev F {best:.2} over {} epochs)",
        model.display(),
        metrics.len()
    ));
    Ok(())
}

fn cmd_parse(
    model: PathBuf,
    input: PathBuf,
    output: PathBuf,
    single_root: bool,
    ablation: AblationOptions,
) -> Result<()> {
    let parser = load_checkpoint::<f64>(&model)?;
    let corpus = io::read_full(&input)?;
    let parsed: Vec<AnnotatedSentence> = corpus
        .iter()
        .map(|s| parser.predict_sentence(s, single_root, ablation))
        .collect();
    io::write_full(&parsed, &output)?;
    progress(format!("parsed {} sentences", parsed.len()));
    Ok(())
}

fn cmd_eval(
    gold: PathBuf,
    pred: PathBuf,
    per_label: bool,
    per_pattern: bool,
    fmt: ReportFormat,
) -> Result<()> {
    let gold_corpus = io::read_full(&gold)?;
    let pred_corpus = io::read_full(&pred)?;
    if gold_corpus.len() != pred_corpus.len() {
        bail!(
            "gold has {} sentences but predictions have {}",
            gold_corpus.len(),
            pred_corpus.len()
        );
    }
    let gold_frames: Vec<_> = gold_corpus.iter().map(|s| s.frames.clone()).collect();
    let pred_frames: Vec<_> = pred_corpus.iter().map(|s| s.frames.clone()).collect();
    let overall = srl_prf(&gold_frames, &pred_frames);
    let mut attach = AttachmentCounts::default();
    for (g, p) in gold_corpus.iter().zip(&pred_corpus) {
        attach.add(attachment_counts(&g.tree, &p.tree)?);
    }
    let mut out = std::io::stdout().lock();
    emit_prf(&mut out, fmt, "srl", &overall)?;
    match fmt {
        ReportFormat::Text => {
            writeln!(out, "UAS {:.2}  LAS {:.2}", attach.uas(), attach.las())?
        }
        ReportFormat::Kv => {
            writeln!(out, "uas={:.4}", attach.uas())?;
            writeln!(out, "las={:.4}", attach.las())?;
        }
    }
    if per_label {
        let table: BTreeMap<String, PrfScore> = per_label_report(&gold_frames, &pred_frames);
        for (label, score) in table {
            emit_prf(&mut out, fmt, &format!("label.{label}"), &score)?;
        }
    }
    if per_pattern {
        let table = per_pattern_report(&gold_corpus, &pred_corpus);
        for (pattern, score) in table {
            let key = match fmt {
                ReportFormat::Text => format!("{pattern}"),
                ReportFormat::Kv => format!("pattern.{pattern}"),
            };
            emit_prf(&mut out, fmt, &key, &score)?;
        }
    }
    Ok(())
}

fn cmd_gradcheck(config: String, seed: u64) -> Result<()> {
    let cfg = load_config(&config)?;
    // A small synthetic sentence exercises every scorer and slot type.
    let text = "\
# predicates = 2,4
1\tshe\tPRP\t2\tnsubj\tB-ARG0\tB-ARG0
2\ttried\tVBD\t0\troot\tV\t_
3\tto\tTO\t4\tmark\tB-ARG1\t_
4\tleave\tVB\t2\txcomp\tI-ARG1\tV
5\tearly\tRB\t4\tadvmod\tI-ARG1\tB-ARGM-TMP

";
    let corpus = io::full_from_str(text)?;
    let mut parser = JointParser::<f64>::from_corpus(&corpus, cfg.encoder, cfg.dba)?;
    let instance = parser.prepare_instance(&corpus[0]);
    let report = grad_check(&mut parser, &instance, 6, 1e-5, seed);
    let mut out = std::io::stdout().lock();
    for (group, err) in &report.groups {
        writeln!(out, "group.{group}={err:.3e}")?;
    }
    writeln!(out, "max_relative_error={:.3e}", report.max_relative_error)?;
    if report.max_relative_error >= 1e-4 {
        bail!(
            "gradient check failed: max relative error {:.3e} >= 1e-4",
            report.max_relative_error
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Encode {
            input,
            output,
            lang: _,
            report,
        } => cmd_encode(input, output, report.report_format),
        Command::Decode {
            input,
            output,
            lang: _,
        } => cmd_decode(input, output),
        Command::Analyze { input, report } => cmd_analyze(input, report.report_format),
        Command::Oracle { input, report } => cmd_oracle(input, report.report_format),
        Command::Train {
            input,
            dev,
            model,
            config,
            seed,
            single_root,
        } => cmd_train(input, dev, model, config, seed, single_root),
        Command::Parse {
            model,
            input,
            output,
            single_root,
            gold_syntax,
            gold_d,
            gold_rc,
        } => cmd_parse(
            model,
            input,
            output,
            single_root,
            AblationOptions {
                gold_syntax,
                gold_d,
                gold_rc,
            },
        ),
        Command::Eval {
            gold,
            pred,
            per_label,
            per_pattern,
            report,
        } => cmd_eval(gold, pred, per_label, per_pattern, report.report_format),
        Command::Gradcheck { config, seed } => cmd_gradcheck(config, seed),
    }
}
