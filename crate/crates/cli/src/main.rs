//! `artmap`: vectorize corpora, run simulated reviews, summarize results, and
//! export model explanations.

mod config;
mod pipeline;

use std::fs;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fuzzy_artmap::explain::{
    model_rectangles, rectangles_to_json, render_rules_json, render_rules_text, rules_for_label,
    FeatureSpace,
};
use fuzzy_artmap::stats::aggregate;
use fuzzy_artmap::tar::read_metrics_csv;
use fuzzy_artmap::vectorize::{ingest_newsgroups, Vocabulary};
use fuzzy_artmap::{Label, Model};

use config::{config_error, ConfigError, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "artmap", version, about = "Fuzzy ARTMAP review simulations")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vectorize a corpus and write the feature matrix.
    Vectorize(Overrides),
    /// Simulate a review for each topic.
    Run(Overrides),
    /// Median and significance tables from metrics CSVs.
    Report {
        #[arg(required = true)]
        metrics: Vec<PathBuf>,
        /// Directory for medians.csv, differences.csv and report.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a saved model as rules or hyper-rectangles.
    Explain {
        #[arg(long)]
        model: PathBuf,
        /// Vocabulary written by `vectorize` or `run`; needed for rules.
        #[arg(long)]
        vocabulary: Option<PathBuf>,
        /// Feature medians written by `vectorize` or `run`; used to prune antecedents.
        #[arg(long)]
        medians: Option<PathBuf>,
        #[arg(long, default_value = "relevant")]
        label: String,
        #[arg(long, default_value_t = 6)]
        max_antecedents: usize,
        /// Keep every antecedent.
        #[arg(long)]
        all_antecedents: bool,
        /// Export hyper-rectangles instead of rules.
        #[arg(long)]
        rectangles: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a one-file-per-message newsgroup tree to a JSON lines corpus.
    #[command(name = "ingest-20ng")]
    Ingest20ng { root: PathBuf, out: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Vectorize(o) => pipeline::vectorize_command(&ExperimentConfig::resolve(&o)?),
        Command::Run(o) => pipeline::run_command(&ExperimentConfig::resolve(&o)?),
        Command::Report { metrics, out } => report(&metrics, out),
        Command::Explain {
            model,
            vocabulary,
            medians,
            label,
            max_antecedents,
            all_antecedents,
            rectangles,
            format,
            out,
        } => {
            let model = Model::load(BufReader::new(
                fs::File::open(&model)
                    .with_context(|| format!("opening model {}", model.display()))?,
            ))
            .with_context(|| format!("reading model {}", model.display()))?;
            let text = if rectangles {
                let rects = model_rectangles(&model)?;
                match format {
                    Format::Json => rectangles_to_json(&rects)?,
                    Format::Text => rects
                        .iter()
                        .map(|r| {
                            format!("{} {} u={:?} v={:?}\n", r.category_index, r.label, r.u, r.v)
                        })
                        .collect(),
                }
            } else {
                let Some(vocabulary) = vocabulary else {
                    return Err(config_error(
                        "rules need --vocabulary (or use --rectangles)",
                    ));
                };
                let vocab: Vocabulary = serde_json::from_str(
                    &fs::read_to_string(&vocabulary)
                        .with_context(|| format!("reading {}", vocabulary.display()))?,
                )?;
                let limit = (!all_antecedents && max_antecedents > 0).then_some(max_antecedents);
                let medians: Vec<f64> = match (&medians, limit) {
                    (Some(p), Some(_)) => serde_json::from_str(
                        &fs::read_to_string(p)
                            .with_context(|| format!("reading {}", p.display()))?,
                    )?,
                    (None, Some(_)) => {
                        return Err(config_error(
                            "pruning needs --medians (or pass --all-antecedents)",
                        ))
                    }
                    _ => Vec::new(),
                };
                let space = FeatureSpace::Terms(vocab.terms().to_vec());
                let rules =
                    rules_for_label(&model, &Label::new(label.as_str()), &space, &medians, limit)?;
                if rules.is_empty() {
                    anyhow::bail!("model has no categories labelled {label}");
                }
                match format {
                    Format::Text => render_rules_text(&rules)?,
                    Format::Json => render_rules_json(&rules)?,
                }
            };
            match out {
                Some(p) => {
                    fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Ingest20ng { root, out } => {
            let corpus =
                ingest_newsgroups(&root).with_context(|| format!("reading {}", root.display()))?;
            let mut w = std::io::BufWriter::new(fs::File::create(&out)?);
            corpus.write_jsonl(&mut w)?;
            println!(
                "{} documents, {} topics",
                corpus.len(),
                corpus.topics().len()
            );
            Ok(())
        }
    }
}

fn report(paths: &[PathBuf], out: Option<PathBuf>) -> Result<()> {
    let mut records = Vec::new();
    for p in paths {
        let f = fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
        records.extend(read_metrics_csv(f).with_context(|| format!("reading {}", p.display()))?);
    }
    let agg = aggregate(&records)?;
    let text = agg.render_text();
    print!("{text}");
    if let Some(dir) = out {
        fs::create_dir_all(&dir)?;
        agg.write_medians_csv(fs::File::create(dir.join("medians.csv"))?)?;
        if !agg.differences.is_empty() {
            agg.write_differences_csv(fs::File::create(dir.join("differences.csv"))?)?;
        }
        fs::write(dir.join("report.txt"), text)?;
    }
    Ok(())
}
