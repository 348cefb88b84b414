//! Command-line surface: train, predict, score, rank, evaluate, ablate,
//! bench. Exit codes: 0 success, 1 usage error, 2 data/model error.

use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use zest::baselines::{BowModel, ConcatScorer, NGramClassifier};
use zest::codec::{CodecId, CodecParams};
use zest::datasets::{self, GeneratorSpec, LabeledDataset, SplitSpec};
use zest::error::ZestError;
use zest::eval::{self, BatchClassifier, EvaluationReport};
use zest::model::{TelescopeSchedule, ZestModel};
use zest::text_prep::PrepConfig;

#[derive(Parser)]
#[command(name = "zest", version, about = "Compression-based text affinity scoring")]
struct Cli {
    /// Worker threads for scoring (default: logical CPU count).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a Zest model and write it to a model file.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        prep: PrepArgs,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        codec: CodecArgs,
        /// Output model path.
        #[arg(long)]
        model: PathBuf,
    },
    /// Predict one label per input line.
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// Text file, one record per line; stdin when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Emit raw and adjusted per-class affinities per record.
    Score {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: Option<PathBuf>,
        /// JSON lines instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// Sort input records by descending affinity to a class.
    Rank {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        target_label: String,
    },
    /// Train on a split and report metrics (or evaluate a saved model).
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        prep: PrepArgs,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        codec: CodecArgs,
        #[command(flatten)]
        split: SplitArgs,
        /// Evaluate this saved model on the full dataset instead of
        /// training on a split.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Write a score-distribution histogram CSV here.
        #[arg(long)]
        histogram: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        bucket_width: f64,
        /// Histogram scores toward this label (default: each record's own).
        #[arg(long)]
        target_label: Option<String>,
    },
    /// Compare telescope depths and padding on identical splits.
    Ablate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        codec: CodecArgs,
        #[command(flatten)]
        split: SplitArgs,
        /// Dictionary counts to sweep.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 4])]
        dicts: Vec<usize>,
        #[arg(long, default_value_t = 16384)]
        base_size: usize,
        #[arg(long, default_value_t = 4.0)]
        growth: f64,
        #[arg(long, default_value_t = 10)]
        pad_length: usize,
        #[arg(long)]
        json: bool,
    },
    /// Compare methods (zest, concat codecs, ngram, nb) on one split.
    Bench {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        prep: PrepArgs,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        split: SplitArgs,
        /// Comma-separated methods: zest, nb, ngram, concat:<codec>.
        #[arg(
            long,
            value_delimiter = ',',
            default_values_t = vec![
                "zest".to_string(),
                "concat:zstd_plain".to_string(),
                "ngram".to_string(),
                "nb".to_string(),
            ]
        )]
        methods: Vec<String>,
        #[arg(long, default_value_t = 3)]
        level: i32,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Dataset path (CSV, JSONL, or directory-per-class root).
    #[arg(long, required_unless_present = "synth")]
    input: Option<PathBuf>,
    /// csv | jsonl | dir
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long, default_value = "text")]
    text_column: String,
    #[arg(long, default_value = "label")]
    label_column: String,
    /// Generate a synthetic corpus instead of reading a file:
    /// disjoint-script | shared-head | disjoint-vocab.
    #[arg(long, conflicts_with = "input")]
    synth: Option<String>,
    #[arg(long, default_value_t = 6)]
    classes: usize,
    #[arg(long, default_value_t = 1000)]
    size: usize,
    /// Seed for synthetic generation and splitting.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl DataArgs {
    fn load(&self) -> zest::Result<LabeledDataset> {
        if let Some(generator) = &self.synth {
            let spec = GeneratorSpec::parse(generator, self.classes)?;
            return datasets::synth_corpus(spec, self.size, self.seed);
        }
        let path = self.input.as_deref().expect("clap enforces input|synth");
        if !path.exists() {
            return Err(ZestError::Io(io::Error::new(
                io::ErrorKind::NotFound,
                format!("dataset not found: {}", path.display()),
            )));
        }
        match self.format.as_str() {
            "csv" => datasets::load_csv(path, &self.text_column, &self.label_column),
            "jsonl" => datasets::load_jsonl(path, &self.text_column, &self.label_column),
            "dir" => datasets::load_dir_per_class(path),
            other => Err(ZestError::Config(format!(
                "unknown dataset format {other:?} (expected csv, jsonl or dir)"
            ))),
        }
    }
}

#[derive(Args)]
struct PrepArgs {
    /// Keep punctuation and case.
    #[arg(long)]
    no_normalize: bool,
    /// Disable word padding.
    #[arg(long)]
    no_pad: bool,
    #[arg(long, default_value_t = 10)]
    pad_length: usize,
}

impl PrepArgs {
    fn config(&self) -> zest::Result<PrepConfig> {
        if self.pad_length == 0 {
            return Err(ZestError::Config("--pad-length must be >= 1".into()));
        }
        Ok(PrepConfig {
            normalize: !self.no_normalize,
            pad_words: !self.no_pad,
            pad_length: self.pad_length,
        })
    }
}

#[derive(Args)]
struct ScheduleArgs {
    /// Number of telescoping dictionaries per class.
    #[arg(long, default_value_t = 4)]
    dicts: usize,
    /// Smallest dictionary target size in bytes.
    #[arg(long, default_value_t = 16384)]
    base_size: usize,
    /// Size multiplier between consecutive dictionaries.
    #[arg(long, default_value_t = 4.0)]
    growth: f64,
}

impl ScheduleArgs {
    fn schedule(&self) -> TelescopeSchedule {
        TelescopeSchedule {
            count: self.dicts,
            base_size: self.base_size,
            growth: self.growth,
        }
    }
}

#[derive(Args)]
struct CodecArgs {
    #[arg(long, default_value = "zstd_dict")]
    codec: String,
    #[arg(long, default_value_t = 3)]
    level: i32,
    /// Keep checksum/content-size/dictionary-ID frame fields.
    #[arg(long)]
    keep_headers: bool,
}

impl CodecArgs {
    fn params(&self) -> zest::Result<CodecParams> {
        Ok(CodecParams {
            codec: CodecId::parse(&self.codec)?,
            level: self.level,
            minimize_headers: !self.keep_headers,
        })
    }
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    /// Split seed; defaults to the dataset seed.
    #[arg(long)]
    split_seed: Option<u64>,
}

impl SplitArgs {
    fn spec(&self, data_seed: u64) -> SplitSpec {
        SplitSpec::new(self.test_fraction, self.split_seed.unwrap_or(data_seed))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    configure_threads(cli.threads);
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                ZestError::Config(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(_threads: Option<usize>) {}

fn run(command: Command) -> zest::Result<()> {
    match command {
        Command::Train {
            data,
            prep,
            schedule,
            codec,
            model,
        } => cmd_train(&data, &prep, &schedule, &codec, &model),
        Command::Predict { model, input } => cmd_predict(&model, input.as_deref()),
        Command::Score { model, input, json } => cmd_score(&model, input.as_deref(), json),
        Command::Rank {
            model,
            input,
            target_label,
        } => cmd_rank(&model, input.as_deref(), &target_label),
        Command::Evaluate {
            data,
            prep,
            schedule,
            codec,
            split,
            model,
            json,
            histogram,
            bucket_width,
            target_label,
        } => cmd_evaluate(
            &data,
            &prep,
            &schedule,
            &codec,
            &split,
            model.as_deref(),
            json,
            histogram.as_deref(),
            bucket_width,
            target_label.as_deref(),
        ),
        Command::Ablate {
            data,
            codec,
            split,
            dicts,
            base_size,
            growth,
            pad_length,
            json,
        } => cmd_ablate(&data, &codec, &split, &dicts, base_size, growth, pad_length, json),
        Command::Bench {
            data,
            prep,
            schedule,
            split,
            methods,
            level,
            json,
        } => cmd_bench(&data, &prep, &schedule, &split, &methods, level, json),
    }
}

fn cmd_train(
    data: &DataArgs,
    prep: &PrepArgs,
    schedule: &ScheduleArgs,
    codec: &CodecArgs,
    model_path: &Path,
) -> zest::Result<()> {
    let dataset = data.load()?;
    let schedule = schedule.schedule();
    let started = Instant::now();
    let model = ZestModel::train(
        &dataset.by_class(),
        prep.config()?,
        schedule.clone(),
        codec.params()?,
    )?;
    let train_seconds = started.elapsed().as_secs_f64();
    model.save(model_path)?;
    let bytes = fs::metadata(model_path)?.len();
    println!(
        "trained {} classes x {} dictionaries (sizes {:?}) on {} records in {:.2}s; model {} bytes -> {}",
        model.classes.len(),
        schedule.count,
        schedule.sizes(),
        dataset.len(),
        train_seconds,
        bytes,
        model_path.display()
    );
    Ok(())
}

/// Reads input lines lazily in chunks so corpora larger than memory work.
fn for_each_chunk(
    input: Option<&Path>,
    chunk_size: usize,
    mut handle: impl FnMut(&[String]) -> zest::Result<()>,
) -> zest::Result<()> {
    let reader: Box<dyn BufRead> = match input {
        Some(path) => Box::new(BufReader::new(fs::File::open(path).map_err(|e| {
            ZestError::Io(io::Error::new(
                e.kind(),
                format!("{}: {e}", path.display()),
            ))
        })?)),
        None => Box::new(BufReader::new(io::stdin())),
    };
    let mut chunk = Vec::with_capacity(chunk_size);
    for line in reader.lines() {
        chunk.push(line?);
        if chunk.len() == chunk_size {
            handle(&chunk)?;
            chunk.clear();
        }
    }
    if !chunk.is_empty() {
        handle(&chunk)?;
    }
    Ok(())
}

fn load_model(path: &Path) -> zest::Result<ZestModel> {
    if !path.exists() {
        return Err(ZestError::Io(io::Error::new(
            io::ErrorKind::NotFound,
            format!("model file not found: {}", path.display()),
        )));
    }
    ZestModel::load(path)
}

fn cmd_predict(model_path: &Path, input: Option<&Path>) -> zest::Result<()> {
    let model = load_model(model_path)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for_each_chunk(input, 256, |chunk| {
        for label in model.classify_batch(chunk)? {
            writeln!(out, "{label}")?;
        }
        Ok(())
    })
}

fn cmd_score(model_path: &Path, input: Option<&Path>, json: bool) -> zest::Result<()> {
    let model = load_model(model_path)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if !json {
        let header: Vec<String> = model
            .labels()
            .iter()
            .map(|l| format!("raw_{l}"))
            .chain(model.labels().iter().map(|l| format!("adjusted_{l}")))
            .collect();
        writeln!(out, "index,{},argmax", header.join(","))?;
    }
    let mut index = 0usize;
    for_each_chunk(input, 256, |chunk| {
        for vector in model.score_batch(chunk)? {
            if json {
                writeln!(out, "{}", serde_json::to_string(&vector).expect("serializes"))?;
            } else {
                let raw: Vec<String> = vector.raw.iter().map(|v| format!("{v:.6}")).collect();
                let adjusted: Vec<String> =
                    vector.adjusted.iter().map(|v| format!("{v:.6}")).collect();
                writeln!(
                    out,
                    "{index},{},{},{}",
                    raw.join(","),
                    adjusted.join(","),
                    vector.argmax
                )?;
            }
            index += 1;
        }
        Ok(())
    })
}

fn cmd_rank(model_path: &Path, input: Option<&Path>, target_label: &str) -> zest::Result<()> {
    let model = load_model(model_path)?;
    let mut texts = Vec::new();
    for_each_chunk(input, 4096, |chunk| {
        texts.extend_from_slice(chunk);
        Ok(())
    })?;
    let ranked = model.rank(&texts, target_label)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "rank,index,affinity,text")?;
    for (rank, (index, affinity)) in ranked.iter().enumerate() {
        writeln!(out, "{},{},{:.6},{}", rank + 1, index, affinity, texts[*index])?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    data: &DataArgs,
    prep: &PrepArgs,
    schedule: &ScheduleArgs,
    codec: &CodecArgs,
    split_args: &SplitArgs,
    model_path: Option<&Path>,
    json: bool,
    histogram: Option<&Path>,
    bucket_width: f64,
    target_label: Option<&str>,
) -> zest::Result<()> {
    let dataset = data.load()?;
    let (model, test, train_seconds) = match model_path {
        Some(path) => (load_model(path)?, dataset, 0.0),
        None => {
            let (train, test) = datasets::split(&dataset, &split_args.spec(data.seed))?;
            let started = Instant::now();
            let model = ZestModel::train(
                &train.by_class(),
                prep.config()?,
                schedule.schedule(),
                codec.params()?,
            )?;
            (model, test, started.elapsed().as_secs_f64())
        }
    };
    let mut report = eval::evaluate(&model, &test)?;
    report.train_seconds = train_seconds;
    report.model_bytes = model.to_bytes()?.len() as u64;
    emit_report(&report, json)?;
    if let Some(path) = histogram {
        let histogram = eval::score_histogram(&model, &test, bucket_width, target_label)?;
        fs::write(path, histogram.to_csv())?;
        eprintln!("histogram written to {}", path.display());
    }
    Ok(())
}

fn emit_report(report: &EvaluationReport, json: bool) -> zest::Result<()> {
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_table());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_ablate(
    data: &DataArgs,
    codec: &CodecArgs,
    split_args: &SplitArgs,
    dicts: &[usize],
    base_size: usize,
    growth: f64,
    pad_length: usize,
    json: bool,
) -> zest::Result<()> {
    let dataset = data.load()?;
    let mut configurations = Vec::new();
    for &count in dicts {
        for padding in [true, false] {
            configurations.push((
                TelescopeSchedule {
                    count,
                    base_size,
                    growth,
                },
                PrepConfig {
                    normalize: true,
                    pad_words: padding,
                    pad_length,
                },
            ));
        }
    }
    let rows = eval::ablation_run(
        &dataset,
        &configurations,
        &split_args.spec(data.seed),
        &codec.params()?,
    )?;
    if json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("serializes"));
    } else {
        print!("{}", eval::ablation_table(&rows));
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct BenchRow {
    method: String,
    accuracy: f64,
    fom: f64,
    train_seconds: f64,
    score_seconds: f64,
    total_seconds: f64,
    model_bytes: u64,
}

fn cmd_bench(
    data: &DataArgs,
    prep: &PrepArgs,
    schedule: &ScheduleArgs,
    split_args: &SplitArgs,
    methods: &[String],
    level: i32,
    json: bool,
) -> zest::Result<()> {
    let dataset = data.load()?;
    let (train, test) = datasets::split(&dataset, &split_args.spec(data.seed))?;
    let by_class = train.by_class();
    let prep = prep.config()?;

    let mut rows = Vec::new();
    for method in methods {
        let started = Instant::now();
        let (classifier, model_bytes): (Box<dyn BatchClassifier>, u64) = match method.as_str() {
            "zest" => {
                let params = CodecParams {
                    level,
                    ..CodecParams::default()
                };
                let model =
                    ZestModel::train(&by_class, prep.clone(), schedule.schedule(), params)?;
                let bytes = model.to_bytes()?.len() as u64;
                (Box::new(model), bytes)
            }
            "nb" => {
                let model = BowModel::train(&by_class, 1.0, prep.clone())?;
                let bytes = model.to_bytes()?.len() as u64;
                (Box::new(model), bytes)
            }
            "ngram" => {
                let model = NGramClassifier::train(&by_class, 3, prep.clone())?;
                let bytes = model.to_bytes()?.len() as u64;
                (Box::new(model), bytes)
            }
            other => match other.strip_prefix("concat:") {
                Some(codec_name) => {
                    let params = CodecParams {
                        codec: CodecId::parse(codec_name)?,
                        level,
                        minimize_headers: true,
                    };
                    let scorer = ConcatScorer::build(&by_class, prep.clone(), params)?;
                    let bytes = scorer.to_bytes()?.len() as u64;
                    (Box::new(scorer), bytes)
                }
                None => {
                    return Err(ZestError::Config(format!(
                        "unknown bench method {other:?} (expected zest, nb, ngram or concat:<codec>)"
                    )))
                }
            },
        };
        let train_seconds = started.elapsed().as_secs_f64();
        let mut report = eval::evaluate(classifier.as_ref(), &test)?;
        report.train_seconds = train_seconds;
        report.model_bytes = model_bytes;
        rows.push(BenchRow {
            method: method.clone(),
            accuracy: report.accuracy,
            fom: report.fom,
            train_seconds,
            score_seconds: report.score_seconds,
            total_seconds: train_seconds + report.score_seconds,
            model_bytes,
        });
    }

    if json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("serializes"));
    } else {
        println!(
            "{:<20} {:>9} {:>8} {:>11} {:>10} {:>10} {:>11}",
            "method", "accuracy", "fom", "train (s)", "score (s)", "total (s)", "model (B)"
        );
        for row in &rows {
            println!(
                "{:<20} {:>9.4} {:>8.4} {:>11.2} {:>10.2} {:>10.2} {:>11}",
                row.method,
                row.accuracy,
                row.fom,
                row.train_seconds,
                row.score_seconds,
                row.total_seconds,
                row.model_bytes
            );
        }
    }
    Ok(())
}
