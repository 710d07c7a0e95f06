//! `chart2text`: describe chart images, generate a synthetic corpus and
//! score the pipeline against it.
//!
//! Exit codes: 0 success, 1 any other failure, 2 unreadable or undecodable
//! input, 3 chart type could not be determined (a diagnostic JSON document
//! is still printed), 4 manifest lists no charts, 64 bad command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chart2text::chartgen::gen_corpus;
use chart2text::classify::extract_features;
use chart2text::eval::evaluate_corpus;
use chart2text::io::read_png;
use chart2text::ocr::EngineKind;
use chart2text::pipeline::{describe, PipelineConfig, Stage, CONFIG_ENV, SCHEMA_VERSION};
use chart2text::{ChartType, Error};
use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "chart2text", version, about = "Turn chart images into data tables and alt-text")]
struct Cli {
    /// Config file, flat `key = value` lines or JSON. Defaults to
    /// $CHART2TEXT_CONFIG when set.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Corpus seed (overrides `seed` from the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// OCR engine: builtin or external.
    #[arg(long, global = true)]
    ocr: Option<EngineKind>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Describe one chart image as JSON.
    Describe {
        png: PathBuf,
        /// Stop after a stage: classify, detect, ocr or full.
        #[arg(long, default_value = "full")]
        stage: Stage,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the chart type only.
    Classify { png: PathBuf },
    /// Render a synthetic corpus with ground truth and a manifest.
    Gen {
        /// A chart type (pie, hbar, vbar, stacked_hbar, stacked_vbar) or `all`.
        #[arg(default_value = "all")]
        chart_type: String,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value = "corpus")]
        out: PathBuf,
    },
    /// Score the pipeline on a corpus; writes report.json and tables.txt.
    Eval {
        manifest: PathBuf,
        /// Score the ground truth itself instead of running the pipeline.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value = "eval")]
        out: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) | Error::Decode(_) => 2,
            Error::ClassificationFailure(_) => 3,
            Error::EmptyManifest(_) => 4,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, Failure> {
    let path = cli.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut cfg = match &path {
        Some(p) => PipelineConfig::load(p).map_err(|e| Failure {
            code: 1,
            message: format!("config {}: {e}", p.display()),
        })?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(e) = &cli.ocr {
        cfg.ocr.engine = e.clone();
    }
    Ok(cfg)
}

fn emit(json: &serde_json::Value, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(json).map_err(Error::from)?;
    match out {
        Some(p) => fs::write(p, text + "\n").map_err(|e| Error::from(e).into()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Printed in place of a description when no chart type fits.
fn classification_diagnostic(png: &Path, cfg: &PipelineConfig, err: &Error) -> serde_json::Value {
    let features = read_png(png)
        .and_then(|img| extract_features(&img, &cfg.extract))
        .ok();
    json!({
        "schema_version": SCHEMA_VERSION,
        "error": "classification_failure",
        "message": err.to_string(),
        "features": features,
    })
}

fn cmd_describe(png: &Path, cfg: &PipelineConfig, stage: Stage, out: Option<&Path>) -> Result<(), Failure> {
    let img = read_png(png)?;
    match describe(&img, cfg, stage) {
        Ok(d) => emit(&serde_json::to_value(&d).map_err(Error::from)?, out),
        Err(e @ Error::ClassificationFailure(_)) => {
            emit(&classification_diagnostic(png, cfg, &e), out)?;
            Err(e.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Failure { code: 1, message: e.to_string() })?;
            Ok(pool.install(job))
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    if std::env::var_os("RUST_LOG").is_none() {
        env_logger::Builder::new().parse_filters(&cfg.log_level).init();
    } else {
        env_logger::init();
    }
    match &cli.command {
        Command::Describe { png, stage, out } => cmd_describe(png, &cfg, *stage, out.as_deref()),
        Command::Classify { png } => cmd_describe(png, &cfg, Stage::Classify, None),
        Command::Gen { chart_type, count, out } => {
            let types: Vec<ChartType> = if chart_type == "all" {
                ChartType::ALL.to_vec()
            } else {
                vec![chart_type.parse()?]
            };
            let manifest = with_threads(cfg.threads, || gen_corpus(*count, cfg.seed, out, &types))??;
            println!("{}", manifest.display());
            Ok(())
        }
        Command::Eval { manifest, oracle, out } => {
            let report = evaluate_corpus(manifest, &cfg, *oracle)?;
            report.write(out)?;
            print!("{}", report.tables());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("chart2text: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
