//! The `wrongsmith` command line.
//!
//! Exit codes: 0 on success, 2 for usage, I/O, parse and configuration
//! errors, 3 when an internal invariant breaks (e.g. training diverged).

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::corpus::{
    read_labeled, read_parallel_tsv, read_sentences, write_labeled, write_parallel_tsv, write_scores_tsv,
};
use crate::dataset::{build_labeled, corrupt_corpus, BuildConfig, DEFAULT_MAX_ERRORS};
use crate::decode::{DecodeConfig, Strategy, DEFAULT_BEAM_WIDTH, DEFAULT_TAU};
use crate::detector::{load_detector, save_detector, train_detector, Alternation, DetectorTrainConfig};
use crate::error::{Error, Result};
use crate::eval::prf;
use crate::seq2seq::{load_corruptor, save_corruptor, train_corruptor, TrainConfig};
use crate::turing::{router, serve, ServerOptions, TuringSession};

#[derive(Debug, Parser)]
#[command(
    name = "wrongsmith",
    version,
    about = "Learned grammatical error injection for error-detection data"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a corruption model or generate corruptions with it.
    #[command(subcommand)]
    Corruptor(CorruptorCommand),
    /// Turn corruptions into token-labelled training data.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Train or evaluate a token-level error detector.
    #[command(subcommand)]
    Detector(DetectorCommand),
    /// Run a real-vs-synthetic judgment session.
    #[command(subcommand)]
    Turing(TuringCommand),
}

#[derive(Debug, Subcommand)]
enum CorruptorCommand {
    /// Train on a `clean<TAB>erroneous` parallel file.
    Train(CorruptorTrain),
    /// Corrupt one clean sentence per line.
    Generate(CorruptorGenerate),
}

#[derive(Debug, Subcommand)]
enum DatasetCommand {
    /// Label a parallel file of corruptions, dropping duplicates and noisy rows.
    Build(DatasetBuild),
}

#[derive(Debug, Subcommand)]
enum DetectorCommand {
    Train(DetectorTrain),
    /// Score a model on a labelled test file.
    Eval(DetectorEval),
}

#[derive(Debug, Subcommand)]
enum TuringCommand {
    Serve(TuringServe),
}

#[derive(Debug, Args)]
struct SeedArg {
    /// Random seed.
    #[arg(long, env = "WRONGSMITH_SEED", default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CorruptorTrain {
    #[arg(long)]
    parallel: PathBuf,
    #[arg(long)]
    dev: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = TrainConfig::default().cell_size)]
    cell_size: usize,
    #[arg(long, default_value_t = TrainConfig::default().emb_size)]
    emb_size: usize,
    #[arg(long, default_value_t = TrainConfig::default().learning_rate)]
    learning_rate: f64,
    #[arg(long, default_value_t = TrainConfig::default().batch_size)]
    batch_size: usize,
    #[arg(long, default_value_t = TrainConfig::default().patience)]
    patience: usize,
    #[arg(long, default_value_t = TrainConfig::default().max_epochs)]
    max_epochs: usize,
    #[arg(long, default_value_t = TrainConfig::default().min_count)]
    min_count: usize,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Debug, Args)]
struct CorruptorGenerate {
    #[arg(long)]
    model: PathBuf,
    /// Clean text, one sentence per line.
    #[arg(long)]
    input: PathBuf,
    /// Decoding strategy: am, ts or bs.
    #[arg(long)]
    strategy: Strategy,
    /// Sampling temperature for `ts` [default: 0.05].
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_BEAM_WIDTH)]
    beam: usize,
    /// Corruptions per source sentence (`am` always yields one).
    #[arg(long, default_value_t = 10)]
    samples: usize,
    /// Output length cap in tokens, end marker included [default: 2|source|+5].
    #[arg(long)]
    max_len: Option<usize>,
    /// Parallel output; scores go to `<out stem>.scores.tsv` next to it.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Debug, Args)]
struct DatasetBuild {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_ERRORS)]
    max_errors: usize,
    #[arg(long)]
    no_dedup: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DetectorTrain {
    #[arg(long)]
    real: PathBuf,
    #[arg(long)]
    synthetic: Option<PathBuf>,
    /// Alternate real and synthetic epochs instead of mixing them.
    #[arg(long, requires = "synthetic")]
    alternate: bool,
    #[arg(long)]
    dev: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Per-epoch history as JSON lines.
    #[arg(long)]
    history: Option<PathBuf>,
    #[arg(long, default_value_t = DetectorTrainConfig::default().cell_size)]
    cell_size: usize,
    #[arg(long, default_value_t = DetectorTrainConfig::default().emb_size)]
    emb_size: usize,
    #[arg(long, default_value_t = DetectorTrainConfig::default().learning_rate)]
    learning_rate: f64,
    #[arg(long, default_value_t = DetectorTrainConfig::default().batch_size)]
    batch_size: usize,
    #[arg(long, default_value_t = DetectorTrainConfig::default().patience)]
    patience: usize,
    #[arg(long, default_value_t = DetectorTrainConfig::default().max_epochs)]
    max_epochs: usize,
    #[arg(long, default_value_t = DetectorTrainConfig::default().threshold)]
    threshold: f64,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Debug, Args)]
struct DetectorEval {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = DetectorTrainConfig::default().threshold)]
    threshold: f64,
    /// Print metrics JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct TuringServe {
    /// Real erroneous sentences, one per line.
    #[arg(long)]
    real: PathBuf,
    /// Synthetic sentences, one per line.
    #[arg(long)]
    synthetic: PathBuf,
    #[arg(long, default_value_t = 50)]
    n: usize,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Metrics JSON written when the session is closed.
    #[arg(long, default_value = "turing_results.json")]
    results: PathBuf,
    /// Directory with the annotation UI build.
    #[arg(long)]
    ui: Option<PathBuf>,
    #[command(flatten)]
    seed: SeedArg,
}

fn scores_path(out: &Path) -> PathBuf {
    out.with_extension("scores.tsv")
}

fn corruptor_train(a: CorruptorTrain) -> Result<()> {
    let cfg = TrainConfig {
        cell_size: a.cell_size,
        emb_size: a.emb_size,
        learning_rate: a.learning_rate,
        batch_size: a.batch_size,
        patience: a.patience,
        max_epochs: a.max_epochs,
        seed: a.seed.seed,
        min_count: a.min_count,
        ..TrainConfig::default()
    };
    cfg.validate()?;
    let train = read_parallel_tsv(&a.parallel)?;
    let dev = read_parallel_tsv(&a.dev)?;
    let (model, history) = train_corruptor(&train, &dev, &cfg)?;
    for r in &history {
        println!("epoch {}\ttrain {:.4}\tdev {:.4}", r.epoch, r.train_loss, r.dev_loss);
    }
    save_corruptor(&model, &a.out)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn corruptor_generate(a: CorruptorGenerate) -> Result<()> {
    if a.strategy == Strategy::Argmax && a.tau.is_some() {
        log::warn!("--tau has no effect with --strategy am");
    }
    let cfg = BuildConfig {
        decode: DecodeConfig {
            strategy: a.strategy,
            tau: a.tau.unwrap_or(DEFAULT_TAU),
            beam_width: a.beam,
            max_len: a.max_len,
            seed: a.seed.seed,
        },
        samples_per_source: a.samples,
        ..BuildConfig::default()
    };
    cfg.validate()?;
    let model = load_corruptor(&a.model)?;
    let clean = read_sentences(&a.input)?;
    let pairs = corrupt_corpus(&model, &clean, &cfg)?;
    write_parallel_tsv(&pairs, &a.out)?;
    let scores = scores_path(&a.out);
    write_scores_tsv(&pairs, &scores)?;
    println!(
        "wrote {} corruptions to {} (scores in {})",
        pairs.len(),
        a.out.display(),
        scores.display()
    );
    Ok(())
}

fn dataset_build(a: DatasetBuild) -> Result<()> {
    let cfg = BuildConfig {
        max_errors: a.max_errors,
        dedup: !a.no_dedup,
        ..BuildConfig::default()
    };
    let pairs = read_parallel_tsv(&a.pairs)?;
    let data = build_labeled(&pairs, &cfg)?;
    write_labeled(&data, &a.out)?;
    println!(
        "kept {} of {} pairs, wrote {}",
        data.len(),
        pairs.len(),
        a.out.display()
    );
    Ok(())
}

fn detector_train(a: DetectorTrain) -> Result<()> {
    let cfg = DetectorTrainConfig {
        cell_size: a.cell_size,
        emb_size: a.emb_size,
        learning_rate: a.learning_rate,
        batch_size: a.batch_size,
        patience: a.patience,
        max_epochs: a.max_epochs,
        threshold: a.threshold,
        seed: a.seed.seed,
        alternation: if a.alternate {
            Alternation::Epoch
        } else {
            Alternation::None
        },
        ..DetectorTrainConfig::default()
    };
    cfg.validate()?;
    let real = read_labeled(&a.real)?;
    let synthetic = match &a.synthetic {
        Some(p) => read_labeled(p)?,
        None => Vec::new(),
    };
    let dev = read_labeled(&a.dev)?;
    let trained = train_detector(&real, &synthetic, &dev, &cfg)?;
    for r in &trained.history {
        let source = serde_json::to_value(r.source).expect("source serializes");
        println!(
            "epoch {}\t{}\tdev F0.5 {:.4}",
            r.epoch,
            source.as_str().unwrap_or(""),
            r.dev_f05
        );
    }
    println!("best epoch {}", trained.best_epoch);
    if let Some(path) = &a.history {
        std::fs::write(path, trained.history_jsonl())?;
    }
    save_detector(&trained.detector, &a.out)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn detector_eval(a: DetectorEval) -> Result<()> {
    let model = load_detector(&a.model)?;
    let test = read_labeled(&a.test)?;
    let pred = model.predict_all(&test, a.threshold)?;
    let m = prf(&pred, &test, a.beta)?;
    if a.json {
        println!("{}", m.to_json());
    } else {
        println!("{m}");
    }
    Ok(())
}

fn turing_serve(a: TuringServe) -> Result<()> {
    let real = read_sentences(&a.real)?;
    let synthetic = read_sentences(&a.synthetic)?;
    let session = TuringSession::new(&real, &synthetic, a.n, a.seed.seed)?;
    let app = router(
        session,
        ServerOptions {
            results_path: Some(a.results.clone()),
            ui_dir: a.ui,
        },
    );
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(SocketAddr::new(a.host, a.port)).await?;
        println!("listening on http://{}", listener.local_addr()?);
        serve(listener, app).await
    })
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Corruptor(CorruptorCommand::Train(a)) => corruptor_train(a),
        Command::Corruptor(CorruptorCommand::Generate(a)) => corruptor_generate(a),
        Command::Dataset(DatasetCommand::Build(a)) => dataset_build(a),
        Command::Detector(DetectorCommand::Train(a)) => detector_train(a),
        Command::Detector(DetectorCommand::Eval(a)) => detector_eval(a),
        Command::Turing(TuringCommand::Serve(a)) => turing_serve(a),
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Invariant(_) => 3,
        _ => 2,
    }
}

/// Parses the process arguments, runs the command and maps errors to exit codes.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn defaults_follow_the_library() {
        let cli = Cli::try_parse_from([
            "wrongsmith",
            "corruptor",
            "generate",
            "--model",
            "m",
            "--input",
            "i",
            "--strategy",
            "bs",
            "--out",
            "o",
        ])
        .unwrap();
        let Command::Corruptor(CorruptorCommand::Generate(g)) = cli.command else {
            panic!("wrong command");
        };
        assert_eq!((g.beam, g.samples, g.tau), (11, 10, None));
        let cli = Cli::try_parse_from(["wrongsmith", "detector", "eval", "--model", "m", "--test", "t"]).unwrap();
        let Command::Detector(DetectorCommand::Eval(e)) = cli.command else {
            panic!("wrong command");
        };
        assert_eq!(e.beta, 0.5);
        let cli = Cli::try_parse_from(["wrongsmith", "turing", "serve", "--real", "r", "--synthetic", "s"]).unwrap();
        let Command::Turing(TuringCommand::Serve(t)) = cli.command else {
            panic!("wrong command");
        };
        assert_eq!(t.n, 50);
    }

    #[test]
    fn scores_sidecar_sits_next_to_output() {
        assert_eq!(
            scores_path(Path::new("out/gen.tsv")),
            PathBuf::from("out/gen.scores.tsv")
        );
    }

    #[test]
    fn invariant_errors_exit_with_three() {
        assert_eq!(exit_code(&Error::invariant("x")), 3);
        assert_eq!(exit_code(&Error::config("x")), 2);
    }
}
