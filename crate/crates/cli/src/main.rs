//! Command-line pipeline: each subcommand runs one stage against files on
//! disk, and `evaluate` chains them all from a JSON config.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use symopt_core::phosphene::{DistortionLevel, DistortionParams};
use symopt_core::temporal::MixConfig;
use symopt_core::{
    count_bigrams, estimate_confusion, load_atlas, read_bigram_csv, read_confusion_csv,
    read_documents, write_bigram_csv, write_confusion_csv, write_confusion_heatmap, AssignMethod,
    AssignmentFile, EvaluationReport, Language, ObserverConfig, SymbolPool, TABLE_SCALE,
};

mod config;
mod pipeline;

use config::PipelineConfig;

const LEVEL_HELP: &str = "\
Distortion presets expand to spread/streak lengths in micrometers:
  low     rho 100, lambda 0     (tight dots, no streaks)
  medium  rho 300, lambda 1000
  high    rho 500, lambda 5000  (wide blobs, long streaks)";

#[derive(Parser)]
#[command(
    name = "symopt",
    version,
    about = "Optimizes which symbol renders which letter under a simulated prosthetic display",
    after_help = LEVEL_HELP
)]
struct Cli {
    /// Worker threads for parallel stages; 0 means one per core. The
    /// thread count never changes any output.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count letter-pair statistics from a corpus into a labeled CSV.
    Bigram(BigramArgs),
    /// Render the symbol pool's glyphs to PGM images.
    Glyphs(GlyphsArgs),
    /// Push one glyph image through the display simulation.
    Distort(DistortArgs),
    /// Estimate the pool's pairwise confusion matrix.
    Confuse(ConfuseArgs),
    /// Solve for a letter-to-symbol assignment from saved matrices.
    Assign(AssignArgs),
    /// Run every stage from a JSON config and write all artifacts.
    Evaluate(EvaluateArgs),
    /// Print the comparison table from a saved evaluation.
    Report(ReportArgs),
}

#[derive(Args)]
struct BigramArgs {
    /// english, bulgarian, or arabic.
    #[arg(long)]
    language: String,
    /// Text file or directory of text files.
    #[arg(long)]
    corpus: PathBuf,
    /// Treat each line of the corpus file as its own document.
    #[arg(long)]
    per_line: bool,
    /// Skip documents with fewer normalized letters than this.
    #[arg(long, default_value_t = 500)]
    min_letters: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PoolArgs {
    /// Atlas manifest JSON; omit to use the built-in pool.
    #[arg(long)]
    atlas: Option<PathBuf>,
    /// Built-in pool glyph size (ignored with --atlas).
    #[arg(long, default_value_t = 64)]
    size: usize,
}

impl PoolArgs {
    fn build(&self) -> anyhow::Result<SymbolPool> {
        Ok(match &self.atlas {
            Some(path) => load_atlas(path)?,
            None => symopt_core::builtin_pool(self.size)?,
        })
    }
}

#[derive(Args)]
struct GlyphsArgs {
    #[command(flatten)]
    pool: PoolArgs,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct LevelArgs {
    /// Distortion preset: low, medium, or high.
    #[arg(long, conflicts_with_all = ["rho_um", "lambda_um"])]
    level: Option<String>,
    /// Phosphene spread in micrometers (with --lambda-um).
    #[arg(long, requires = "lambda_um")]
    rho_um: Option<f64>,
    /// Axon streak decay length in micrometers (with --rho-um).
    #[arg(long, requires = "rho_um")]
    lambda_um: Option<f64>,
    /// Electrode grid cells per side.
    #[arg(long)]
    grid: Option<usize>,
    /// Micrometers of retina per pixel.
    #[arg(long)]
    um_per_px: Option<f64>,
}

impl LevelArgs {
    fn resolve(&self) -> anyhow::Result<DistortionParams> {
        let mut params = match (&self.level, self.rho_um, self.lambda_um) {
            (Some(level), None, None) => DistortionLevel::parse(level)?.params(),
            (None, Some(rho_um), Some(lambda_um)) => DistortionParams {
                rho_um,
                lambda_um,
                ..DistortionParams::default()
            },
            _ => anyhow::bail!("give either --level or both --rho-um and --lambda-um"),
        };
        if let Some(grid) = self.grid {
            params.grid = grid;
        }
        if let Some(um_per_px) = self.um_per_px {
            params.um_per_px = um_per_px;
        }
        params.validate()?;
        Ok(params)
    }
}

#[derive(Args)]
struct DistortArgs {
    /// Input glyph (PGM).
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    level: LevelArgs,
    /// Previous frame's glyph (PGM); its percept is blended in.
    #[arg(long, requires = "gamma")]
    prev: Option<PathBuf>,
    /// Mixing weight of the current frame, in [0, 1].
    #[arg(long, requires = "prev")]
    gamma: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConfuseArgs {
    #[command(flatten)]
    pool: PoolArgs,
    #[command(flatten)]
    level: LevelArgs,
    /// Monte Carlo trials per symbol.
    #[arg(long, default_value_t = 500)]
    trials: usize,
    /// Mixing-weight Beta shape parameters.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the confusion heatmap image here.
    #[arg(long)]
    heatmap: Option<PathBuf>,
}

#[derive(Args)]
struct AssignArgs {
    /// Bigram CSV from the `bigram` stage.
    #[arg(long)]
    bigram: PathBuf,
    /// Confusion CSV from the `confuse` stage.
    #[arg(long)]
    confusion: PathBuf,
    #[command(flatten)]
    pool: PoolArgs,
    /// native, randomized, hungarian_alt, local_search, or brute_force.
    #[arg(long, default_value = "local_search")]
    method: String,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Randomized baseline draws the result is compared against.
    #[arg(long, default_value_t = 201)]
    n_seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Pipeline config JSON.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// evaluation.json written by `evaluate`.
    #[arg(long)]
    evaluation: PathBuf,
    /// Multiplier applied to costs in the table.
    #[arg(long, default_value_t = TABLE_SCALE)]
    scale: f64,
    /// Emit the machine-readable CSV instead of the text table.
    #[arg(long)]
    csv: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .context("building the thread pool")?;
    match cli.command {
        Command::Bigram(args) => run_bigram(args),
        Command::Glyphs(args) => run_glyphs(args),
        Command::Distort(args) => run_distort(args),
        Command::Confuse(args) => run_confuse(args),
        Command::Assign(args) => run_assign(args),
        Command::Evaluate(args) => run_evaluate(args),
        Command::Report(args) => run_report(args),
    }
}

fn run_bigram(args: BigramArgs) -> anyhow::Result<()> {
    let language = Language::parse(&args.language)?;
    if language == Language::Custom {
        anyhow::bail!("corpus counting needs a preset language (english, bulgarian, or arabic)");
    }
    let docs = read_documents(&args.corpus, args.per_line)?;
    let bigrams = count_bigrams(&docs, language, args.min_letters)?;
    write_bigram_csv(&args.out, &bigrams)?;
    println!(
        "{}: {} documents -> {} letter rows -> {}",
        language.as_str(),
        docs.len(),
        bigrams.len(),
        args.out.display()
    );
    Ok(())
}

fn run_glyphs(args: GlyphsArgs) -> anyhow::Result<()> {
    let pool = args.pool.build()?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    for (i, entry) in pool.iter().enumerate() {
        let name = format!("{:03}_{}_{}.pgm", i, safe(&entry.family), safe(&entry.name));
        symopt_core::pgm::write_pgm(&args.out_dir.join(name), &entry.glyph)?;
    }
    println!(
        "wrote {} glyphs ({}x{}) to {}",
        pool.len(),
        pool.width(),
        pool.height(),
        args.out_dir.display()
    );
    Ok(())
}

/// Keeps file names portable whatever the atlas called its glyphs.
fn safe(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn run_distort(args: DistortArgs) -> anyhow::Result<()> {
    let params = args.level.resolve()?;
    let glyph = symopt_core::pgm::read_pgm(&args.input)?;
    let mut percept = symopt_core::render_percept(&glyph, &params)?;
    if let Some(prev_path) = &args.prev {
        let gamma = args.gamma.expect("clap enforces --gamma with --prev");
        let prev = symopt_core::pgm::read_pgm(prev_path)?;
        let prev_percept = symopt_core::render_percept(&prev, &params)?;
        percept = symopt_core::mix(&percept, &prev_percept, gamma)?;
    }
    symopt_core::pgm::write_pgm(&args.out, &percept)?;
    println!("{} -> {}", args.input.display(), args.out.display());
    Ok(())
}

fn run_confuse(args: ConfuseArgs) -> anyhow::Result<()> {
    let pool = args.pool.build()?;
    let cfg = ObserverConfig {
        trials: args.trials,
        mix: MixConfig {
            alpha: args.alpha,
            beta: args.beta,
            seed: args.seed,
        },
        params: args.level.resolve()?,
    };
    let confusion = estimate_confusion(&pool, &cfg)?;
    write_confusion_csv(&args.out, &confusion)?;
    if let Some(heatmap) = &args.heatmap {
        write_confusion_heatmap(heatmap, &confusion)?;
    }
    println!(
        "{} symbols x {} trials -> {}",
        pool.len(),
        args.trials,
        args.out.display()
    );
    Ok(())
}

fn run_assign(args: AssignArgs) -> anyhow::Result<()> {
    let bigrams = read_bigram_csv(&args.bigram)?;
    let confusion = read_confusion_csv(&args.confusion)?;
    let pool = args.pool.build()?;
    let method = AssignMethod::parse(&args.method)?;
    let (assignment, _) = pipeline::solve_with_method(
        &bigrams,
        &confusion,
        &pool,
        method,
        args.restarts,
        args.n_seeds,
        args.seed,
    )?;
    let file = AssignmentFile::from_assignment(
        bigrams.alphabet().language().as_str(),
        bigrams.alphabet(),
        &pool,
        &assignment,
    )?;
    file.save(&args.out)?;
    println!(
        "{}: cost {} (x1e5: {}) -> {}",
        file.method,
        file.cost,
        file.cost_x1e5,
        args.out.display()
    );
    Ok(())
}

fn run_evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    let cfg = PipelineConfig::load(&args.config)?;
    let report = pipeline::run_evaluate(&cfg)?;
    print!("{}", report.table_text(TABLE_SCALE));
    println!("\nartifacts in {}", cfg.output_dir.display());
    Ok(())
}

fn run_report(args: ReportArgs) -> anyhow::Result<()> {
    let report = EvaluationReport::load(&args.evaluation)?;
    if args.csv {
        print!("{}", report.table_csv());
    } else {
        print!("{}", report.table_text(args.scale));
    }
    Ok(())
}
