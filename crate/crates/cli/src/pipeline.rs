//! End-to-end orchestration shared by `evaluate` and the standalone
//! `assign` subcommand, so running stages separately reproduces the
//! end-to-end artifacts byte for byte.

use std::fs;
use std::path::Path;

use symopt_core::glyphset::AtlasManifest;
use symopt_core::observer::ObserverConfig;
use symopt_core::phosphene::DistortionParams;
use symopt_core::temporal::MixConfig;
use symopt_core::{
    brute_force, count_bigrams, estimate_confusion, load_atlas, native_assignment, native_family,
    optimize_alternating_lap, optimize_local_search, randomized_baseline, read_documents,
    refine_local_search, write_bigram_csv, write_confusion_csv, write_confusion_heatmap,
    AssignMethod, Assignment, AssignmentFile, BigramMatrix, ConfusionMatrix, Error,
    EvaluationReport, PresetReport, RandomizedBaseline, Result, SymbolPool, TABLE_SCALE,
};

use crate::config::PipelineConfig;

/// Builds the symbol pool a config asks for.
pub fn pool_from_config(cfg: &PipelineConfig) -> Result<SymbolPool> {
    match &cfg.atlas_manifest {
        Some(path) => load_atlas(path),
        None => symopt_core::builtin_pool(cfg.glyph_size),
    }
}

/// The solved assignment for `method`, together with the randomized
/// baseline when the method compares against one.
///
/// The iterative methods keep a structural guarantee: their result never
/// costs more than the best of the baseline draws, because that draw is
/// itself refined by descent. The local-search default additionally
/// descends from the alternating-solver proposal, so it dominates both
/// seeds. Ties between candidates keep the first listed.
pub fn solve_with_method(
    c: &BigramMatrix,
    f: &ConfusionMatrix,
    pool: &SymbolPool,
    method: AssignMethod,
    restarts: usize,
    n_seeds: usize,
    seed: u64,
) -> Result<(Assignment, Option<RandomizedBaseline>)> {
    match method {
        AssignMethod::Native => Ok((native_assignment(c, f, pool)?, None)),
        AssignMethod::BruteForce => Ok((brute_force(c, f, pool)?, None)),
        AssignMethod::Randomized { .. } => {
            let baseline = randomized_baseline(c, f, pool, n_seeds, seed)?;
            Ok((baseline.best.clone(), Some(baseline)))
        }
        AssignMethod::LocalSearch => {
            let baseline = randomized_baseline(c, f, pool, n_seeds, seed)?;
            let searched = optimize_local_search(c, f, pool, restarts, seed)?;
            let alternated = optimize_alternating_lap(c, f, pool, restarts, seed)?;
            let from_alt = refine_local_search(c, f, pool, &alternated.mapping)?;
            let from_draw = refine_local_search(c, f, pool, &baseline.best.mapping)?;
            Ok((pick_best([searched, from_alt, from_draw]), Some(baseline)))
        }
        AssignMethod::HungarianAlt => {
            let baseline = randomized_baseline(c, f, pool, n_seeds, seed)?;
            let alternated = optimize_alternating_lap(c, f, pool, restarts, seed)?;
            let from_draw = refine_local_search(c, f, pool, &baseline.best.mapping)?;
            Ok((pick_best([alternated, from_draw]), Some(baseline)))
        }
    }
}

fn pick_best<const N: usize>(candidates: [Assignment; N]) -> Assignment {
    let mut best: Option<Assignment> = None;
    for cand in candidates {
        let better = match &best {
            None => true,
            Some(b) => cand.cost < b.cost || (cand.cost == b.cost && cand.mapping < b.mapping),
        };
        if better {
            best = Some(cand);
        }
    }
    best.expect("at least one candidate")
}

/// Runs the whole pipeline and writes every artifact under the config's
/// output directory. Returns the report for printing.
pub fn run_evaluate(cfg: &PipelineConfig) -> Result<EvaluationReport> {
    let language = cfg.language();
    let method = cfg.method();
    let levels = cfg.resolved_distortions()?;
    let out = &cfg.output_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let docs = read_documents(&cfg.corpus_path, cfg.corpus_per_line)?;
    let bigrams = count_bigrams(&docs, language, cfg.min_letters)?;
    write_bigram_csv(&out.join("bigram.csv"), &bigrams)?;

    let pool = pool_from_config(cfg)?;
    save_pool_manifest(cfg, &out.join("atlas.json"))?;

    let mut presets = Vec::with_capacity(levels.len());
    for (label, params) in &levels {
        presets.push(evaluate_level(cfg, &bigrams, &pool, label, params, method)?);
    }

    let report = EvaluationReport {
        language: language.as_str().to_string(),
        seed: cfg.observer.seed,
        pool_size: pool.len(),
        presets,
    };
    report.save(&out.join("evaluation.json"))?;
    fs::write(out.join("report.txt"), report.table_text(TABLE_SCALE))
        .map_err(|e| Error::io(&out.join("report.txt"), e))?;
    fs::write(out.join("report.csv"), report.table_csv())
        .map_err(|e| Error::io(&out.join("report.csv"), e))?;
    Ok(report)
}

fn evaluate_level(
    cfg: &PipelineConfig,
    bigrams: &BigramMatrix,
    pool: &SymbolPool,
    label: &str,
    params: &DistortionParams,
    method: AssignMethod,
) -> Result<PresetReport> {
    let out = &cfg.output_dir;
    let observer = ObserverConfig {
        trials: cfg.observer.trials,
        mix: MixConfig {
            alpha: cfg.observer.alpha,
            beta: cfg.observer.beta,
            seed: cfg.observer.seed,
        },
        params: *params,
    };
    let confusion = estimate_confusion(pool, &observer)?;
    write_confusion_csv(&out.join(format!("confusion_{label}.csv")), &confusion)?;
    write_confusion_heatmap(&out.join(format!("heatmap_{label}.pgm")), &confusion)?;

    let native = if native_family(bigrams.alphabet().language()).is_some() {
        Some(native_assignment(bigrams, &confusion, pool)?)
    } else {
        None
    };

    let (optimized, baseline) = solve_with_method(
        bigrams,
        &confusion,
        pool,
        method,
        cfg.solver.restarts,
        cfg.solver.n_seeds,
        cfg.observer.seed,
    )?;
    let baseline = match baseline {
        Some(b) => b,
        // Native and brute-force runs still need baseline columns for the
        // comparison.
        None => randomized_baseline(bigrams, &confusion, pool, cfg.solver.n_seeds, cfg.observer.seed)?,
    };

    let file = AssignmentFile::from_assignment(
        bigrams.alphabet().language().as_str(),
        bigrams.alphabet(),
        pool,
        &optimized,
    )?;
    file.save(&out.join(format!("assignment_{label}.json")))?;

    Ok(PresetReport {
        label: label.to_string(),
        rho_um: params.rho_um,
        lambda_um: params.lambda_um,
        native_cost: native.map(|a| a.cost),
        randomized_n: cfg.solver.n_seeds,
        randomized_mean: baseline.mean,
        randomized_std: baseline.std,
        randomized_best_cost: baseline.best.cost,
        randomized_best_draw: baseline.best.method.draw().unwrap_or(0),
        optimized_cost: optimized.cost,
        optimized_method: optimized.method.as_str().to_string(),
    })
}

/// Records which pool the run used: a copy of the loaded manifest, or the
/// built-in manifest at the configured glyph size.
fn save_pool_manifest(cfg: &PipelineConfig, path: &Path) -> Result<()> {
    let manifest = match &cfg.atlas_manifest {
        Some(src) => AtlasManifest::load(src)?,
        None => {
            let mut m = AtlasManifest::builtin_default();
            m.size = cfg.glyph_size;
            m
        }
    };
    manifest.save(path)
}
