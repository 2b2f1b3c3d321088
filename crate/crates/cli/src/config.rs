//! JSON pipeline configuration for the `evaluate` subcommand.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use symopt_core::phosphene::{DistortionLevel, DistortionParams};
use symopt_core::{AssignMethod, Error, Language, Result};

/// One distortion level to evaluate: either a preset name or explicit
/// parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistortionSpec {
    Preset(String),
    Custom(DistortionParams),
}

impl DistortionSpec {
    /// The artifact label and expanded parameters for this level.
    pub fn resolve(&self) -> Result<(String, DistortionParams)> {
        match self {
            DistortionSpec::Preset(name) => {
                let level = DistortionLevel::parse(name)?;
                Ok((level.as_str().to_string(), level.params()))
            }
            DistortionSpec::Custom(params) => {
                params.validate()?;
                let label = format!("rho{}_lambda{}", params.rho_um, params.lambda_um);
                Ok((label, *params))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObserverSection {
    /// Monte Carlo trials per pool symbol.
    pub trials: usize,
    /// Mixing-weight Beta shape parameters.
    pub alpha: f64,
    pub beta: f64,
    /// The single seed every stage derives its streams from.
    pub seed: u64,
}

impl Default for ObserverSection {
    fn default() -> Self {
        ObserverSection {
            trials: 500,
            alpha: 2.0,
            beta: 2.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub method: String,
    /// Search restarts for the iterative methods.
    pub restarts: usize,
    /// Randomized baseline draws.
    pub n_seeds: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            method: "local_search".to_string(),
            restarts: 16,
            n_seeds: 201,
        }
    }
}

fn default_min_letters() -> usize {
    500
}

fn default_glyph_size() -> usize {
    64
}

fn default_distortion() -> Vec<DistortionSpec> {
    DistortionLevel::ALL
        .iter()
        .map(|l| DistortionSpec::Preset(l.as_str().to_string()))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub language: String,
    /// A text file, a directory of text files, or (with `corpus_per_line`)
    /// a file treated as one document per line.
    pub corpus_path: PathBuf,
    #[serde(default)]
    pub corpus_per_line: bool,
    /// Documents with fewer normalized letters than this are skipped.
    #[serde(default = "default_min_letters")]
    pub min_letters: usize,
    /// Glyph atlas to load; the built-in pool is used when absent.
    #[serde(default)]
    pub atlas_manifest: Option<PathBuf>,
    /// Built-in pool glyph size (ignored when an atlas is given).
    #[serde(default = "default_glyph_size")]
    pub glyph_size: usize,
    #[serde(default = "default_distortion")]
    pub distortion: Vec<DistortionSpec>,
    #[serde(default)]
    pub observer: ObserverSection,
    #[serde(default)]
    pub solver: SolverSection,
    pub output_dir: PathBuf,
}

impl PipelineConfig {
    /// Reads and validates a config. Relative paths are resolved against
    /// the config file's directory.
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: PipelineConfig = serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            cfg.corpus_path = resolve(dir, &cfg.corpus_path);
            if let Some(atlas) = &cfg.atlas_manifest {
                cfg.atlas_manifest = Some(resolve(dir, atlas));
            }
            cfg.output_dir = resolve(dir, &cfg.output_dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let language = Language::parse(&self.language)?;
        if language == Language::Custom {
            return Err(Error::invalid(
                "corpus counting needs a preset language (english, bulgarian, or arabic)",
            ));
        }
        AssignMethod::parse(&self.solver.method)?;
        if self.observer.trials == 0 {
            return Err(Error::invalid("observer.trials must be positive"));
        }
        if self.solver.restarts == 0 {
            return Err(Error::invalid("solver.restarts must be positive"));
        }
        if self.solver.n_seeds == 0 {
            return Err(Error::invalid("solver.n_seeds must be positive"));
        }
        let labels = self.resolved_distortions()?;
        if labels.is_empty() {
            return Err(Error::invalid("distortion list cannot be empty"));
        }
        Ok(())
    }

    /// Labels and parameters for every requested level, checking labels
    /// stay unique because they name the per-level artifacts.
    pub fn resolved_distortions(&self) -> Result<Vec<(String, DistortionParams)>> {
        let resolved: Vec<(String, DistortionParams)> = self
            .distortion
            .iter()
            .map(|d| d.resolve())
            .collect::<Result<_>>()?;
        for (i, (label, _)) in resolved.iter().enumerate() {
            if resolved[..i].iter().any(|(other, _)| other == label) {
                return Err(Error::invalid(format!(
                    "distortion level `{label}` appears twice"
                )));
            }
        }
        Ok(resolved)
    }

    pub fn language(&self) -> Language {
        Language::parse(&self.language).expect("validated at load")
    }

    pub fn method(&self) -> AssignMethod {
        AssignMethod::parse(&self.solver.method).expect("validated at load")
    }
}

fn resolve(dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_config(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("config.json");
        fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(
            dir.path(),
            r#"{
                "language": "english",
                "corpus_path": "corpus.txt",
                "output_dir": "out"
            }"#,
        );
        let cfg = PipelineConfig::load(&path).unwrap();
        assert_eq!(cfg.min_letters, 500);
        assert_eq!(cfg.glyph_size, 64);
        assert_eq!(cfg.observer.trials, 500);
        assert_eq!(cfg.observer.alpha, 2.0);
        assert_eq!(cfg.solver.method, "local_search");
        assert_eq!(cfg.solver.restarts, 16);
        assert_eq!(cfg.solver.n_seeds, 201);
        // Relative paths resolve against the config's directory.
        assert_eq!(cfg.corpus_path, dir.path().join("corpus.txt"));
        assert_eq!(cfg.output_dir, dir.path().join("out"));
        // Default levels are the three presets in order.
        let levels = cfg.resolved_distortions().unwrap();
        let names: Vec<&str> = levels.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(names, ["low", "medium", "high"]);
        assert_eq!(levels[0].1.rho_um, 100.0);
        assert_eq!(levels[0].1.lambda_um, 0.0);
        assert_eq!(levels[1].1.rho_um, 300.0);
        assert_eq!(levels[1].1.lambda_um, 1000.0);
        assert_eq!(levels[2].1.rho_um, 500.0);
        assert_eq!(levels[2].1.lambda_um, 5000.0);
    }

    #[test]
    fn custom_distortion_entries_mix_with_presets() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(
            dir.path(),
            r#"{
                "language": "english",
                "corpus_path": "corpus.txt",
                "output_dir": "out",
                "distortion": ["low", {"rho_um": 200.0, "lambda_um": 500.0}]
            }"#,
        );
        let cfg = PipelineConfig::load(&path).unwrap();
        let levels = cfg.resolved_distortions().unwrap();
        assert_eq!(levels[0].0, "low");
        assert_eq!(levels[1].0, "rho200_lambda500");
        assert_eq!(levels[1].1.rho_um, 200.0);
        assert_eq!(levels[1].1.grid, 16);
    }

    #[test]
    fn bad_configs_are_rejected_with_reasons() {
        let dir = tempfile::tempdir().unwrap();
        let cases = [
            (
                r#"{"language": "klingon", "corpus_path": "c", "output_dir": "o"}"#,
                "klingon",
            ),
            (
                r#"{"language": "english", "corpus_path": "c", "output_dir": "o", "solver": {"method": "annealing"}}"#,
                "annealing",
            ),
            (
                r#"{"language": "english", "corpus_path": "c", "output_dir": "o", "distortion": []}"#,
                "empty",
            ),
            (
                r#"{"language": "english", "corpus_path": "c", "output_dir": "o", "distortion": ["low", "low"]}"#,
                "twice",
            ),
            (
                r#"{"language": "english", "corpus_path": "c", "output_dir": "o", "observer": {"trials": 0}}"#,
                "trials",
            ),
            (
                r#"{"language": "english", "corpus_path": "c", "output_dir": "o", "typo_field": 1}"#,
                "typo_field",
            ),
        ];
        for (body, needle) in cases {
            let path = write_config(dir.path(), body);
            let err = PipelineConfig::load(&path).unwrap_err().to_string();
            assert!(err.contains(needle), "{body} -> {err}");
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = PipelineConfig {
            language: "bulgarian".to_string(),
            corpus_path: PathBuf::from("/tmp/c"),
            corpus_per_line: true,
            min_letters: 100,
            atlas_manifest: None,
            glyph_size: 32,
            distortion: vec![DistortionSpec::Preset("high".to_string())],
            observer: ObserverSection {
                trials: 64,
                alpha: 2.0,
                beta: 2.0,
                seed: 9,
            },
            solver: SolverSection::default(),
            output_dir: PathBuf::from("/tmp/o"),
        };
        let json = serde_json::to_string_pretty(&cfg).unwrap();
        let back: PipelineConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.language, cfg.language);
        assert_eq!(back.observer.seed, 9);
        assert!(matches!(&back.distortion[0], DistortionSpec::Preset(p) if p == "high"));
    }
}
