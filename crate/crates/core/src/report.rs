//! Result artifacts: per-distortion summaries, the evaluation report with
//! its text and CSV renderings, and saved assignments.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::assigner::Assignment;
use crate::corpus::Alphabet;
use crate::error::{Error, Result};
use crate::glyphset::SymbolPool;

/// Costs scale well below 1, so tables show them multiplied by this factor.
pub const TABLE_SCALE: f64 = 1e5;

/// `cost` multiplied by `scale` and rounded to a whole number, as printed in
/// tables.
pub fn format_scaled(cost: f64, scale: f64) -> String {
    format!("{:.0}", cost * scale)
}

/// Comparison of the three mapping strategies under one distortion level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetReport {
    pub label: String,
    pub rho_um: f64,
    pub lambda_um: f64,
    /// Absent when the pool lacks a native glyph family for the language.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub native_cost: Option<f64>,
    pub randomized_n: usize,
    pub randomized_mean: f64,
    pub randomized_std: f64,
    pub randomized_best_cost: f64,
    /// Index of the best baseline draw.
    pub randomized_best_draw: u64,
    pub optimized_cost: f64,
    pub optimized_method: String,
}

impl PresetReport {
    /// How many times cheaper the optimized mapping is than the native one.
    pub fn factor_native(&self) -> Option<f64> {
        self.native_cost.map(|n| n / self.optimized_cost)
    }

    /// How many times cheaper the optimized mapping is than an average
    /// random one.
    pub fn factor_randomized_mean(&self) -> f64 {
        self.randomized_mean / self.optimized_cost
    }
}

/// Full outcome of one evaluation run, serialized as JSON next to the other
/// artifacts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationReport {
    pub language: String,
    pub seed: u64,
    pub pool_size: usize,
    pub presets: Vec<PresetReport>,
}

impl EvaluationReport {
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("report serializes");
        fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<EvaluationReport> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
    }

    /// Fixed-width table with costs scaled by `scale`.
    pub fn table_text(&self, scale: f64) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "language: {}    seed: {}    pool: {} symbols    costs x{:.0}\n\n",
            self.language, self.seed, self.pool_size, scale
        ));
        out.push_str(&format!(
            "{:<8} {:>7} {:>10} {:>8} {:>10} {:>9} {:>10} {:>14} {:>9} {:>7}\n",
            "level", "rho_um", "lambda_um", "native", "rand_mean", "rand_std", "rand_best",
            "optimized", "x_native", "x_rand"
        ));
        for p in &self.presets {
            let native = p
                .native_cost
                .map(|c| format_scaled(c, scale))
                .unwrap_or_else(|| "-".to_string());
            let x_native = p
                .factor_native()
                .map(|f| format!("{f:.2}"))
                .unwrap_or_else(|| "-".to_string());
            out.push_str(&format!(
                "{:<8} {:>7} {:>10} {:>8} {:>10} {:>9} {:>10} {:>14} {:>9} {:>7}\n",
                p.label,
                p.rho_um,
                p.lambda_um,
                native,
                format_scaled(p.randomized_mean, scale),
                format_scaled(p.randomized_std, scale),
                format_scaled(p.randomized_best_cost, scale),
                format!("{} ({})", format_scaled(p.optimized_cost, scale), p.optimized_method),
                x_native,
                format!("{:.2}", p.factor_randomized_mean()),
            ));
        }
        out
    }

    /// Machine-readable rendering with unscaled costs at full precision.
    pub fn table_csv(&self) -> String {
        let mut out = String::from(
            "level,rho_um,lambda_um,native_cost,randomized_n,randomized_mean,randomized_std,\
             randomized_best_cost,randomized_best_draw,optimized_cost,optimized_method,\
             factor_native,factor_randomized_mean\n",
        );
        for p in &self.presets {
            let native = p.native_cost.map(|c| c.to_string()).unwrap_or_default();
            let x_native = p
                .factor_native()
                .map(|f| f.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                p.label,
                p.rho_um,
                p.lambda_um,
                native,
                p.randomized_n,
                p.randomized_mean,
                p.randomized_std,
                p.randomized_best_cost,
                p.randomized_best_draw,
                p.optimized_cost,
                p.optimized_method,
                x_native,
                p.factor_randomized_mean(),
            ));
        }
        out
    }
}

/// One letter's symbol in a saved assignment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingEntry {
    pub letter: String,
    pub pool_index: usize,
    pub family: String,
    pub name: String,
}

/// A saved letter-to-symbol assignment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentFile {
    pub language: String,
    pub method: String,
    /// Baseline draw index, for randomized assignments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draw: Option<u64>,
    pub cost: f64,
    /// Cost scaled by 1e5 as shown in tables.
    pub cost_x1e5: String,
    pub mapping: Vec<MappingEntry>,
}

impl AssignmentFile {
    pub fn from_assignment(
        language: &str,
        alphabet: &Alphabet,
        pool: &SymbolPool,
        assignment: &Assignment,
    ) -> Result<AssignmentFile> {
        if alphabet.len() != assignment.mapping.len() {
            return Err(Error::invalid(format!(
                "assignment covers {} letters, alphabet has {}",
                assignment.mapping.len(),
                alphabet.len()
            )));
        }
        let mapping = alphabet
            .letters()
            .iter()
            .zip(&assignment.mapping)
            .map(|(&ch, &idx)| {
                if idx >= pool.len() {
                    return Err(Error::invalid(format!(
                        "assignment uses symbol {idx}, pool has {}",
                        pool.len()
                    )));
                }
                let entry = pool.get(idx);
                Ok(MappingEntry {
                    letter: ch.to_string(),
                    pool_index: idx,
                    family: entry.family.clone(),
                    name: entry.name.clone(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(AssignmentFile {
            language: language.to_string(),
            method: assignment.method.as_str().to_string(),
            draw: assignment.method.draw(),
            cost: assignment.cost,
            cost_x1e5: format_scaled(assignment.cost, TABLE_SCALE),
            mapping,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("assignment serializes");
        fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<AssignmentFile> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
    }

    /// The bare mapping vector, for feeding an assignment back into
    /// evaluation.
    pub fn mapping_indices(&self) -> Vec<usize> {
        self.mapping.iter().map(|m| m.pool_index).collect()
    }
}
