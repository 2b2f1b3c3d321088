//! Simulated observer: classifies distorted percepts against the pool's
//! clean-presentation percepts by Pearson correlation, and estimates the
//! pairwise confusion matrix under temporal blending.

use std::path::Path;

use rand::Rng;
use rand_distr::Distribution;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::glyph::GlyphBitmap;
use crate::glyphset::SymbolPool;
use crate::matrix_csv::{read_matrix_csv, write_matrix_csv};
use crate::pgm::write_pgm_bytes;
use crate::phosphene::{render_percept, DistortionParams};
use crate::rng::{pair, substream, Stage};
use crate::temporal::{beta_dist, mix_into, MixConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObserverConfig {
    /// Monte Carlo trials per pool symbol.
    pub trials: usize,
    pub mix: MixConfig,
    pub params: DistortionParams,
}

impl Default for ObserverConfig {
    fn default() -> Self {
        ObserverConfig {
            trials: 500,
            mix: MixConfig::default(),
            params: DistortionParams::default(),
        }
    }
}

/// Row-stochastic confusion estimates: entry (i, j) is the probability that
/// symbol i is read as symbol j. Rows are either a distribution summing to 1
/// within 1e-3 or exactly zero (a symbol with no mass after restriction).
#[derive(Clone, Debug, PartialEq)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl ConfusionMatrix {
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<ConfusionMatrix> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::invalid("confusion matrix cannot be empty"));
        }
        if values.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} values for {n} labels, got {}",
                n * n,
                values.len()
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::invalid(format!("duplicate label `{label}`")));
            }
        }
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!(
                "confusion value {bad} outside [0, 1]"
            )));
        }
        for i in 0..n {
            let sum: f64 = values[i * n..(i + 1) * n].iter().sum();
            if sum != 0.0 && (sum - 1.0).abs() > 1e-3 {
                return Err(Error::invalid(format!(
                    "confusion row `{}` sums to {sum}, expected 1 within 1e-3",
                    labels[i]
                )));
            }
        }
        Ok(ConfusionMatrix { labels, values })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Clean-presentation percepts for every pool entry, in pool order. These
/// serve as the observer's reference templates.
pub fn render_templates(pool: &SymbolPool, params: &DistortionParams) -> Result<Vec<GlyphBitmap>> {
    pool.iter()
        .map(|e| render_percept(&e.glyph, params))
        .collect()
}

/// Four-way unrolled dot product: fixed summation order, so results are
/// reproducible, without a serial dependence on every add.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = c * 4;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut rest = 0.0;
    for i in chunks * 4..a.len() {
        rest += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + rest
}

/// Mean-centered templates with precomputed norms.
pub struct TemplateBank {
    dim: usize,
    count: usize,
    centered: Vec<f64>,
    norms: Vec<f64>,
}

impl TemplateBank {
    pub fn new(templates: &[GlyphBitmap]) -> Result<TemplateBank> {
        let Some(first) = templates.first() else {
            return Err(Error::invalid("need at least one template"));
        };
        let dim = first.pixels().len();
        let mut centered = Vec::with_capacity(templates.len() * dim);
        let mut norms = Vec::with_capacity(templates.len());
        for t in templates {
            if !t.same_dims(first) {
                return Err(Error::invalid(format!(
                    "template is {}x{}, expected {}x{}",
                    t.width(),
                    t.height(),
                    first.width(),
                    first.height()
                )));
            }
            let mean = t.pixels().iter().sum::<f64>() / dim as f64;
            let base = centered.len();
            centered.extend(t.pixels().iter().map(|&v| v - mean));
            norms.push(dot(&centered[base..], &centered[base..]).sqrt());
        }
        Ok(TemplateBank {
            dim,
            count: templates.len(),
            centered,
            norms,
        })
    }

    /// Index of the highest-correlation template. Ties keep the lowest
    /// index; a zero-variance template correlates 0 with everything; a
    /// zero-variance percept correlates 0 with every template and therefore
    /// lands on index 0.
    fn classify(&self, pixels: &[f64], scratch: &mut [f64]) -> usize {
        debug_assert_eq!(pixels.len(), self.dim);
        debug_assert_eq!(scratch.len(), self.dim);
        let mean = pixels.iter().sum::<f64>() / self.dim as f64;
        for (s, &p) in scratch.iter_mut().zip(pixels) {
            *s = p - mean;
        }
        let norm_p = dot(scratch, scratch).sqrt();
        if norm_p == 0.0 {
            return 0;
        }
        let mut best_i = 0;
        let mut best_r = f64::NEG_INFINITY;
        for i in 0..self.count {
            let r = if self.norms[i] == 0.0 {
                0.0
            } else {
                let base = i * self.dim;
                dot(&self.centered[base..base + self.dim], scratch) / (norm_p * self.norms[i])
            };
            if i == 0 || r > best_r {
                best_i = i;
                best_r = r;
            }
        }
        best_i
    }

    /// Classifies one percept, checking its shape against the templates.
    pub fn classify_percept(&self, percept: &GlyphBitmap) -> Result<usize> {
        if percept.pixels().len() != self.dim {
            return Err(Error::invalid(format!(
                "percept is {}x{}, templates are {} pixels",
                percept.width(),
                percept.height(),
                self.dim
            )));
        }
        let mut scratch = vec![0.0; self.dim];
        Ok(self.classify(percept.pixels(), &mut scratch))
    }
}

/// Classifies one percept against a template set by Pearson correlation.
pub fn classify(percept: &GlyphBitmap, templates: &[GlyphBitmap]) -> Result<usize> {
    let bank = TemplateBank::new(templates)?;
    bank.classify_percept(percept)
}

/// Estimates the pool's confusion matrix. Trial t of symbol i draws its own
/// stream, from which it takes a uniform predecessor j != i and then a Beta
/// mixing weight; the blended percept of (i after j) is classified against
/// all templates. Entry (i, k) is the fraction of i's trials read as k.
/// Per-trial streams make the result independent of thread count.
pub fn estimate_confusion(pool: &SymbolPool, cfg: &ObserverConfig) -> Result<ConfusionMatrix> {
    let s = pool.len();
    if s < 2 {
        return Err(Error::invalid(
            "confusion estimation needs at least two symbols",
        ));
    }
    if cfg.trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let beta = beta_dist(&cfg.mix)?;
    let percepts = render_templates(pool, &cfg.params)?;
    let bank = TemplateBank::new(&percepts)?;
    let dim = bank.dim;
    let seed = cfg.mix.seed;

    let counts: Vec<Vec<u64>> = (0..s)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0u64; s];
            let mut mixed = vec![0.0; dim];
            let mut scratch = vec![0.0; dim];
            for t in 0..cfg.trials {
                let mut rng = substream(seed, Stage::Observer, pair(i, t));
                let j = {
                    let r = rng.random_range(0..s - 1);
                    if r >= i {
                        r + 1
                    } else {
                        r
                    }
                };
                let gamma = beta.sample(&mut rng);
                mix_into(&mut mixed, percepts[i].pixels(), percepts[j].pixels(), gamma);
                row[bank.classify(&mixed, &mut scratch)] += 1;
            }
            row
        })
        .collect();

    let inv = 1.0 / cfg.trials as f64;
    let mut values = Vec::with_capacity(s * s);
    for row in counts {
        values.extend(row.into_iter().map(|c| c as f64 * inv));
    }
    ConfusionMatrix::new(pool.labels(), values)
}

/// Restricts a confusion matrix to `subset` (distinct pool indices) and
/// renormalizes each row over the surviving columns. A row with no surviving
/// mass stays all zero.
pub fn restrict_renormalize(f: &ConfusionMatrix, subset: &[usize]) -> Result<ConfusionMatrix> {
    if subset.is_empty() {
        return Err(Error::invalid("subset cannot be empty"));
    }
    let n = f.len();
    let mut seen = vec![false; n];
    for &i in subset {
        if i >= n {
            return Err(Error::invalid(format!(
                "subset index {i} out of range for {n} symbols"
            )));
        }
        if seen[i] {
            return Err(Error::invalid(format!("subset index {i} repeated")));
        }
        seen[i] = true;
    }

    let m = subset.len();
    let mut values = vec![0.0; m * m];
    for (ri, &a) in subset.iter().enumerate() {
        let denom: f64 = subset.iter().map(|&b| f.get(a, b)).sum();
        if denom > 0.0 {
            for (rj, &b) in subset.iter().enumerate() {
                values[ri * m + rj] = f.get(a, b) / denom;
            }
        }
    }
    let labels = subset.iter().map(|&i| f.labels()[i].clone()).collect();
    ConfusionMatrix::new(labels, values)
}

pub fn write_confusion_csv(path: &Path, f: &ConfusionMatrix) -> Result<()> {
    write_matrix_csv(path, f.labels(), f.values())
}

/// Reads a confusion matrix, requiring each row to sum to 1 within 1e-3 or
/// be all zero.
pub fn read_confusion_csv(path: &Path) -> Result<ConfusionMatrix> {
    let m = read_matrix_csv(path)?;
    let n = m.labels.len();
    const TOL: f64 = 1e-3;
    for i in 0..n {
        let sum: f64 = m.values[i * n..(i + 1) * n].iter().sum();
        if sum != 0.0 && (sum - 1.0).abs() > TOL {
            return Err(Error::RowSum {
                path: path.to_path_buf(),
                label: m.labels[i].clone(),
                sum,
                tol: TOL,
            });
        }
    }
    ConfusionMatrix::new(m.labels, m.values)
}

/// Renders a confusion matrix as a gray map, one pixel per entry: white for
/// no confusion, darker as an entry approaches the largest off-diagonal
/// value.
pub fn write_confusion_heatmap(path: &Path, f: &ConfusionMatrix) -> Result<()> {
    let n = f.len();
    let mut max_off = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                max_off = max_off.max(f.get(i, j));
            }
        }
    }
    let bytes: Vec<u8> = f
        .values()
        .iter()
        .map(|&v| {
            let ratio = if max_off > 0.0 {
                (v / max_off).min(1.0)
            } else if v > 0.0 {
                1.0
            } else {
                0.0
            };
            (255.0 * (1.0 - ratio)).round() as u8
        })
        .collect();
    write_pgm_bytes(path, n, n, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glyphset::{PoolEntry, SymbolPool};
    use tempfile::tempdir;

    fn bitmap(pixels: &[f64], w: usize, h: usize) -> GlyphBitmap {
        GlyphBitmap::new(w, h, pixels.to_vec()).unwrap()
    }

    fn small_pool(glyphs: Vec<GlyphBitmap>) -> SymbolPool {
        let entries = glyphs
            .into_iter()
            .enumerate()
            .map(|(i, glyph)| PoolEntry {
                family: "test".to_string(),
                name: format!("g{i}"),
                glyph,
            })
            .collect();
        SymbolPool::from_entries(entries).unwrap()
    }

    fn small_params(grid: usize) -> DistortionParams {
        DistortionParams {
            rho_um: 100.0,
            lambda_um: 0.0,
            grid,
            um_per_px: 100.0,
            axon_origin_px: (96.0, 32.0),
        }
    }

    #[test]
    fn classify_picks_the_matching_template() {
        let t0 = bitmap(&[1.0, 0.0, 0.0, 0.0], 2, 2);
        let t1 = bitmap(&[0.0, 1.0, 0.0, 0.0], 2, 2);
        let t2 = bitmap(&[0.0, 0.0, 1.0, 0.0], 2, 2);
        let templates = vec![t0, t1, t2.clone()];
        assert_eq!(classify(&t2, &templates).unwrap(), 2);
    }

    #[test]
    fn ties_resolve_to_the_lowest_index() {
        let a = bitmap(&[1.0, 0.0, 0.5, 0.25], 2, 2);
        let b = bitmap(&[0.0, 1.0, 0.5, 0.25], 2, 2);
        let templates = vec![a.clone(), a.clone(), b];
        assert_eq!(classify(&a, &templates).unwrap(), 0);
    }

    #[test]
    fn constant_percept_lands_on_index_zero() {
        let templates = vec![
            bitmap(&[1.0, 0.0, 0.0, 0.0], 2, 2),
            bitmap(&[0.0, 1.0, 0.0, 0.0], 2, 2),
            bitmap(&[0.0, 0.0, 1.0, 0.0], 2, 2),
        ];
        let flat = bitmap(&[0.5; 4], 2, 2);
        assert_eq!(classify(&flat, &templates).unwrap(), 0);
    }

    #[test]
    fn zero_variance_template_loses_to_any_match() {
        let flat = bitmap(&[0.7; 4], 2, 2);
        let shaped = bitmap(&[0.9, 0.1, 0.2, 0.8], 2, 2);
        assert_eq!(classify(&shaped, &[flat, shaped.clone()]).unwrap(), 1);
    }

    #[test]
    fn anticorrelated_template_is_never_preferred() {
        let t = bitmap(&[1.0, 0.0, 1.0, 0.0], 2, 2);
        let inv = bitmap(&[0.0, 1.0, 0.0, 1.0], 2, 2);
        // The percept equals inv: correlation +1 against inv, -1 against t.
        assert_eq!(classify(&inv, &[t, inv.clone()]).unwrap(), 1);
    }

    #[test]
    fn estimate_is_deterministic_and_row_stochastic() {
        let g0 = GlyphBitmap::from_fn(16, 16, |x, _| if x < 8 { 1.0 } else { 0.0 }).unwrap();
        let g1 = GlyphBitmap::from_fn(16, 16, |_, y| if y < 8 { 1.0 } else { 0.0 }).unwrap();
        let g2 = GlyphBitmap::from_fn(16, 16, |x, y| if (x + y) % 8 < 4 { 1.0 } else { 0.0 }).unwrap();
        let pool = small_pool(vec![g0, g1, g2]);
        let cfg = ObserverConfig {
            trials: 200,
            mix: MixConfig {
                seed: 42,
                ..MixConfig::default()
            },
            params: small_params(4),
        };
        let f1 = estimate_confusion(&pool, &cfg).unwrap();
        let f2 = estimate_confusion(&pool, &cfg).unwrap();
        assert_eq!(f1, f2);

        for i in 0..3 {
            let sum: f64 = (0..3).map(|j| f1.get(i, j)).sum();
            assert!((sum - 1.0).abs() < 1e-12, "row {i} sums to {sum}");
        }

        // One worker thread produces the identical matrix.
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| estimate_confusion(&pool, &cfg).unwrap());
        assert_eq!(f1, single);

        // A different seed moves the estimates.
        let cfg2 = ObserverConfig {
            mix: MixConfig {
                seed: 43,
                ..MixConfig::default()
            },
            ..cfg
        };
        assert_ne!(estimate_confusion(&pool, &cfg2).unwrap(), f1);
    }

    #[test]
    fn identical_glyphs_collapse_onto_the_first() {
        let g = GlyphBitmap::from_fn(16, 16, |x, y| if x / 4 == y / 4 { 1.0 } else { 0.0 }).unwrap();
        let pool = small_pool(vec![g.clone(), g]);
        let cfg = ObserverConfig {
            trials: 64,
            mix: MixConfig::default(),
            params: small_params(4),
        };
        let f = estimate_confusion(&pool, &cfg).unwrap();
        // Both symbols render identically, every blend matches both
        // templates exactly, and the tie always keeps index 0.
        assert_eq!(f.get(0, 0), 1.0);
        assert_eq!(f.get(1, 0), 1.0);
        assert_eq!(f.get(0, 1), 0.0);
        assert_eq!(f.get(1, 1), 0.0);
    }

    #[test]
    fn restriction_renormalizes_surviving_columns() {
        let labels = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let values = vec![
            0.5, 0.3, 0.2, //
            0.1, 0.7, 0.2, //
            0.0, 0.0, 1.0,
        ];
        let f = ConfusionMatrix::new(labels, values).unwrap();
        let r = restrict_renormalize(&f, &[0, 1]).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.labels(), &["a".to_string(), "b".to_string()]);
        assert!((r.get(0, 0) - 0.625).abs() < 1e-12);
        assert!((r.get(0, 1) - 0.375).abs() < 1e-12);
        assert!((r.get(1, 0) - 0.125).abs() < 1e-12);
        assert!((r.get(1, 1) - 0.875).abs() < 1e-12);
        // Row c kept no mass: restricting to it alone from the other side.
        let z = restrict_renormalize(&f, &[2, 0]).unwrap();
        assert!((z.get(0, 0) - 1.0).abs() < 1e-12);
        // Row sums are 1 or 0 within 1e-9.
        for i in 0..2 {
            let sum: f64 = (0..2).map(|j| r.get(i, j)).sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn restriction_keeps_zero_rows_zero() {
        let labels = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let values = vec![
            0.5, 0.0, 0.5, //
            0.2, 0.8, 0.0, //
            1.0, 0.0, 0.0,
        ];
        let f = ConfusionMatrix::new(labels, values).unwrap();
        // Rows b and c have no mass on {b, c} after dropping a... row c has
        // none at all, row b keeps 0.8 on itself.
        let r = restrict_renormalize(&f, &[1, 2]).unwrap();
        assert_eq!(r.get(0, 0), 1.0);
        assert_eq!(r.get(0, 1), 0.0);
        assert_eq!(r.get(1, 0), 0.0);
        assert_eq!(r.get(1, 1), 0.0);
    }

    #[test]
    fn restriction_validates_the_subset() {
        let f = ConfusionMatrix::new(
            vec!["a".to_string(), "b".to_string()],
            vec![1.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        assert!(restrict_renormalize(&f, &[]).is_err());
        assert!(restrict_renormalize(&f, &[2]).is_err());
        assert!(restrict_renormalize(&f, &[0, 0]).is_err());
    }

    #[test]
    fn csv_round_trip_is_bitwise() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let f = ConfusionMatrix::new(
            vec!["p:x".to_string(), "p:y".to_string()],
            vec![0.9, 0.1, 1.0 / 3.0, 2.0 / 3.0],
        )
        .unwrap();
        write_confusion_csv(&path, &f).unwrap();
        let back = read_confusion_csv(&path).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn csv_read_rejects_bad_row_sums() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, ",x,y\nx,0.9,0.05\ny,0.5,0.5\n").unwrap();
        let err = read_confusion_csv(&path).unwrap_err().to_string();
        assert!(err.contains("row `x`"), "{err}");
    }

    #[test]
    fn heatmap_scales_against_max_off_diagonal() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("h.pgm");
        let f = ConfusionMatrix::new(
            vec!["a".to_string(), "b".to_string()],
            vec![0.9, 0.1, 0.2, 0.8],
        )
        .unwrap();
        write_confusion_heatmap(&path, &f).unwrap();
        let data = std::fs::read(&path).unwrap();
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&data[..header.len()], header);
        // Max off-diagonal 0.2: diagonal entries saturate to black, 0.1 maps
        // to half gray, 0.2 to black.
        assert_eq!(&data[header.len()..], &[0, 128, 0, 0]);
    }

    #[test]
    fn estimation_requires_two_symbols_and_trials() {
        let g = GlyphBitmap::zeros(16, 16).unwrap();
        let lone = small_pool(vec![g.clone()]);
        let cfg = ObserverConfig {
            trials: 10,
            mix: MixConfig::default(),
            params: small_params(4),
        };
        assert!(estimate_confusion(&lone, &cfg).is_err());
        let pool = small_pool(vec![g.clone(), g]);
        let none = ObserverConfig { trials: 0, ..cfg };
        assert!(estimate_confusion(&pool, &none).is_err());
    }
}
