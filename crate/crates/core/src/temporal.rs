//! Temporal superposition: consecutive percepts blend because the display
//! updates faster than perception fades. A presented symbol is seen as a
//! convex combination of its own percept and the previous one, with weight
//! gamma drawn from a Beta distribution.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glyph::GlyphBitmap;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Base seed for every derived stream in an estimation run.
    #[serde(default)]
    pub seed: u64,
}

impl Default for MixConfig {
    fn default() -> Self {
        MixConfig {
            alpha: 2.0,
            beta: 2.0,
            seed: 0,
        }
    }
}

pub(crate) fn beta_dist(cfg: &MixConfig) -> Result<Beta<f64>> {
    Beta::new(cfg.alpha, cfg.beta).map_err(|e| {
        Error::invalid(format!(
            "invalid mixing weights alpha={} beta={}: {e}",
            cfg.alpha, cfg.beta
        ))
    })
}

/// Draws one mixing weight for the current symbol.
pub fn sample_gamma(cfg: &MixConfig, rng: &mut ChaCha8Rng) -> Result<f64> {
    Ok(beta_dist(cfg)?.sample(rng))
}

/// The blend kernel. Clamps each pixel to max(current, previous): the convex
/// combination can overshoot that bound by one rounding step, which would
/// leave the valid intensity range when both operands are at 1.
pub(crate) fn mix_into(out: &mut [f64], cur: &[f64], prev: &[f64], gamma: f64) {
    debug_assert_eq!(out.len(), cur.len());
    debug_assert_eq!(out.len(), prev.len());
    let g1 = 1.0 - gamma;
    for ((o, &c), &p) in out.iter_mut().zip(cur).zip(prev) {
        let v = gamma * c + g1 * p;
        *o = v.min(if c > p { c } else { p });
    }
}

/// Blends `gamma * current + (1 - gamma) * previous` pixelwise.
pub fn mix(current: &GlyphBitmap, previous: &GlyphBitmap, gamma: f64) -> Result<GlyphBitmap> {
    if !current.same_dims(previous) {
        return Err(Error::invalid(format!(
            "cannot mix {}x{} with {}x{}",
            current.width(),
            current.height(),
            previous.width(),
            previous.height()
        )));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::invalid(format!(
            "mixing weight {gamma} outside [0, 1]"
        )));
    }
    let mut out = vec![0.0; current.pixels().len()];
    mix_into(&mut out, current.pixels(), previous.pixels(), gamma);
    GlyphBitmap::new(current.width(), current.height(), out)
}
