//! Spatial distortion: renders the percept a grid of stimulating electrodes
//! produces for a glyph. Each active electrode deposits a Gaussian blob of
//! spread rho at its site; with nonzero lambda it also deposits a decaying
//! trail of blobs stepping toward the axon origin, one pixel at a time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glyph::GlyphBitmap;

fn default_grid() -> usize {
    16
}

fn default_um_per_px() -> f64 {
    100.0
}

fn default_axon_origin() -> (f64, f64) {
    (96.0, 32.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistortionParams {
    /// Gaussian blob spread in micrometers.
    pub rho_um: f64,
    /// Axon trail decay constant in micrometers. Zero disables trails.
    pub lambda_um: f64,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_um_per_px")]
    pub um_per_px: f64,
    #[serde(default = "default_axon_origin")]
    pub axon_origin_px: (f64, f64),
}

impl Default for DistortionParams {
    /// The medium preset.
    fn default() -> Self {
        DistortionLevel::Medium.params()
    }
}

impl DistortionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_um > 0.0 && self.rho_um.is_finite()) {
            return Err(Error::invalid(format!(
                "rho_um must be positive, got {}",
                self.rho_um
            )));
        }
        if !(self.lambda_um >= 0.0 && self.lambda_um.is_finite()) {
            return Err(Error::invalid(format!(
                "lambda_um must be non-negative, got {}",
                self.lambda_um
            )));
        }
        if self.grid == 0 {
            return Err(Error::invalid("grid must have at least one electrode"));
        }
        if !(self.um_per_px > 0.0 && self.um_per_px.is_finite()) {
            return Err(Error::invalid(format!(
                "um_per_px must be positive, got {}",
                self.um_per_px
            )));
        }
        if !(self.axon_origin_px.0.is_finite() && self.axon_origin_px.1.is_finite()) {
            return Err(Error::invalid("axon origin must be finite"));
        }
        Ok(())
    }

    pub fn sigma_px(&self) -> f64 {
        self.rho_um / self.um_per_px
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistortionLevel {
    Low,
    Medium,
    High,
}

impl DistortionLevel {
    pub const ALL: [DistortionLevel; 3] =
        [DistortionLevel::Low, DistortionLevel::Medium, DistortionLevel::High];

    pub fn parse(s: &str) -> Result<DistortionLevel> {
        match s {
            "low" => Ok(DistortionLevel::Low),
            "medium" => Ok(DistortionLevel::Medium),
            "high" => Ok(DistortionLevel::High),
            other => Err(Error::invalid(format!(
                "unknown distortion level `{other}` (expected low, medium, or high)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DistortionLevel::Low => "low",
            DistortionLevel::Medium => "medium",
            DistortionLevel::High => "high",
        }
    }

    pub fn params(self) -> DistortionParams {
        let (rho_um, lambda_um) = match self {
            DistortionLevel::Low => (100.0, 0.0),
            DistortionLevel::Medium => (300.0, 1000.0),
            DistortionLevel::High => (500.0, 5000.0),
        };
        DistortionParams {
            rho_um,
            lambda_um,
            grid: default_grid(),
            um_per_px: default_um_per_px(),
            axon_origin_px: default_axon_origin(),
        }
    }
}

/// Per-electrode activation: the mean intensity of the glyph pixels under
/// each cell of a grid x grid partition. Requires dimensions divisible by
/// `grid`.
pub fn activations(glyph: &GlyphBitmap, grid: usize) -> Result<Vec<f64>> {
    let (w, h) = (glyph.width(), glyph.height());
    if grid == 0 || w % grid != 0 || h % grid != 0 {
        return Err(Error::invalid(format!(
            "glyph {w}x{h} does not divide into a {grid}x{grid} electrode grid"
        )));
    }
    let (cw, ch) = (w / grid, h / grid);
    let inv = 1.0 / (cw * ch) as f64;
    let mut acts = vec![0.0; grid * grid];
    for gy in 0..grid {
        for gx in 0..grid {
            let mut sum = 0.0;
            for y in gy * ch..(gy + 1) * ch {
                for x in gx * cw..(gx + 1) * cw {
                    sum += glyph.get(x, y);
                }
            }
            acts[gy * grid + gx] = sum * inv;
        }
    }
    Ok(acts)
}

/// Adds a Gaussian blob of height `peak` centered at (bx, by), truncated at
/// four sigma. The kernel is separable, so the row and column factors are
/// computed once each.
fn deposit(
    buf: &mut [f64],
    w: usize,
    h: usize,
    bx: f64,
    by: f64,
    peak: f64,
    sigma: f64,
    col_factors: &mut Vec<f64>,
) {
    let r = 4.0 * sigma;
    let two_s2 = 2.0 * sigma * sigma;
    let x_lo = (bx - r - 0.5).ceil();
    let x_hi = (bx + r - 0.5).floor();
    let y_lo = (by - r - 0.5).ceil();
    let y_hi = (by + r - 0.5).floor();
    if x_hi < 0.0 || y_hi < 0.0 || x_lo > (w - 1) as f64 || y_lo > (h - 1) as f64 {
        return;
    }
    let x0 = x_lo.max(0.0) as usize;
    let x1 = x_hi.min((w - 1) as f64) as usize;
    let y0 = y_lo.max(0.0) as usize;
    let y1 = y_hi.min((h - 1) as f64) as usize;

    col_factors.clear();
    col_factors.extend((x0..=x1).map(|ix| {
        let dx = ix as f64 + 0.5 - bx;
        (-(dx * dx) / two_s2).exp()
    }));
    for iy in y0..=y1 {
        let dy = iy as f64 + 0.5 - by;
        let row_factor = peak * (-(dy * dy) / two_s2).exp();
        let row = &mut buf[iy * w + x0..=iy * w + x1];
        for (v, e) in row.iter_mut().zip(col_factors.iter()) {
            *v += row_factor * e;
        }
    }
}

/// Simulates the percept for `glyph`. Active electrodes deposit blobs at
/// their cell centers; with lambda > 0 each also deposits floor(3 lambda_px)
/// trail blobs at one pixel spacing toward the axon origin, the blob at step
/// t scaled by exp(-t / lambda_px). The result is divided by its maximum
/// only when that maximum exceeds 1.
pub fn render_percept(glyph: &GlyphBitmap, params: &DistortionParams) -> Result<GlyphBitmap> {
    params.validate()?;
    let acts = activations(glyph, params.grid)?;
    let (w, h) = (glyph.width(), glyph.height());
    let grid = params.grid;
    let cw = (w / grid) as f64;
    let ch = (h / grid) as f64;
    let sigma = params.sigma_px();
    let decay_px = params.lambda_um / params.um_per_px;
    let steps = if decay_px > 0.0 {
        (3.0 * decay_px).floor() as usize
    } else {
        0
    };
    let (ox, oy) = params.axon_origin_px;

    let mut raw = vec![0.0; w * h];
    let mut scratch = Vec::new();
    for gy in 0..grid {
        for gx in 0..grid {
            let a = acts[gy * grid + gx];
            if a <= 0.0 {
                continue;
            }
            let ex = (gx as f64 + 0.5) * cw;
            let ey = (gy as f64 + 0.5) * ch;
            deposit(&mut raw, w, h, ex, ey, a, sigma, &mut scratch);
            if steps > 0 {
                let (dx, dy) = (ox - ex, oy - ey);
                let dist = (dx * dx + dy * dy).sqrt();
                if dist > 0.0 {
                    let (ux, uy) = (dx / dist, dy / dist);
                    for t in 1..=steps {
                        let tf = t as f64;
                        let peak = a * (-tf / decay_px).exp();
                        deposit(&mut raw, w, h, ex + tf * ux, ey + tf * uy, peak, sigma, &mut scratch);
                    }
                }
            }
        }
    }

    let max = raw.iter().cloned().fold(0.0f64, f64::max);
    if max > 1.0 {
        for v in &mut raw {
            *v /= max;
        }
    }
    GlyphBitmap::new(w, h, raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glyphset::gen_dotmatrix_latin;

    fn single_cell_glyph(size: usize, grid: usize, gx: usize, gy: usize) -> GlyphBitmap {
        let cell = size / grid;
        GlyphBitmap::from_fn(size, size, |x, y| {
            if x / cell == gx && y / cell == gy {
                1.0
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn presets_match_the_reference_levels() {
        let low = DistortionLevel::Low.params();
        assert_eq!((low.rho_um, low.lambda_um), (100.0, 0.0));
        assert_eq!(low.sigma_px(), 1.0);
        let med = DistortionLevel::Medium.params();
        assert_eq!((med.rho_um, med.lambda_um), (300.0, 1000.0));
        assert_eq!(med.sigma_px(), 3.0);
        let high = DistortionLevel::High.params();
        assert_eq!((high.rho_um, high.lambda_um), (500.0, 5000.0));
        assert_eq!(high.sigma_px(), 5.0);
        assert_eq!(high.grid, 16);
        assert_eq!(high.um_per_px, 100.0);
        assert_eq!(high.axon_origin_px, (96.0, 32.0));
        assert_eq!(DistortionLevel::parse("medium").unwrap(), DistortionLevel::Medium);
        assert!(DistortionLevel::parse("extreme").is_err());
    }

    #[test]
    fn activations_average_each_cell() {
        let g = single_cell_glyph(64, 16, 3, 5);
        let acts = activations(&g, 16).unwrap();
        assert_eq!(acts[5 * 16 + 3], 1.0);
        assert_eq!(acts.iter().sum::<f64>(), 1.0);

        // A half-covered cell averages to one half.
        let half = GlyphBitmap::from_fn(64, 64, |x, y| {
            if x < 2 && y < 4 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let acts = activations(&half, 16).unwrap();
        assert_eq!(acts[0], 0.5);
    }

    #[test]
    fn activations_require_divisible_dimensions() {
        let g = GlyphBitmap::zeros(60, 60).unwrap();
        let err = activations(&g, 16).unwrap_err().to_string();
        assert!(err.contains("60x60"), "{err}");
    }

    #[test]
    fn render_matches_a_direct_reference() {
        // Sigma 8 on a 16 pixel glyph: the four sigma truncation window
        // covers the whole image for every blob, so a plain full-image
        // double loop is an exact reference.
        let params = DistortionParams {
            rho_um: 800.0,
            lambda_um: 200.0,
            grid: 4,
            um_per_px: 100.0,
            axon_origin_px: (96.0, 32.0),
        };
        let glyph = GlyphBitmap::from_fn(16, 16, |x, y| {
            if (x / 4 == 1 && y / 4 == 2) || (x / 4 == 3 && y / 4 == 0) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();

        let mut expected = vec![0.0; 16 * 16];
        let sigma: f64 = 8.0;
        let decay = 2.0;
        let steps = 6;
        let mut blobs: Vec<(f64, f64, f64)> = Vec::new();
        for &(gx, gy) in &[(1usize, 2usize), (3, 0)] {
            let ex = (gx as f64 + 0.5) * 4.0;
            let ey = (gy as f64 + 0.5) * 4.0;
            blobs.push((ex, ey, 1.0));
            let (dx, dy) = (96.0 - ex, 32.0 - ey);
            let dist = (dx * dx + dy * dy).sqrt();
            let (ux, uy) = (dx / dist, dy / dist);
            for t in 1..=steps {
                let tf = t as f64;
                blobs.push((ex + tf * ux, ey + tf * uy, (-tf / decay).exp()));
            }
        }
        for (y, x) in (0..16).flat_map(|y| (0..16).map(move |x| (y, x))) {
            let mut v = 0.0;
            for &(bx, by, peak) in &blobs {
                let dx = x as f64 + 0.5 - bx;
                let dy = y as f64 + 0.5 - by;
                v += peak * (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
            }
            expected[y * 16 + x] = v;
        }
        let max = expected.iter().cloned().fold(0.0f64, f64::max);
        assert!(max > 1.0, "normalization path must engage, max {max}");
        for v in &mut expected {
            *v /= max;
        }

        let percept = render_percept(&glyph, &params).unwrap();
        for (i, (got, want)) in percept.pixels().iter().zip(&expected).enumerate() {
            assert!((got - want).abs() < 1e-12, "pixel {i}: {got} vs {want}");
        }
    }

    #[test]
    fn rotation_equivariance_without_trails() {
        let glyphs = gen_dotmatrix_latin(64).unwrap();
        let r = &glyphs[17].1;
        let rot = |g: &GlyphBitmap| {
            GlyphBitmap::from_fn(64, 64, |x, y| g.get(y, 63 - x)).unwrap()
        };
        let params = DistortionLevel::Low.params();
        let a = render_percept(&rot(r), &params).unwrap();
        let b = rot(&render_percept(r, &params).unwrap());
        for (i, (x, y)) in a.pixels().iter().zip(b.pixels()).enumerate() {
            assert!((x - y).abs() < 1e-12, "pixel {i}: {x} vs {y}");
        }
    }

    #[test]
    fn trails_grow_the_percept_across_presets() {
        let g = single_cell_glyph(64, 16, 3, 5);
        let count = |level: DistortionLevel| {
            render_percept(&g, &level.params())
                .unwrap()
                .pixels()
                .iter()
                .filter(|&&v| v > 0.1)
                .count()
        };
        let low = count(DistortionLevel::Low);
        let med = count(DistortionLevel::Medium);
        let high = count(DistortionLevel::High);
        assert!(low < med && med < high, "{low} {med} {high}");
        assert!(low > 0);
    }

    #[test]
    fn single_blob_stays_unnormalized() {
        let g = single_cell_glyph(64, 16, 3, 5);
        let p = render_percept(&g, &DistortionLevel::Low.params()).unwrap();
        let max = p.pixels().iter().cloned().fold(0.0f64, f64::max);
        // Blob center (14, 22) sits on a pixel corner; the nearest centers
        // are half a pixel away in each axis.
        let expected = (-0.25f64).exp();
        assert!((max - expected).abs() < 1e-12, "max {max}");
    }

    #[test]
    fn zero_glyph_renders_to_zero() {
        let g = GlyphBitmap::zeros(64, 64).unwrap();
        let p = render_percept(&g, &DistortionLevel::High.params()).unwrap();
        assert!(p.pixels().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let mut p = DistortionParams::default();
        p.rho_um = 0.0;
        assert!(p.validate().is_err());
        let mut p = DistortionParams::default();
        p.lambda_um = -1.0;
        assert!(p.validate().is_err());
        let mut p = DistortionParams::default();
        p.grid = 0;
        assert!(p.validate().is_err());
        let mut p = DistortionParams::default();
        p.um_per_px = f64::NAN;
        assert!(p.validate().is_err());
    }
}
