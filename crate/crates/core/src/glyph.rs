//! Grayscale bitmaps with intensities in [0, 1], stored row major.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GlyphBitmap {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GlyphBitmap {
    /// Takes ownership of `pixels` (row major, length `width * height`).
    /// Every intensity must be finite and within [0, 1].
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "bitmap dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "bitmap {width}x{height} needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        if let Some(bad) = pixels.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!(
                "pixel intensity {bad} outside [0, 1]"
            )));
        }
        Ok(GlyphBitmap {
            width,
            height,
            pixels,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0.0; width * height])
    }

    /// Builds a bitmap by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        assert!(x < self.width && y < self.height);
        self.pixels[y * self.width + x]
    }

    pub fn same_dims(&self, other: &GlyphBitmap) -> bool {
        self.width == other.width && self.height == other.height
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_unit_range_pixels() {
        let g = GlyphBitmap::new(2, 3, vec![0.0, 1.0, 0.5, 0.25, 0.75, 1.0]).unwrap();
        assert_eq!(g.width(), 2);
        assert_eq!(g.height(), 3);
        assert_eq!(g.get(1, 2), 1.0);
        assert_eq!(g.get(0, 1), 0.5);
    }

    #[test]
    fn rejects_out_of_range_and_nan() {
        assert!(GlyphBitmap::new(1, 2, vec![0.0, 1.0001]).is_err());
        assert!(GlyphBitmap::new(1, 2, vec![-0.1, 0.5]).is_err());
        assert!(GlyphBitmap::new(1, 2, vec![f64::NAN, 0.5]).is_err());
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(GlyphBitmap::new(0, 4, vec![]).is_err());
        assert!(GlyphBitmap::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn from_fn_is_row_major() {
        let g = GlyphBitmap::from_fn(3, 2, |x, y| if x == 2 && y == 1 { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(g.pixels()[5], 1.0);
        assert_eq!(g.pixels().iter().sum::<f64>(), 1.0);
    }
}
