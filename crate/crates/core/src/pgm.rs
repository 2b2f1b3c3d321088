//! PGM image codec. Writes binary P5 with maxval 255; reads P5 and ASCII P2.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::glyph::GlyphBitmap;

/// Writes `glyph` as binary PGM, quantizing each intensity to round(v * 255).
pub fn write_pgm(path: &Path, glyph: &GlyphBitmap) -> Result<()> {
    let bytes: Vec<u8> = glyph
        .pixels()
        .iter()
        .map(|&v| (v * 255.0).round() as u8)
        .collect();
    write_pgm_bytes(path, glyph.width(), glyph.height(), &bytes)
}

/// Writes raw 8-bit gray values as binary PGM.
pub fn write_pgm_bytes(path: &Path, width: usize, height: usize, bytes: &[u8]) -> Result<()> {
    assert_eq!(bytes.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(bytes);
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a P5 or P2 file with maxval 255, mapping gray value g to g / 255.
pub fn read_pgm(path: &Path) -> Result<GlyphBitmap> {
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    let fail = |msg: &str| Error::Pgm {
        path: path.to_path_buf(),
        msg: msg.to_string(),
    };

    let mut cursor = Cursor { data: &data, pos: 0 };
    let magic = cursor.token().ok_or_else(|| fail("missing magic number"))?;
    let binary = match magic.as_str() {
        "P5" => true,
        "P2" => false,
        other => return Err(fail(&format!("unsupported magic `{other}`, expected P5 or P2"))),
    };

    let mut dims = [0usize; 3];
    for (i, name) in ["width", "height", "maxval"].iter().enumerate() {
        let tok = cursor.token().ok_or_else(|| fail(&format!("missing {name}")))?;
        dims[i] = tok
            .parse()
            .map_err(|_| fail(&format!("invalid {name} `{tok}`")))?;
    }
    let [width, height, maxval] = dims;
    if width == 0 || height == 0 {
        return Err(fail("dimensions must be positive"));
    }
    if maxval != 255 {
        return Err(fail(&format!("maxval {maxval} unsupported, expected 255")));
    }

    let n = width * height;
    let mut gray = Vec::with_capacity(n);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        match cursor.data.get(cursor.pos) {
            Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
            _ => return Err(fail("missing whitespace before raster")),
        }
        let raster = &cursor.data[cursor.pos..];
        if raster.len() < n {
            return Err(fail(&format!(
                "raster truncated: expected {n} bytes, found {}",
                raster.len()
            )));
        }
        gray.extend_from_slice(&raster[..n]);
    } else {
        for _ in 0..n {
            let tok = cursor.token().ok_or_else(|| fail("raster truncated"))?;
            let v: u32 = tok
                .parse()
                .map_err(|_| fail(&format!("invalid gray value `{tok}`")))?;
            if v > 255 {
                return Err(fail(&format!("gray value {v} exceeds maxval")));
            }
            gray.push(v as u8);
        }
    }

    let pixels: Vec<f64> = gray.iter().map(|&g| g as f64 / 255.0).collect();
    GlyphBitmap::new(width, height, pixels)
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    /// Next whitespace-delimited token, skipping `#` comments.
    fn token(&mut self) -> Option<String> {
        loop {
            while self.pos < self.data.len() && self.data[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.data.get(self.pos) == Some(&b'#') {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            Some(String::from_utf8_lossy(&self.data[start..self.pos]).into_owned())
        }
    }
}
