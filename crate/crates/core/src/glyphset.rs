//! Symbol pool construction: built-in glyph generators and file atlases.
//!
//! A pool is an ordered list of (family, name, bitmap) entries sharing one
//! square size. Pool index is the identity used by confusion matrices and
//! assignments, so entry order is part of every downstream artifact.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Language;
use crate::error::{Error, Result};
use crate::glyph::GlyphBitmap;
use crate::pgm::read_pgm;

/// Dots present in each braille cell, a through z, numbered 1..6 in the
/// standard layout: 1-2-3 down the left column, 4-5-6 down the right.
const BRAILLE_DOTS: [&[u8]; 26] = [
    &[1],             // a
    &[1, 2],          // b
    &[1, 4],          // c
    &[1, 4, 5],       // d
    &[1, 5],          // e
    &[1, 2, 4],       // f
    &[1, 2, 4, 5],    // g
    &[1, 2, 5],       // h
    &[2, 4],          // i
    &[2, 4, 5],       // j
    &[1, 3],          // k
    &[1, 2, 3],       // l
    &[1, 3, 4],       // m
    &[1, 3, 4, 5],    // n
    &[1, 3, 5],       // o
    &[1, 2, 3, 4],    // p
    &[1, 2, 3, 4, 5], // q
    &[1, 2, 3, 5],    // r
    &[2, 3, 4],       // s
    &[2, 3, 4, 5],    // t
    &[1, 3, 6],       // u
    &[1, 2, 3, 6],    // v
    &[2, 4, 5, 6],    // w
    &[1, 3, 4, 6],    // x
    &[1, 3, 4, 5, 6], // y
    &[1, 3, 5, 6],    // z
];

/// 5x7 dot matrix letterforms, one row per byte, bit 4 = leftmost column.
const DOT_MATRIX: [[u8; 7]; 26] = [
    [0b01110, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001], // a
    [0b11110, 0b10001, 0b10001, 0b11110, 0b10001, 0b10001, 0b11110], // b
    [0b01110, 0b10001, 0b10000, 0b10000, 0b10000, 0b10001, 0b01110], // c
    [0b11100, 0b10010, 0b10001, 0b10001, 0b10001, 0b10010, 0b11100], // d
    [0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b11111], // e
    [0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b10000], // f
    [0b01110, 0b10001, 0b10000, 0b10111, 0b10001, 0b10001, 0b01111], // g
    [0b10001, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001], // h
    [0b11111, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b11111], // i
    [0b00111, 0b00010, 0b00010, 0b00010, 0b00010, 0b10010, 0b01100], // j
    [0b10001, 0b10010, 0b10100, 0b11000, 0b10100, 0b10010, 0b10001], // k
    [0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b11111], // l
    [0b10001, 0b11011, 0b10101, 0b10101, 0b10001, 0b10001, 0b10001], // m
    [0b10001, 0b10001, 0b11001, 0b10101, 0b10011, 0b10001, 0b10001], // n
    [0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110], // o
    [0b11110, 0b10001, 0b10001, 0b11110, 0b10000, 0b10000, 0b10000], // p
    [0b01110, 0b10001, 0b10001, 0b10001, 0b10101, 0b10010, 0b01101], // q
    [0b11110, 0b10001, 0b10001, 0b11110, 0b10100, 0b10010, 0b10001], // r
    [0b01111, 0b10000, 0b10000, 0b01110, 0b00001, 0b00001, 0b11110], // s
    [0b11111, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100], // t
    [0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110], // u
    [0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01010, 0b00100], // v
    [0b10001, 0b10001, 0b10001, 0b10101, 0b10101, 0b10101, 0b01010], // w
    [0b10001, 0b10001, 0b01010, 0b00100, 0b01010, 0b10001, 0b10001], // x
    [0b10001, 0b10001, 0b01010, 0b00100, 0b00100, 0b00100, 0b00100], // y
    [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b10000, 0b11111], // z
];

/// Symbol family a language's own letters are drawn with, when present in a
/// pool.
pub fn native_family(language: Language) -> Option<&'static str> {
    match language {
        Language::English => Some("latin"),
        Language::Bulgarian => Some("cyrillic"),
        Language::Arabic => Some("arabic"),
        Language::Custom => None,
    }
}

fn check_size(size: usize, what: &str) -> Result<()> {
    if size < 16 {
        return Err(Error::invalid(format!(
            "{what} glyphs need size >= 16, got {size}"
        )));
    }
    Ok(())
}

/// Braille cells for a through z: binary discs of radius size/10 on a 2x3
/// grid with pitch size/4, centered.
pub fn gen_braille(size: usize) -> Result<Vec<(String, GlyphBitmap)>> {
    check_size(size, "braille")?;
    let pitch = size as f64 / 4.0;
    let radius = size as f64 / 10.0;
    let center = size as f64 / 2.0;
    let r2 = radius * radius;
    BRAILLE_DOTS
        .iter()
        .enumerate()
        .map(|(i, dots)| {
            let name = char::from(b'a' + i as u8).to_string();
            let centers: Vec<(f64, f64)> = dots
                .iter()
                .map(|&d| {
                    let col = ((d - 1) / 3) as f64;
                    let row = ((d - 1) % 3) as f64;
                    (center + (col - 0.5) * pitch, center + (row - 1.0) * pitch)
                })
                .collect();
            let glyph = GlyphBitmap::from_fn(size, size, |x, y| {
                let px = x as f64 + 0.5;
                let py = y as f64 + 0.5;
                let hit = centers.iter().any(|&(cx, cy)| {
                    let dx = px - cx;
                    let dy = py - cy;
                    dx * dx + dy * dy <= r2
                });
                if hit {
                    1.0
                } else {
                    0.0
                }
            })?;
            Ok((name, glyph))
        })
        .collect()
}

/// Raw 2D cosine basis function for frequency pair (u, v), values in [-1, 1].
pub fn dct_basis_raw(size: usize, u: usize, v: usize) -> Vec<f64> {
    let n = size as f64;
    let fx: Vec<f64> = (0..size)
        .map(|x| (PI * u as f64 * (2.0 * x as f64 + 1.0) / (2.0 * n)).cos())
        .collect();
    let fy: Vec<f64> = (0..size)
        .map(|y| (PI * v as f64 * (2.0 * y as f64 + 1.0) / (2.0 * n)).cos())
        .collect();
    let mut out = Vec::with_capacity(size * size);
    for y in 0..size {
        for x in 0..size {
            out.push(fx[x] * fy[y]);
        }
    }
    out
}

/// Cosine basis patterns for all frequency pairs below `order`, mapped from
/// [-1, 1] to [0, 1] and enumerated in zig-zag order (ascending u+v, then u).
/// Names follow the frequency pair: u0v0, u0v1, u1v0, and so on.
pub fn gen_dct(size: usize, order: usize) -> Result<Vec<(String, GlyphBitmap)>> {
    if order == 0 {
        return Err(Error::invalid("dct order must be at least 1"));
    }
    if size < order {
        return Err(Error::invalid(format!(
            "dct glyphs need size >= order, got size {size} order {order}"
        )));
    }
    let mut pairs: Vec<(usize, usize)> = (0..order)
        .flat_map(|u| (0..order).map(move |v| (u, v)))
        .collect();
    pairs.sort_by_key(|&(u, v)| (u + v, u));
    pairs
        .into_iter()
        .map(|(u, v)| {
            let raw = dct_basis_raw(size, u, v);
            let pixels: Vec<f64> = raw.iter().map(|b| (b + 1.0) / 2.0).collect();
            let glyph = GlyphBitmap::new(size, size, pixels)?;
            Ok((format!("u{u}v{v}"), glyph))
        })
        .collect()
}

/// Latin letterforms on a 5x7 dot matrix: each table cell becomes a filled
/// size/8 square block, with the matrix centered in the bitmap.
pub fn gen_dotmatrix_latin(size: usize) -> Result<Vec<(String, GlyphBitmap)>> {
    check_size(size, "dot matrix")?;
    let block = size / 8;
    let x0 = (size - 5 * block) / 2;
    let y0 = (size - 7 * block) / 2;
    DOT_MATRIX
        .iter()
        .enumerate()
        .map(|(i, rows)| {
            let name = char::from(b'a' + i as u8).to_string();
            let glyph = GlyphBitmap::from_fn(size, size, |x, y| {
                if x < x0 || y < y0 {
                    return 0.0;
                }
                let col = (x - x0) / block;
                let row = (y - y0) / block;
                if col < 5 && row < 7 && rows[row] >> (4 - col) & 1 == 1 {
                    1.0
                } else {
                    0.0
                }
            })?;
            Ok((name, glyph))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct PoolEntry {
    pub family: String,
    pub name: String,
    pub glyph: GlyphBitmap,
}

/// Ordered glyph collection with uniform dimensions and unique
/// (family, name) identities.
#[derive(Clone, Debug)]
pub struct SymbolPool {
    entries: Vec<PoolEntry>,
}

impl SymbolPool {
    pub fn from_entries(entries: Vec<PoolEntry>) -> Result<SymbolPool> {
        if entries.is_empty() {
            return Err(Error::invalid("symbol pool cannot be empty"));
        }
        let first = &entries[0].glyph;
        for e in &entries {
            if !e.glyph.same_dims(first) {
                return Err(Error::AtlasEntry {
                    family: e.family.clone(),
                    name: e.name.clone(),
                    msg: format!(
                        "glyph is {}x{}, pool is {}x{}",
                        e.glyph.width(),
                        e.glyph.height(),
                        first.width(),
                        first.height()
                    ),
                });
            }
        }
        for (i, e) in entries.iter().enumerate() {
            if entries[..i]
                .iter()
                .any(|p| p.family == e.family && p.name == e.name)
            {
                return Err(Error::AtlasEntry {
                    family: e.family.clone(),
                    name: e.name.clone(),
                    msg: "duplicate pool entry".to_string(),
                });
            }
        }
        Ok(SymbolPool { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> &PoolEntry {
        &self.entries[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &PoolEntry> {
        self.entries.iter()
    }

    pub fn width(&self) -> usize {
        self.entries[0].glyph.width()
    }

    pub fn height(&self) -> usize {
        self.entries[0].glyph.height()
    }

    pub fn index_of(&self, family: &str, name: &str) -> Option<usize> {
        self.entries
            .iter()
            .position(|e| e.family == family && e.name == name)
    }

    /// "family:name" identifiers in pool order, used as matrix labels.
    pub fn labels(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|e| format!("{}:{}", e.family, e.name))
            .collect()
    }
}

fn default_glyph_size() -> usize {
    64
}

/// Declarative pool description. Generator families are regenerated from
/// parameters on load; file families reference PGM glyphs relative to the
/// manifest location.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasManifest {
    #[serde(default = "default_glyph_size")]
    pub size: usize,
    pub families: Vec<FamilySpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub family: String,
    pub source: GlyphSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<FileEntry>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlyphSource {
    Braille,
    Dct,
    DotmatrixLatin,
    Files,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileEntry {
    pub name: String,
    pub path: String,
}

impl AtlasManifest {
    /// The default pool: braille cells, order-6 cosine patterns, and dot
    /// matrix latin letters, 88 glyphs in that order.
    pub fn builtin_default() -> AtlasManifest {
        AtlasManifest {
            size: default_glyph_size(),
            families: vec![
                FamilySpec {
                    family: "braille".to_string(),
                    source: GlyphSource::Braille,
                    order: None,
                    entries: None,
                },
                FamilySpec {
                    family: "dct".to_string(),
                    source: GlyphSource::Dct,
                    order: Some(6),
                    entries: None,
                },
                FamilySpec {
                    family: "latin".to_string(),
                    source: GlyphSource::DotmatrixLatin,
                    order: None,
                    entries: None,
                },
            ],
        }
    }

    pub fn load(path: &Path) -> Result<AtlasManifest> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Atlas {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Materializes a manifest into a pool. File entry paths resolve relative to
/// `base_dir`.
pub fn build_pool(manifest: &AtlasManifest, base_dir: &Path) -> Result<SymbolPool> {
    let mut entries = Vec::new();
    for family in &manifest.families {
        match family.source {
            GlyphSource::Braille => {
                for (name, glyph) in gen_braille(manifest.size)? {
                    entries.push(PoolEntry {
                        family: family.family.clone(),
                        name,
                        glyph,
                    });
                }
            }
            GlyphSource::Dct => {
                let order = family.order.unwrap_or(6);
                for (name, glyph) in gen_dct(manifest.size, order)? {
                    entries.push(PoolEntry {
                        family: family.family.clone(),
                        name,
                        glyph,
                    });
                }
            }
            GlyphSource::DotmatrixLatin => {
                for (name, glyph) in gen_dotmatrix_latin(manifest.size)? {
                    entries.push(PoolEntry {
                        family: family.family.clone(),
                        name,
                        glyph,
                    });
                }
            }
            GlyphSource::Files => {
                let Some(file_entries) = &family.entries else {
                    return Err(Error::invalid(format!(
                        "family `{}` uses files but lists no entries",
                        family.family
                    )));
                };
                for fe in file_entries {
                    let glyph_path = base_dir.join(&fe.path);
                    let glyph = read_pgm(&glyph_path).map_err(|e| Error::AtlasEntry {
                        family: family.family.clone(),
                        name: fe.name.clone(),
                        msg: e.to_string(),
                    })?;
                    if glyph.width() != manifest.size || glyph.height() != manifest.size {
                        return Err(Error::AtlasEntry {
                            family: family.family.clone(),
                            name: fe.name.clone(),
                            msg: format!(
                                "glyph is {}x{}, manifest size is {}",
                                glyph.width(),
                                glyph.height(),
                                manifest.size
                            ),
                        });
                    }
                    entries.push(PoolEntry {
                        family: family.family.clone(),
                        name: fe.name.clone(),
                        glyph,
                    });
                }
            }
        }
    }
    SymbolPool::from_entries(entries)
}

/// Loads a manifest and materializes its pool in one step.
pub fn load_atlas(path: &Path) -> Result<SymbolPool> {
    let manifest = AtlasManifest::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    build_pool(&manifest, base)
}

/// The default 88 symbol pool at the given glyph size.
pub fn builtin_pool(size: usize) -> Result<SymbolPool> {
    let manifest = AtlasManifest {
        size,
        ..AtlasManifest::builtin_default()
    };
    build_pool(&manifest, Path::new("."))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgm::write_pgm;
    use tempfile::tempdir;

    #[test]
    fn braille_a_is_one_disc_in_the_upper_left() {
        let glyphs = gen_braille(64).unwrap();
        let (name, a) = &glyphs[0];
        assert_eq!(name, "a");
        let lit: Vec<(usize, usize)> = (0..64)
            .flat_map(|y| (0..64).map(move |x| (x, y)))
            .filter(|&(x, y)| a.get(x, y) == 1.0)
            .collect();
        // Dot 1 sits at (center - pitch/2, center - pitch) = (24, 16).
        let expected: usize = (0..64)
            .flat_map(|y| (0..64).map(move |x| (x, y)))
            .filter(|&(x, y)| {
                let dx = x as f64 + 0.5 - 24.0;
                let dy = y as f64 + 0.5 - 16.0;
                dx * dx + dy * dy <= 6.4 * 6.4
            })
            .count();
        assert_eq!(lit.len(), expected);
        assert!(expected > 100, "disc of radius 6.4 covers over 100 pixels");
        assert!(lit.iter().all(|&(x, y)| x < 32 && y < 32));
    }

    #[test]
    fn braille_k_is_vertically_symmetric() {
        // Dots 1 and 3 mirror about the cell's horizontal midline.
        let glyphs = gen_braille(64).unwrap();
        let k = &glyphs[10].1;
        for y in 0..64 {
            for x in 0..64 {
                assert_eq!(k.get(x, y), k.get(x, 63 - y), "asymmetry at ({x}, {y})");
            }
        }
    }

    #[test]
    fn braille_lit_area_scales_with_dot_count() {
        let glyphs = gen_braille(64).unwrap();
        let area = |g: &GlyphBitmap| g.pixels().iter().sum::<f64>();
        let a = area(&glyphs[0].1); // 1 dot
        let q = area(&glyphs[16].1); // 5 dots
        let ratio = q / a;
        assert!((4.5..=5.5).contains(&ratio), "ratio {ratio}");
        // All 26 cells are distinct patterns.
        for i in 0..26 {
            for j in 0..i {
                assert_ne!(glyphs[i].1, glyphs[j].1, "{} equals {}", glyphs[i].0, glyphs[j].0);
            }
        }
    }

    #[test]
    fn dct_enumerates_zigzag_and_maps_to_unit_range() {
        let glyphs = gen_dct(64, 6).unwrap();
        assert_eq!(glyphs.len(), 36);
        let names: Vec<&str> = glyphs.iter().take(6).map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["u0v0", "u0v1", "u1v0", "u0v2", "u1v1", "u2v0"]);
        // The constant basis maps to an all-ones bitmap.
        assert!(glyphs[0].1.pixels().iter().all(|&v| v == 1.0));
        // Any non-constant basis has mean 1/2 because the raw cosine sums to
        // zero over a full period set.
        let g = &glyphs[7].1;
        let mean = g.pixels().iter().sum::<f64>() / 4096.0;
        assert!((mean - 0.5).abs() < 1e-12, "mean {mean}");
    }

    #[test]
    fn dct_raw_bases_are_orthogonal() {
        let a = dct_basis_raw(32, 1, 2);
        let b = dct_basis_raw(32, 1, 3);
        let c = dct_basis_raw(32, 1, 2);
        let dot = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| x * y).sum::<f64>();
        let norm = |p: &[f64]| dot(p, p).sqrt();
        assert!(dot(&a, &b).abs() / (norm(&a) * norm(&b)) < 1e-12);
        assert!((dot(&a, &c) / (norm(&a) * norm(&c)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dct_rejects_degenerate_parameters() {
        assert!(gen_dct(64, 0).is_err());
        assert!(gen_dct(4, 6).is_err());
    }

    #[test]
    fn dot_matrix_blocks_are_centered_and_binary() {
        let glyphs = gen_dotmatrix_latin(64).unwrap();
        let t = &glyphs[19].1;
        // Block size 8, matrix origin (12, 4). Top row of T spans all five
        // columns.
        for x in 0..64 {
            let expected = if (12..52).contains(&x) { 1.0 } else { 0.0 };
            assert_eq!(t.get(x, 5), expected, "x = {x}");
        }
        assert!(t.pixels().iter().all(|&v| v == 0.0 || v == 1.0));
        // Nothing outside the 5x7 block grid.
        for y in 0..64 {
            for x in 0..64 {
                if !(12..52).contains(&x) || !(4..60).contains(&y) {
                    assert_eq!(t.get(x, y), 0.0, "({x}, {y})");
                }
            }
        }
    }

    #[test]
    fn dot_matrix_i_is_mirror_symmetric() {
        let glyphs = gen_dotmatrix_latin(64).unwrap();
        let i = &glyphs[8].1;
        for y in 0..64 {
            for x in 0..64 {
                assert_eq!(i.get(x, y), i.get(63 - x, y), "asymmetry at ({x}, {y})");
            }
        }
    }

    #[test]
    fn dot_matrix_l_covers_eleven_blocks() {
        let glyphs = gen_dotmatrix_latin(64).unwrap();
        let l = &glyphs[11].1;
        let lit = l.pixels().iter().sum::<f64>();
        // 7 blocks down the left edge plus 4 more across the bottom, 64
        // pixels each.
        assert_eq!(lit, 11.0 * 64.0);
    }

    #[test]
    fn builtin_pool_has_88_entries_in_family_order() {
        let pool = builtin_pool(64).unwrap();
        assert_eq!(pool.len(), 88);
        assert_eq!(pool.get(0).family, "braille");
        assert_eq!(pool.get(0).name, "a");
        assert_eq!(pool.get(26).family, "dct");
        assert_eq!(pool.get(26).name, "u0v0");
        assert_eq!(pool.index_of("latin", "a"), Some(62));
        assert_eq!(pool.index_of("latin", "z"), Some(87));
        assert_eq!(pool.index_of("cyrillic", "а"), None);
        assert_eq!(pool.labels()[0], "braille:a");
        assert_eq!(pool.width(), 64);
    }

    #[test]
    fn native_families_follow_the_language() {
        assert_eq!(native_family(Language::English), Some("latin"));
        assert_eq!(native_family(Language::Bulgarian), Some("cyrillic"));
        assert_eq!(native_family(Language::Arabic), Some("arabic"));
        assert_eq!(native_family(Language::Custom), None);
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("atlas.json");
        let m = AtlasManifest::builtin_default();
        m.save(&path).unwrap();
        let back = AtlasManifest::load(&path).unwrap();
        assert_eq!(back.size, 64);
        assert_eq!(back.families.len(), 3);
        assert_eq!(back.families[1].order, Some(6));
        assert_eq!(back.families[1].source, GlyphSource::Dct);
    }

    #[test]
    fn file_atlas_resolves_relative_to_manifest() {
        let dir = tempdir().unwrap();
        let glyph = GlyphBitmap::from_fn(64, 64, |x, _| if x < 32 { 1.0 } else { 0.0 }).unwrap();
        write_pgm(&dir.path().join("half.pgm"), &glyph).unwrap();
        let manifest = AtlasManifest {
            size: 64,
            families: vec![FamilySpec {
                family: "custom".to_string(),
                source: GlyphSource::Files,
                order: None,
                entries: Some(vec![FileEntry {
                    name: "half".to_string(),
                    path: "half.pgm".to_string(),
                }]),
            }],
        };
        let path = dir.path().join("atlas.json");
        manifest.save(&path).unwrap();
        let pool = load_atlas(&path).unwrap();
        assert_eq!(pool.len(), 1);
        assert_eq!(pool.get(0).glyph.get(0, 0), 1.0);
        assert_eq!(pool.get(0).glyph.get(63, 0), 0.0);
    }

    #[test]
    fn file_atlas_errors_name_the_entry() {
        let dir = tempdir().unwrap();
        let manifest = AtlasManifest {
            size: 64,
            families: vec![FamilySpec {
                family: "custom".to_string(),
                source: GlyphSource::Files,
                order: None,
                entries: Some(vec![FileEntry {
                    name: "ghost".to_string(),
                    path: "missing.pgm".to_string(),
                }]),
            }],
        };
        let err = build_pool(&manifest, dir.path()).unwrap_err().to_string();
        assert!(err.contains("custom:ghost"), "{err}");

        // Wrong-size file glyphs are rejected with the entry named.
        let small = GlyphBitmap::zeros(16, 16).unwrap();
        write_pgm(&dir.path().join("small.pgm"), &small).unwrap();
        let manifest2 = AtlasManifest {
            size: 64,
            families: vec![FamilySpec {
                family: "custom".to_string(),
                source: GlyphSource::Files,
                order: None,
                entries: Some(vec![FileEntry {
                    name: "small".to_string(),
                    path: "small.pgm".to_string(),
                }]),
            }],
        };
        let err2 = build_pool(&manifest2, dir.path()).unwrap_err().to_string();
        assert!(err2.contains("16x16"), "{err2}");

        // Duplicate identities are rejected.
        let g = GlyphBitmap::zeros(64, 64).unwrap();
        write_pgm(&dir.path().join("dup.pgm"), &g).unwrap();
        let manifest3 = AtlasManifest {
            size: 64,
            families: vec![FamilySpec {
                family: "custom".to_string(),
                source: GlyphSource::Files,
                order: None,
                entries: Some(vec![
                    FileEntry {
                        name: "dup".to_string(),
                        path: "dup.pgm".to_string(),
                    },
                    FileEntry {
                        name: "dup".to_string(),
                        path: "dup.pgm".to_string(),
                    },
                ]),
            }],
        };
        let err3 = build_pool(&manifest3, dir.path()).unwrap_err().to_string();
        assert!(err3.contains("duplicate"), "{err3}");
    }

    #[test]
    fn files_source_without_entries_is_rejected() {
        let manifest = AtlasManifest {
            size: 64,
            families: vec![FamilySpec {
                family: "empty".to_string(),
                source: GlyphSource::Files,
                order: None,
                entries: None,
            }],
        };
        let err = build_pool(&manifest, Path::new(".")).unwrap_err().to_string();
        assert!(err.contains("no entries"), "{err}");
    }
}
