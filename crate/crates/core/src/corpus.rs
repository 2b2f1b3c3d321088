//! Text normalization and bigram statistics.
//!
//! Normalization reduces raw text to runs of in-alphabet letters. Characters
//! outside the alphabet end the current run; characters that are merely
//! dropped (diacritics, tatweel) do not. Bigrams are counted within runs
//! only, so word and sentence boundaries never contribute pairs.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use unicode_normalization::char::canonical_combining_class;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::matrix_csv::{read_matrix_csv, write_matrix_csv};

const ENGLISH_LETTERS: &str = "abcdefghijklmnopqrstuvwxyz";
const BULGARIAN_LETTERS: &str = "абвгдежзийклмнопрстуфхцчшщъьюя";
const ARABIC_LETTERS: &str = "ابتثجحخدذرزسشصضطظعغفقكلمنهوي";

const TATWEEL: char = '\u{0640}';
const ALIF_MAQSURA: char = '\u{0649}';
const TA_MARBUTA: char = '\u{0629}';
const YEH: char = '\u{064A}';
const TEH: char = '\u{062A}';
const CYRILLIC_I_GRAVE: char = '\u{045D}';
const CYRILLIC_I: char = '\u{0438}';

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Language {
    Arabic,
    Bulgarian,
    English,
    Custom,
}

impl Language {
    pub fn parse(s: &str) -> Result<Language> {
        match s {
            "arabic" => Ok(Language::Arabic),
            "bulgarian" => Ok(Language::Bulgarian),
            "english" => Ok(Language::English),
            "custom" => Ok(Language::Custom),
            other => Err(Error::UnknownLanguage(other.to_string())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Language::Arabic => "arabic",
            Language::Bulgarian => "bulgarian",
            Language::English => "english",
            Language::Custom => "custom",
        }
    }
}

/// Ordered letter set. Index positions are the row/column order of every
/// matrix keyed by letters.
#[derive(Clone, Debug)]
pub struct Alphabet {
    language: Language,
    letters: Vec<char>,
    index: HashMap<char, usize>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.language == other.language && self.letters == other.letters
    }
}

impl Alphabet {
    pub fn preset(language: Language) -> Result<Alphabet> {
        let letters = match language {
            Language::English => ENGLISH_LETTERS,
            Language::Bulgarian => BULGARIAN_LETTERS,
            Language::Arabic => ARABIC_LETTERS,
            Language::Custom => {
                return Err(Error::invalid(
                    "custom language has no preset alphabet; use Alphabet::custom",
                ))
            }
        };
        Self::build(language, letters.chars().collect())
    }

    pub fn custom(letters: Vec<char>) -> Result<Alphabet> {
        Self::build(Language::Custom, letters)
    }

    fn build(language: Language, letters: Vec<char>) -> Result<Alphabet> {
        if letters.is_empty() {
            return Err(Error::invalid("alphabet must have at least one letter"));
        }
        let mut index = HashMap::with_capacity(letters.len());
        for (i, &c) in letters.iter().enumerate() {
            if index.insert(c, i).is_some() {
                return Err(Error::invalid(format!("duplicate letter `{c}` in alphabet")));
            }
        }
        Ok(Alphabet {
            language,
            letters,
            index,
        })
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn contains(&self, c: char) -> bool {
        self.index.contains_key(&c)
    }
}

/// Reduces `text` to maximal runs of in-alphabet letters under the rules for
/// `language`:
///
/// * english: lowercase, keep a-z
/// * bulgarian: NFC, lowercase, fold grave-accented и onto и, keep the 30
///   letter alphabet
/// * arabic: NFKD, drop combining marks and tatweel without breaking the run,
///   fold alif maqsura onto yeh and ta marbuta onto teh, keep the 28 base
///   letters; a standalone hamza ends the run like any out-of-alphabet
///   character
pub fn normalize_text(text: &str, language: Language) -> Result<Vec<String>> {
    let alphabet = Alphabet::preset(language)?;
    let runs = match language {
        Language::English => runs_of(
            text.chars().flat_map(char::to_lowercase),
            &alphabet,
            |c| Some(c),
        ),
        Language::Bulgarian => runs_of(
            text.nfc().flat_map(char::to_lowercase),
            &alphabet,
            |c| Some(if c == CYRILLIC_I_GRAVE { CYRILLIC_I } else { c }),
        ),
        Language::Arabic => runs_of(text.nfkd(), &alphabet, |c| {
            if canonical_combining_class(c) != 0 || c == TATWEEL {
                return None;
            }
            Some(match c {
                ALIF_MAQSURA => YEH,
                TA_MARBUTA => TEH,
                other => other,
            })
        }),
        Language::Custom => {
            return Err(Error::invalid(
                "normalization rules exist for arabic, bulgarian, and english only",
            ))
        }
    };
    Ok(runs)
}

/// `map` returns None for characters dropped silently; mapped characters
/// outside the alphabet end the current run.
fn runs_of(
    chars: impl Iterator<Item = char>,
    alphabet: &Alphabet,
    map: impl Fn(char) -> Option<char>,
) -> Vec<String> {
    let mut runs = Vec::new();
    let mut cur = String::new();
    for c in chars {
        let Some(m) = map(c) else { continue };
        if alphabet.contains(m) {
            cur.push(m);
        } else if !cur.is_empty() {
            runs.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        runs.push(cur);
    }
    runs
}

/// Row-conditional bigram probabilities over an alphabet. Row i holds
/// P(next = j | current = i); rows for letters never observed are all zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BigramMatrix {
    alphabet: Alphabet,
    counts: Option<Vec<u64>>,
    probs: Vec<f64>,
}

impl BigramMatrix {
    /// Row-normalizes raw pair counts. Scaling all counts by a common factor
    /// leaves the probabilities bitwise unchanged.
    pub fn from_counts(alphabet: Alphabet, counts: Vec<u64>) -> Result<BigramMatrix> {
        let n = alphabet.len();
        if counts.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} counts for a {n}-letter alphabet, got {}",
                n * n,
                counts.len()
            )));
        }
        let mut probs = vec![0.0; n * n];
        for i in 0..n {
            let row = &counts[i * n..(i + 1) * n];
            let total: u64 = row.iter().sum();
            if total > 0 {
                let denom = total as f64;
                for (j, &c) in row.iter().enumerate() {
                    probs[i * n + j] = c as f64 / denom;
                }
            }
        }
        Ok(BigramMatrix {
            alphabet,
            counts: Some(counts),
            probs,
        })
    }

    /// Accepts ready-made row-conditional probabilities. Each row must sum
    /// to 1 within 1e-9 or be all zero.
    pub fn from_probs(alphabet: Alphabet, probs: Vec<f64>) -> Result<BigramMatrix> {
        let n = alphabet.len();
        if probs.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} probabilities for a {n}-letter alphabet, got {}",
                n * n,
                probs.len()
            )));
        }
        for (idx, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::invalid(format!(
                    "probability {p} at position {idx} is not a finite non-negative value"
                )));
            }
        }
        for i in 0..n {
            let sum: f64 = probs[i * n..(i + 1) * n].iter().sum();
            if sum != 0.0 && (sum - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "bigram row {i} sums to {sum}, expected 1 or 0"
                )));
            }
        }
        Ok(BigramMatrix {
            alphabet,
            counts: None,
            probs,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.len() + j]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Raw counts, present only when this matrix was built from a corpus.
    pub fn count(&self, i: usize, j: usize) -> Option<u64> {
        self.counts.as_ref().map(|c| c[i * self.len() + j])
    }
}

/// Counts bigrams across `docs`, skipping documents with fewer than
/// `min_letters` normalized letters. Errors if no document qualifies.
pub fn count_bigrams(docs: &[String], language: Language, min_letters: usize) -> Result<BigramMatrix> {
    let alphabet = Alphabet::preset(language)?;
    let n = alphabet.len();
    let mut counts = vec![0u64; n * n];
    let mut kept = 0usize;
    for doc in docs {
        let runs = normalize_text(doc, language)?;
        let letters: usize = runs.iter().map(|r| r.chars().count()).sum();
        if letters < min_letters {
            continue;
        }
        kept += 1;
        for run in &runs {
            let mut prev: Option<usize> = None;
            for c in run.chars() {
                let cur = alphabet
                    .index_of(c)
                    .expect("normalized runs contain only alphabet letters");
                if let Some(p) = prev {
                    counts[p * n + cur] += 1;
                }
                prev = Some(cur);
            }
        }
    }
    if kept == 0 {
        return Err(Error::EmptyCorpus { min_letters });
    }
    BigramMatrix::from_counts(alphabet, counts)
}

/// Reads corpus documents: a directory yields one document per file (sorted
/// by file name), a file yields one document, or one per line with
/// `per_line`.
pub fn read_documents(path: &Path, per_line: bool) -> Result<Vec<String>> {
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if meta.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|entry| {
                let entry = entry.ok()?;
                entry.file_type().ok()?.is_file().then(|| entry.path())
            })
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(Error::invalid(format!(
                "corpus directory {} contains no files",
                path.display()
            )));
        }
        files
            .iter()
            .map(|f| fs::read_to_string(f).map_err(|e| Error::io(f, e)))
            .collect()
    } else {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if per_line {
            Ok(text.lines().map(str::to_string).collect())
        } else {
            Ok(vec![text])
        }
    }
}

pub fn write_bigram_csv(path: &Path, bigrams: &BigramMatrix) -> Result<()> {
    let labels: Vec<String> = bigrams
        .alphabet()
        .letters()
        .iter()
        .map(|c| c.to_string())
        .collect();
    write_matrix_csv(path, &labels, bigrams.probs())
}

/// Reads a bigram probability matrix, recognizing the preset alphabets by
/// their letter sequence. Each row must sum to 1 within 1e-9 or be all zero.
pub fn read_bigram_csv(path: &Path) -> Result<BigramMatrix> {
    let m = read_matrix_csv(path)?;
    let mut letters = Vec::with_capacity(m.labels.len());
    for label in &m.labels {
        let mut chars = label.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => letters.push(c),
            _ => {
                return Err(Error::invalid(format!(
                    "{}: bigram label `{label}` is not a single letter",
                    path.display()
                )))
            }
        }
    }
    let language = [Language::English, Language::Bulgarian, Language::Arabic]
        .into_iter()
        .find(|&l| {
            Alphabet::preset(l)
                .map(|a| a.letters() == letters.as_slice())
                .unwrap_or(false)
        })
        .unwrap_or(Language::Custom);
    let alphabet = match language {
        Language::Custom => Alphabet::custom(letters)?,
        preset => Alphabet::preset(preset)?,
    };

    let n = alphabet.len();
    const TOL: f64 = 1e-9;
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
    BigramMatrix::from_probs(alphabet, m.values)
}
