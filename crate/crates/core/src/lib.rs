//! Optimizing which symbol renders which letter for sequential reading
//! through a simulated prosthetic display.
//!
//! The pipeline has four stages, each usable on its own:
//!
//! 1. [`corpus`] turns raw text into row-conditional bigram probabilities.
//! 2. [`glyphset`] builds a pool of candidate symbol glyphs, and
//!    [`phosphene`] plus [`temporal`] distort them the way an implanted
//!    display would: blurred dots with axonal tails, then two consecutive
//!    frames blended with a random mixing weight.
//! 3. [`observer`] estimates how often a template-correlation reader takes
//!    one distorted symbol for another, yielding a confusion matrix.
//! 4. [`assigner`] searches for the letter-to-symbol mapping that minimizes
//!    bigram-weighted confusion between consecutive symbols, and [`report`]
//!    renders the comparison against native and randomized mappings.
//!
//! Every random quantity comes from a counter-derived stream
//! ([`rng::substream`]), so results are reproducible bit for bit at any
//! thread count.

pub mod assigner;
pub mod corpus;
pub mod error;
pub mod glyph;
pub mod glyphset;
pub mod matrix_csv;
pub mod observer;
pub mod pgm;
pub mod phosphene;
pub mod report;
pub mod rng;
pub mod temporal;

pub use assigner::{
    brute_force, expected_confusion_cost, hungarian_lap, injective_map_count, native_assignment,
    native_mapping, optimize_alternating_lap, optimize_local_search, randomized_baseline,
    refine_local_search, AssignMethod, Assignment, RandomizedBaseline, BRUTE_FORCE_LIMIT,
};
pub use corpus::{
    count_bigrams, normalize_text, read_bigram_csv, read_documents, write_bigram_csv, Alphabet,
    BigramMatrix, Language,
};
pub use error::{Error, Result};
pub use glyph::GlyphBitmap;
pub use glyphset::{
    builtin_pool, dct_basis_raw, load_atlas, native_family, AtlasManifest, PoolEntry, SymbolPool,
};
pub use observer::{
    classify, estimate_confusion, read_confusion_csv, restrict_renormalize, write_confusion_csv,
    write_confusion_heatmap, ConfusionMatrix, ObserverConfig, TemplateBank,
};
pub use phosphene::{render_percept, DistortionLevel, DistortionParams};
pub use report::{
    format_scaled, AssignmentFile, EvaluationReport, MappingEntry, PresetReport, TABLE_SCALE,
};
pub use rng::{draw_distinct, substream, Stage};
pub use temporal::{mix, sample_gamma, MixConfig};
