//! Semantic role labeling as dependency parsing.
//!
//! PropBank-style SRL frames are packed into the edge labels of the
//! syntactic dependency tree ("joint labels") and recovered losslessly for
//! the three dominant structural patterns. The crate covers the whole
//! pipeline: the label codec, forward/backward conversion, corpus pattern
//! statistics, a projective maximum spanning tree decoder, a trainable
//! transformer + deep-biaffine parser over the joint label space, span-based
//! evaluation, and the corpus file formats.

pub mod analyze;
pub mod convert;
pub mod core;
pub mod decode;
pub mod error;
pub mod eval;
pub mod io;
pub mod model;
pub mod scalar;

pub use scalar::Scalar;

/// Arc scores at single precision.
pub type ArcScores32 = decode::ArcScoreMatrix<f32>;
/// Arc scores at double precision, the default for decoding tests.
pub type ArcScores64 = decode::ArcScoreMatrix<f64>;
/// The joint parser at single precision.
pub type Parser32 = model::JointParser<f32>;
/// The joint parser at double precision, the default for training and the
/// only choice for gradient checking.
pub type Parser64 = model::JointParser<f64>;
