use alloc::string::String;

use thiserror::Error;

/// Errors raised by the polarization engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid label scale: {0}")]
    InvalidScale(String),
    #[error("invalid dimension `{name}`: {reason}")]
    InvalidDimension { name: String, reason: String },
    #[error("value out of scale: bin {index} on a {levels}-level scale")]
    ValueOutOfScale { index: usize, levels: usize },
    #[error("annotation by `{annotator}` on item `{item}` has no values")]
    EmptyValueSet { item: String, annotator: String },
    #[error("conflicting duplicate annotation for item `{item}` by annotator `{annotator}`")]
    ConflictingDuplicate { item: String, annotator: String },
    #[error("conflicting profiles for annotator `{0}`")]
    ConflictingProfile(String),
    #[error("annotator `{0}` referenced but not profiled")]
    MissingProfile(String),
    #[error("unknown item `{0}`")]
    UnknownItem(String),
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("unknown group `{group}` in dimension `{dimension}`")]
    UnknownGroup { dimension: String, group: String },
    #[error("empty annotation list")]
    EmptyAnnotations,
    #[error("zero-total histogram")]
    EmptyHistogram,
    #[error("histogram has {got} bins but the scale has {expected} levels")]
    BinCountMismatch { got: usize, expected: usize },
    #[error("partition sizes sum to {sum} but {expected} annotations were given")]
    SizeMismatch { sum: usize, expected: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("degenerate apriori polarization (p_apr = 1)")]
    DegenerateApriori,
    #[error("none of the {0} partitions had a qualifying pseudo-group")]
    NoAvailablePartitions(usize),
    #[error("no qualifying items for group `{0}`")]
    NoQualifyingItems(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("p-value {0} outside [0, 1]")]
    InvalidPValue(f64),
    #[error("empty p-value list")]
    EmptyPValues,
    #[error("a t-test needs at least two null samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
