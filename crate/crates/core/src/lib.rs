//! Polarization attribution for annotated datasets.
//!
//! The crate measures how much of the disagreement in an annotation task can
//! be attributed to a group of annotators (for example all annotators who
//! share a gender or an education level). The building blocks are:
//!
//! * [`polarization`]: histograms and the normalized distance from
//!   unimodality (nDFU) of an annotation multiset, plus the item filter.
//! * [`partition`]: reproducible stratified random partitions that break up
//!   any real group structure and provide the apriori baseline.
//! * [`metric`]: observed and apriori polarization, the apunim value and the
//!   per-dimension orchestration.
//! * [`significance`]: randomized p-values and Holm's step-down correction.
//! * [`synth`]: a synthetic data generator with known ground truth and the
//!   annotator-count sensitivity analysis.
//!
//! The crate is `no_std` (with `alloc`). The `parallel` feature enables a
//! rayon-backed item map; results never depend on the worker count.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod par;

pub mod metric;
pub mod model;
pub mod partition;
pub mod polarization;
pub mod significance;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use metric::{
    analyze_all, analyze_dimension, analyze_dimensions, apriori_item, apriori_with_sizes, apunim,
    observed_group, AnalysisConfig, ApunimReport, AprioriEstimate, ConfigEcho, Diagnostic,
    DimensionReport, GroupResult, ObservedPolarization, PartitionScoreMode,
};
pub use model::{
    group_annotations, AnnotationRecord, AnnotatorProfile, Dataset, DatasetBuilder, Dimension,
    GroupedAnnotations, LabelScale, ScaleKind,
};
pub use partition::{partition_ndfu, random_partition, PartitionScheme, SeededStream};
pub use polarization::{
    build_histogram, filter_items, item_ndfu, ndfu, Histogram, PolarizationScore,
};
pub use significance::{
    holm_correct, null_sample, t_test, HolmOutcome, NullSample, SignificanceMode,
    SignificanceResult, TTestOutcome, TestForm,
};
