//! Apriori and observed polarization, apunim, and the per-dimension analysis.
//!
//! For each filtered item the known-group annotations are partitioned `t`
//! times into pseudo-groups with the item's real group sizes. Those
//! partitions give the item's apriori polarization and, reused as-is, the
//! null sample for the significance test. Item work runs as an
//! order-preserving parallel map; every reduction walks items in dataset
//! order so results do not depend on the worker count.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::model::{AnnotationRecord, Dataset, LabelScale, ScaleKind};
use crate::partition::{partition_ndfu, shuffled_order, PartitionScheme, SeededStream};
use crate::polarization::{all_item_ndfus, check_alpha, filter_positions, ndfu_of};
use crate::significance::{self, holm_correct, NullSample, SignificanceMode, TestForm};
use crate::{par, Error, Result};

/// How one random partition is collapsed to a single polarization value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum PartitionScoreMode {
    /// Unweighted mean over pseudo-groups with at least `min_group`
    /// annotations. The apriori baseline is shared by every group of a
    /// dimension.
    #[default]
    Mean,
    /// Only the pseudo-group standing in for the group under study (same
    /// size). The baseline becomes per group.
    SizeMatched,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnalysisConfig {
    /// Item filter threshold; items need nDFU strictly above it.
    pub alpha: f64,
    /// Number of random partitions per item (`t`).
    pub partitions: usize,
    /// Confidence-style family-wise level, e.g. 0.95 for a 0.05 test.
    pub fwer: f64,
    pub master_seed: u64,
    /// Smallest (pseudo-)group that gets a histogram.
    pub min_group: usize,
    pub partition_score_mode: PartitionScoreMode,
    pub significance_mode: SignificanceMode,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            alpha: 0.2,
            partitions: 100,
            fwer: 0.95,
            master_seed: 0,
            min_group: 2,
            partition_score_mode: PartitionScoreMode::Mean,
            significance_mode: SignificanceMode::Calibrated,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.partitions == 0 {
            return Err(Error::InvalidConfig("partitions must be positive".to_owned()));
        }
        if !(self.fwer > 0.0 && self.fwer < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fwer must lie in (0, 1), got {}",
                self.fwer
            )));
        }
        if self.min_group < 2 {
            return Err(Error::InvalidConfig(format!(
                "min_group must be at least 2, got {}",
                self.min_group
            )));
        }
        Ok(())
    }

    /// Rejection threshold for corrected p-values.
    pub fn significance_level(&self) -> f64 {
        1.0 - self.fwer
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            alpha: self.alpha,
            partitions: self.partitions,
            fwer: self.fwer,
            significance_level: self.significance_level(),
            rejection_rule: "p_corrected < 1 - fwer".to_owned(),
            master_seed: self.master_seed,
            min_group: self.min_group,
            partition_score_mode: self.partition_score_mode,
            significance_mode: self.significance_mode,
            test_form: self.significance_mode.test_form(),
            support_semantics: "annotations by the group over its qualifying items".to_owned(),
        }
    }
}

/// Configuration as recorded in every report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConfigEcho {
    pub alpha: f64,
    pub partitions: usize,
    pub fwer: f64,
    pub significance_level: f64,
    pub rejection_rule: String,
    pub master_seed: u64,
    pub min_group: usize,
    pub partition_score_mode: PartitionScoreMode,
    pub significance_mode: SignificanceMode,
    pub test_form: TestForm,
    pub support_semantics: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GroupResult {
    pub dimension: String,
    pub group: String,
    pub apunim: f64,
    pub p_raw: f64,
    pub p_corrected: f64,
    pub reject: bool,
    pub t_statistic: f64,
    pub degrees_of_freedom: usize,
    pub degenerate_variance: bool,
    pub support: usize,
    pub n_items: usize,
    pub p_obs: f64,
    pub p_apr: f64,
}

/// Non-fatal conditions met while analyzing a dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize),
    serde(tag = "kind", rename_all = "snake_case")
)]
pub enum Diagnostic {
    EmptyFilteredSet,
    /// Filtered items where no group reaches `min_group` annotations, so no
    /// partition can be scored.
    DroppedItems { count: usize },
    NoQualifyingItems { group: String },
    DegenerateApriori { group: Option<String> },
    DegenerateNullVariance { group: String },
    /// Annotations on analyzed items whose annotator has no value for the
    /// dimension.
    MissingGroupAnnotations { count: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::EmptyFilteredSet => write!(f, "no item passed the polarization filter"),
            Diagnostic::DroppedItems { count } => write!(
                f,
                "{count} filtered item(s) dropped: no group reaches the minimum group size"
            ),
            Diagnostic::NoQualifyingItems { group } => write!(
                f,
                "group `{group}` omitted: no polarized item has enough of its annotations"
            ),
            Diagnostic::DegenerateApriori { group: None } => {
                write!(f, "apriori polarization is 1; apunim is undefined")
            }
            Diagnostic::DegenerateApriori { group: Some(g) } => {
                write!(f, "group `{g}` omitted: apriori polarization is 1")
            }
            Diagnostic::DegenerateNullVariance { group } => write!(
                f,
                "group `{group}`: null sample has zero variance; p-value set by convention"
            ),
            Diagnostic::MissingGroupAnnotations { count } => write!(
                f,
                "{count} annotation(s) by annotators without a value for this dimension were excluded"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DimensionReport {
    pub dimension: String,
    /// Items passing the filter (`|S_d|`).
    pub filtered_items: usize,
    /// Filtered items with at least one scorable partition.
    pub analyzed_items: usize,
    /// Dimension-level apriori polarization; `None` under size-matched
    /// scoring, where every group has its own baseline.
    pub p_apr: Option<f64>,
    pub groups: Vec<GroupResult>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ApunimReport {
    pub config: ConfigEcho,
    pub scale_kind: ScaleKind,
    /// Set for nominal scales, where unimodality depends on the bin order.
    pub nominal_scale_warning: bool,
    pub dimensions: Vec<DimensionReport>,
}

impl ApunimReport {
    pub fn dimension(&self, name: &str) -> Option<&DimensionReport> {
        self.dimensions.iter().find(|d| d.dimension == name)
    }

    pub fn group(&self, dimension: &str, group: &str) -> Option<&GroupResult> {
        self.dimension(dimension)?
            .groups
            .iter()
            .find(|g| g.group == group)
    }
}

/// Apunim: the observed polarization relative to the apriori baseline.
pub fn apunim(p_obs: f64, p_apr: f64) -> Result<f64> {
    if p_obs.is_nan() || p_apr.is_nan() || p_apr < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "polarization values out of range: p_obs = {p_obs}, p_apr = {p_apr}"
        )));
    }
    if p_apr >= 1.0 {
        return Err(Error::DegenerateApriori);
    }
    Ok((p_obs - p_apr) / (1.0 - p_apr))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AprioriEstimate {
    pub value: f64,
    /// Partitions that contributed.
    pub used: usize,
    /// Partitions without any qualifying pseudo-group.
    pub skipped: usize,
}

/// Mean partition score over `config.partitions` seeded partitions of
/// `annotations` into `sizes`, skipping partitions with no qualifying
/// pseudo-group. Partitions are always scored with the mean rule here.
pub fn apriori_with_sizes(
    annotations: &[AnnotationRecord],
    sizes: &[usize],
    scale: &LabelScale,
    stream: &SeededStream,
    config: &AnalysisConfig,
) -> Result<AprioriEstimate> {
    if config.partitions == 0 {
        return Err(Error::InvalidConfig("partitions must be positive".to_owned()));
    }
    let mut sum = 0.0;
    let mut used = 0;
    for i in 0..config.partitions {
        let p = PartitionScheme::random(annotations.len(), sizes, stream, i as u64)?;
        if let Some(v) = partition_ndfu(&p, annotations, scale, config.min_group)? {
            sum += v;
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::NoAvailablePartitions(config.partitions));
    }
    Ok(AprioriEstimate {
        value: sum / used as f64,
        used,
        skipped: config.partitions - used,
    })
}

/// Known-group annotations of an item under a dimension, ordered as the
/// engine partitions them.
struct ItemLayout<'a> {
    /// Label sets, annotation order, missing-group annotations removed.
    labels: Vec<&'a [u16]>,
    /// Real group of each entry in `labels`.
    groups: Vec<u16>,
    /// Present groups in dimension order with their sizes.
    present: Vec<(u16, usize)>,
    missing: usize,
}

fn layout(dataset: &Dataset, dim: usize, item: usize) -> ItemLayout<'_> {
    let it = dataset.item_at(item);
    let n_groups = dataset.dimensions()[dim].groups().len();
    let mut sizes = vec![0usize; n_groups];
    let mut labels = Vec::with_capacity(it.annotations.len());
    let mut groups = Vec::with_capacity(it.annotations.len());
    let mut missing = 0;
    for (a, &p) in it.annotations.iter().zip(&it.annotators) {
        match dataset.group_of(dim, p) {
            Some(g) => {
                sizes[g as usize] += 1;
                labels.push(a.values());
                groups.push(g);
            }
            None => missing += 1,
        }
    }
    let present = sizes
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0)
        .map(|(g, &s)| (g as u16, s))
        .collect();
    ItemLayout {
        labels,
        groups,
        present,
        missing,
    }
}

/// Apriori polarization of one item under `dimension`, using the item's group
/// sizes and the same seeded partitions as [`analyze_dimension`].
pub fn apriori_item(
    dataset: &Dataset,
    item_id: &str,
    dimension: &str,
    config: &AnalysisConfig,
) -> Result<AprioriEstimate> {
    let item = dataset.item_position(item_id)?;
    let dim = dataset.dimension_index(dimension)?;
    let lay = layout(dataset, dim, item);
    let it = dataset.item_at(item);
    let known: Vec<AnnotationRecord> = it
        .annotations
        .iter()
        .zip(&it.annotators)
        .filter(|(_, &p)| dataset.group_of(dim, p).is_some())
        .map(|(a, _)| a.clone())
        .collect();
    if known.is_empty() {
        return Err(Error::EmptyAnnotations);
    }
    let sizes: Vec<usize> = lay.present.iter().map(|&(_, s)| s).collect();
    let stream = SeededStream::for_item(config.master_seed, dimension, item_id);
    apriori_with_sizes(&known, &sizes, dataset.scale(), &stream, config)
}

pub(crate) struct GroupOutcome {
    pub(crate) group: u16,
    pub(crate) size: usize,
    pub(crate) observed: f64,
    /// nDFU of the matching pseudo-group in every partition.
    pub(crate) pseudo: Vec<f64>,
}

pub(crate) struct ItemOutcome {
    pub(crate) missing: usize,
    /// Mean-rule score of every partition.
    pub(crate) partition_scores: Vec<f64>,
    /// Groups with at least `min_group` annotations on this item.
    pub(crate) groups: Vec<GroupOutcome>,
}

impl ItemOutcome {
    fn apriori(&self) -> f64 {
        mean_of(&self.partition_scores)
    }

    fn group(&self, g: u16) -> Option<&GroupOutcome> {
        self.groups.iter().find(|o| o.group == g)
    }
}

fn mean_of(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn evaluate_item(
    dataset: &Dataset,
    dim: usize,
    item: usize,
    config: &AnalysisConfig,
) -> Option<ItemOutcome> {
    let lay = layout(dataset, dim, item);
    if lay.present.iter().all(|&(_, s)| s < config.min_group) {
        return None;
    }
    let levels = dataset.scale().level_count();
    let mut counts = Vec::with_capacity(levels);
    let mut groups: Vec<GroupOutcome> = lay
        .present
        .iter()
        .filter(|&&(_, s)| s >= config.min_group)
        .map(|&(g, size)| {
            let own = lay
                .labels
                .iter()
                .zip(&lay.groups)
                .filter(|(_, &og)| og == g)
                .map(|(l, _)| *l);
            GroupOutcome {
                group: g,
                size,
                observed: ndfu_of(own, levels, &mut counts).unwrap_or(0.0),
                pseudo: Vec::with_capacity(config.partitions),
            }
        })
        .collect();

    let dimension = dataset.dimensions()[dim].name();
    let stream = SeededStream::for_item(config.master_seed, dimension, &dataset.item_at(item).id);
    let n = lay.labels.len();
    let mut perm = Vec::with_capacity(n);
    let mut partition_scores = Vec::with_capacity(config.partitions);
    for i in 0..config.partitions {
        shuffled_order(&mut perm, n, &stream, i as u64);
        let mut offset = 0;
        let mut sum = 0.0;
        let mut k = 0;
        let mut slot = 0;
        for &(_, size) in &lay.present {
            let chunk = &perm[offset..offset + size];
            offset += size;
            if size < config.min_group {
                continue;
            }
            let v = ndfu_of(chunk.iter().map(|&j| lay.labels[j as usize]), levels, &mut counts)
                .unwrap_or(0.0);
            groups[slot].pseudo.push(v);
            slot += 1;
            sum += v;
            k += 1;
        }
        partition_scores.push(sum / k as f64);
    }
    Some(ItemOutcome {
        missing: lay.missing,
        partition_scores,
        groups,
    })
}

/// Evaluates items in parallel; `None` marks items without any scorable
/// partition.
pub(crate) fn evaluate_items(
    dataset: &Dataset,
    dim: usize,
    positions: &[usize],
    config: &AnalysisConfig,
) -> Vec<Option<ItemOutcome>> {
    par::map_range(positions.len(), |k| {
        evaluate_item(dataset, dim, positions[k], config)
    })
}

/// Mean over items of the items' apriori polarization.
pub(crate) fn dimension_apriori(outcomes: &[ItemOutcome]) -> Option<f64> {
    if outcomes.is_empty() {
        return None;
    }
    let sum: f64 = outcomes.iter().map(ItemOutcome::apriori).sum();
    Some(sum / outcomes.len() as f64)
}

/// Size-matched baseline: mean over the group's qualifying items of its
/// pseudo-group's average nDFU.
pub(crate) fn matched_apriori(outcomes: &[ItemOutcome], g: u16) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0;
    for o in outcomes {
        if let Some(go) = o.group(g) {
            sum += mean_of(&go.pseudo);
            n += 1;
        }
    }
    (n > 0).then(|| sum / n as f64)
}

/// Per partition index, the mean partition score over all items.
pub(crate) fn rand_obs_shared(outcomes: &[ItemOutcome], t: usize) -> Vec<f64> {
    let mut sums = vec![0.0; t];
    for o in outcomes {
        for (s, v) in sums.iter_mut().zip(&o.partition_scores) {
            *s += v;
        }
    }
    let n = outcomes.len() as f64;
    sums.into_iter().map(|s| s / n).collect()
}

/// Per partition index, the mean nDFU of the group's matched pseudo-group
/// over the group's qualifying items.
pub(crate) fn rand_obs_matched(outcomes: &[ItemOutcome], g: u16, t: usize) -> Vec<f64> {
    let mut sums = vec![0.0; t];
    let mut n = 0usize;
    for o in outcomes {
        if let Some(go) = o.group(g) {
            for (s, v) in sums.iter_mut().zip(&go.pseudo) {
                *s += v;
            }
            n += 1;
        }
    }
    sums.into_iter().map(|s| s / n as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ObservedPolarization {
    pub p_obs: f64,
    pub support: usize,
    pub n_items: usize,
}

/// Mean nDFU of the group's own annotations over the filtered items where the
/// group has at least `min_group` annotations.
pub fn observed_group(
    dataset: &Dataset,
    filtered: &[&str],
    dimension: &str,
    group: &str,
    config: &AnalysisConfig,
) -> Result<ObservedPolarization> {
    let dim = dataset.dimension_index(dimension)?;
    let g = dataset.dimensions()[dim]
        .group_index(group)
        .ok_or_else(|| Error::UnknownGroup {
            dimension: dimension.to_owned(),
            group: group.to_owned(),
        })? as u16;
    let levels = dataset.scale().level_count();
    let mut counts = Vec::with_capacity(levels);
    let mut sum = 0.0;
    let mut support = 0;
    let mut n_items = 0;
    for id in filtered {
        let item = dataset.item_position(id)?;
        let lay = layout(dataset, dim, item);
        let size = lay
            .present
            .iter()
            .find(|&&(pg, _)| pg == g)
            .map_or(0, |&(_, s)| s);
        if size < config.min_group {
            continue;
        }
        let own = lay
            .labels
            .iter()
            .zip(&lay.groups)
            .filter(|(_, &og)| og == g)
            .map(|(l, _)| *l);
        sum += ndfu_of(own, levels, &mut counts).unwrap_or(0.0);
        support += size;
        n_items += 1;
    }
    if n_items == 0 {
        return Err(Error::NoQualifyingItems(group.to_owned()));
    }
    Ok(ObservedPolarization {
        p_obs: sum / n_items as f64,
        support,
        n_items,
    })
}

fn analyze_at(
    dataset: &Dataset,
    dim: usize,
    item_ndfus: &[f64],
    config: &AnalysisConfig,
) -> DimensionReport {
    let dimension = &dataset.dimensions()[dim];
    let positions = filter_positions(dataset, dim, config.alpha, item_ndfus);
    let mut report = DimensionReport {
        dimension: dimension.name().to_owned(),
        filtered_items: positions.len(),
        analyzed_items: 0,
        p_apr: None,
        groups: Vec::new(),
        diagnostics: Vec::new(),
    };
    if positions.is_empty() {
        report.diagnostics.push(Diagnostic::EmptyFilteredSet);
        return report;
    }
    let outcomes: Vec<ItemOutcome> = evaluate_items(dataset, dim, &positions, config)
        .into_iter()
        .flatten()
        .collect();
    report.analyzed_items = outcomes.len();
    let dropped = positions.len() - outcomes.len();
    if dropped > 0 {
        report.diagnostics.push(Diagnostic::DroppedItems { count: dropped });
    }
    let missing: usize = outcomes.iter().map(|o| o.missing).sum();
    if missing > 0 {
        report
            .diagnostics
            .push(Diagnostic::MissingGroupAnnotations { count: missing });
    }
    let Some(shared_apriori) = dimension_apriori(&outcomes) else {
        return report;
    };
    if config.partition_score_mode == PartitionScoreMode::Mean {
        report.p_apr = Some(shared_apriori);
        if shared_apriori >= 1.0 {
            report
                .diagnostics
                .push(Diagnostic::DegenerateApriori { group: None });
            return report;
        }
    }

    let form = config.significance_mode.test_form();
    let shared_null = (config.significance_mode == SignificanceMode::Literal
        && config.partition_score_mode == PartitionScoreMode::Mean)
        .then(|| rand_obs_shared(&outcomes, config.partitions));

    let mut pending = Vec::new();
    for (gi, name) in dimension.groups().iter().enumerate() {
        let g = gi as u16;
        let mut sum = 0.0;
        let mut support = 0;
        let mut n_items = 0;
        for o in &outcomes {
            if let Some(go) = o.group(g) {
                sum += go.observed;
                support += go.size;
                n_items += 1;
            }
        }
        if n_items == 0 {
            report
                .diagnostics
                .push(Diagnostic::NoQualifyingItems { group: name.clone() });
            continue;
        }
        let p_obs = sum / n_items as f64;
        let p_apr = match config.partition_score_mode {
            PartitionScoreMode::Mean => shared_apriori,
            PartitionScoreMode::SizeMatched => matched_apriori(&outcomes, g).unwrap_or(1.0),
        };
        let Ok(value) = apunim(p_obs, p_apr) else {
            report.diagnostics.push(Diagnostic::DegenerateApriori {
                group: Some(name.clone()),
            });
            continue;
        };
        let rand_obs = match &shared_null {
            Some(shared) => shared.clone(),
            None => rand_obs_matched(&outcomes, g, config.partitions),
        };
        let null = NullSample {
            rand_apunims: rand_obs
                .into_iter()
                .map(|o| (o - p_apr) / (1.0 - p_apr))
                .collect(),
            rand_apriori: p_apr,
            reused_partitions: true,
        };
        let test = significance::t_test(value, &null, form).unwrap_or(significance::TTestOutcome {
            p_raw: f64::NAN,
            t_statistic: f64::NAN,
            degrees_of_freedom: 0,
            degenerate_variance: false,
        });
        if test.degenerate_variance {
            report
                .diagnostics
                .push(Diagnostic::DegenerateNullVariance { group: name.clone() });
        }
        pending.push(GroupResult {
            dimension: dimension.name().to_owned(),
            group: name.clone(),
            apunim: value,
            p_raw: test.p_raw,
            p_corrected: f64::NAN,
            reject: false,
            t_statistic: test.t_statistic,
            degrees_of_freedom: test.degrees_of_freedom,
            degenerate_variance: test.degenerate_variance,
            support,
            n_items,
            p_obs,
            p_apr,
        });
    }
    if !pending.is_empty() {
        let ps: Vec<f64> = pending.iter().map(|r| r.p_raw).collect();
        if let Ok(holm) = holm_correct(&ps, config.fwer) {
            for (r, (p, rej)) in pending
                .iter_mut()
                .zip(holm.corrected.into_iter().zip(holm.reject))
            {
                r.p_corrected = p;
                r.reject = rej;
            }
        }
    }
    report.groups = pending;
    report
}

fn check_analysis_config(config: &AnalysisConfig) -> Result<()> {
    config.validate()?;
    if config.partitions < 2 {
        return Err(Error::InvalidConfig(
            "the significance test needs at least two partitions".to_owned(),
        ));
    }
    Ok(())
}

/// Full analysis of one dimension: filter, baseline, observed polarization,
/// apunim and corrected significance per group (declaration order).
pub fn analyze_dimension(
    dataset: &Dataset,
    dimension: &str,
    config: &AnalysisConfig,
) -> Result<DimensionReport> {
    check_analysis_config(config)?;
    let dim = dataset.dimension_index(dimension)?;
    let ndfus = all_item_ndfus(dataset);
    Ok(analyze_at(dataset, dim, &ndfus, config))
}

/// Analysis restricted to the named dimensions, in the given order.
pub fn analyze_dimensions<S: AsRef<str>>(
    dataset: &Dataset,
    dimensions: &[S],
    config: &AnalysisConfig,
) -> Result<ApunimReport> {
    check_analysis_config(config)?;
    let dims = dimensions
        .iter()
        .map(|d| dataset.dimension_index(d.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let ndfus = all_item_ndfus(dataset);
    Ok(ApunimReport {
        config: config.echo(),
        scale_kind: dataset.scale().kind(),
        nominal_scale_warning: dataset.scale().is_nominal(),
        dimensions: dims
            .into_iter()
            .map(|d| analyze_at(dataset, d, &ndfus, config))
            .collect(),
    })
}

/// Analysis of every registered dimension.
pub fn analyze_all(dataset: &Dataset, config: &AnalysisConfig) -> Result<ApunimReport> {
    let names: Vec<String> = dataset
        .dimensions()
        .iter()
        .map(|d| d.name().to_string())
        .collect();
    analyze_dimensions(dataset, &names, config)
}
