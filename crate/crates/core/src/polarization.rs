//! Histograms, the normalized distance from unimodality (nDFU) and the item
//! filter.
//!
//! For frequencies `f` with mode `m` (lowest index on ties), the distance
//! from unimodality is the largest rise `f[j] - f[i]` over pairs that move
//! away from the mode: `m <= i < j` on the right and `j < i <= m` on the left.
//! Dividing by `f[m]` maps it onto `[0, 1]`. A running minimum on each side
//! gives the value in one pass, and the ratio is taken directly on counts.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{AnnotationRecord, Dataset, LabelScale};
use crate::{par, Error, Result};

/// Bin counts over a label scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: Vec<u32>,
    total: u64,
}

impl Histogram {
    pub fn from_counts(counts: Vec<u32>) -> Self {
        let total = counts.iter().map(|&c| c as u64).sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.total as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

/// A polarization value in `[0, 1]` together with the number of annotations
/// it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolarizationScore {
    pub value: f64,
    pub n_annotations: usize,
}

/// Counts every selected bin of every annotation once.
pub fn build_histogram<'a, I>(annotations: I, scale: &LabelScale) -> Result<Histogram>
where
    I: IntoIterator<Item = &'a AnnotationRecord>,
{
    let levels = scale.level_count();
    let mut counts = vec![0u32; levels];
    let mut seen = false;
    for a in annotations {
        seen = true;
        for &v in a.values() {
            let slot = counts.get_mut(v as usize).ok_or(Error::ValueOutOfScale {
                index: v as usize,
                levels,
            })?;
            *slot += 1;
        }
    }
    if !seen {
        return Err(Error::EmptyAnnotations);
    }
    Ok(Histogram::from_counts(counts))
}

/// nDFU of raw bin counts; `None` when every count is zero.
pub fn ndfu_counts(counts: &[u32]) -> Option<f64> {
    let mut mode = 0;
    let mut peak = 0u32;
    for (i, &c) in counts.iter().enumerate() {
        if c > peak {
            peak = c;
            mode = i;
        }
    }
    if peak == 0 {
        return None;
    }
    let mut rise = 0u32;
    let mut low = peak;
    for &c in &counts[mode + 1..] {
        low = low.min(c);
        rise = rise.max(c - low);
    }
    low = peak;
    for &c in counts[..mode].iter().rev() {
        low = low.min(c);
        rise = rise.max(c - low);
    }
    Some(rise as f64 / peak as f64)
}

pub fn ndfu(histogram: &Histogram) -> Result<PolarizationScore> {
    let value = ndfu_counts(&histogram.counts).ok_or(Error::EmptyHistogram)?;
    Ok(PolarizationScore {
        value,
        n_annotations: histogram.total as usize,
    })
}

/// Fills `counts` (resized to `levels`) from label sets and returns the nDFU.
pub(crate) fn ndfu_of<'a, I>(labels: I, levels: usize, counts: &mut Vec<u32>) -> Option<f64>
where
    I: IntoIterator<Item = &'a [u16]>,
{
    counts.clear();
    counts.resize(levels, 0);
    for set in labels {
        for &v in set {
            counts[v as usize] += 1;
        }
    }
    ndfu_counts(counts)
}

pub fn item_ndfu(dataset: &Dataset, item_id: &str) -> Result<PolarizationScore> {
    let annotations = dataset
        .annotations(item_id)
        .ok_or_else(|| Error::UnknownItem(item_id.to_string()))?;
    let h = build_histogram(annotations, dataset.scale())?;
    let score = ndfu(&h)?;
    Ok(PolarizationScore {
        value: score.value,
        n_annotations: annotations.len(),
    })
}

/// nDFU of every item, in dataset order.
pub(crate) fn all_item_ndfus(dataset: &Dataset) -> Vec<f64> {
    let levels = dataset.scale().level_count();
    par::map_range(dataset.item_count(), |i| {
        let mut counts = Vec::with_capacity(levels);
        let item = dataset.item_at(i);
        ndfu_of(item.annotations.iter().map(|a| a.values()), levels, &mut counts).unwrap_or(0.0)
    })
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(alloc::format!(
            "alpha must lie in [0, 1], got {alpha}"
        )))
    }
}

/// Positions of the items that pass the filter: nDFU strictly above `alpha`
/// and at least two distinct non-missing groups.
pub(crate) fn filter_positions(
    dataset: &Dataset,
    dimension: usize,
    alpha: f64,
    item_ndfus: &[f64],
) -> Vec<usize> {
    (0..dataset.item_count())
        .filter(|&i| item_ndfus[i] > alpha && dataset.distinct_groups(i, dimension) > 1)
        .collect()
}

/// Items whose overall nDFU strictly exceeds `alpha` and whose annotators span
/// at least two groups of `dimension`, in dataset order.
pub fn filter_items<'a>(dataset: &'a Dataset, dimension: &str, alpha: f64) -> Result<Vec<&'a str>> {
    check_alpha(alpha)?;
    let dim = dataset.dimension_index(dimension)?;
    let ndfus = all_item_ndfus(dataset);
    Ok(filter_positions(dataset, dim, alpha, &ndfus)
        .into_iter()
        .map(|i| dataset.item_at(i).id.as_str())
        .collect())
}
