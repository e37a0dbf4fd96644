//! Randomized p-values against pseudo-apunim values from the reused random
//! partitions, and Holm's step-down correction.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::vec::Vec;

use crate::metric::{self, AnalysisConfig, PartitionScoreMode};
use crate::model::Dataset;
use crate::stats;
use crate::{Error, Result};

/// Below this spread the null sample is treated as constant.
const ZERO_VARIANCE: f64 = 1e-14;

/// How the null sample is formed and tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum SignificanceMode {
    /// One null sample per group: partition `i` contributes the nDFU of the
    /// pseudo-group that stands in for the group (same size, same items),
    /// and the observed apunim is compared with the null values as a single
    /// new draw (`sd * sqrt(1 + 1/t)`).
    #[default]
    Calibrated,
    /// One null sample per dimension built from the partition scores, tested
    /// as a one-sample t-test of its mean (`sd / sqrt(t)`).
    Literal,
}

impl SignificanceMode {
    pub fn test_form(self) -> TestForm {
        match self {
            SignificanceMode::Calibrated => TestForm::Predictive,
            SignificanceMode::Literal => TestForm::MeanStandardError,
        }
    }
}

/// Scale of the t statistic's denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum TestForm {
    /// `T = (mean - observed) / (sd * sqrt(1 + 1/t))`
    Predictive,
    /// `T = (mean - observed) / (sd / sqrt(t))`
    MeanStandardError,
}

/// Pseudo-apunim values, one per random partition index.
#[derive(Debug, Clone, PartialEq)]
pub struct NullSample {
    pub rand_apunims: Vec<f64>,
    /// The baseline every pseudo-apunim was normalized with.
    pub rand_apriori: f64,
    /// Always true: the null sample is built from the very partitions that
    /// produced the apriori baseline.
    pub reused_partitions: bool,
}

impl NullSample {
    pub fn len(&self) -> usize {
        self.rand_apunims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rand_apunims.is_empty()
    }

    pub fn mean(&self) -> Option<f64> {
        stats::mean(&self.rand_apunims)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TTestOutcome {
    pub p_raw: f64,
    pub t_statistic: f64,
    pub degrees_of_freedom: usize,
    /// The null sample had (numerically) zero variance.
    pub degenerate_variance: bool,
}

/// Per-group significance after correction.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SignificanceResult {
    pub p_raw: f64,
    pub t_statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_corrected: f64,
    pub reject: bool,
    pub degenerate_variance: bool,
}

/// Two-sided Student-t test of the observed apunim against the null sample.
///
/// A constant null sample gives `p = 1` when it equals the observed value and
/// `p = 0` otherwise, flagged through `degenerate_variance`.
pub fn t_test(observed: f64, null: &NullSample, form: TestForm) -> Result<TTestOutcome> {
    let t = null.len();
    if t < 2 {
        return Err(Error::TooFewSamples(t));
    }
    let mean = stats::mean(&null.rand_apunims).unwrap_or(0.0);
    let sd = stats::sample_sd(&null.rand_apunims).unwrap_or(0.0);
    let df = t - 1;
    if sd < ZERO_VARIANCE {
        let same = (observed - mean).abs() < ZERO_VARIANCE;
        return Ok(TTestOutcome {
            p_raw: if same { 1.0 } else { 0.0 },
            t_statistic: if same {
                0.0
            } else if mean > observed {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            },
            degrees_of_freedom: df,
            degenerate_variance: true,
        });
    }
    let tf = t as f64;
    let scale = match form {
        TestForm::Predictive => libm::sqrt(1.0 + 1.0 / tf),
        TestForm::MeanStandardError => 1.0 / libm::sqrt(tf),
    };
    let t_statistic = (mean - observed) / (sd * scale);
    Ok(TTestOutcome {
        p_raw: stats::student_t_two_sided(t_statistic, df as f64),
        t_statistic,
        degrees_of_freedom: df,
        degenerate_variance: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolmOutcome {
    pub corrected: Vec<f64>,
    pub reject: Vec<bool>,
}

/// Holm step-down adjusted p-values, in input order.
///
/// `fwer` is given confidence-style (0.95 for a 0.05 test): a hypothesis is
/// rejected when its adjusted p-value is below `1 - fwer`.
pub fn holm_correct(p_values: &[f64], fwer: f64) -> Result<HolmOutcome> {
    if p_values.is_empty() {
        return Err(Error::EmptyPValues);
    }
    if !(fwer > 0.0 && fwer < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "fwer must lie in (0, 1), got {fwer}"
        )));
    }
    if let Some(&bad) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidPValue(bad));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));
    let mut corrected = alloc::vec![0.0; m];
    let mut running: f64 = 0.0;
    for (k, &i) in order.iter().enumerate() {
        let adjusted = ((m - k) as f64 * p_values[i]).min(1.0);
        running = running.max(adjusted);
        corrected[i] = running;
    }
    let level = 1.0 - fwer;
    let reject = corrected.iter().map(|&p| p < level).collect();
    Ok(HolmOutcome { corrected, reject })
}

/// Null sample for one dimension (and group, where the mode needs one) over a
/// caller-supplied filtered item set.
///
/// Partitions are regenerated from the same seeded streams the metric uses,
/// so the sample matches the one attached to [`metric::analyze_dimension`]
/// results for the same filtered set.
pub fn null_sample(
    dataset: &Dataset,
    filtered: &[&str],
    dimension: &str,
    group: Option<&str>,
    config: &AnalysisConfig,
) -> Result<NullSample> {
    config.validate()?;
    let dim = dataset.dimension_index(dimension)?;
    if filtered.is_empty() {
        return Err(Error::InvalidConfig("empty filtered set".to_owned()));
    }
    let positions = filtered
        .iter()
        .map(|id| dataset.item_position(id))
        .collect::<Result<Vec<_>>>()?;
    let group = match group {
        Some(name) => Some(
            dataset.dimensions()[dim]
                .group_index(name)
                .ok_or_else(|| Error::UnknownGroup {
                    dimension: dimension.to_owned(),
                    group: name.to_owned(),
                })? as u16,
        ),
        None => None,
    };
    let shared = config.significance_mode == SignificanceMode::Literal
        && config.partition_score_mode == PartitionScoreMode::Mean;
    if group.is_none() && !shared {
        return Err(Error::InvalidConfig(
            "this significance mode builds one null sample per group; a group is required".to_owned(),
        ));
    }
    let outcomes = metric::evaluate_items(dataset, dim, &positions, config);
    let outcomes: Vec<_> = outcomes.into_iter().flatten().collect();
    let baseline = match (config.partition_score_mode, group) {
        (PartitionScoreMode::SizeMatched, Some(g)) => metric::matched_apriori(&outcomes, g),
        _ => metric::dimension_apriori(&outcomes),
    };
    let baseline = baseline.ok_or_else(|| match group {
        Some(g) => Error::NoQualifyingItems(dataset.dimensions()[dim].groups()[g as usize].clone()),
        None => Error::NoAvailablePartitions(config.partitions),
    })?;
    if baseline >= 1.0 {
        return Err(Error::DegenerateApriori);
    }
    let rand_obs = if shared {
        metric::rand_obs_shared(&outcomes, config.partitions)
    } else {
        metric::rand_obs_matched(&outcomes, group.unwrap_or(0), config.partitions)
    };
    Ok(NullSample {
        rand_apunims: rand_obs
            .into_iter()
            .map(|o| (o - baseline) / (1.0 - baseline))
            .collect(),
        rand_apriori: baseline,
        reused_partitions: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn null(xs: &[f64]) -> NullSample {
        NullSample {
            rand_apunims: xs.to_vec(),
            rand_apriori: 0.0,
            reused_partitions: true,
        }
    }

    #[test]
    fn centered_observation() {
        for form in [TestForm::Predictive, TestForm::MeanStandardError] {
            let out = t_test(0.2, &null(&[0.1, 0.2, 0.3]), form).unwrap();
            assert!(out.t_statistic.abs() < 1e-12);
            assert!((out.p_raw - 1.0).abs() < 1e-12);
            assert_eq!(out.degrees_of_freedom, 2);
            assert!(!out.degenerate_variance);
        }
    }

    #[test]
    fn zero_variance_rule() {
        let z = null(&[0.0; 4]);
        let out = t_test(0.5, &z, TestForm::Predictive).unwrap();
        assert_eq!(out.p_raw, 0.0);
        assert!(out.degenerate_variance);
        let out = t_test(0.0, &z, TestForm::MeanStandardError).unwrap();
        assert_eq!(out.p_raw, 1.0);
        assert!(out.degenerate_variance);
        assert_eq!(
            t_test(0.0, &null(&[0.1]), TestForm::Predictive).unwrap_err(),
            Error::TooFewSamples(1)
        );
    }

    #[test]
    fn statistic_forms() {
        let n = null(&[0.0, 0.1, 0.2, 0.3]);
        let sd = stats::sample_sd(&n.rand_apunims).unwrap();
        let a = t_test(0.5, &n, TestForm::MeanStandardError).unwrap();
        assert!((a.t_statistic - (0.15 - 0.5) / (sd / 2.0)).abs() < 1e-12);
        let b = t_test(0.5, &n, TestForm::Predictive).unwrap();
        assert!((b.t_statistic - (0.15 - 0.5) / (sd * libm::sqrt(1.25))).abs() < 1e-12);
        assert!(b.p_raw > a.p_raw);
    }

    #[test]
    fn holm_reference() {
        let out = holm_correct(&[0.01, 0.04, 0.03], 0.95).unwrap();
        let expected = [0.03, 0.06, 0.06];
        for (g, e) in out.corrected.iter().zip(expected) {
            assert!((g - e).abs() < 1e-12);
        }
        assert_eq!(out.reject, [true, false, false]);

        assert_eq!(holm_correct(&[0.2], 0.95).unwrap().corrected, [0.2]);
        assert_eq!(holm_correct(&[1.0; 3], 0.95).unwrap().corrected, [1.0; 3]);
        assert_eq!(holm_correct(&[], 0.95).unwrap_err(), Error::EmptyPValues);
        assert_eq!(
            holm_correct(&[0.1, 1.2], 0.95).unwrap_err(),
            Error::InvalidPValue(1.2)
        );
        assert!(holm_correct(&[0.1], 1.0).is_err());
    }

    #[test]
    fn holm_clips_at_one() {
        let out = holm_correct(&[0.6, 0.7], 0.95).unwrap();
        assert_eq!(out.corrected, [1.0, 1.0]);
    }
}
