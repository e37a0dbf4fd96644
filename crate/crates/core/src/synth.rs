//! Synthetic datasets with known ground truth and the annotator-count
//! sensitivity curve.
//!
//! Every item gets its own annotators. Group membership per item follows the
//! requested proportions exactly (largest-remainder quotas, then shuffled),
//! so every item sees every group whose quota is non-zero.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{AnnotationRecord, AnnotatorProfile, Dataset, Dimension, LabelScale};
use crate::partition::SeededStream;
use crate::polarization::ndfu_counts;
use crate::{par, stats, Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyntheticDimension {
    pub name: String,
    /// `(group, proportion)` in declaration order; proportions sum to 1.
    pub proportions: Vec<(String, f64)>,
}

impl SyntheticDimension {
    pub fn new<S: Into<String>>(name: impl Into<String>, proportions: impl IntoIterator<Item = (S, f64)>) -> Self {
        Self {
            name: name.into(),
            proportions: proportions.into_iter().map(|(g, p)| (g.into(), p)).collect(),
        }
    }

    /// Groups of equal share.
    pub fn balanced<S: Into<String>>(name: impl Into<String>, groups: impl IntoIterator<Item = S>) -> Self {
        let groups: Vec<String> = groups.into_iter().map(Into::into).collect();
        let p = 1.0 / groups.len() as f64;
        Self {
            name: name.into(),
            proportions: groups.into_iter().map(|g| (g, p)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "snake_case")
)]
pub enum Effect {
    #[default]
    None,
    /// On `round(strength * n_items)` items, `group_low` annotates the first
    /// level and `group_high` the last one.
    PlantedBimodal {
        dimension: String,
        group_low: String,
        group_high: String,
        strength: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyntheticSpec {
    pub n_items: usize,
    pub annotators_per_item: usize,
    pub dimensions: Vec<SyntheticDimension>,
    pub effect: Effect,
    pub scale: LabelScale,
    /// Probability that an annotation is replaced by a uniform random level.
    pub noise: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// `n_items` items on a 5-level ordinal scale with one balanced
    /// two-group dimension `group` (`a`, `b`), no effect and 10% noise.
    pub fn null(n_items: usize, annotators_per_item: usize, seed: u64) -> Self {
        Self {
            n_items,
            annotators_per_item,
            dimensions: vec![SyntheticDimension::balanced("group", ["a", "b"])],
            effect: Effect::None,
            scale: LabelScale::ordinal_range(5).expect("five levels"),
            noise: 0.1,
            seed,
        }
    }

    /// Like [`SyntheticSpec::null`] with `a` planted low and `b` high.
    pub fn planted(n_items: usize, annotators_per_item: usize, strength: f64, seed: u64) -> Self {
        Self {
            effect: Effect::PlantedBimodal {
                dimension: "group".to_owned(),
                group_low: "a".to_owned(),
                group_high: "b".to_owned(),
                strength,
            },
            ..Self::null(n_items, annotators_per_item, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.n_items == 0 || self.annotators_per_item == 0 {
            return bad("n_items and annotators_per_item must be positive".to_owned());
        }
        if self.annotators_per_item > u32::MAX as usize {
            return bad("too many annotators per item".to_owned());
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return bad(format!("noise must lie in [0, 1], got {}", self.noise));
        }
        for d in &self.dimensions {
            if d.proportions.is_empty() {
                return bad(format!("dimension `{}` has no groups", d.name));
            }
            if d.proportions.iter().any(|(_, p)| !(*p >= 0.0 && p.is_finite())) {
                return bad(format!("dimension `{}` has a negative proportion", d.name));
            }
            let sum: f64 = d.proportions.iter().map(|(_, p)| p).sum();
            if (sum - 1.0).abs() > 1e-9 {
                return bad(format!(
                    "proportions of dimension `{}` sum to {sum}, not 1",
                    d.name
                ));
            }
        }
        if let Effect::PlantedBimodal {
            dimension,
            group_low,
            group_high,
            strength,
        } = &self.effect
        {
            let Some(d) = self.dimensions.iter().find(|d| &d.name == dimension) else {
                return bad(format!("planted dimension `{dimension}` is not declared"));
            };
            for g in [group_low, group_high] {
                if !d.proportions.iter().any(|(n, _)| n == g) {
                    return bad(format!("planted group `{g}` is not in `{dimension}`"));
                }
            }
            if group_low == group_high {
                return bad("planted groups must differ".to_owned());
            }
            if !(0.0..=1.0).contains(strength) {
                return bad(format!("strength must lie in [0, 1], got {strength}"));
            }
        }
        Ok(())
    }
}

/// Discretized symmetric Gaussian over `levels` bins, centered on the scale
/// with a standard deviation of a sixth of its range.
pub fn bell(levels: usize) -> Vec<f64> {
    if levels == 1 {
        return vec![1.0];
    }
    let center = (levels - 1) as f64 / 2.0;
    let sigma = (levels - 1) as f64 / 6.0;
    let w: Vec<f64> = (0..levels)
        .map(|i| {
            let z = (i as f64 - center) / sigma;
            libm::exp(-0.5 * z * z)
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn draw(weights: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Largest-remainder split of `n` seats by `shares` (ties go to the earlier
/// group).
fn quotas(shares: &[f64], n: usize) -> Vec<usize> {
    let mut seats: Vec<usize> = shares.iter().map(|p| (p * n as f64) as usize).collect();
    let mut left = n - seats.iter().sum::<usize>().min(n);
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = shares[a] * n as f64 - seats[a] as f64;
        let rb = shares[b] * n as f64 - seats[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &g in order.iter().cycle() {
        if left == 0 {
            break;
        }
        seats[g] += 1;
        left -= 1;
    }
    seats
}

/// Labels and per-dimension group indices of one item's annotators.
fn generate_item(
    spec: &SyntheticSpec,
    item: usize,
    affected: bool,
    bell: &[f64],
    planted: Option<(usize, usize, usize)>,
) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = spec.annotators_per_item;
    let levels = spec.scale.level_count();
    let mut rng = SeededStream::new(spec.seed, "synthetic-item").rng(item as u64);
    let groups: Vec<Vec<usize>> = spec
        .dimensions
        .iter()
        .map(|d| {
            let shares: Vec<f64> = d.proportions.iter().map(|(_, p)| *p).collect();
            let mut slots: Vec<usize> = quotas(&shares, n)
                .into_iter()
                .enumerate()
                .flat_map(|(g, c)| core::iter::repeat_n(g, c))
                .collect();
            slots.shuffle(&mut rng);
            slots
        })
        .collect();
    let labels = (0..n)
        .map(|a| {
            let base = match planted {
                Some((dim, low, high)) if affected => {
                    let g = groups[dim][a];
                    if g == low {
                        0
                    } else if g == high {
                        levels - 1
                    } else {
                        draw(bell, &mut rng)
                    }
                }
                _ => draw(bell, &mut rng),
            };
            if spec.noise > 0.0 && rng.gen::<f64>() < spec.noise {
                rng.gen_range(0..levels)
            } else {
                base
            }
        })
        .collect();
    (labels, groups)
}

/// Builds the dataset described by `spec`. Item `i` is `c{i}`, its annotators
/// are `c{i}_a{j}`.
pub fn generate(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let dims = spec
        .dimensions
        .iter()
        .map(|d| Dimension::new(d.name.clone(), d.proportions.iter().map(|(g, _)| g.clone())))
        .collect::<Result<Vec<_>>>()?;
    let planted = match &spec.effect {
        Effect::None => None,
        Effect::PlantedBimodal {
            dimension,
            group_low,
            group_high,
            strength,
        } => {
            let di = spec.dimensions.iter().position(|d| &d.name == dimension).unwrap_or(0);
            let gi = |g: &str| {
                spec.dimensions[di]
                    .proportions
                    .iter()
                    .position(|(n, _)| n == g)
                    .unwrap_or(0)
            };
            Some((di, gi(group_low), gi(group_high), *strength))
        }
    };
    let mut affected = vec![false; spec.n_items];
    if let Some((_, _, _, strength)) = planted {
        let m = libm::round(strength * spec.n_items as f64) as usize;
        let mut order: Vec<usize> = (0..spec.n_items).collect();
        order.shuffle(&mut SeededStream::new(spec.seed, "synthetic-affected").rng(0));
        for &i in &order[..m.min(spec.n_items)] {
            affected[i] = true;
        }
    }
    let bell = bell(spec.scale.level_count());
    let planted = planted.map(|(d, l, h, _)| (d, l, h));
    let items = par::map_range(spec.n_items, |i| {
        generate_item(spec, i, affected[i], &bell, planted)
    });

    let mut b = Dataset::builder(spec.scale.clone(), dims)?;
    for (i, (labels, groups)) in items.into_iter().enumerate() {
        let item = format!("c{i}");
        for (a, &label) in labels.iter().enumerate() {
            let annotator = format!("c{i}_a{a}");
            let mut profile = AnnotatorProfile::new(annotator.clone());
            for (d, dim) in spec.dimensions.iter().enumerate() {
                profile.set_group(dim.name.clone(), dim.proportions[groups[d][a]].0.clone());
            }
            b.add_profile(profile)?;
            b.add_annotation(AnnotationRecord::single(item.clone(), annotator, label)?)?;
        }
    }
    b.build()
}

/// Annotators per group and item in [`cancellation_fixture`].
pub const CANCELLATION_GROUP_SIZE: usize = 15;

/// Two items on a 5-level scale, dimension `group` with groups `a` and `b`.
/// On `c0` group `a` uses the lowest level and `b` the highest; on `c1` the
/// roles flip. Each item is bimodal, each group is unanimous per item, and
/// each group's annotations pooled over both items are bimodal. `seed`
/// shuffles the annotation order.
pub fn cancellation_fixture(seed: u64) -> Dataset {
    let scale = LabelScale::ordinal_range(5).expect("five levels");
    let dim = Dimension::new("group", ["a", "b"]).expect("two groups");
    let mut b = Dataset::builder(scale, vec![dim]).expect("one dimension");
    for (item, low) in [("c0", "a"), ("c1", "b")] {
        let mut rows: Vec<(String, &str, usize)> = Vec::new();
        for group in ["a", "b"] {
            let level = if group == low { 0 } else { 4 };
            for j in 0..CANCELLATION_GROUP_SIZE {
                rows.push((format!("{item}_{group}{j}"), group, level));
            }
        }
        rows.shuffle(&mut SeededStream::new(seed, item).rng(0));
        for (id, group, level) in rows {
            b.add_profile(AnnotatorProfile::new(id.clone()).with_group("group", group))
                .expect("fresh profile");
            b.add_annotation(AnnotationRecord::single(item, id, level).expect("valid label"))
                .expect("fresh annotation");
        }
    }
    b.build().expect("consistent fixture")
}

/// Whose annotations the sensitivity curve resamples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "kind", rename_all = "snake_case")
)]
pub enum SensitivityScope {
    /// All annotations of an item.
    #[default]
    All,
    /// Only annotations by one group.
    Group { dimension: String, group: String },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SensitivityOptions {
    pub max_k: usize,
    pub resamples: usize,
    pub seed: u64,
    /// Share of items that must have at least `k` annotations for `k` to be
    /// on the curve.
    pub min_item_fraction: f64,
    pub scope: SensitivityScope,
}

impl SensitivityOptions {
    pub fn new(max_k: usize) -> Self {
        Self {
            max_k,
            resamples: 30,
            seed: 0,
            min_item_fraction: 0.5,
            scope: SensitivityScope::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SensitivityPoint {
    pub k: usize,
    /// Sample standard deviation of the resampled `p_obs` values.
    pub std: f64,
    /// Items with at least `k` annotations in scope.
    pub n_items_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SensitivityCurve {
    pub resamples: usize,
    pub points: Vec<SensitivityPoint>,
}

impl SensitivityCurve {
    pub fn std_at(&self, k: usize) -> Option<f64> {
        self.points.iter().find(|p| p.k == k).map(|p| p.std)
    }

    /// Spearman correlation between `k` and the standard deviation.
    pub fn trend(&self) -> Option<f64> {
        let ks: Vec<f64> = self.points.iter().map(|p| p.k as f64).collect();
        let sd: Vec<f64> = self.points.iter().map(|p| p.std).collect();
        stats::spearman(&ks, &sd)
    }
}

/// Label sets in scope, per item.
fn scoped_labels<'a>(dataset: &'a Dataset, scope: &SensitivityScope) -> Result<Vec<Vec<&'a [u16]>>> {
    let filter = match scope {
        SensitivityScope::All => None,
        SensitivityScope::Group { dimension, group } => {
            let d = dataset.dimension_index(dimension)?;
            let g = dataset.dimensions()[d]
                .group_index(group)
                .ok_or_else(|| Error::UnknownGroup {
                    dimension: dimension.clone(),
                    group: group.clone(),
                })?;
            Some((d, g as u16))
        }
    };
    Ok((0..dataset.item_count())
        .map(|i| {
            let item = dataset.item_at(i);
            item.annotations
                .iter()
                .zip(&item.annotators)
                .filter(|(_, &p)| filter.is_none_or(|(d, g)| dataset.group_of(d, p) == Some(g)))
                .map(|(a, _)| a.values())
                .collect()
        })
        .collect())
}

/// Largest `k` such that at least `fraction` of the items have `k` or more
/// annotations in scope.
pub fn max_sufficient_k(dataset: &Dataset, fraction: f64, scope: &SensitivityScope) -> Result<usize> {
    let labels = scoped_labels(dataset, scope)?;
    Ok(sufficient_k(&labels, fraction))
}

fn sufficient_k(labels: &[Vec<&[u16]>], fraction: f64) -> usize {
    let mut sizes: Vec<usize> = labels.iter().map(Vec::len).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let need = libm::ceil(fraction * sizes.len() as f64).max(1.0) as usize;
    sizes.get(need - 1).copied().unwrap_or(0)
}

/// Standard deviation of the dataset-level observed polarization (mean item
/// nDFU) when each item keeps only `k` annotations drawn with replacement,
/// for `k = 3..=max_k`.
///
/// Resample `r` of an item draws one sequence of `max_k` annotations and
/// uses its first `k` for every `k`, so neighbouring points share draws.
pub fn sensitivity(dataset: &Dataset, options: &SensitivityOptions) -> Result<SensitivityCurve> {
    if options.max_k < 3 {
        return Err(Error::InvalidConfig(format!(
            "max_k must be at least 3, got {}",
            options.max_k
        )));
    }
    if options.resamples < 2 {
        return Err(Error::InvalidConfig("at least two resamples are needed".to_owned()));
    }
    if !(options.min_item_fraction > 0.0 && options.min_item_fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "min_item_fraction must lie in (0, 1], got {}",
            options.min_item_fraction
        )));
    }
    let labels = scoped_labels(dataset, &options.scope)?;
    let limit = sufficient_k(&labels, options.min_item_fraction);
    if options.max_k > limit {
        return Err(Error::InvalidConfig(format!(
            "max_k = {} exceeds {limit}, the largest annotator count shared by {}% of items",
            options.max_k,
            options.min_item_fraction * 100.0
        )));
    }
    let levels = dataset.scale().level_count();
    let ks = options.max_k - 2;
    let r_count = options.resamples;

    // values[i][r * ks + (k - 3)], computed for eligible items only.
    let values: Vec<Vec<f64>> = par::map_range(labels.len(), |i| {
        let pool = &labels[i];
        if pool.len() < 3 {
            return Vec::new();
        }
        let top = options.max_k.min(pool.len());
        let stream = SeededStream::new(options.seed, &dataset.item_at(i).id);
        let mut out = vec![f64::NAN; r_count * ks];
        let mut counts = vec![0u32; levels];
        for r in 0..r_count {
            let mut rng = stream.rng(r as u64);
            counts.iter_mut().for_each(|c| *c = 0);
            for k in 1..=top {
                for &v in pool[rng.gen_range(0..pool.len())] {
                    counts[v as usize] += 1;
                }
                if k >= 3 {
                    out[r * ks + k - 3] = ndfu_counts(&counts).unwrap_or(0.0);
                }
            }
        }
        out
    });

    let n = labels.len();
    let mut points = Vec::with_capacity(ks);
    for k in 3..=options.max_k {
        let eligible: Vec<usize> = (0..n).filter(|&i| labels[i].len() >= k).collect();
        let samples: Vec<f64> = (0..r_count)
            .map(|r| {
                let sum: f64 = eligible.iter().map(|&i| values[i][r * ks + k - 3]).sum();
                sum / eligible.len() as f64
            })
            .collect();
        points.push(SensitivityPoint {
            k,
            std: stats::sample_sd(&samples).unwrap_or(f64::NAN),
            n_items_used: eligible.len(),
        });
    }
    Ok(SensitivityCurve {
        resamples: r_count,
        points,
    })
}
