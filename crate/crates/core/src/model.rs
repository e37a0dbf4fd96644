//! Domain types: label scales, annotations, annotator profiles, dimensions and
//! the validated, immutable [`Dataset`].

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Whether the levels of a scale carry a meaningful order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum ScaleKind {
    Ordinal,
    Nominal,
}

/// The annotation scale. Level identifiers map to histogram bins by position.
///
/// Nominal scales have no natural order; the declared order is used as the
/// canonical bin layout, which makes unimodality order-dependent.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabelScale {
    kind: ScaleKind,
    levels: Vec<String>,
}

impl LabelScale {
    pub fn new<I, S>(kind: ScaleKind, levels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let levels: Vec<String> = levels.into_iter().map(Into::into).collect();
        if levels.len() < 2 {
            return Err(Error::InvalidScale(format!(
                "at least two levels required, got {}",
                levels.len()
            )));
        }
        if levels.len() > u16::MAX as usize {
            return Err(Error::InvalidScale(format!(
                "too many levels ({})",
                levels.len()
            )));
        }
        for (i, level) in levels.iter().enumerate() {
            if levels[..i].contains(level) {
                return Err(Error::InvalidScale(format!("duplicate level `{level}`")));
            }
        }
        Ok(Self { kind, levels })
    }

    pub fn ordinal<I, S>(levels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(ScaleKind::Ordinal, levels)
    }

    pub fn nominal<I, S>(levels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(ScaleKind::Nominal, levels)
    }

    /// An ordinal scale whose levels are the integers `0..level_count`.
    pub fn ordinal_range(level_count: usize) -> Result<Self> {
        Self::ordinal((0..level_count).map(|i| format!("{i}")))
    }

    pub fn kind(&self) -> ScaleKind {
        self.kind
    }

    pub fn is_nominal(&self) -> bool {
        self.kind == ScaleKind::Nominal
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn level_index(&self, level: &str) -> Option<usize> {
        self.levels.iter().position(|l| l == level)
    }
}

/// One annotator's answer for one item: a non-empty set of bin indices.
///
/// Single-label tasks carry a singleton set. Values are kept sorted and
/// deduplicated so that equality does not depend on input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    item_id: String,
    annotator_id: String,
    values: Vec<u16>,
}

impl AnnotationRecord {
    pub fn new<I>(
        item_id: impl Into<String>,
        annotator_id: impl Into<String>,
        values: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let item_id = item_id.into();
        let annotator_id = annotator_id.into();
        let mut bins = Vec::new();
        for v in values {
            let bin = u16::try_from(v).map_err(|_| Error::ValueOutOfScale {
                index: v,
                levels: u16::MAX as usize,
            })?;
            bins.push(bin);
        }
        if bins.is_empty() {
            return Err(Error::EmptyValueSet {
                item: item_id,
                annotator: annotator_id,
            });
        }
        bins.sort_unstable();
        bins.dedup();
        Ok(Self {
            item_id,
            annotator_id,
            values: bins,
        })
    }

    pub fn single(
        item_id: impl Into<String>,
        annotator_id: impl Into<String>,
        value: usize,
    ) -> Result<Self> {
        Self::new(item_id, annotator_id, [value])
    }

    pub fn item_id(&self) -> &str {
        &self.item_id
    }

    pub fn annotator_id(&self) -> &str {
        &self.annotator_id
    }

    /// Sorted, distinct bin indices.
    pub fn values(&self) -> &[u16] {
        &self.values
    }
}

/// Group memberships of one annotator. A dimension absent from the map is the
/// missing-value sentinel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatorProfile {
    annotator_id: String,
    memberships: BTreeMap<String, String>,
}

impl AnnotatorProfile {
    pub fn new(annotator_id: impl Into<String>) -> Self {
        Self {
            annotator_id: annotator_id.into(),
            memberships: BTreeMap::new(),
        }
    }

    pub fn with_group(mut self, dimension: impl Into<String>, group: impl Into<String>) -> Self {
        self.set_group(dimension, group);
        self
    }

    pub fn set_group(&mut self, dimension: impl Into<String>, group: impl Into<String>) {
        self.memberships.insert(dimension.into(), group.into());
    }

    pub fn annotator_id(&self) -> &str {
        &self.annotator_id
    }

    pub fn group(&self, dimension: &str) -> Option<&str> {
        self.memberships.get(dimension).map(String::as_str)
    }

    pub fn memberships(&self) -> &BTreeMap<String, String> {
        &self.memberships
    }
}

/// A personal-characteristic axis and its groups.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dimension {
    name: String,
    groups: Vec<String>,
    ordinal_order: Option<Vec<String>>,
}

impl Dimension {
    pub fn new<I, S>(name: impl Into<String>, groups: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name = name.into();
        let groups: Vec<String> = groups.into_iter().map(Into::into).collect();
        if groups.len() > u16::MAX as usize {
            return Err(Error::InvalidDimension {
                name,
                reason: "too many groups".to_owned(),
            });
        }
        for (i, g) in groups.iter().enumerate() {
            if groups[..i].contains(g) {
                return Err(Error::InvalidDimension {
                    name,
                    reason: format!("duplicate group `{g}`"),
                });
            }
        }
        Ok(Self {
            name,
            groups,
            ordinal_order: None,
        })
    }

    /// An ordinal dimension whose groups are declared in order.
    pub fn ordinal<I, S>(name: impl Into<String>, order: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let dim = Self::new(name, order)?;
        let order = dim.groups.clone();
        dim.with_ordinal_order(order)
    }

    pub fn with_ordinal_order<I, S>(mut self, order: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let order: Vec<String> = order.into_iter().map(Into::into).collect();
        let is_permutation = order.len() == self.groups.len()
            && self.groups.iter().all(|g| order.contains(g))
            && order.iter().enumerate().all(|(i, g)| !order[..i].contains(g));
        if !is_permutation {
            return Err(Error::InvalidDimension {
                name: self.name,
                reason: "ordinal order must be a permutation of the groups".to_owned(),
            });
        }
        self.ordinal_order = Some(order);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    pub fn ordinal_order(&self) -> Option<&[String]> {
        self.ordinal_order.as_deref()
    }

    pub fn is_ordinal(&self) -> bool {
        self.ordinal_order.is_some()
    }

    pub fn group_index(&self, group: &str) -> Option<usize> {
        self.groups.iter().position(|g| g == group)
    }

    /// Rank of `group` in the ordinal order mapped onto `[0, 1]`.
    pub fn ordinal_position(&self, group: &str) -> Option<f64> {
        let order = self.ordinal_order.as_ref()?;
        let rank = order.iter().position(|g| g == group)?;
        if order.len() == 1 {
            return Some(0.0);
        }
        Some(rank as f64 / (order.len() - 1) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Item {
    pub(crate) id: String,
    pub(crate) annotations: Vec<AnnotationRecord>,
    /// Profile index of each annotation's annotator.
    pub(crate) annotators: Vec<u32>,
}

/// Validated, immutable collection of annotated items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    scale: LabelScale,
    dimensions: Vec<Dimension>,
    items: Vec<Item>,
    item_index: BTreeMap<String, usize>,
    profiles: Vec<AnnotatorProfile>,
    profile_index: BTreeMap<String, usize>,
    /// `membership[dimension][profile]` is the group index, `None` when missing.
    membership: Vec<Vec<Option<u16>>>,
}

impl Dataset {
    pub fn builder(scale: LabelScale, dimensions: Vec<Dimension>) -> Result<DatasetBuilder> {
        DatasetBuilder::new(scale, dimensions)
    }

    pub fn scale(&self) -> &LabelScale {
        &self.scale
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    pub fn dimension(&self, name: &str) -> Option<&Dimension> {
        self.dimensions.iter().find(|d| d.name == name)
    }

    pub(crate) fn dimension_index(&self, name: &str) -> Result<usize> {
        self.dimensions
            .iter()
            .position(|d| d.name == name)
            .ok_or_else(|| Error::UnknownDimension(name.to_owned()))
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    pub fn annotation_count(&self) -> usize {
        self.items.iter().map(|i| i.annotations.len()).sum()
    }

    /// Item identifiers in ingestion order.
    pub fn item_ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.items.iter().map(|i| i.id.as_str())
    }

    pub fn contains_item(&self, item_id: &str) -> bool {
        self.item_index.contains_key(item_id)
    }

    pub fn annotations(&self, item_id: &str) -> Option<&[AnnotationRecord]> {
        self.item_index
            .get(item_id)
            .map(|&i| self.items[i].annotations.as_slice())
    }

    /// All annotations, grouped by item in ingestion order.
    pub fn iter_annotations(&self) -> impl Iterator<Item = &AnnotationRecord> + '_ {
        self.items.iter().flat_map(|i| i.annotations.iter())
    }

    /// Profiles in ingestion order.
    pub fn profiles(&self) -> &[AnnotatorProfile] {
        &self.profiles
    }

    pub fn profile(&self, annotator_id: &str) -> Option<&AnnotatorProfile> {
        self.profile_index
            .get(annotator_id)
            .map(|&i| &self.profiles[i])
    }

    pub(crate) fn item_position(&self, item_id: &str) -> Result<usize> {
        self.item_index
            .get(item_id)
            .copied()
            .ok_or_else(|| Error::UnknownItem(item_id.to_owned()))
    }

    pub(crate) fn item_at(&self, index: usize) -> &Item {
        &self.items[index]
    }

    pub(crate) fn group_of(&self, dimension: usize, profile: u32) -> Option<u16> {
        self.membership[dimension][profile as usize]
    }

    /// Number of distinct non-missing groups among the item's annotators.
    pub(crate) fn distinct_groups(&self, item: usize, dimension: usize) -> usize {
        let mut seen: Vec<u16> = Vec::new();
        for &p in &self.items[item].annotators {
            if let Some(g) = self.group_of(dimension, p) {
                if !seen.contains(&g) {
                    seen.push(g);
                }
            }
        }
        seen.len()
    }
}

/// Incremental, validating constructor for [`Dataset`].
#[derive(Debug, Clone)]
pub struct DatasetBuilder {
    scale: LabelScale,
    dimensions: Vec<Dimension>,
    profiles: Vec<AnnotatorProfile>,
    profile_index: BTreeMap<String, usize>,
    items: Vec<(String, Vec<AnnotationRecord>)>,
    item_index: BTreeMap<String, usize>,
    seen: BTreeMap<(usize, String), usize>,
}

impl DatasetBuilder {
    pub fn new(scale: LabelScale, dimensions: Vec<Dimension>) -> Result<Self> {
        for (i, d) in dimensions.iter().enumerate() {
            if dimensions[..i].iter().any(|o| o.name == d.name) {
                return Err(Error::InvalidDimension {
                    name: d.name.clone(),
                    reason: "declared twice".to_owned(),
                });
            }
        }
        Ok(Self {
            scale,
            dimensions,
            profiles: Vec::new(),
            profile_index: BTreeMap::new(),
            items: Vec::new(),
            item_index: BTreeMap::new(),
            seen: BTreeMap::new(),
        })
    }

    pub fn scale(&self) -> &LabelScale {
        &self.scale
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    pub fn has_profile(&self, annotator_id: &str) -> bool {
        self.profile_index.contains_key(annotator_id)
    }

    /// Registers an annotator. Memberships in unregistered dimensions are
    /// dropped; a repeated identical profile is accepted.
    pub fn add_profile(&mut self, profile: AnnotatorProfile) -> Result<()> {
        let mut kept = AnnotatorProfile::new(profile.annotator_id);
        for (dim, group) in profile.memberships {
            let Some(d) = self.dimensions.iter().find(|d| d.name == dim) else {
                continue;
            };
            if d.group_index(&group).is_none() {
                return Err(Error::UnknownGroup {
                    dimension: dim,
                    group,
                });
            }
            kept.memberships.insert(dim, group);
        }
        match self.profile_index.get(&kept.annotator_id) {
            Some(&i) if self.profiles[i] == kept => Ok(()),
            Some(_) => Err(Error::ConflictingProfile(kept.annotator_id)),
            None => {
                self.profile_index
                    .insert(kept.annotator_id.clone(), self.profiles.len());
                self.profiles.push(kept);
                Ok(())
            }
        }
    }

    /// Adds one annotation. Returns `false` when the record exactly repeats
    /// an earlier one (and is therefore merged).
    pub fn add_annotation(&mut self, record: AnnotationRecord) -> Result<bool> {
        let levels = self.scale.level_count();
        if let Some(&bad) = record.values.iter().find(|&&v| v as usize >= levels) {
            return Err(Error::ValueOutOfScale {
                index: bad as usize,
                levels,
            });
        }
        let item = match self.item_index.get(&record.item_id) {
            Some(&i) => i,
            None => {
                let i = self.items.len();
                self.item_index.insert(record.item_id.clone(), i);
                self.items.push((record.item_id.clone(), Vec::new()));
                i
            }
        };
        let key = (item, record.annotator_id.clone());
        if let Some(&pos) = self.seen.get(&key) {
            if self.items[item].1[pos].values == record.values {
                return Ok(false);
            }
            return Err(Error::ConflictingDuplicate {
                item: record.item_id,
                annotator: record.annotator_id,
            });
        }
        self.seen.insert(key, self.items[item].1.len());
        self.items[item].1.push(record);
        Ok(true)
    }

    pub fn build(self) -> Result<Dataset> {
        let mut items = Vec::with_capacity(self.items.len());
        for (id, annotations) in self.items {
            let mut annotators = Vec::with_capacity(annotations.len());
            for a in &annotations {
                let p = self
                    .profile_index
                    .get(&a.annotator_id)
                    .ok_or_else(|| Error::MissingProfile(a.annotator_id.clone()))?;
                annotators.push(*p as u32);
            }
            items.push(Item {
                id,
                annotations,
                annotators,
            });
        }
        let membership = self
            .dimensions
            .iter()
            .map(|d| {
                self.profiles
                    .iter()
                    .map(|p| {
                        p.group(&d.name)
                            .and_then(|g| d.group_index(g))
                            .map(|g| g as u16)
                    })
                    .collect()
            })
            .collect();
        Ok(Dataset {
            scale: self.scale,
            dimensions: self.dimensions,
            items,
            item_index: self.item_index,
            profiles: self.profiles,
            profile_index: self.profile_index,
            membership,
        })
    }
}

/// The annotations of one item split by group for one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedAnnotations<'a> {
    groups: Vec<(&'a str, Vec<&'a AnnotationRecord>)>,
    unknown: Vec<&'a AnnotationRecord>,
}

impl<'a> GroupedAnnotations<'a> {
    /// Non-empty groups in dimension declaration order.
    pub fn groups(&self) -> &[(&'a str, Vec<&'a AnnotationRecord>)] {
        &self.groups
    }

    pub fn get(&self, group: &str) -> Option<&[&'a AnnotationRecord]> {
        self.groups
            .iter()
            .find(|(g, _)| *g == group)
            .map(|(_, v)| v.as_slice())
    }

    /// Annotations whose annotator has no value for the dimension.
    pub fn unknown(&self) -> &[&'a AnnotationRecord] {
        &self.unknown
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }
}

/// Splits an item's annotations by the annotators' group in `dimension`.
pub fn group_annotations<'a>(
    dataset: &'a Dataset,
    item_id: &str,
    dimension: &str,
) -> Result<GroupedAnnotations<'a>> {
    let item = dataset.item_position(item_id)?;
    let dim = dataset.dimension_index(dimension)?;
    let names = &dataset.dimensions[dim].groups;
    let mut buckets: Vec<Vec<&AnnotationRecord>> = alloc::vec![Vec::new(); names.len()];
    let mut unknown = Vec::new();
    let it = &dataset.items[item];
    for (a, &p) in it.annotations.iter().zip(&it.annotators) {
        match dataset.group_of(dim, p) {
            Some(g) => buckets[g as usize].push(a),
            None => unknown.push(a),
        }
    }
    let groups = names
        .iter()
        .zip(buckets)
        .filter(|(_, v)| !v.is_empty())
        .map(|(n, v)| (n.as_str(), v))
        .collect();
    Ok(GroupedAnnotations { groups, unknown })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gender() -> Dimension {
        Dimension::new("gender", ["M", "F"]).unwrap()
    }

    fn small() -> Dataset {
        let mut b = Dataset::builder(LabelScale::ordinal_range(5).unwrap(), vec![gender()]).unwrap();
        b.add_profile(AnnotatorProfile::new("a1").with_group("gender", "M"))
            .unwrap();
        b.add_profile(AnnotatorProfile::new("a2").with_group("gender", "F"))
            .unwrap();
        b.add_profile(AnnotatorProfile::new("a3").with_group("gender", "M"))
            .unwrap();
        b.add_profile(AnnotatorProfile::new("a4")).unwrap();
        for (a, v) in [("a1", 0), ("a2", 4), ("a3", 1), ("a4", 2)] {
            b.add_annotation(AnnotationRecord::single("c1", a, v).unwrap())
                .unwrap();
        }
        b.add_annotation(AnnotationRecord::single("c2", "a1", 3).unwrap())
            .unwrap();
        b.build().unwrap()
    }

    #[test]
    fn scale_validation() {
        assert!(LabelScale::ordinal(["only"]).is_err());
        assert!(LabelScale::nominal(["a", "b", "a"]).is_err());
        let s = LabelScale::nominal(["toxic", "insult", "none"]).unwrap();
        assert_eq!(s.level_count(), 3);
        assert_eq!(s.level_index("insult"), Some(1));
        assert!(s.is_nominal());
    }

    #[test]
    fn dimension_validation() {
        assert!(Dimension::new("g", ["a", "a"]).is_err());
        let d = Dimension::new("edu", ["hs", "ba", "phd"]).unwrap();
        assert!(d.clone().with_ordinal_order(["hs", "ba"]).is_err());
        assert!(d.clone().with_ordinal_order(["hs", "ba", "ba"]).is_err());
        let d = d.with_ordinal_order(["phd", "hs", "ba"]).unwrap();
        assert_eq!(d.ordinal_position("phd"), Some(0.0));
        assert_eq!(d.ordinal_position("ba"), Some(1.0));
        assert_eq!(d.ordinal_position("hs"), Some(0.5));
    }

    #[test]
    fn value_out_of_scale() {
        let mut b = Dataset::builder(LabelScale::ordinal_range(5).unwrap(), vec![]).unwrap();
        let err = b
            .add_annotation(AnnotationRecord::single("c1", "a1", 7).unwrap())
            .unwrap_err();
        assert_eq!(err, Error::ValueOutOfScale { index: 7, levels: 5 });
        assert!(err.to_string().contains("value out of scale"));
    }

    #[test]
    fn conflicting_duplicate() {
        let mut b = Dataset::builder(LabelScale::ordinal_range(5).unwrap(), vec![]).unwrap();
        assert!(b
            .add_annotation(AnnotationRecord::single("c1", "a1", 2).unwrap())
            .unwrap());
        assert!(!b
            .add_annotation(AnnotationRecord::single("c1", "a1", 2).unwrap())
            .unwrap());
        let err = b
            .add_annotation(AnnotationRecord::single("c1", "a1", 3).unwrap())
            .unwrap_err();
        assert!(err.to_string().contains("conflicting duplicate annotation"));
    }

    #[test]
    fn missing_profile_rejected() {
        let mut b = Dataset::builder(LabelScale::ordinal_range(2).unwrap(), vec![]).unwrap();
        b.add_annotation(AnnotationRecord::single("c1", "ghost", 0).unwrap())
            .unwrap();
        assert_eq!(b.build().unwrap_err(), Error::MissingProfile("ghost".into()));
    }

    #[test]
    fn unknown_group_rejected_and_unregistered_dimension_dropped() {
        let mut b = Dataset::builder(LabelScale::ordinal_range(2).unwrap(), vec![gender()]).unwrap();
        assert!(b
            .add_profile(AnnotatorProfile::new("a").with_group("gender", "X"))
            .is_err());
        b.add_profile(AnnotatorProfile::new("b").with_group("age", "old"))
            .unwrap();
        b.add_annotation(AnnotationRecord::single("c", "b", 1).unwrap())
            .unwrap();
        let ds = b.build().unwrap();
        assert!(ds.profile("b").unwrap().memberships().is_empty());
    }

    #[test]
    fn empty_value_set_rejected() {
        let err = AnnotationRecord::new("c", "a", core::iter::empty()).unwrap_err();
        assert!(matches!(err, Error::EmptyValueSet { .. }));
        let r = AnnotationRecord::new("c", "a", [4, 0, 4]).unwrap();
        assert_eq!(r.values(), &[0, 4]);
    }

    #[test]
    fn grouping_partitions_item() {
        let ds = small();
        let g = group_annotations(&ds, "c1", "gender").unwrap();
        let m: Vec<_> = g.get("M").unwrap().iter().map(|a| a.annotator_id()).collect();
        assert_eq!(m, ["a1", "a3"]);
        let f: Vec<_> = g.get("F").unwrap().iter().map(|a| a.annotator_id()).collect();
        assert_eq!(f, ["a2"]);
        let u: Vec<_> = g.unknown().iter().map(|a| a.annotator_id()).collect();
        assert_eq!(u, ["a4"]);
        assert_eq!(g.group_count(), 2);

        let single = group_annotations(&ds, "c2", "gender").unwrap();
        assert_eq!(single.group_count(), 1);
        assert!(single.get("F").is_none());

        assert_eq!(
            group_annotations(&ds, "nope", "gender").unwrap_err(),
            Error::UnknownItem("nope".into())
        );
        assert_eq!(
            group_annotations(&ds, "c1", "race").unwrap_err(),
            Error::UnknownDimension("race".into())
        );
    }
}
