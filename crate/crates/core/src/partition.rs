//! Stratified random partitions with prescribed pseudo-group sizes.
//!
//! Every partition is drawn from a counter-based stream keyed by
//! `(master_seed, item_key, iteration)`, so a given partition is the same no
//! matter which worker computes it or in which order items are visited.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{AnnotationRecord, LabelScale};
use crate::polarization::ndfu_of;
use crate::{Error, Result};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8], mut hash: u64) -> u64 {
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Reproducible random stream for one item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededStream {
    master_seed: u64,
    key: u64,
}

impl SeededStream {
    pub fn new(master_seed: u64, item_key: &str) -> Self {
        Self {
            master_seed,
            key: fnv1a(item_key.as_bytes(), FNV_OFFSET),
        }
    }

    /// Stream for an item under a given dimension; different dimensions get
    /// independent partitions of the same item.
    pub fn for_item(master_seed: u64, dimension: &str, item_id: &str) -> Self {
        let h = fnv1a(dimension.as_bytes(), FNV_OFFSET);
        let h = fnv1a(&[0x1f], h);
        Self {
            master_seed,
            key: fnv1a(item_id.as_bytes(), h),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Generator for draw number `iteration` of this stream.
    pub fn rng(&self, iteration: u64) -> ChaCha8Rng {
        let mut state = self.master_seed ^ self.key.rotate_left(29);
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(iteration);
        rng
    }
}

fn check_sizes(n: usize, sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidPartition(
            "pseudo-group sizes must be positive".into(),
        ));
    }
    if sizes.len() > u16::MAX as usize {
        return Err(Error::InvalidPartition("too many pseudo-groups".into()));
    }
    let sum: usize = sizes.iter().sum();
    if sum != n {
        return Err(Error::SizeMismatch { sum, expected: n });
    }
    Ok(())
}

/// Shuffles `0..n` into `perm`. Pseudo-group `g` is the `g`-th consecutive
/// chunk of `perm` with length `sizes[g]`.
pub(crate) fn shuffled_order(perm: &mut Vec<u32>, n: usize, stream: &SeededStream, iteration: u64) {
    perm.clear();
    perm.extend(0..n as u32);
    let mut rng = stream.rng(iteration);
    perm.shuffle(&mut rng);
}

/// Assignment of annotations to pseudo-groups of fixed sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionScheme {
    sizes: Vec<usize>,
    assignment: Vec<u16>,
}

impl PartitionScheme {
    /// Uniformly random partition of `n` annotations into `sizes`.
    pub fn random(n: usize, sizes: &[usize], stream: &SeededStream, iteration: u64) -> Result<Self> {
        check_sizes(n, sizes)?;
        let mut perm = Vec::with_capacity(n);
        shuffled_order(&mut perm, n, stream, iteration);
        let mut assignment = alloc::vec![0u16; n];
        let mut offset = 0;
        for (g, &size) in sizes.iter().enumerate() {
            for &idx in &perm[offset..offset + size] {
                assignment[idx as usize] = g as u16;
            }
            offset += size;
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            assignment,
        })
    }

    /// Builds a scheme from an explicit assignment, checking it against `sizes`.
    pub fn from_assignment(sizes: Vec<usize>, assignment: Vec<u16>) -> Result<Self> {
        let scheme = Self { sizes, assignment };
        scheme.validate(scheme.assignment.len())?;
        Ok(scheme)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Pseudo-group index of every annotation.
    pub fn assignment(&self) -> &[u16] {
        &self.assignment
    }

    pub fn group_count(&self) -> usize {
        self.sizes.len()
    }

    /// Annotation indices in pseudo-group `group`, ascending.
    pub fn members(&self, group: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter(move |(_, &g)| g as usize == group)
            .map(|(i, _)| i)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        check_sizes(n, &self.sizes)?;
        if self.assignment.len() != n {
            return Err(Error::SizeMismatch {
                sum: self.assignment.len(),
                expected: n,
            });
        }
        let mut seen = alloc::vec![0usize; self.sizes.len()];
        for &g in &self.assignment {
            let slot = seen.get_mut(g as usize).ok_or_else(|| {
                Error::InvalidPartition(format!("pseudo-group {g} out of range"))
            })?;
            *slot += 1;
        }
        if seen != self.sizes {
            return Err(Error::InvalidPartition(
                "pseudo-group populations do not match their sizes".into(),
            ));
        }
        Ok(())
    }

    /// nDFU of one pseudo-group.
    pub fn pseudo_group_ndfu(
        &self,
        annotations: &[AnnotationRecord],
        scale: &LabelScale,
        group: usize,
    ) -> Result<f64> {
        self.validate(annotations.len())?;
        let mut counts = Vec::new();
        ndfu_of(
            self.members(group).map(|i| annotations[i].values()),
            scale.level_count(),
            &mut counts,
        )
        .ok_or(Error::EmptyHistogram)
    }
}

/// Seeded stratified partition of `annotations` into pseudo-groups of exactly
/// `sizes`. Deterministic in `(stream, iteration)`.
pub fn random_partition<T>(
    annotations: &[T],
    sizes: &[usize],
    stream: &SeededStream,
    iteration: u64,
) -> Result<PartitionScheme> {
    PartitionScheme::random(annotations.len(), sizes, stream, iteration)
}

/// Unweighted mean nDFU over pseudo-groups with at least `min_group`
/// annotations; `None` when no pseudo-group qualifies.
pub fn partition_ndfu(
    partition: &PartitionScheme,
    annotations: &[AnnotationRecord],
    scale: &LabelScale,
    min_group: usize,
) -> Result<Option<f64>> {
    partition.validate(annotations.len())?;
    let mut counts = Vec::new();
    let mut sum = 0.0;
    let mut n = 0usize;
    for (g, &size) in partition.sizes.iter().enumerate() {
        if size < min_group {
            continue;
        }
        let members = partition.members(g).map(|i| annotations[i].values());
        if let Some(v) = ndfu_of(members, scale.level_count(), &mut counts) {
            sum += v;
            n += 1;
        }
    }
    Ok(if n == 0 { None } else { Some(sum / n as f64) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records(values: &[usize]) -> Vec<AnnotationRecord> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| AnnotationRecord::single("c", format!("a{i}"), v).unwrap())
            .collect()
    }

    #[test]
    fn unequal_sizes_are_kept() {
        let stream = SeededStream::new(7, "c1");
        let p = PartitionScheme::random(100, &[80, 20], &stream, 0).unwrap();
        assert_eq!(p.members(0).count(), 80);
        assert_eq!(p.members(1).count(), 20);
        p.validate(100).unwrap();
    }

    #[test]
    fn single_group_is_identity() {
        let stream = SeededStream::new(7, "c1");
        let p = PartitionScheme::random(6, &[6], &stream, 3).unwrap();
        assert!(p.assignment().iter().all(|&g| g == 0));
    }

    #[test]
    fn deterministic_and_iteration_dependent() {
        let stream = SeededStream::new(42, "item");
        let a = PartitionScheme::random(30, &[10, 20], &stream, 5).unwrap();
        let b = PartitionScheme::random(30, &[10, 20], &SeededStream::new(42, "item"), 5).unwrap();
        assert_eq!(a, b);
        let c = PartitionScheme::random(30, &[10, 20], &stream, 6).unwrap();
        assert_ne!(a, c);
        let d = PartitionScheme::random(30, &[10, 20], &SeededStream::new(43, "item"), 5).unwrap();
        assert_ne!(a, d);
        let e = PartitionScheme::random(30, &[10, 20], &SeededStream::new(42, "other"), 5).unwrap();
        assert_ne!(a, e);
    }

    #[test]
    fn dimension_keys_differ() {
        let a = SeededStream::for_item(1, "gender", "c1");
        let b = SeededStream::for_item(1, "race", "c1");
        assert_ne!(a, b);
        // The separator keeps ("ab", "c") and ("a", "bc") apart.
        assert_ne!(
            SeededStream::for_item(1, "ab", "c"),
            SeededStream::for_item(1, "a", "bc")
        );
    }

    #[test]
    fn size_errors() {
        let s = SeededStream::new(0, "x");
        assert_eq!(
            PartitionScheme::random(5, &[2, 2], &s, 0).unwrap_err(),
            Error::SizeMismatch { sum: 4, expected: 5 }
        );
        assert!(PartitionScheme::random(2, &[2, 0], &s, 0).is_err());
        assert!(PartitionScheme::random(0, &[], &s, 0).is_err());
        assert!(PartitionScheme::from_assignment(vec![1, 1], vec![0, 0]).is_err());
        assert!(PartitionScheme::from_assignment(vec![1, 1], vec![0, 2]).is_err());
    }

    #[test]
    fn partition_scores() {
        let scale = LabelScale::ordinal_range(5).unwrap();
        let anns = records(&[2, 2, 2, 0, 0, 4, 4]);
        // pseudo-group 0 unanimous, pseudo-group 1 perfectly bimodal
        let p = PartitionScheme::from_assignment(vec![3, 4], vec![0, 0, 0, 1, 1, 1, 1]).unwrap();
        assert_eq!(partition_ndfu(&p, &anns, &scale, 2).unwrap(), Some(0.5));
        assert_eq!(partition_ndfu(&p, &anns, &scale, 5).unwrap(), None);
        assert_eq!(partition_ndfu(&p, &anns, &scale, 4).unwrap(), Some(1.0));
        assert_eq!(p.pseudo_group_ndfu(&anns, &scale, 1).unwrap(), 1.0);

        // single qualifying pseudo-group with nDFU 0.3
        let anns = records(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 4, 4, 4, 1]);
        let mut assignment = vec![0u16; 13];
        assignment.push(1);
        let p = PartitionScheme::from_assignment(vec![13, 1], assignment).unwrap();
        let v = partition_ndfu(&p, &anns, &scale, 2).unwrap().unwrap();
        assert!((v - 0.3).abs() < 1e-12);

        let short = records(&[1, 2]);
        assert!(partition_ndfu(&p, &short, &scale, 2).is_err());
    }
}
