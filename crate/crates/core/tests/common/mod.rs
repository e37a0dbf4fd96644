#![allow(dead_code)]

use apunim_core::{AnnotationRecord, AnnotatorProfile, Dataset, Dimension, LabelScale};

/// Pairwise distance-from-unimodality straight from the definition.
pub fn naive_ndfu(counts: &[u32]) -> f64 {
    let total: u32 = counts.iter().sum();
    let f: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let mut m = 0;
    for i in 0..f.len() {
        if f[i] > f[m] {
            m = i;
        }
    }
    let mut d: f64 = 0.0;
    for i in m..f.len() {
        for j in i + 1..f.len() {
            d = d.max(f[j] - f[i]);
        }
    }
    for i in 0..=m {
        for j in 0..i {
            d = d.max(f[j] - f[i]);
        }
    }
    d / f[m]
}

pub fn counts_of(labels: &[usize], levels: usize) -> Vec<u32> {
    let mut c = vec![0u32; levels];
    for &l in labels {
        c[l] += 1;
    }
    c
}

/// One item: `(label, group)` pairs. Annotators are unique per item.
pub type ItemSpec<'a> = (&'a str, Vec<(usize, &'a str)>);

pub fn dataset(levels: usize, groups: &[&str], items: &[ItemSpec]) -> Dataset {
    let dim = Dimension::new("g", groups.iter().copied()).unwrap();
    let mut b = Dataset::builder(LabelScale::ordinal_range(levels).unwrap(), vec![dim]).unwrap();
    for (item, anns) in items {
        for (j, (v, g)) in anns.iter().enumerate() {
            let id = format!("{item}_{j}");
            b.add_profile(AnnotatorProfile::new(id.clone()).with_group("g", *g))
                .unwrap();
            b.add_annotation(AnnotationRecord::single(*item, id, *v).unwrap())
                .unwrap();
        }
    }
    b.build().unwrap()
}
