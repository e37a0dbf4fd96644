mod common;

use apunim_core::synth::{self, SyntheticSpec};
use apunim_core::{
    analyze_all, analyze_dimension, apriori_item, filter_items, null_sample, observed_group,
    AnalysisConfig, AnnotationRecord, AnnotatorProfile, Dataset, Diagnostic, Dimension,
    LabelScale, PartitionScheme, PartitionScoreMode, SeededStream, SignificanceMode,
};
use common::{counts_of, dataset, naive_ndfu, ItemSpec};
use statrs::distribution::{ContinuousCDF, StudentsT};

const LEVELS: usize = 5;

/// Known-group labels of an item, their groups, and the group sizes in
/// dimension order (present groups only).
fn item_layout(ds: &Dataset, item: &str) -> (Vec<usize>, Vec<String>, Vec<(String, usize)>) {
    let dim = ds.dimension("g").unwrap();
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    for a in ds.annotations(item).unwrap() {
        let p = ds.profile(a.annotator_id()).unwrap();
        if let Some(g) = p.group("g") {
            labels.push(a.values()[0] as usize);
            groups.push(g.to_string());
        }
    }
    let sizes = dim
        .groups()
        .iter()
        .map(|g| (g.clone(), groups.iter().filter(|x| *x == g).count()))
        .filter(|(_, n)| *n > 0)
        .collect();
    (labels, groups, sizes)
}

/// Per partition: nDFU of each pseudo-group (`None` below `min_group`).
fn oracle_partitions(ds: &Dataset, item: &str, cfg: &AnalysisConfig) -> Vec<Vec<Option<f64>>> {
    let (labels, _, sizes) = item_layout(ds, item);
    let sizes: Vec<usize> = sizes.iter().map(|(_, n)| *n).collect();
    let stream = SeededStream::for_item(cfg.master_seed, "g", item);
    (0..cfg.partitions)
        .map(|i| {
            let p = PartitionScheme::random(labels.len(), &sizes, &stream, i as u64).unwrap();
            (0..sizes.len())
                .map(|g| {
                    let members: Vec<usize> = p
                        .assignment()
                        .iter()
                        .enumerate()
                        .filter(|(_, &a)| a as usize == g)
                        .map(|(j, _)| labels[j])
                        .collect();
                    (members.len() >= cfg.min_group).then(|| naive_ndfu(&counts_of(&members, LEVELS)))
                })
                .collect()
        })
        .collect()
}

fn partition_score(p: &[Option<f64>]) -> Option<f64> {
    let v: Vec<f64> = p.iter().flatten().copied().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn oracle_item_apriori(ds: &Dataset, item: &str, cfg: &AnalysisConfig) -> f64 {
    let scores: Vec<f64> = oracle_partitions(ds, item, cfg)
        .iter()
        .filter_map(|p| partition_score(p))
        .collect();
    scores.iter().sum::<f64>() / scores.len() as f64
}

fn fixture() -> Dataset {
    let items: Vec<ItemSpec> = vec![
        ("c0", vec![(0, "x"), (0, "x"), (4, "y"), (4, "y"), (0, "y"), (4, "x"), (2, "z")]),
        ("c1", vec![(4, "x"), (0, "y"), (4, "x"), (0, "y"), (4, "z"), (0, "z")]),
        ("c2", vec![(0, "x"), (4, "x"), (0, "y"), (4, "y"), (1, "y"), (3, "x")]),
        ("c3", vec![(2, "x"), (2, "y"), (2, "x")]),
        ("c4", vec![(0, "x"), (4, "y"), (0, "x"), (4, "y"), (4, "x"), (0, "y"), (4, "y")]),
    ];
    dataset(LEVELS, &["x", "y", "z"], &items)
}

#[test]
fn apriori_matches_oracle() {
    let ds = fixture();
    let cfg = AnalysisConfig { partitions: 100, master_seed: 17, ..Default::default() };
    for item in ["c0", "c1", "c2", "c4"] {
        let got = apriori_item(&ds, item, "g", &cfg).unwrap();
        let want = oracle_item_apriori(&ds, item, &cfg);
        assert!((got.value - want).abs() < 1e-12, "{item}: {} vs {want}", got.value);
        assert_eq!(got.used, 100);
    }

    let report = analyze_dimension(&ds, "g", &cfg).unwrap();
    let filtered = filter_items(&ds, "g", cfg.alpha).unwrap();
    assert_eq!(report.filtered_items, filtered.len());
    let want = filtered
        .iter()
        .map(|i| oracle_item_apriori(&ds, i, &cfg))
        .sum::<f64>()
        / filtered.len() as f64;
    assert!((report.p_apr.unwrap() - want).abs() < 1e-12);
    for g in &report.groups {
        assert_eq!(g.p_apr, report.p_apr.unwrap());
    }
}

#[test]
fn observed_matches_hand_values() {
    // Group x on ten items, with the nDFU worked out by hand from the
    // definition; one y annotation per item keeps two groups present.
    let hand: [(&[usize], f64); 10] = [
        (&[0, 0, 4, 4], 1.0),
        (&[1, 1, 1], 0.0),
        (&[0, 0, 0, 4], 1.0 / 3.0),
        (&[0, 4, 4, 4, 4], 0.25),
        (&[2, 2, 3], 0.0),
        (&[0, 2, 4], 1.0),
        (&[0, 0, 1, 4], 0.5),
        (&[3, 3, 0], 0.5),
        (&[0, 1, 2, 3, 4], 0.0),
        (&[0, 4], 1.0),
    ];
    let names: Vec<String> = (0..10).map(|i| format!("c{i}")).collect();
    let items: Vec<ItemSpec> = names
        .iter()
        .zip(hand.iter())
        .map(|(n, (xs, _))| {
            let mut anns: Vec<(usize, &str)> = xs.iter().map(|&v| (v, "x")).collect();
            anns.push((2, "y"));
            (n.as_str(), anns)
        })
        .collect();
    let ds = dataset(LEVELS, &["x", "y"], &items);
    let all: Vec<&str> = names.iter().map(String::as_str).collect();
    let obs = observed_group(&ds, &all, "g", "x", &AnalysisConfig::default()).unwrap();
    let want = hand.iter().map(|(_, v)| v).sum::<f64>() / 10.0;
    assert!((obs.p_obs - want).abs() < 1e-12);
    assert_eq!(obs.n_items, 10);
    assert_eq!(obs.support, hand.iter().map(|(xs, _)| xs.len()).sum::<usize>());

    // A single y annotation per item never reaches the minimum group size.
    assert!(observed_group(&ds, &all, "g", "y", &AnalysisConfig::default()).is_err());
}

fn student_p(t: f64, df: f64) -> f64 {
    2.0 * (1.0 - StudentsT::new(0.0, 1.0, df).unwrap().cdf(t.abs()))
}

fn sd(xs: &[f64]) -> f64 {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

#[test]
fn null_sample_matches_oracle() {
    let ds = dataset(
        LEVELS,
        &["x", "y"],
        &[
            ("c0", vec![(0, "x"), (0, "x"), (4, "y"), (4, "y"), (0, "y"), (4, "x")]),
            ("c1", vec![(4, "x"), (0, "y"), (4, "x"), (0, "y"), (4, "x"), (0, "x"), (1, "y")]),
        ],
    );
    let items = ["c0", "c1"];
    let t = 3;
    let base = AnalysisConfig { partitions: t, master_seed: 5, ..Default::default() };
    let parts: Vec<_> = items.iter().map(|i| oracle_partitions(&ds, i, &base)).collect();
    let apr = items.iter().map(|i| oracle_item_apriori(&ds, i, &base)).sum::<f64>() / 2.0;

    // Shared sample: per partition index, mean partition score over items.
    let literal = AnalysisConfig { significance_mode: SignificanceMode::Literal, ..base.clone() };
    let got = null_sample(&ds, &items, "g", None, &literal).unwrap();
    assert_eq!(got.len(), t);
    assert!((got.rand_apriori - apr).abs() < 1e-12);
    for i in 0..t {
        let obs = parts.iter().map(|p| partition_score(&p[i]).unwrap()).sum::<f64>() / 2.0;
        assert!((got.rand_apunims[i] - (obs - apr) / (1.0 - apr)).abs() < 1e-12);
    }

    // Per-group sample: the pseudo-group standing in for y (second slot).
    let got = null_sample(&ds, &items, "g", Some("y"), &base).unwrap();
    for i in 0..t {
        let obs = parts.iter().map(|p| p[i][1].unwrap()).sum::<f64>() / 2.0;
        assert!((got.rand_apunims[i] - (obs - apr) / (1.0 - apr)).abs() < 1e-12);
    }
    assert!(null_sample(&ds, &items, "g", None, &base).is_err());

    // The engine's p-value for y equals a t-test on that sample.
    let report = analyze_dimension(&ds, "g", &base).unwrap();
    let y = report.groups.iter().find(|g| g.group == "y").unwrap();
    let mean = got.rand_apunims.iter().sum::<f64>() / t as f64;
    let stat = (mean - y.apunim) / (sd(&got.rand_apunims) * (1.0 + 1.0 / t as f64).sqrt());
    assert!((y.t_statistic - stat).abs() < 1e-9);
    assert!((y.p_raw - student_p(stat, (t - 1) as f64)).abs() < 1e-9);
}

#[test]
fn size_matched_baseline() {
    let ds = fixture();
    let cfg = AnalysisConfig {
        partition_score_mode: PartitionScoreMode::SizeMatched,
        master_seed: 3,
        ..Default::default()
    };
    let report = analyze_dimension(&ds, "g", &cfg).unwrap();
    assert_eq!(report.p_apr, None);
    let filtered = filter_items(&ds, "g", cfg.alpha).unwrap();
    for g in &report.groups {
        let mut vals = Vec::new();
        for item in &filtered {
            let (_, _, sizes) = item_layout(&ds, item);
            let Some(slot) = sizes.iter().position(|(n, s)| n == &g.group && *s >= 2) else {
                continue;
            };
            let parts = oracle_partitions(&ds, item, &cfg);
            vals.push(parts.iter().map(|p| p[slot].unwrap()).sum::<f64>() / parts.len() as f64);
        }
        let want = vals.iter().sum::<f64>() / vals.len() as f64;
        assert!((g.p_apr - want).abs() < 1e-12, "{}", g.group);
        assert_eq!(g.n_items, vals.len());
    }
}

#[test]
fn report_structure_and_diagnostics() {
    let ds = fixture();
    let report = analyze_dimension(&ds, "g", &AnalysisConfig::default()).unwrap();
    // c3 is unanimous and fails the filter.
    assert_eq!(report.filtered_items, 4);
    let names: Vec<&str> = report.groups.iter().map(|g| g.group.as_str()).collect();
    assert_eq!(names, ["x", "y", "z"]);
    for g in &report.groups {
        assert!(g.p_corrected >= g.p_raw);
        assert_eq!(g.reject, g.p_corrected < 0.05);
        assert_eq!(g.degrees_of_freedom, 99);
    }

    // Items where no group reaches two annotations are dropped and reported.
    let sparse = dataset(
        LEVELS,
        &["x", "y"],
        &[
            ("c0", vec![(0, "x"), (4, "y")]),
            ("c1", vec![(0, "x"), (0, "x"), (4, "y"), (4, "y")]),
        ],
    );
    let report = analyze_dimension(&sparse, "g", &AnalysisConfig::default()).unwrap();
    assert_eq!(report.filtered_items, 2);
    assert_eq!(report.analyzed_items, 1);
    assert!(report.diagnostics.contains(&Diagnostic::DroppedItems { count: 1 }));

    let flat = dataset(LEVELS, &["x", "y"], &[("c0", vec![(2, "x"), (2, "y")])]);
    let report = analyze_dimension(&flat, "g", &AnalysisConfig::default()).unwrap();
    assert_eq!(report.diagnostics, [Diagnostic::EmptyFilteredSet]);
    assert!(report.groups.is_empty());

    let one = AnalysisConfig { partitions: 1, ..Default::default() };
    assert!(analyze_dimension(&ds, "g", &one).is_err());
    assert!(analyze_dimension(&ds, "nope", &AnalysisConfig::default()).is_err());
}

#[test]
fn missing_memberships_are_excluded() {
    let dim = Dimension::new("g", ["x", "y"]).unwrap();
    let mut b = Dataset::builder(LabelScale::ordinal_range(LEVELS).unwrap(), vec![dim]).unwrap();
    let rows = [("a", Some("x"), 0), ("b", Some("x"), 0), ("c", Some("y"), 4), ("d", Some("y"), 4), ("e", None, 4)];
    for (id, g, v) in rows {
        let mut p = AnnotatorProfile::new(id);
        if let Some(g) = g {
            p.set_group("g", g);
        }
        b.add_profile(p).unwrap();
        b.add_annotation(AnnotationRecord::single("c0", id, v).unwrap()).unwrap();
    }
    let ds = b.build().unwrap();
    let report = analyze_dimension(&ds, "g", &AnalysisConfig::default()).unwrap();
    assert!(report
        .diagnostics
        .contains(&Diagnostic::MissingGroupAnnotations { count: 1 }));
    let x = &report.groups[0];
    assert_eq!((x.support, x.p_obs), (2, 0.0));
}

#[test]
fn deterministic_and_seed_stable() {
    let ds = synth::generate(&SyntheticSpec::planted(1000, 10, 1.0, 0)).unwrap();
    let cfg = AnalysisConfig::default();
    let a = analyze_all(&ds, &cfg).unwrap();
    assert_eq!(a, analyze_all(&ds, &cfg).unwrap());
    let b = analyze_all(&ds, &AnalysisConfig { master_seed: 1, ..cfg }).unwrap();
    for (x, y) in a.dimensions[0].groups.iter().zip(&b.dimensions[0].groups) {
        assert!((x.apunim - y.apunim).abs() < 0.01, "{} vs {}", x.apunim, y.apunim);
        assert_eq!(x.p_obs, y.p_obs);
    }
}

#[test]
fn swapping_groups_swaps_observed_values() {
    let ds = synth::generate(&SyntheticSpec::planted(200, 9, 0.5, 11)).unwrap();
    let dim = Dimension::new("group", ["a", "b"]).unwrap();
    let mut b = Dataset::builder(ds.scale().clone(), vec![dim]).unwrap();
    for p in ds.profiles() {
        let g = if p.group("group") == Some("a") { "b" } else { "a" };
        b.add_profile(AnnotatorProfile::new(p.annotator_id()).with_group("group", g))
            .unwrap();
    }
    for a in ds.iter_annotations() {
        b.add_annotation(a.clone()).unwrap();
    }
    let swapped = b.build().unwrap();
    let cfg = AnalysisConfig::default();
    let r1 = analyze_all(&ds, &cfg).unwrap();
    let r2 = analyze_all(&swapped, &cfg).unwrap();
    let (g1, g2) = (&r1.dimensions[0].groups, &r2.dimensions[0].groups);
    for (x, y) in [(0, 1), (1, 0)] {
        assert_eq!(g1[x].p_obs, g2[y].p_obs);
        assert_eq!(g1[x].support, g2[y].support);
        assert_eq!(g1[x].n_items, g2[y].n_items);
    }
    assert_eq!(r1.dimensions[0].filtered_items, r2.dimensions[0].filtered_items);
}

#[test]
fn null_pseudo_apunims_center_on_zero() {
    let ds = synth::generate(&SyntheticSpec::null(500, 10, 21)).unwrap();
    let cfg = AnalysisConfig { significance_mode: SignificanceMode::Literal, ..Default::default() };
    let filtered = filter_items(&ds, "group", cfg.alpha).unwrap();
    let null = null_sample(&ds, &filtered, "group", None, &cfg).unwrap();
    assert!(null.reused_partitions);
    let m = null.mean().unwrap();
    let se = sd(&null.rand_apunims) / (null.len() as f64).sqrt();
    assert!(m.abs() < 2.0 * se + 1e-12, "mean {m}, se {se}");
}
