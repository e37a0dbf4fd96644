mod common;

use apunim_core::{
    apunim, filter_items, holm_correct, ndfu, t_test, Histogram, NullSample, TestForm,
};
use common::naive_ndfu;
use proptest::prelude::*;

fn score(counts: &[u32]) -> f64 {
    ndfu(&Histogram::from_counts(counts.to_vec())).unwrap().value
}

fn histogram() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..=50, 2..=10).prop_filter("non-empty", |c| c.iter().any(|&x| x > 0))
}

/// Rises to a peak, then falls (both weakly).
fn unimodal() -> impl Strategy<Value = Vec<u32>> {
    (prop::collection::vec(0u32..=20, 1..=9), 0usize..10, 1u32..=20).prop_map(|(steps, split, peak)| {
        let split = split.min(steps.len());
        let mut up: Vec<u32> = steps[..split].to_vec();
        up.sort_unstable();
        let mut down: Vec<u32> = steps[split..].to_vec();
        down.sort_unstable_by(|a, b| b.cmp(a));
        let top = peak + up.iter().chain(&down).copied().max().unwrap_or(0);
        let mut out = up;
        out.push(top);
        out.extend(down);
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn matches_pairwise_oracle(c in histogram()) {
        prop_assert!((score(&c) - naive_ndfu(&c)).abs() < 1e-12);
    }

    #[test]
    fn bounded(c in histogram()) {
        let v = score(&c);
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn unimodal_shapes_score_zero(c in unimodal()) {
        prop_assert_eq!(score(&c), 0.0);
    }

    #[test]
    fn scale_invariant(c in histogram(), k in 2u32..7) {
        let scaled: Vec<u32> = c.iter().map(|x| x * k).collect();
        prop_assert!((score(&c) - score(&scaled)).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn holm_equivariant_and_dominating(ps in prop::collection::vec(0.0f64..=1.0, 1..12), rot in 0usize..12) {
        let out = holm_correct(&ps, 0.95).unwrap();
        for (p, c) in ps.iter().zip(&out.corrected) {
            prop_assert!(c >= p && *c <= 1.0);
        }
        // Reference: sorted step-down with running maximum.
        let m = ps.len();
        let mut sorted: Vec<(usize, f64)> = ps.iter().copied().enumerate().collect();
        sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut run: f64 = 0.0;
        for (k, (i, p)) in sorted.iter().enumerate() {
            run = run.max(((m - k) as f64 * p).min(1.0));
            prop_assert!((out.corrected[*i] - run).abs() < 1e-15);
        }
        let r = rot % m;
        let mut rotated = ps.clone();
        rotated.rotate_left(r);
        let mut back = holm_correct(&rotated, 0.95).unwrap().corrected;
        back.rotate_right(r);
        prop_assert_eq!(back, out.corrected);
    }

    #[test]
    fn t_test_symmetric(xs in prop::collection::vec(-1.0f64..1.0, 3..40), d in 0.0f64..2.0) {
        let null = NullSample { rand_apunims: xs.clone(), rand_apriori: 0.0, reused_partitions: true };
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        for form in [TestForm::Predictive, TestForm::MeanStandardError] {
            let a = t_test(mean + d, &null, form).unwrap();
            let b = t_test(mean - d, &null, form).unwrap();
            prop_assert!((a.p_raw - b.p_raw).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&a.p_raw));
        }
    }

    #[test]
    fn filter_is_monotone_in_alpha(
        labels in prop::collection::vec(prop::collection::vec((0usize..5, 0usize..2), 2..12), 1..15),
        a1 in 0.0f64..1.0,
        a2 in 0.0f64..1.0,
    ) {
        let names: Vec<String> = (0..labels.len()).map(|i| format!("c{i}")).collect();
        let items: Vec<common::ItemSpec> = names
            .iter()
            .zip(&labels)
            .map(|(n, ls)| (n.as_str(), ls.iter().map(|&(v, g)| (v, ["x", "y"][g])).collect()))
            .collect();
        let ds = common::dataset(5, &["x", "y"], &items);
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let wide = filter_items(&ds, "g", lo).unwrap();
        let narrow = filter_items(&ds, "g", hi).unwrap();
        prop_assert!(narrow.iter().all(|i| wide.contains(i)));
    }
}

#[test]
fn reference_histograms() {
    assert_eq!(score(&[3, 0, 0, 0, 3]), 1.0);
    assert_eq!(score(&[0, 5, 0]), 0.0);
    assert!((score(&[2, 0, 0, 0, 3]) - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn apunim_grid() {
    let grid: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
    for &apr in &grid {
        assert_eq!(apunim(apr, apr).unwrap(), 0.0);
        let mut last = f64::NEG_INFINITY;
        for &obs in &grid {
            let v = apunim(obs, apr).unwrap();
            assert!((v - (obs - apr) / (1.0 - apr)).abs() < 1e-15);
            assert!(v > last);
            last = v;
        }
    }
    assert_eq!(apunim(1.0, 0.0).unwrap(), 1.0);
    assert_eq!(apunim(0.0, 0.5).unwrap(), -1.0);
}
