//! Report renderers. Every renderer returns the full document as a string so
//! callers can print it or write it, byte-for-byte the same either way.

use apunim_core::synth::SensitivityCurve;
use apunim_core::{ApunimReport, Dataset, PolarizationScore};
use serde::Serialize;

use crate::AppError;

/// Plain decimal for CSV cells; empty for values that are not numbers.
fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        x.to_string()
    }
}

fn csv_string<F>(header: &[&str], fill: F) -> Result<String, AppError>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let run = |w: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
        w.write_record(header)?;
        fill(w)
    };
    run(&mut w).map_err(|e| AppError::Internal(e.to_string()))?;
    let bytes = w
        .into_inner()
        .map_err(|e| AppError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| AppError::Internal(e.to_string()))
}

pub const REPORT_COLUMNS: [&str; 9] = [
    "dimension",
    "group",
    "apunim",
    "p_raw",
    "p_corrected",
    "support",
    "n_items",
    "p_obs",
    "p_apr",
];

pub fn report_csv(report: &ApunimReport) -> Result<String, AppError> {
    csv_string(&REPORT_COLUMNS, |w| {
        for g in report.dimensions.iter().flat_map(|d| &d.groups) {
            w.write_record([
                g.dimension.clone(),
                g.group.clone(),
                num(g.apunim),
                num(g.p_raw),
                num(g.p_corrected),
                g.support.to_string(),
                g.n_items.to_string(),
                num(g.p_obs),
                num(g.p_apr),
            ])?;
        }
        Ok(())
    })
}

pub fn report_json(report: &ApunimReport) -> Result<String, AppError> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| AppError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else {
        ""
    }
}

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.first().map_or(0, Vec::len);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (cell, w))| {
                if i < 2 {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn fixed(x: f64, digits: usize) -> String {
    if x.is_nan() {
        "n/a".to_owned()
    } else {
        format!("{x:.digits$}")
    }
}

/// Human-readable summary with significance stars on corrected p-values.
pub fn report_table(report: &ApunimReport) -> String {
    let c = &report.config;
    let mut out = format!(
        "alpha={} partitions={} fwer={} seed={} min_group={} scoring={:?} significance={:?}\n",
        c.alpha,
        c.partitions,
        c.fwer,
        c.master_seed,
        c.min_group,
        c.partition_score_mode,
        c.significance_mode
    );
    if report.nominal_scale_warning {
        out.push_str("warning: nominal scale; nDFU depends on the declared level order\n");
    }
    for d in &report.dimensions {
        out.push('\n');
        let apr = d.p_apr.map_or_else(|| "per group".to_owned(), |p| fixed(p, 4));
        out.push_str(&format!(
            "{}: {} polarized item(s), {} analyzed, p_apr {}\n",
            d.dimension, d.filtered_items, d.analyzed_items, apr
        ));
        if !d.groups.is_empty() {
            let mut rows = vec![["group", "apunim", "", "p_raw", "p_corrected", "support", "n_items"]
                .map(str::to_owned)
                .to_vec()];
            for g in &d.groups {
                rows.push(vec![
                    g.group.clone(),
                    fixed(g.apunim, 4),
                    stars(g.p_corrected).to_owned(),
                    fixed(g.p_raw, 4),
                    fixed(g.p_corrected, 4),
                    g.support.to_string(),
                    g.n_items.to_string(),
                ]);
            }
            // The stars column reads better glued to the value.
            let rows: Vec<Vec<String>> = rows
                .into_iter()
                .map(|mut r| {
                    let s = r.remove(2);
                    r[1] = format!("{}{s}", r[1]);
                    r
                })
                .collect();
            for line in table(&rows).lines() {
                out.push_str("  ");
                out.push_str(line);
                out.push('\n');
            }
        }
        for diag in &d.diagnostics {
            out.push_str(&format!("  note: {diag}\n"));
        }
    }
    out.push_str("\n***: p<0.01, **: p<0.05 (Holm-corrected)\n");
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    pub dimension: String,
    pub group: String,
    pub ordinal_position_normalized: f64,
    pub apunim: f64,
    pub p_corrected: f64,
}

/// Groups of ordinal dimensions placed on `[0, 1]` by rank. With
/// `significant_only`, dimensions with fewer than two rejected groups are
/// left out.
pub fn trend_rows(report: &ApunimReport, dataset: &Dataset, significant_only: bool) -> Vec<TrendRow> {
    let mut out = Vec::new();
    for d in &report.dimensions {
        let Some(dim) = dataset.dimension(&d.dimension) else {
            continue;
        };
        if !dim.is_ordinal() {
            continue;
        }
        if significant_only && d.groups.iter().filter(|g| g.reject).count() < 2 {
            continue;
        }
        let mut rows: Vec<TrendRow> = d
            .groups
            .iter()
            .filter_map(|g| {
                Some(TrendRow {
                    dimension: d.dimension.clone(),
                    group: g.group.clone(),
                    ordinal_position_normalized: dim.ordinal_position(&g.group)?,
                    apunim: g.apunim,
                    p_corrected: g.p_corrected,
                })
            })
            .collect();
        rows.sort_by(|a, b| a.ordinal_position_normalized.total_cmp(&b.ordinal_position_normalized));
        out.extend(rows);
    }
    out
}

pub fn trend_csv(rows: &[TrendRow]) -> Result<String, AppError> {
    csv_string(
        &["dimension", "group", "ordinal_position_normalized", "apunim", "p_corrected"],
        |w| {
            for r in rows {
                w.write_record([
                    r.dimension.clone(),
                    r.group.clone(),
                    num(r.ordinal_position_normalized),
                    num(r.apunim),
                    num(r.p_corrected),
                ])?;
            }
            Ok(())
        },
    )
}

pub fn polarization_csv(scores: &[(String, PolarizationScore)]) -> Result<String, AppError> {
    csv_string(&["item_id", "ndfu", "n_annotations"], |w| {
        for (id, s) in scores {
            w.write_record([id.clone(), num(s.value), s.n_annotations.to_string()])?;
        }
        Ok(())
    })
}

/// Counts of item nDFU values in `bins` equal-width bins over `[0, 1]`;
/// the last bin is closed.
pub fn histogram_counts(values: &[f64], bins: usize) -> Vec<usize> {
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = ((v * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
}

pub fn histogram_csv(values: &[f64], bins: usize) -> Result<String, AppError> {
    let counts = histogram_counts(values, bins);
    csv_string(&["bin_start", "bin_end", "count"], |w| {
        for (i, c) in counts.iter().enumerate() {
            w.write_record([
                num(i as f64 / bins as f64),
                num((i + 1) as f64 / bins as f64),
                c.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn sensitivity_csv(curve: &SensitivityCurve) -> Result<String, AppError> {
    csv_string(&["k", "std", "n_items_used"], |w| {
        for p in &curve.points {
            w.write_record([p.k.to_string(), num(p.std), p.n_items_used.to_string()])?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use apunim_core::{AnalysisConfig, DimensionReport, Dimension, GroupResult, LabelScale, ScaleKind};

    #[test]
    fn star_thresholds() {
        assert_eq!(stars(0.009), "***");
        assert_eq!(stars(0.01), "**");
        assert_eq!(stars(0.049), "**");
        assert_eq!(stars(0.05), "");
    }

    #[test]
    fn histogram_edges() {
        assert_eq!(histogram_counts(&[0.0, 0.1, 0.5, 0.99, 1.0], 2), [2, 3]);
        assert_eq!(histogram_counts(&[], 3), [0, 0, 0]);
    }

    fn group(dimension: &str, name: &str, reject: bool) -> GroupResult {
        GroupResult {
            dimension: dimension.to_owned(),
            group: name.to_owned(),
            apunim: 0.1,
            p_raw: 0.01,
            p_corrected: if reject { 0.01 } else { 0.5 },
            reject,
            t_statistic: 1.0,
            degrees_of_freedom: 99,
            degenerate_variance: false,
            support: 10,
            n_items: 5,
            p_obs: 0.5,
            p_apr: 0.4,
        }
    }

    #[test]
    fn significant_only_needs_two_rejections() {
        let lvl = Dimension::ordinal("lvl", ["lo", "mid", "hi"]).unwrap();
        let age = Dimension::ordinal("age", ["young", "old"]).unwrap();
        let ds = Dataset::builder(LabelScale::ordinal_range(3).unwrap(), vec![lvl, age])
            .unwrap()
            .build()
            .unwrap();
        let dim = |name: &str, groups: Vec<GroupResult>| DimensionReport {
            dimension: name.to_owned(),
            filtered_items: 5,
            analyzed_items: 5,
            p_apr: Some(0.4),
            groups,
            diagnostics: Vec::new(),
        };
        let report = ApunimReport {
            config: AnalysisConfig::default().echo(),
            scale_kind: ScaleKind::Ordinal,
            nominal_scale_warning: false,
            dimensions: vec![
                dim("lvl", vec![group("lvl", "hi", true), group("lvl", "lo", true), group("lvl", "mid", false)]),
                dim("age", vec![group("age", "young", true), group("age", "old", false)]),
            ],
        };
        let all = trend_rows(&report, &ds, false);
        let order: Vec<(&str, f64)> = all
            .iter()
            .map(|r| (r.group.as_str(), r.ordinal_position_normalized))
            .collect();
        assert_eq!(order, [("lo", 0.0), ("mid", 0.5), ("hi", 1.0), ("young", 0.0), ("old", 1.0)]);
        let sig = trend_rows(&report, &ds, true);
        assert!(sig.iter().all(|r| r.dimension == "lvl"));
        assert_eq!(sig.len(), 3);
    }

    #[test]
    fn nan_cells_are_empty() {
        assert_eq!(num(f64::NAN), "");
        assert_eq!(num(0.25), "0.25");
    }
}
