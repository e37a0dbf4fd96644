//! CSV ingestion and export of annotation datasets.
//!
//! Annotations: `item_id,annotator_id,value`, where `value` holds one level
//! identifier or several joined by `|`. Annotators: `annotator_id` plus one
//! column per dimension; an empty cell means the annotator has no value for
//! that dimension.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::Write;
use std::path::Path;

use apunim_core::{
    AnnotationRecord, AnnotatorProfile, Dataset, Dimension, Error as CoreError, LabelScale,
    ScaleKind,
};

use crate::config::{DimensionConfig, FileConfig, ScaleConfig};
use crate::AppError;

pub const MULTI_LABEL_SEPARATOR: char = '|';

struct AnnotatorRow {
    line: u64,
    id: String,
    cells: Vec<String>,
}

struct AnnotationRow {
    line: u64,
    item: String,
    annotator: String,
    values: Vec<String>,
}

fn at(path: &Path, line: u64, msg: impl std::fmt::Display) -> AppError {
    AppError::Validation(format!("{}:{line}: {msg}", path.display()))
}

fn open(path: &Path) -> Result<csv::Reader<File>, AppError> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize, AppError> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| at(path, 1, format!("missing required column `{name}`")))
}

fn read_annotators(path: &Path) -> Result<(Vec<String>, Vec<AnnotatorRow>), AppError> {
    let mut rdr = open(path)?;
    let headers = rdr
        .headers()
        .map_err(|e| at(path, 1, e))?
        .clone();
    let id_col = column(&headers, "annotator_id", path)?;
    let dims: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != id_col)
        .map(|(_, h)| h.to_owned())
        .collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            at(path, line, format!("malformed row: {e}"))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let id = rec.get(id_col).unwrap_or_default().to_owned();
        if id.is_empty() {
            return Err(at(path, line, "empty annotator_id"));
        }
        let cells = rec
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != id_col)
            .map(|(_, c)| c.to_owned())
            .collect();
        rows.push(AnnotatorRow { line, id, cells });
    }
    Ok((dims, rows))
}

fn read_annotations(path: &Path) -> Result<Vec<AnnotationRow>, AppError> {
    let mut rdr = open(path)?;
    let headers = rdr.headers().map_err(|e| at(path, 1, e))?.clone();
    let item_col = column(&headers, "item_id", path)?;
    let ann_col = column(&headers, "annotator_id", path)?;
    let val_col = column(&headers, "value", path)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            at(path, line, format!("malformed row: {e}"))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let get = |c: usize, name: &str| -> Result<String, AppError> {
            match rec.get(c) {
                Some(v) if !v.is_empty() => Ok(v.to_owned()),
                _ => Err(at(path, line, format!("empty `{name}`"))),
            }
        };
        let item = get(item_col, "item_id")?;
        let annotator = get(ann_col, "annotator_id")?;
        let values = get(val_col, "value")?
            .split(MULTI_LABEL_SEPARATOR)
            .map(|v| v.trim().to_owned())
            .collect::<Vec<_>>();
        if values.iter().any(String::is_empty) {
            return Err(at(path, line, "empty level in `value`"));
        }
        rows.push(AnnotationRow {
            line,
            item,
            annotator,
            values,
        });
    }
    Ok(rows)
}

/// Sorts numerically when every token is a number, lexicographically
/// otherwise.
fn sorted_tokens(tokens: BTreeSet<&str>) -> Vec<String> {
    let mut out: Vec<String> = tokens.into_iter().map(str::to_owned).collect();
    let numeric: Option<Vec<f64>> = out.iter().map(|t| t.parse::<f64>().ok()).collect();
    if let Some(nums) = numeric {
        let mut pairs: Vec<(f64, String)> = nums.into_iter().zip(out).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        out = pairs.into_iter().map(|(_, t)| t).collect();
    }
    out
}

fn build_dimension(cfg: &DimensionConfig, observed: BTreeSet<&str>) -> Result<Dimension, AppError> {
    let groups = match (&cfg.groups, &cfg.ordinal_order) {
        (Some(g), _) => g.clone(),
        (None, Some(order)) => order.clone(),
        (None, None) => observed.into_iter().map(str::to_owned).collect(),
    };
    let dim = Dimension::new(cfg.name.clone(), groups).map_err(AppError::from)?;
    match &cfg.ordinal_order {
        Some(order) => dim.with_ordinal_order(order.clone()).map_err(AppError::from),
        None => Ok(dim),
    }
}

/// Reads and validates both files against the scale and dimensions of
/// `config`. A missing scale is inferred from the values (ordinal, numeric
/// order when possible); missing dimensions come from the annotator columns.
pub fn load_dataset(annotations: &Path, annotators: &Path, config: &FileConfig) -> Result<Dataset, AppError> {
    let (columns, profiles) = read_annotators(annotators)?;
    let rows = read_annotations(annotations)?;

    let declared: Vec<DimensionConfig> = if config.dimensions.is_empty() {
        columns
            .iter()
            .map(|c| DimensionConfig {
                name: c.clone(),
                groups: None,
                ordinal_order: None,
            })
            .collect()
    } else {
        for c in &columns {
            if !config.dimensions.iter().any(|d| &d.name == c) {
                log::warn!("{}: ignoring undeclared column `{c}`", annotators.display());
            }
        }
        config.dimensions.clone()
    };
    let mut dims = Vec::with_capacity(declared.len());
    let mut dim_cols = Vec::with_capacity(declared.len());
    for d in &declared {
        let col = columns.iter().position(|c| c == &d.name).ok_or_else(|| {
            at(annotators, 1, format!("declared dimension `{}` has no column", d.name))
        })?;
        let observed: BTreeSet<&str> = profiles
            .iter()
            .map(|r| r.cells.get(col).map_or("", String::as_str))
            .filter(|v| !v.is_empty())
            .collect();
        dims.push(build_dimension(d, observed)?);
        dim_cols.push(col);
    }

    let scale = match &config.scale {
        Some(ScaleConfig { kind, levels }) => LabelScale::new(*kind, levels.clone())?,
        None => {
            let seen: BTreeSet<&str> = rows
                .iter()
                .flat_map(|r| r.values.iter().map(String::as_str))
                .collect();
            let levels = sorted_tokens(seen);
            log::warn!(
                "no scale declared; inferring an ordinal scale with levels {}",
                levels.join(", ")
            );
            LabelScale::new(ScaleKind::Ordinal, levels)?
        }
    };

    let mut b = Dataset::builder(scale.clone(), dims)?;
    for r in &profiles {
        let mut p = AnnotatorProfile::new(r.id.clone());
        for (d, &col) in declared.iter().zip(&dim_cols) {
            let v = r.cells.get(col).map_or("", String::as_str);
            if !v.is_empty() {
                p.set_group(d.name.clone(), v);
            }
        }
        b.add_profile(p).map_err(|e| at(annotators, r.line, e))?;
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, l) in scale.levels().iter().enumerate() {
        index.insert(l.as_str(), i);
    }
    for r in &rows {
        if !b.has_profile(&r.annotator) {
            return Err(at(
                annotations,
                r.line,
                format!("annotator `{}` referenced but not profiled", r.annotator),
            ));
        }
        let mut bins = Vec::with_capacity(r.values.len());
        for v in &r.values {
            let bin = index.get(v.as_str()).ok_or_else(|| {
                at(annotations, r.line, format!("value `{v}` out of scale"))
            })?;
            bins.push(*bin);
        }
        let rec = AnnotationRecord::new(r.item.clone(), r.annotator.clone(), bins)
            .map_err(|e| at(annotations, r.line, e))?;
        b.add_annotation(rec).map_err(|e| at(annotations, r.line, e))?;
    }
    Ok(b.build()?)
}

/// Writes `annotations.csv`, `annotators.csv` and a matching `config.toml`
/// into `dir`.
pub fn write_dataset(dataset: &Dataset, dir: &Path) -> Result<(), AppError> {
    std::fs::create_dir_all(dir).map_err(AppError::io(dir))?;
    let levels = dataset.scale().levels();

    let path = dir.join("annotations.csv");
    let mut w = csv::Writer::from_path(&path).map_err(AppError::csv(&path))?;
    w.write_record(["item_id", "annotator_id", "value"])
        .map_err(AppError::csv(&path))?;
    for a in dataset.iter_annotations() {
        let value = a
            .values()
            .iter()
            .map(|&v| levels[v as usize].as_str())
            .collect::<Vec<_>>()
            .join("|");
        w.write_record([a.item_id(), a.annotator_id(), value.as_str()])
            .map_err(AppError::csv(&path))?;
    }
    w.flush().map_err(AppError::io(&path))?;

    let path = dir.join("annotators.csv");
    let mut w = csv::Writer::from_path(&path).map_err(AppError::csv(&path))?;
    let mut header = vec!["annotator_id"];
    header.extend(dataset.dimensions().iter().map(|d| d.name()));
    w.write_record(&header).map_err(AppError::csv(&path))?;
    for p in dataset.profiles() {
        let mut row = vec![p.annotator_id()];
        row.extend(dataset.dimensions().iter().map(|d| p.group(d.name()).unwrap_or("")));
        w.write_record(&row).map_err(AppError::csv(&path))?;
    }
    w.flush().map_err(AppError::io(&path))?;

    let config = FileConfig {
        scale: Some(ScaleConfig {
            kind: dataset.scale().kind(),
            levels: levels.to_vec(),
        }),
        analysis: Default::default(),
        dimensions: dataset
            .dimensions()
            .iter()
            .map(|d| DimensionConfig {
                name: d.name().to_owned(),
                groups: Some(d.groups().to_vec()),
                ordinal_order: d.ordinal_order().map(<[String]>::to_vec),
            })
            .collect(),
    };
    let path = dir.join("config.toml");
    File::create(&path)
        .and_then(|mut f| f.write_all(config.to_toml().as_bytes()))
        .map_err(AppError::io(&path))?;
    Ok(())
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        AppError::Validation(e.to_string())
    }
}
