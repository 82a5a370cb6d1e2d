//! CSV formats.
//!
//! Datasets use the header `x,y,value`; prediction sites may omit `value`.
//! Reals are written with Rust's shortest round-trip formatting, so a value
//! read back is bit-identical to the value written.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use fourn_core::importance::ImportanceGroup;
use fourn_core::simulate::PottsSample;
use fourn_core::spatial::find_duplicate;
use fourn_core::{Location, SpatialDataset};

use crate::error::{FournError, Result};

const DATASET_HEADER: &str = "x,y,value";

struct Table {
    header: Vec<String>,
    rows: Vec<(u64, Vec<f64>)>,
}

fn read_table<R: Read>(reader: R, path: &Path, expected: &'static str) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let parse_err = |line: u64, message: String| FournError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let header: Vec<String> = match records.next() {
        Some(Ok(r)) => r.iter().map(str::to_owned).collect(),
        Some(Err(e)) => return Err(parse_err(1, e.to_string())),
        None => {
            return Err(FournError::MissingHeader {
                path: path.to_path_buf(),
                expected,
            })
        }
    };
    if header.iter().any(|h| h.parse::<f64>().is_ok()) {
        return Err(FournError::MissingHeader {
            path: path.to_path_buf(),
            expected,
        });
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        let vals = rec
            .iter()
            .zip(&header)
            .map(|(field, name)| match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                Ok(_) => Err(parse_err(line, format!("non-finite {name} `{field}`"))),
                Err(_) => Err(parse_err(line, format!("invalid number for {name}: `{field}`"))),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, vals));
    }
    Ok(Table { header, rows })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| FournError::io(path, e))
}

/// Parse a dataset with header `x,y,value` from any reader. `path` is used
/// in error messages only.
pub fn read_dataset<R: Read>(reader: R, path: &Path) -> Result<SpatialDataset> {
    let table = read_table(reader, path, DATASET_HEADER)?;
    if table.header != ["x", "y", "value"] {
        return Err(FournError::MissingHeader {
            path: path.to_path_buf(),
            expected: DATASET_HEADER,
        });
    }
    let locs: Vec<Location> = table.rows.iter().map(|(_, v)| Location::new(v[0], v[1])).collect();
    if let Some((a, b)) = find_duplicate(&locs) {
        let (first, second) = (table.rows[a].0.min(table.rows[b].0), table.rows[a].0.max(table.rows[b].0));
        return Err(FournError::DuplicateLocation {
            path: path.to_path_buf(),
            first,
            second,
        });
    }
    let values = table.rows.iter().map(|(_, v)| v[2]).collect();
    Ok(SpatialDataset::new(locs, values)?)
}

/// Load a dataset from a CSV file with header `x,y,value`.
pub fn load_csv(path: impl AsRef<Path>) -> Result<SpatialDataset> {
    let path = path.as_ref();
    read_dataset(open(path)?, path)
}

/// Prediction sites from a CSV with header `x,y` or `x,y,value`; the values,
/// when present, are returned as ground truth.
pub fn load_sites(path: impl AsRef<Path>) -> Result<(Vec<Location>, Option<Vec<f64>>)> {
    let path = path.as_ref();
    let table = read_table(open(path)?, path, "x,y[,value]")?;
    let with_values = match table.header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["x", "y"] => false,
        ["x", "y", "value"] => true,
        _ => {
            return Err(FournError::MissingHeader {
                path: path.to_path_buf(),
                expected: "x,y[,value]",
            })
        }
    };
    let locs = table.rows.iter().map(|(_, v)| Location::new(v[0], v[1])).collect();
    let values = with_values.then(|| table.rows.iter().map(|(_, v)| v[2]).collect());
    Ok((locs, values))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| FournError::io(dir, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| FournError::io(path, e))?))
}

/// Write rows of preformatted fields under `header`.
pub(crate) fn write_rows<I>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = create(path)?;
    let io = |e| FournError::io(path, e);
    writeln!(w, "{header}").map_err(io)?;
    for row in rows {
        writeln!(w, "{}", row.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_csv(path: impl AsRef<Path>, dataset: &SpatialDataset) -> Result<()> {
    let rows = dataset
        .locations()
        .iter()
        .zip(dataset.responses())
        .map(|(l, v)| vec![l.x.to_string(), l.y.to_string(), v.to_string()]);
    write_rows(path.as_ref(), DATASET_HEADER, rows)
}

/// Potts data with an extra `label` column.
pub fn write_potts_csv(path: impl AsRef<Path>, sample: &PottsSample) -> Result<()> {
    let ds = &sample.dataset;
    let rows = ds
        .locations()
        .iter()
        .zip(ds.responses())
        .zip(&sample.labels)
        .map(|((l, v), g)| vec![l.x.to_string(), l.y.to_string(), v.to_string(), g.to_string()]);
    write_rows(path.as_ref(), "x,y,value,label", rows)
}

/// `x,y,truth,pred`; `truth` is left empty when unknown.
pub fn write_predictions(
    path: impl AsRef<Path>,
    sites: &[Location],
    truth: Option<&[f64]>,
    pred: &[f64],
) -> Result<()> {
    let rows = sites.iter().zip(pred).enumerate().map(|(i, (l, p))| {
        let t = truth.map_or(String::new(), |t| t[i].to_string());
        vec![l.x.to_string(), l.y.to_string(), t, p.to_string()]
    });
    write_rows(path.as_ref(), "x,y,truth,pred", rows)
}

pub fn write_importance(path: impl AsRef<Path>, groups: &[(ImportanceGroup, f64)]) -> Result<()> {
    let rows = groups.iter().map(|(g, v)| vec![g.label(), v.to_string()]);
    write_rows(path.as_ref(), "group,importance", rows)
}
