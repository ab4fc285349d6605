//! Dataset CSV: `design_id,b1..b5,t1..t12,dmin,pdmin,rfc,rft,sedc,sedt,vib_rms`.

use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::io::{check_header, parse_field};
use crate::geometry::{FeatureVector, FEATURE_COUNT};

use super::PerformanceRecord;

/// One design's surrogate inputs and performance outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub design_id: String,
    pub features: FeatureVector,
    pub record: PerformanceRecord,
}

/// Row count and the default train/test partition of an ingested dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetSummary {
    pub rows: usize,
    pub train: usize,
    pub test: usize,
}

impl DatasetSummary {
    /// 80/20 split, the 200/50 partition for 250 designs.
    pub fn for_rows(rows: usize) -> Self {
        let train = (rows * 4 + 2) / 5;
        Self {
            rows,
            train,
            test: rows - train,
        }
    }
}

pub fn header() -> Vec<String> {
    let mut h = vec!["design_id".to_string()];
    h.extend(FeatureVector::names());
    h.extend(["rfc", "rft", "sedc", "sedt", "vib_rms"].map(String::from));
    h
}

pub fn read_dataset<R: Read>(reader: R) -> Result<Vec<DatasetRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let expected = header();
    let expected: Vec<&str> = expected.iter().map(String::as_str).collect();
    check_header(r.headers()?, &expected)?;

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (i, rec) in r.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if rec.len() != expected.len() {
            return Err(Error::Parse {
                row,
                message: format!("expected {} columns, found {}", expected.len(), rec.len()),
            });
        }
        let id = rec[0].trim().to_string();
        if id.is_empty() {
            return Err(Error::Parse {
                row,
                message: "empty design_id".into(),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(Error::Parse {
                row,
                message: format!("duplicate design_id `{id}`"),
            });
        }
        let mut feats = [0.0; FEATURE_COUNT];
        for (j, f) in feats.iter_mut().enumerate() {
            *f = parse_field(&rec, j + 1, row)?;
        }
        let mut outs = [0.0; 5];
        for (j, o) in outs.iter_mut().enumerate() {
            *o = parse_field(&rec, FEATURE_COUNT + 1 + j, row)?;
        }
        let record = PerformanceRecord::from_array_unchecked(outs);
        record.validate().map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        rows.push(DatasetRow {
            design_id: id,
            features: FeatureVector::from_array(&feats),
            record,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(rows)
}

/// Reads and validates a dataset file, logging its size and default split.
pub fn ingest_dataset(path: impl AsRef<Path>) -> Result<(Vec<DatasetRow>, DatasetSummary)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let rows = read_dataset(file)?;
    let summary = DatasetSummary::for_rows(rows.len());
    log::info!(
        "{}: {} rows ({} train / {} test)",
        path.display(),
        summary.rows,
        summary.train,
        summary.test
    );
    Ok((rows, summary))
}

pub fn write_dataset<W: Write>(rows: &[DatasetRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header())?;
    for row in rows {
        let mut rec = vec![row.design_id.clone()];
        rec.extend(row.features.to_array().iter().map(f64::to_string));
        rec.extend(row.record.to_array().iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<dataset>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::REFERENCE_RECORD;

    fn row(i: usize) -> DatasetRow {
        let mut f = [0.0; FEATURE_COUNT];
        for (j, v) in f.iter_mut().enumerate() {
            *v = (i * 31 + j) as f64 * 0.125;
        }
        DatasetRow {
            design_id: format!("D{i:04}"),
            features: FeatureVector::from_array(&f),
            record: REFERENCE_RECORD,
        }
    }

    fn to_text(rows: &[DatasetRow]) -> String {
        let mut buf = Vec::new();
        write_dataset(rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn header_layout() {
        let h = header().join(",");
        assert!(h.starts_with("design_id,b1,b2,b3,b4,b5,t1,"));
        assert!(h.ends_with(",t12,dmin,pdmin,rfc,rft,sedc,sedt,vib_rms"));
    }

    #[test]
    fn round_trip_250_rows() {
        let rows: Vec<_> = (0..250).map(row).collect();
        let back = read_dataset(to_text(&rows).as_bytes()).unwrap();
        assert_eq!(back.len(), 250);
        assert_eq!(back, rows);
        assert_eq!(
            DatasetSummary::for_rows(250),
            DatasetSummary {
                rows: 250,
                train: 200,
                test: 50
            }
        );
    }

    #[test]
    fn empty_file() {
        let text = to_text(&[]);
        assert!(matches!(read_dataset(text.as_bytes()), Err(Error::EmptyDataset)));
        assert!(read_dataset("".as_bytes()).is_err());
    }

    #[test]
    fn nan_names_row() {
        let text = to_text(&[row(0), row(1), row(2)]).replacen("2565", "x", 0);
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut cols: Vec<String> = lines[2].split(',').map(String::from).collect();
        cols[7] = "NaN".into();
        lines[2] = cols.join(",");
        let err = read_dataset(lines.join("\n").as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, .. }), "{err}");
    }

    #[test]
    fn duplicates_and_schema() {
        let text = to_text(&[row(0), row(0)]);
        assert!(matches!(read_dataset(text.as_bytes()), Err(Error::Parse { row: 2, .. })));
        let bad = to_text(&[row(0)]).replace("dmin", "d_min");
        assert!(matches!(read_dataset(bad.as_bytes()), Err(Error::Parse { row: 0, .. })));
        let short = format!("{}\nD9,1,2\n", header().join(","));
        assert!(matches!(read_dataset(short.as_bytes()), Err(Error::Parse { row: 1, .. })));
    }

    #[test]
    fn rejects_negative_force() {
        let mut r = row(0);
        r.record.rfc = -1.0;
        let text = to_text(&[r]);
        assert!(matches!(read_dataset(text.as_bytes()), Err(Error::Parse { row: 1, .. })));
    }
}
