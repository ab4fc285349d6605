//! CSV files for profiles (`x_mm,y_top_mm,y_bottom_mm`) and genotypes
//! (`design_id,t1..t5,b1..b5`).

use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::{DesignGenotype, SpokeProfile};

pub const PROFILE_HEADER: [&str; 3] = ["x_mm", "y_top_mm", "y_bottom_mm"];

pub const GENOTYPE_HEADER: [&str; 11] = [
    "design_id", "t1", "t2", "t3", "t4", "t5", "b1", "b2", "b3", "b4", "b5",
];

pub fn write_profile<W: Write>(profile: &SpokeProfile, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(PROFILE_HEADER)?;
    for i in 0..profile.x().len() {
        w.write_record([
            profile.x()[i].to_string(),
            profile.y_top()[i].to_string(),
            profile.y_bottom()[i].to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<profile>", e))?;
    Ok(())
}

pub fn read_profile<R: Read>(design_id: &str, reader: R) -> Result<SpokeProfile> {
    let mut r = csv::Reader::from_reader(reader);
    check_header(r.headers()?, &PROFILE_HEADER)?;
    let (mut x, mut top, mut bottom) = (Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        x.push(parse_field(&rec, 0, row)?);
        top.push(parse_field(&rec, 1, row)?);
        bottom.push(parse_field(&rec, 2, row)?);
    }
    SpokeProfile::new(design_id, x, top, bottom)
}

pub fn write_genotypes<'a, W, I>(rows: I, writer: W) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a str, &'a DesignGenotype)>,
{
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(GENOTYPE_HEADER)?;
    for (id, g) in rows {
        let mut rec = vec![id.to_string()];
        rec.extend(g.to_array().iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<genotypes>", e))?;
    Ok(())
}

pub fn read_genotypes<R: Read>(reader: R) -> Result<Vec<(String, DesignGenotype)>> {
    let mut r = csv::Reader::from_reader(reader);
    check_header(r.headers()?, &GENOTYPE_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let values = (1..11)
            .map(|j| parse_field(&rec, j, row))
            .collect::<Result<Vec<_>>>()?;
        let g = DesignGenotype::from_slice(&values).map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        out.push((rec[0].to_string(), g));
    }
    Ok(out)
}

pub(crate) fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    if found.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse {
            row: 0,
            message: format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    Ok(())
}

pub(crate) fn parse_field(rec: &csv::StringRecord, col: usize, row: usize) -> Result<f64> {
    let raw = rec.get(col).ok_or_else(|| Error::Parse {
        row,
        message: format!("missing column {col}"),
    })?;
    let v: f64 = raw.trim().parse().map_err(|_| Error::Parse {
        row,
        message: format!("column {col}: `{raw}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row,
            message: format!("column {col}: non-finite value `{raw}`"),
        });
    }
    Ok(v)
}
