use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Column, Dataset, MISSING};
use crate::error::{Error, Result};

/// Which CSV columns to keep and how to interpret them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Schema {
    #[serde(default)]
    pub categorical: Vec<String>,
    #[serde(default)]
    pub numeric: Vec<String>,
    pub target: String,
}

pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    read_csv(File::open(path)?, schema)
}

/// Parses a headed, comma-separated, double-quote escaped UTF-8 table.
///
/// Undeclared columns are dropped. Row numbers in errors count data rows from 1.
pub fn read_csv<R: Read>(reader: R, schema: &Schema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let position = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    };
    let cat_idx: Vec<usize> = schema.categorical.iter().map(|c| position(c)).collect::<Result<_>>()?;
    let num_idx: Vec<usize> = schema.numeric.iter().map(|c| position(c)).collect::<Result<_>>()?;
    let target_idx = position(&schema.target)?;

    let mut cats: Vec<Vec<String>> = vec![Vec::new(); cat_idx.len()];
    let mut nums: Vec<Vec<f64>> = vec![Vec::new(); num_idx.len()];
    let mut target = Vec::new();

    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let cell = |j: usize| record.get(j).unwrap_or("");
        for (k, &j) in cat_idx.iter().enumerate() {
            let v = cell(j);
            cats[k].push(if v.is_empty() { MISSING.to_string() } else { v.to_string() });
        }
        for (k, &j) in num_idx.iter().enumerate() {
            let name = &schema.numeric[k];
            nums[k].push(parse_finite(cell(j)).ok_or_else(|| Error::Parse {
                row,
                message: format!("column {name} not numeric"),
            })?);
        }
        target.push(parse_finite(cell(target_idx)).ok_or_else(|| Error::Parse {
            row,
            message: "target not numeric".to_string(),
        })?);
    }

    let categorical = schema
        .categorical
        .iter()
        .cloned()
        .zip(cats)
        .map(|(name, values)| Column { name, values })
        .collect();
    let numeric = schema
        .numeric
        .iter()
        .cloned()
        .zip(nums)
        .map(|(name, values)| Column { name, values })
        .collect();
    Ok(Dataset::from_parts(
        categorical,
        numeric,
        Column { name: schema.target.clone(), values: target },
    ))
}

fn parse_finite(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Writes categorical, numeric, then target columns. [`MISSING`] is written as an empty cell.
pub fn write_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = data.categorical_columns().iter().map(|c| c.name.as_str()).collect();
    header.extend(data.numeric_columns().iter().map(|c| c.name.as_str()));
    header.push(data.target_name());
    wtr.write_record(&header)?;
    let mut record: Vec<String> = Vec::with_capacity(header.len());
    for i in 0..data.n_rows() {
        record.clear();
        for c in data.categorical_columns() {
            let v = &c.values[i];
            record.push(if v == MISSING { String::new() } else { v.clone() });
        }
        for c in data.numeric_columns() {
            record.push(c.values[i].to_string());
        }
        record.push(data.target()[i].to_string());
        wtr.write_record(&record)?;
    }
    wtr.flush()?;
    Ok(())
}
