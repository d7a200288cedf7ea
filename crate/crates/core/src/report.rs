//! JSON and CSV report writers.
//!
//! JSON reports are a single array with one object per `(checker, trial)`:
//! the verdict fields plus a `checker` key. CSV reports have the fixed
//! columns `checker,dims,seed,trial,quantity:*,slack,pass`, where the
//! quantity columns are the sorted union over all records and cells are left
//! empty when a record lacks that quantity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::lab::Verdict;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Json => "json",
            Self::Csv => "csv",
        })
    }
}

#[derive(Serialize)]
struct Record<'a> {
    checker: &'a str,
    #[serde(flatten)]
    verdict: &'a Verdict,
}

pub fn to_json<'a, I>(records: I) -> Result<String>
where
    I: IntoIterator<Item = (&'a str, &'a Verdict)>,
{
    let rows: Vec<Record> = records
        .into_iter()
        .map(|(checker, verdict)| Record { checker, verdict })
        .collect();
    let mut out = serde_json::to_string_pretty(&rows).map_err(|e| Error::Serialization(e.to_string()))?;
    out.push('\n');
    Ok(out)
}

fn dims_cell(dims: &[usize]) -> String {
    dims.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

fn opt_cell(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn to_csv<'a, I>(records: I) -> Result<String>
where
    I: IntoIterator<Item = (&'a str, &'a Verdict)>,
{
    let rows: Vec<(&str, &Verdict, BTreeMap<String, f64>)> = records
        .into_iter()
        .map(|(c, v)| (c, v, v.flat_quantities().into_iter().collect()))
        .collect();
    let columns: BTreeSet<&String> = rows.iter().flat_map(|(_, _, q)| q.keys()).collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    let mut header = vec!["checker".to_string(), "dims".into(), "seed".into(), "trial".into()];
    header.extend(columns.iter().map(|k| format!("quantity:{k}")));
    header.extend(["slack".to_string(), "pass".into()]);
    w.write_record(&header).map_err(ser)?;
    for (checker, v, q) in &rows {
        let meta = v.meta();
        let mut row = vec![
            checker.to_string(),
            dims_cell(&meta.dims),
            opt_cell(meta.seed),
            opt_cell(meta.trial),
        ];
        row.extend(columns.iter().map(|k| q.get(*k).map(|x| x.to_string()).unwrap_or_default()));
        row.push(v.slack().to_string());
        row.push(v.pass().to_string());
        w.write_record(&row).map_err(ser)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn render<'a, I>(format: Format, records: I) -> Result<String>
where
    I: IntoIterator<Item = (&'a str, &'a Verdict)>,
{
    match format {
        Format::Json => to_json(records),
        Format::Csv => to_csv(records),
    }
}
