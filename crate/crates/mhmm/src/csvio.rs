//! CSV data files: a header of observable names and one row of 1-based
//! categories per time point.

use std::path::Path;

use mhmm_core::{ObservedSeries, VariableScheme};

use crate::error::{Error, Result};

/// Reads a series whose columns are matched to `scheme` by header name.
pub fn read_series(path: &Path, scheme: &VariableScheme) -> Result<ObservedSeries> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_series(file, scheme, &path.display().to_string())
}

pub fn parse_series(input: impl std::io::Read, scheme: &VariableScheme, path: &str) -> Result<ObservedSeries> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    let mut columns = Vec::with_capacity(scheme.len());
    for v in scheme.variables() {
        let c = headers
            .iter()
            .position(|h| h == v.name)
            .ok_or_else(|| Error::parse(path, 1, format!("missing column '{}'", v.name)))?;
        columns.push(c);
    }
    let mut rows = Vec::new();
    for (t, record) in reader.records().enumerate() {
        let line = t + 2;
        let record = record.map_err(|e| Error::parse(path, line, e.to_string()))?;
        if record.len() != headers.len() {
            return Err(Error::parse(
                path,
                line,
                format!("row has {} fields, header has {}", record.len(), headers.len()),
            ));
        }
        let mut row = Vec::with_capacity(columns.len());
        for (j, &c) in columns.iter().enumerate() {
            let cell = &record[c];
            let max = scheme.categories(j);
            match cell.parse::<usize>() {
                Ok(v) if (1..=max).contains(&v) => row.push(v - 1),
                Ok(v) => {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("column {} ({}): category {v} out of range 1..={max}", c + 1, &headers[c]),
                    ))
                }
                Err(_) => {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("column {} ({}): '{cell}' is not an integer", c + 1, &headers[c]),
                    ))
                }
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(path, 1, "no data rows"));
    }
    Ok(ObservedSeries::new(scheme.clone(), &rows)?)
}

pub fn format_series(series: &ObservedSeries) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    // Writing to memory cannot fail.
    w.write_record(series.scheme().variables().iter().map(|v| v.name.as_str()))
        .expect("in-memory write");
    for t in 0..series.len() {
        w.write_record(series.row(t).iter().map(|c| (*c as usize + 1).to_string()))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv output is ASCII")
}

pub fn write_series(path: &Path, series: &ObservedSeries) -> Result<()> {
    std::fs::write(path, format_series(series)).map_err(|e| Error::io(path, e))
}
