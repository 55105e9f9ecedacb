//! CSV datasets: a header row, comma separated, decimal points, one row per
//! observation.

use std::path::Path;

use gpcompare_core::{Dataset, Matrix};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnSummary {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug)]
pub struct Ingested {
    pub dataset: Dataset,
    pub input_columns: Vec<String>,
    pub response_column: String,
    /// Inputs first, then the response.
    pub summaries: Vec<ColumnSummary>,
}

impl Ingested {
    pub fn rows(&self) -> usize {
        self.dataset.len()
    }
}

/// Reads `path`, taking `input_columns` as inputs and `response_column` as
/// the response. Without explicit names the last column is the response and
/// every other column is an input.
pub fn ingest_csv(path: &Path, input_columns: Option<&[String]>, response_column: Option<&str>) -> Result<Ingested> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if headers.len() < 2 {
        return Err(CliError::data(path, "need at least one input column and a response column"));
    }
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::data(path, format!("no column named `{name}` (have: {})", headers.join(", "))))
    };
    let response_idx = match response_column {
        Some(name) => find(name)?,
        None => headers.len() - 1,
    };
    let input_idx: Vec<usize> = match input_columns {
        Some(names) if !names.is_empty() => names.iter().map(|n| find(n)).collect::<Result<_>>()?,
        _ => (0..headers.len()).filter(|&i| i != response_idx).collect(),
    };
    if input_idx.contains(&response_idx) {
        return Err(CliError::data(path, "the response column cannot also be an input"));
    }

    let d = input_idx.len();
    let mut inputs = Vec::new();
    let mut responses = Vec::new();
    for (row, record) in reader.records().enumerate() {
        // Row numbers count data rows from 1; the header is line 1 of the file.
        let row = row + 1;
        let record = record.map_err(|e| csv_error(path, e))?;
        let cell = |idx: usize| -> Result<f64> {
            let raw = record.get(idx).unwrap_or("");
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::data(
                    path,
                    format!("row {row}: column `{}` value `{raw}` is not a finite number", headers[idx]),
                )),
            }
        };
        for &i in &input_idx {
            inputs.push(cell(i)?);
        }
        responses.push(cell(response_idx)?);
    }
    if responses.len() < 2 {
        return Err(CliError::data(path, format!("need at least 2 data rows, found {}", responses.len())));
    }

    let n = responses.len();
    let matrix = Matrix::from_vec(n, d, inputs)?;
    let mut summaries: Vec<ColumnSummary> = input_idx
        .iter()
        .enumerate()
        .map(|(k, &i)| summarize(&headers[i], (0..n).map(|r| matrix[(r, k)])))
        .collect();
    summaries.push(summarize(&headers[response_idx], responses.iter().copied()));
    Ok(Ingested {
        dataset: Dataset::new(matrix, responses)?,
        input_columns: input_idx.iter().map(|&i| headers[i].clone()).collect(),
        response_column: headers[response_idx].clone(),
        summaries,
    })
}

fn summarize(name: &str, values: impl Iterator<Item = f64>) -> ColumnSummary {
    let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    ColumnSummary {
        name: name.to_owned(),
        min,
        max,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::data(path, format!("{other:?}")),
    }
}

/// CSV text for a dataset. Values use the shortest representation that reads
/// back to the same `f64`.
pub fn dataset_to_csv(dataset: &Dataset, input_names: &[String], response_name: &str) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = input_names.iter().map(String::as_str).collect();
    header.push(response_name);
    w.write_record(&header).map_err(|e| CliError::Usage(e.to_string()))?;
    for (x, y) in dataset.inputs().row_iter().zip(dataset.responses()) {
        let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        row.push(y.to_string());
        w.write_record(&row).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}

/// Rows 0, 2, 4, … and rows 1, 3, 5, … as two datasets.
pub fn split_alternating(dataset: &Dataset) -> Result<(Dataset, Dataset)> {
    let pick = |parity: usize| -> Result<Dataset> {
        let rows: Vec<usize> = (0..dataset.len()).filter(|i| i % 2 == parity).collect();
        let mut x = Vec::with_capacity(rows.len() * dataset.dim());
        for &r in &rows {
            x.extend_from_slice(dataset.inputs().row(r));
        }
        let y = rows.iter().map(|&r| dataset.responses()[r]).collect();
        Ok(Dataset::new(Matrix::from_vec(rows.len(), dataset.dim(), x)?, y)?)
    };
    if dataset.len() < 4 {
        return Err(CliError::Usage("splitting needs at least 4 rows".into()));
    }
    Ok((pick(0)?, pick(1)?))
}
