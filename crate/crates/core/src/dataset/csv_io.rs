use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{Dataset, Origin, Provenance, Sample};
use crate::error::{Error, Result};
use crate::numfmt::format_sig;

/// Extra columns carried by augmented datasets; empty on original rows.
pub const PROVENANCE_COLUMNS: [&str; 3] = ["parent_index", "neighbor_index", "lambda"];

/// A header plus string cells, before any column is interpreted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file)
    }

    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in rdr.records() {
            rows.push(record?.iter().map(str::to_string).collect());
        }
        Ok(Table { headers, rows })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(file)?;
        Ok(())
    }

    pub fn write_to(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.headers.iter().any(|h| h == name)
    }

    /// Parses one column as finite reals, reporting the first bad cell.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let col = self.column_index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(r, row)| parse_cell(row.get(col).map(String::as_str).unwrap_or(""), r, name))
            .collect()
    }

    /// Row-major feature matrix for the named columns.
    pub fn numeric_rows(&self, names: &[String]) -> Result<Vec<Vec<f64>>> {
        let cols = names
            .iter()
            .map(|n| self.numeric_column(n))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..self.rows.len())
            .map(|r| cols.iter().map(|c| c[r]).collect())
            .collect())
    }
}

fn parse_cell(raw: &str, row: usize, column: &str) -> Result<f64> {
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::BadCell {
            row: row + 1,
            column: column.to_string(),
            value: raw.to_string(),
        }),
    }
}

fn parse_index(raw: &str, row: usize, column: &str) -> Result<usize> {
    raw.parse::<usize>().map_err(|_| Error::BadCell {
        row: row + 1,
        column: column.to_string(),
        value: raw.to_string(),
    })
}

impl Dataset {
    /// Selects feature and target columns from a table. Provenance columns,
    /// when all three are present, mark non-empty rows as synthetic.
    pub fn from_table(table: &Table, feature_columns: &[String], target_column: &str) -> Result<Self> {
        let features = table.numeric_rows(feature_columns)?;
        let targets = table.numeric_column(target_column)?;
        let prov_cols = PROVENANCE_COLUMNS
            .iter()
            .map(|c| table.column_index(c).ok())
            .collect::<Option<Vec<_>>>();
        let mut samples = Vec::with_capacity(targets.len());
        for (r, (features, target)) in features.into_iter().zip(targets).enumerate() {
            let mut sample = Sample::original(features, target);
            if let Some(cols) = &prov_cols {
                let cell = |i: usize| table.rows[r].get(cols[i]).map(String::as_str).unwrap_or("");
                if !cell(0).is_empty() {
                    sample.origin = Origin::Synthetic;
                    sample.provenance = Some(Provenance {
                        parent_index: parse_index(cell(0), r, PROVENANCE_COLUMNS[0])?,
                        neighbor_index: parse_index(cell(1), r, PROVENANCE_COLUMNS[1])?,
                        lambda: parse_cell(cell(2), r, PROVENANCE_COLUMNS[2])?,
                    });
                }
            }
            samples.push(sample);
        }
        Dataset::new(feature_columns.to_vec(), target_column, samples)
    }

    /// Renders the dataset with 17 significant digits. Provenance columns are
    /// included when any row is synthetic.
    pub fn to_table(&self) -> Table {
        let with_prov = self.samples.iter().any(|s| s.provenance.is_some());
        let mut headers: Vec<String> = self.feature_names.clone();
        headers.push(self.target_name.clone());
        if with_prov {
            headers.extend(PROVENANCE_COLUMNS.iter().map(|s| s.to_string()));
        }
        let rows = self
            .samples
            .iter()
            .map(|s| {
                let mut row: Vec<String> = s.features.iter().map(|&v| format_sig(v, 17)).collect();
                row.push(format_sig(s.target, 17));
                if with_prov {
                    match &s.provenance {
                        Some(p) => {
                            row.push(p.parent_index.to_string());
                            row.push(p.neighbor_index.to_string());
                            row.push(format_sig(p.lambda, 17));
                        }
                        None => row.extend(std::iter::repeat_n(String::new(), 3)),
                    }
                }
                row
            })
            .collect();
        Table { headers, rows }
    }
}

pub fn load_csv(path: impl AsRef<Path>, feature_columns: &[String], target_column: &str) -> Result<Dataset> {
    Dataset::from_table(&Table::read(path)?, feature_columns, target_column)
}

pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    data.to_table().write(path)
}
