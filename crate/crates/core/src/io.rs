//! JSON and CSV files. Output is UTF-8 with LF line endings and floats in
//! shortest round-trip form, so write, read, write reproduces the same bytes.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::landscape::{unit_grid, Landscape};
use crate::persistence::PersistenceDiagram;
use crate::simgen::PointCloud;

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Named columns of floats.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(i) = rows.iter().position(|r| r.len() != header.len()) {
            return Err(invalid(format!("row {i} has {} fields, header has {}", rows[i].len(), header.len())));
        }
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:?}"))).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| invalid(e.to_string()))
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(s.as_bytes());
        let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let row = rec
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| invalid(format!("row {}: `{f}` is not a number", i + 1))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Table::new(header, rows)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_csv_string()?)?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Table::from_csv_str(&fs::read_to_string(path)?)
    }
}

fn csv_err(e: csv::Error) -> Error {
    invalid(format!("csv: {e}"))
}

/// One point per row, columns `x1..xd`.
pub fn cloud_table(cloud: &PointCloud) -> Table {
    let header = (1..=cloud.dim()).map(|i| format!("x{i}")).collect();
    Table { header, rows: cloud.points().to_vec() }
}

pub fn cloud_from_table(table: &Table) -> Result<PointCloud> {
    PointCloud::new(table.rows.clone())
}

/// Columns `birth, death`.
pub fn diagram_table(dg: &PersistenceDiagram) -> Table {
    Table { header: vec!["birth".into(), "death".into()], rows: dg.pairs().iter().map(|&(b, d)| vec![b, d]).collect() }
}

/// Column `t` in original filtration units, then one column per level.
pub fn landscape_table(l: &Landscape) -> Table {
    let mut header = vec!["t".to_string()];
    header.extend((1..=l.k()).map(|k| format!("lambda{k}")));
    let rows = unit_grid(l.t())
        .into_iter()
        .enumerate()
        .map(|(i, u)| std::iter::once(u * l.scale_s()).chain(l.values().iter().map(|r| r[i])).collect())
        .collect();
    Table { header, rows }
}

/// Rebuilds a landscape from [`landscape_table`] output.
pub fn landscape_from_table(table: &Table, degree: usize) -> Result<Landscape> {
    let t_col = table.column("t").ok_or_else(|| invalid("landscape table has no `t` column"))?;
    let scale_s = *t_col.last().ok_or_else(|| invalid("landscape table is empty"))?;
    let values = (1..table.header.len()).map(|j| table.rows.iter().map(|r| r[j]).collect()).collect();
    Landscape::new(values, scale_s, degree)
}

/// One row per curve, columns `pc1..pcB`.
pub fn scores_table(scores: &[Vec<f64>]) -> Table {
    let b = scores.first().map_or(0, Vec::len);
    Table { header: (1..=b).map(|i| format!("pc{i}")).collect(), rows: scores.to_vec() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let t = Table::new(vec!["a".into(), "b".into()], vec![vec![0.1, 1e-300], vec![-2.0, 1.0 / 3.0]]).unwrap();
        let s = t.to_csv_string().unwrap();
        assert!(!s.contains('\r'));
        let back = Table::from_csv_str(&s).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_csv_string().unwrap(), s);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Table::new(vec!["a".into()], vec![vec![1.0, 2.0]]).is_err());
        assert!(Table::from_csv_str("a,b\n1,x\n").is_err());
    }

    #[test]
    fn landscape_table_round_trip() {
        let l = Landscape::new(vec![vec![0.0, 0.25, 0.0], vec![0.0, 0.1, 0.0]], 2.0, 1).unwrap();
        let back = landscape_from_table(&landscape_table(&l), 1).unwrap();
        assert_eq!(back.values(), l.values());
        assert_eq!(back.scale_s(), 2.0);
    }
}
