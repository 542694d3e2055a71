//! Plot-ready result tables and their CSV / JSON encodings.
//!
//! CSV files carry a header row and RFC 4180 quoting; floats are written in
//! scientific notation with 17 significant digits so they parse back to the
//! identical `f64`. JSON output is an array of objects keyed by column name.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(i) => Some(i as f64),
            Cell::Float(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            Cell::Bool(b) => Some(b),
            _ => None,
        }
    }

    fn to_csv_field(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn parse_csv_field(field: &str) -> Cell {
        if let Ok(i) = field.parse::<i64>() {
            Cell::Int(i)
        } else if let Ok(x) = field.parse::<f64>() {
            Cell::Float(x)
        } else if let Ok(b) = field.parse::<bool>() {
            Cell::Bool(b)
        } else {
            Cell::Text(field.to_string())
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) => serde_json::Number::from_f64(*x)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }

    fn from_json(v: &Value) -> Cell {
        match v {
            Value::Bool(b) => Cell::Bool(*b),
            Value::Number(n) => match n.as_i64() {
                Some(i) if !n.is_f64() => Cell::Int(i),
                _ => Cell::Float(n.as_f64().unwrap_or(f64::NAN)),
            },
            Value::String(s) => Cell::Text(s.clone()),
            Value::Null => Cell::Float(f64::NAN),
            other => Cell::Text(other.to_string()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

/// A row type that can be laid out as a table.
pub trait Record {
    const COLUMNS: &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn from_records<R: Record>(records: &[R]) -> Self {
        Table {
            columns: R::COLUMNS.iter().map(|c| c.to_string()).collect(),
            rows: records.iter().map(Record::cells).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn float_column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column_index(name)?;
        self.rows.iter().map(|r| r[idx].as_f64()).collect()
    }

    pub fn bool_column(&self, name: &str) -> Option<Vec<bool>> {
        let idx = self.column_index(name)?;
        self.rows.iter().map(|r| r[idx].as_bool()).collect()
    }

    /// Rows whose `dominated` column is false.
    pub fn violations(&self) -> usize {
        self.bool_column("dominated")
            .map(|col| col.iter().filter(|ok| !**ok).count())
            .unwrap_or(0)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv_field))?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(Cell::parse_csv_field).collect());
        }
        Ok(Table { columns, rows })
    }

    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::to_json))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn write_json<W: Write>(&self, mut writer: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut writer, &self.to_json_value())?;
        writeln!(writer).map_err(|e| Error::Json(serde_json::Error::io(e)))?;
        Ok(())
    }

    /// Parses a JSON array of objects. Column order follows the first object.
    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        let v: Value = serde_json::from_reader(reader)?;
        let items = v
            .as_array()
            .ok_or_else(|| Error::Config("expected a JSON array of records".into()))?;
        let columns: Vec<String> = match items.first().and_then(Value::as_object) {
            Some(obj) => obj.keys().cloned().collect(),
            None => Vec::new(),
        };
        let rows = items
            .iter()
            .map(|item| {
                columns
                    .iter()
                    .map(|c| Cell::from_json(item.get(c).unwrap_or(&Value::Null)))
                    .collect()
            })
            .collect();
        Ok(Table { columns, rows })
    }

    pub fn write<W: Write>(&self, writer: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(writer),
            Format::Json => self.write_json(writer),
        }
    }
}

/// Writes `table` to `path` in the requested format.
pub fn emit(table: &Table, format: Format, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut writer = BufWriter::new(file);
    table.write(&mut writer, format)?;
    writer.flush().map_err(io_err)
}

pub fn read_table(path: &Path, format: Format) -> Result<Table> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);
    match format {
        Format::Csv => Table::read_csv(reader),
        Format::Json => Table::read_json(reader),
    }
}
