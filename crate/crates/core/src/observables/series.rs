use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Sampled observables against an index (time, or a swept parameter).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub index_name: String,
    pub index: Vec<f64>,
    pub columns: Vec<Column>,
    pub metadata: Map<String, Value>,
}

impl TimeSeries {
    pub fn new<S: Into<String>>(index_name: &str, names: impl IntoIterator<Item = S>) -> Self {
        Self {
            index_name: index_name.to_string(),
            index: Vec::new(),
            columns: names
                .into_iter()
                .map(|n| Column {
                    name: n.into(),
                    values: Vec::new(),
                })
                .collect(),
            metadata: Map::new(),
        }
    }

    /// Series over time with the given column names.
    pub fn over_time<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Self::new("t", names)
    }

    pub fn push(&mut self, t: f64, row: &[f64]) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidArgument(format!(
                "row of {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.index.push(t);
        for (c, v) in self.columns.iter_mut().zip(row) {
            c.values.push(*v);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn last(&self, name: &str) -> Option<f64> {
        self.column(name).and_then(|c| c.last().copied())
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    /// CSV with a header row and every value in 17 significant digits.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
        let mut header = vec![self.index_name.as_str()];
        header.extend(self.names());
        w.write_record(&header).map_err(io)?;
        for i in 0..self.len() {
            let mut rec = vec![format_value(self.index[i])];
            rec.extend(self.columns.iter().map(|c| format_value(c.values[i])));
            w.write_record(&rec).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is ascii"))
    }
}

/// `{:.16e}`: 17 significant digits, round-trips every `f64`.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut s = TimeSeries::over_time(["fidelity", "trace"]);
        s.push(0.0, &[0.1, 1.0]).unwrap();
        s.push(0.5, &[1.0 / 3.0, 1.0]).unwrap();
        let csv = s.to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,fidelity,trace");
        assert_eq!(lines.len(), 3);
        let v: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v.to_bits(), (1.0f64 / 3.0).to_bits());
    }

    #[test]
    fn wrong_row_length_rejected() {
        let mut s = TimeSeries::over_time(["a"]);
        assert!(s.push(0.0, &[1.0, 2.0]).is_err());
    }
}
