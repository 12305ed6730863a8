//! Rectangular result tables with a metadata header, written as CSV or JSON.
//!
//! CSV output starts with `# key: value` metadata lines, then each table as a
//! `# table: name` line, a header row and the data rows, with a blank line
//! between tables. Numbers use the shortest representation that parses back
//! to the same `f64`, so identical runs produce identical bytes.

use std::io::{self, Write};

use serde_json::{json, Map, Value};

use crate::error::{QngError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    name: String,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(name: &str, columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(QngError::InvalidGrid(format!(
                "row of {} values for table `{}` with {} columns",
                row.len(),
                self.name,
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Values of one column, if present.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// Tables of one run plus the metadata needed to repeat it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    metadata: Vec<(String, String)>,
    tables: Vec<ResultTable>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, table: ResultTable) {
        self.tables.push(table);
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn tables(&self) -> &[ResultTable] {
        &self.tables
    }

    pub fn table(&self, name: &str) -> Option<&ResultTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (k, v) in &self.metadata {
            // keep every metadata entry on one comment line
            writeln!(w, "# {k}: {}", v.replace('\n', " "))?;
        }
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                writeln!(w)?;
            }
            writeln!(w, "# table: {}", t.name)?;
            writeln!(w, "{}", t.columns.join(","))?;
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(|x| format_number(*x)).collect();
                writeln!(w, "{}", cells.join(","))?;
            }
        }
        Ok(())
    }

    /// `{"metadata": {..}, "tables": [{"name", "columns": {col: [..]}}]}`;
    /// non-finite values become `null`.
    pub fn to_json(&self) -> Value {
        let metadata: Map<String, Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| {
                let mut columns = Map::new();
                for (i, c) in t.columns.iter().enumerate() {
                    let values: Vec<Value> = t.rows.iter().map(|r| json_number(r[i])).collect();
                    columns.insert(c.clone(), Value::Array(values));
                }
                json!({ "name": t.name, "columns": Value::Object(columns) })
            })
            .collect();
        json!({ "metadata": Value::Object(metadata), "tables": tables })
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut w, &self.to_json())?;
        writeln!(w)
    }
}

fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new();
        r.meta("version", "0.1.0");
        r.meta("command", "qng threshold\n--order 1");
        let mut t = ResultTable::new("curve", ["a", "error"]);
        t.push_row(vec![-1e7, 1.5e-16]).unwrap();
        t.push_row(vec![-0.5, f64::NAN]).unwrap();
        r.push(t);
        let mut u = ResultTable::new("asymptote", ["error"]);
        u.push_row(vec![0.1]).unwrap();
        r.push(u);
        r
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let expected = "# version: 0.1.0\n# command: qng threshold --order 1\n# table: curve\na,error\n\
                        -10000000.0,1.5e-16\n-0.5,nan\n\n# table: asymptote\nerror\n0.1\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn json_layout() {
        let v = sample().to_json();
        assert_eq!(v["metadata"]["version"], "0.1.0");
        assert_eq!(v["tables"][0]["columns"]["a"][0], -1e7);
        assert!(v["tables"][0]["columns"]["error"][1].is_null());
        assert_eq!(v["tables"][1]["name"], "asymptote");
    }

    #[test]
    fn rows_must_be_rectangular() {
        let mut t = ResultTable::new("t", ["x", "y"]);
        assert!(t.push_row(vec![1.0]).is_err());
        t.push_row(vec![1.0, 2.0]).unwrap();
        assert_eq!(t.column("y"), Some(vec![2.0]));
        assert_eq!(t.column("z"), None);
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
    }
}
