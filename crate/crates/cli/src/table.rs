//! A minimal column-oriented view over a CSV file.
//!
//! Cells are kept as the original strings so that pass-through columns
//! (fault lists, extra user columns) survive a read/append/write cycle
//! byte for byte; numeric columns are parsed on demand.

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Table, String> {
        let mut lines = text.lines();
        let header_line = lines.next().ok_or("empty file: expected a CSV header")?;
        let headers: Vec<String> = header_line.split(',').map(|h| h.trim().to_string()).collect();
        if headers.iter().any(String::is_empty) {
            return Err("header contains an empty column name".to_string());
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let cells: Vec<String> = line.split(',').map(str::to_string).collect();
            if cells.len() != headers.len() {
                return Err(format!(
                    "line {}: expected {} fields, got {}",
                    i + 2,
                    headers.len(),
                    cells.len()
                ));
            }
            rows.push(cells);
        }
        Ok(Table { headers, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// Parses one column as `f64`, reporting the offending line on failure.
    pub fn f64_column(&self, name: &str) -> Result<Vec<f64>, String> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| format!("missing column `{name}`"))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row[idx]
                    .parse::<f64>()
                    .map_err(|_| format!("line {}: cannot parse `{}` in column `{name}`", i + 2, row[idx]))
            })
            .collect()
    }

    /// Appends a column; `values` must have one entry per row.
    pub fn push_column(&mut self, name: &str, values: Vec<String>) {
        assert_eq!(values.len(), self.rows.len());
        self.headers.push(name.to_string());
        for (row, value) in self.rows.iter_mut().zip(values) {
            row.push(value);
        }
    }

    /// Keeps only the rows whose indices pass the predicate.
    pub fn retain_rows(&mut self, keep: impl Fn(usize) -> bool) {
        let mut i = 0;
        self.rows.retain(|_| {
            let k = keep(i);
            i += 1;
            k
        });
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_rewrite_preserves_cells() {
        let text = "a,b,c\n1,2.5,hello\n3,4.5,;x;\n";
        let table = Table::parse(text).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.to_csv(), text);
        assert_eq!(table.f64_column("b").unwrap(), vec![2.5, 4.5]);
    }

    #[test]
    fn header_only_file_is_empty_table() {
        let table = Table::parse("a,b\n").unwrap();
        assert_eq!(table.len(), 0);
    }

    #[test]
    fn errors_name_the_problem() {
        assert!(Table::parse("a,b\n1\n").unwrap_err().contains("line 2"));
        let table = Table::parse("a,b\n1,x\n").unwrap();
        assert!(table.f64_column("missing").unwrap_err().contains("`missing`"));
        assert!(table.f64_column("b").unwrap_err().contains("line 2"));
    }

    #[test]
    fn push_column_extends_rows() {
        let mut table = Table::parse("a\n1\n2\n").unwrap();
        table.push_column("b", vec!["x".into(), "y".into()]);
        assert_eq!(table.to_csv(), "a,b\n1,x\n2,y\n");
    }
}
