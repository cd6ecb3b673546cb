//! CSV assembly with a stable on-disk format: UTF-8, comma separators, one
//! header row, LF line endings, floats at 9 significant digits.

/// Formats a float with 9 significant digits, deterministically.
pub fn num(value: f64) -> String {
    format!("{value:.8e}")
}

/// An in-memory CSV table.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
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
    fn renders_with_lf_only() {
        let mut t = Table::new(&["a", "b"]);
        t.push_row(vec!["1".into(), num(0.5)]);
        let s = t.render();
        assert_eq!(s, "a,b\n1,5.00000000e-1\n");
        assert!(!s.contains('\r'));
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(num(10.0 / 11.0), "9.09090909e-1");
        assert_eq!(num(1.0), "1.00000000e0");
        assert_eq!(num(0.0), "0.00000000e0");
        assert_eq!(num(12345.6789), "1.23456789e4");
    }
}
