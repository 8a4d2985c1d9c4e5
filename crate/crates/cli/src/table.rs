//! Comma-separated output with a header row.

use std::fmt::Write;

/// One output field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    /// Printed with 16 significant digits.
    Real(f64),
    /// Wall-clock time, printed with millisecond resolution.
    Seconds(f64),
    Blank,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Real(v) => format!("{v:.15e}"),
            Self::Seconds(v) => format!("{v:.3}"),
            Self::Blank => String::new(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(out, "{}", cells.join(",")).expect("writing to a String cannot fail");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_significant_digits() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![Cell::Int(3), Cell::Real(0.1), Cell::Blank]);
        t.push(vec![Cell::Int(4), Cell::Real(-63.53529437281905), Cell::Seconds(0.25)]);
        assert_eq!(t.to_csv(), "a,b,c\n3,1.000000000000000e-1,\n4,-6.353529437281905e1,0.250\n");
        let back: f64 = Cell::Real(std::f64::consts::PI).render().parse().unwrap();
        assert!((back - std::f64::consts::PI).abs() < 1e-15);
    }
}
