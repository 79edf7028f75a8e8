use std::fmt::Write as _;
use std::io;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Num(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            Cell::Num(x)
        } else {
            Cell::Empty
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::from)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// A CSV table: header first, `\n` line endings, shortest round-trip
/// numbers, empty cells for missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let header: Vec<_> = self.header.iter().map(|h| quote(h)).collect();
        s.push_str(&header.join(","));
        s.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                match cell {
                    Cell::Empty => {}
                    // `{}` on f64 is Rust's shortest round-trip representation.
                    Cell::Num(x) => write!(s, "{x}").unwrap(),
                    Cell::Int(n) => write!(s, "{n}").unwrap(),
                    Cell::Text(t) => s.push_str(&quote(t)),
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn write_to(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let mut t = Table::new(["lambda", "a", "b"]);
        t.push(vec![0.1.into(), Cell::Empty, 2.0.into()]);
        t.push(vec![Cell::Int(3), f64::NAN.into(), "x,y".into()]);
        assert_eq!(t.to_csv(), "lambda,a,b\n0.1,,2\n3,,\"x,y\"\n");
    }

    #[test]
    fn round_trip_numbers() {
        for x in [0.1 + 0.2, 1.0 / 3.0, 2.378_414_230_005_442, 1e-7, 12345.678] {
            let mut t = Table::new(["x"]);
            t.push(vec![x.into()]);
            let csv = t.to_csv();
            let v: f64 = csv.lines().nth(1).unwrap().parse().unwrap();
            assert_eq!(v, x);
        }
    }
}
