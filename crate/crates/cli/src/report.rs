//! Plain-text and CSV rendering of report tables.

use treslev::round_half_away;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    /// Currency or volume, shown as a whole number.
    Int(f64),
    /// Fixed number of decimals.
    Dec(f64, u32),
    /// Per-unit amount: two decimals, trailing zeros dropped.
    Unit(f64),
    /// Scientific notation.
    Sci(f64),
    /// Undefined value with the reason shown in its place.
    Missing(&'static str),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn display(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(x) => fixed(*x, 0),
            Cell::Dec(x, d) => fixed(*x, *d),
            Cell::Unit(x) => {
                let s = fixed(*x, 2);
                let s = s.trim_end_matches('0').trim_end_matches('.');
                s.to_string()
            }
            Cell::Sci(x) => format!("{x:e}"),
            Cell::Missing(why) => why.to_string(),
        }
    }

    fn raw(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(x) | Cell::Dec(x, _) | Cell::Unit(x) | Cell::Sci(x) => format!("{x}"),
            Cell::Missing(_) => String::new(),
        }
    }

    fn is_numeric(&self) -> bool {
        !matches!(self, Cell::Text(_))
    }
}

fn fixed(x: f64, decimals: u32) -> String {
    let r = round_half_away(x, decimals);
    // no "-0"
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.*}", decimals as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Self {
            title: title.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, label: &str, cells: impl IntoIterator<Item = Cell>) -> &mut Self {
        let mut row = vec![Cell::text(label)];
        row.extend(cells);
        self.rows.push(row);
        self
    }

    /// Displayed text of a cell, by row label and column index.
    pub fn cell(&self, label: &str, column: usize) -> Option<String> {
        self.rows
            .iter()
            .find(|r| matches!(&r[0], Cell::Text(s) if s == label))
            .and_then(|r| r.get(column))
            .map(Cell::display)
    }

    fn render_text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::display).collect())
            .collect();
        let ncols = self
            .header
            .len()
            .max(cells.iter().map(Vec::len).max().unwrap_or(0));
        let mut widths = vec![0usize; ncols];
        for (i, h) in self.header.iter().enumerate() {
            widths[i] = widths[i].max(h.chars().count());
        }
        for r in &cells {
            for (i, c) in r.iter().enumerate() {
                widths[i] = widths[i].max(c.chars().count());
            }
        }
        let mut out = format!("{}\n", self.title);
        let line = |out: &mut String, row: &[String], numeric: &dyn Fn(usize) -> bool| {
            let mut parts = Vec::with_capacity(ncols);
            for (i, w) in widths.iter().enumerate() {
                let s = row.get(i).map(String::as_str).unwrap_or("");
                let pad = w.saturating_sub(s.chars().count());
                if numeric(i) {
                    parts.push(format!("{}{s}", " ".repeat(pad)));
                } else {
                    parts.push(format!("{s}{}", " ".repeat(pad)));
                }
            }
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        };
        line(&mut out, &self.header, &|i| i > 0);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&rule.join("  "));
        out.push('\n');
        for (r, raw) in cells.iter().zip(&self.rows) {
            line(&mut out, r, &|i| raw.get(i).is_some_and(Cell::is_numeric));
        }
        out
    }

    fn render_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::raw))
                .expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory flush");
        format!(
            "# {}\n{}",
            self.title,
            String::from_utf8(bytes).expect("utf-8 cells")
        )
    }
}

pub fn render_text(tables: &[Table]) -> String {
    tables
        .iter()
        .map(Table::render_text)
        .collect::<Vec<_>>()
        .join("\n")
}

/// Tables as consecutive CSV blocks, each preceded by a `# title` line.
/// Numbers are written at full precision.
pub fn render_csv(tables: &[Table]) -> String {
    tables
        .iter()
        .map(Table::render_csv)
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_rounding() {
        assert_eq!(Cell::Int(307_692.3).display(), "307692");
        assert_eq!(Cell::Int(-0.2).display(), "0");
        assert_eq!(Cell::Dec(12.0 / 7.0, 2).display(), "1.71");
        assert_eq!(Cell::Dec(0.075, 2).display(), "0.08");
        assert_eq!(Cell::Unit(8.0).display(), "8");
        assert_eq!(Cell::Unit(14.4).display(), "14.4");
        assert_eq!(Cell::Sci(-1e-6).display(), "-1e-6");
    }

    #[test]
    fn text_layout() {
        let mut t = Table::new("T", &["", "a", "b"]);
        t.row("x", [Cell::Int(1.0), Cell::Dec(2.5, 2)]);
        t.row("longer", [Cell::Missing("n/a"), Cell::text("ok")]);
        assert_eq!(
            render_text(&[t]),
            "T\n          a     b\n------  ---  ----\nx         1  2.50\nlonger  n/a  ok\n"
        );
    }

    #[test]
    fn csv_keeps_precision() {
        let mut t = Table::new("T", &["k", "v"]);
        t.row("x", [Cell::Dec(1.0 / 3.0, 2)]);
        assert_eq!(render_csv(&[t]), "# T\nk,v\nx,0.3333333333333333\n");
    }
}
