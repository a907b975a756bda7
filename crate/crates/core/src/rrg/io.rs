//! Text format: a header line `n r`, then one line per vertex holding its `r`
//! neighbours (0-based, space separated).

use std::fmt::Write as _;
use std::path::Path;

use super::RegularGraph;
use crate::error::{Error, Result};

impl RegularGraph {
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.n * (self.r * 7 + 1) + 16);
        writeln!(out, "{} {}", self.n, self.r).unwrap();
        for v in 0..self.n {
            let mut first = true;
            for u in self.neighbors(v) {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{u}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty input".into()))?;
        let head: Vec<usize> = parse_row(header, 0)?;
        let [n, r] = head[..] else {
            return Err(Error::Parse(format!(
                "header must be `n r`, got `{header}`"
            )));
        };
        let mut lists = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let row = parse_row(line, i + 2)?;
            if row.len() != r {
                return Err(Error::Parse(format!(
                    "line {}: expected {r} neighbours, found {}",
                    i + 2,
                    row.len()
                )));
            }
            lists.push(row);
        }
        if lists.len() != n {
            return Err(Error::Parse(format!(
                "header says {n} vertices, found {}",
                lists.len()
            )));
        }
        RegularGraph::from_adjacency(lists).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn parse_row(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::Parse(format!("line {lineno}: bad integer `{tok}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rrg::generate_regular;

    #[test]
    fn round_trip_is_identity() {
        let g = generate_regular(500, 4, 11).unwrap();
        let text = g.to_text();
        let back = RegularGraph::from_text(&text).unwrap();
        assert_eq!(g, back);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn header_mismatch_is_an_error() {
        assert!(RegularGraph::from_text("5 3\n1 2 3\n").is_err());
        assert!(RegularGraph::from_text("4 3\n1 2 3\n0 2 3\n0 1 3\n0 1\n").is_err());
        assert!(RegularGraph::from_text("").is_err());
        assert!(RegularGraph::from_text("4 x\n").is_err());
    }

    #[test]
    fn k4_text() {
        let g = generate_regular(4, 3, 5).unwrap();
        assert_eq!(g.to_text(), "4 3\n1 2 3\n0 2 3\n0 1 3\n0 1 2\n");
    }
}
