//! Reports: a comment block of metadata and verdicts, followed by TSV tables.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub digest: String,
    pub meta: Vec<(String, String)>,
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<Table>,
}

/// Hex SHA-256 of the command name and canonical configuration.
pub fn input_digest(command: &str, canonical_config: &str) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update(b"\n");
    h.update(canonical_config.as_bytes());
    h.finalize().iter().map(|b| format!("{:02x}", b)).collect()
}

impl Report {
    pub fn new(command: &str, digest: String) -> Self {
        Report {
            command: command.to_string(),
            digest,
            meta: Vec::new(),
            verdicts: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn verdict(&mut self, name: &str, pass: bool, detail: impl ToString) {
        self.verdicts.push(Verdict {
            name: name.to_string(),
            pass,
            detail: detail.to_string(),
        });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# command\t{}", self.command);
        let _ = writeln!(out, "# input_sha256\t{}", self.digest);
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {}\t{}", k, v);
        }
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "# check\t{}\t{}\t{}",
                v.name,
                if v.pass { "pass" } else { "fail" },
                v.detail
            );
        }
        let _ = writeln!(out, "# verdict\t{}", if self.passed() { "pass" } else { "fail" });
        for t in &self.tables {
            let _ = writeln!(out, "# table\t{}", t.name);
            let _ = writeln!(out, "{}", t.columns.join("\t"));
            for r in &t.rows {
                let _ = writeln!(out, "{}", r.join("\t"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_layout() {
        let mut r = Report::new("dims", input_digest("dims", "matrix = 2\n"));
        r.meta("rank", 1);
        r.verdict("flat", true, "");
        let mut t = Table::new("dims", &["degree", "dim"]);
        t.push(vec!["(1)".into(), "1".into()]);
        r.tables.push(t);
        let text = r.render();
        assert!(text.starts_with("# command\tdims\n# input_sha256\t"));
        assert!(text.ends_with("# table\tdims\ndegree\tdim\n(1)\t1\n"));
        assert_eq!(r.digest.len(), 64);
    }
}
