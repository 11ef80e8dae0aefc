//! Session configuration: a line-oriented `key = value` file.
//!
//! ```text
//! # sl3 with two highest weights
//! matrix = 2 -1; -1 2
//! symmetrizers = 1 1
//! degree_cap = 4
//! highest_weights = 1 0; 1 1
//! ```
//!
//! Matrices and vector lists are semicolon-separated rows of rationals (`3`, `-1/2`).
//! Unknown keys, repeated keys and malformed values are errors with a line and column.

use std::fmt::Write as _;
use std::str::FromStr;

use gkm::cartan::{build_realization, symmetrize, CartanDatum, Rational};
use gkm::linalg::Matrix;
use gkm::qmodules::ModuleKind;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Cartan(#[from] gkm::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    pub matrix: Vec<Vec<Rational>>,
    /// Filled by `symmetrize` when the file does not give them.
    pub symmetrizers: Vec<Rational>,
    pub degree_cap: usize,
    pub depth: usize,
    /// Values `lambda(h_i)`, optionally followed by the extension coordinates.
    pub highest_weights: Vec<Vec<Rational>>,
    pub hbar: Complex64,
    pub tolerance: f64,
    pub word_length: usize,
    pub strands: usize,
    pub module: ModuleKind,
    /// Largest acceptable deviation between the two braid representations.
    pub deviation_threshold: f64,
}

const KEYS: [&str; 11] = [
    "matrix",
    "symmetrizers",
    "degree_cap",
    "depth",
    "highest_weights",
    "hbar",
    "tolerance",
    "word_length",
    "strands",
    "module",
    "deviation_threshold",
];

/// Parsed values before defaults and validation.
#[derive(Default)]
struct Raw {
    matrix: Option<Vec<Vec<Rational>>>,
    symmetrizers: Option<Vec<Rational>>,
    degree_cap: Option<usize>,
    depth: Option<usize>,
    highest_weights: Option<Vec<Vec<Rational>>>,
    hbar: Option<Complex64>,
    tolerance: Option<f64>,
    word_length: Option<usize>,
    strands: Option<usize>,
    module: Option<ModuleKind>,
    deviation_threshold: Option<f64>,
}

struct Cursor<'a> {
    line: usize,
    /// Column of the first character of `text`, 1-based.
    start: usize,
    text: &'a str,
}

impl Cursor<'_> {
    fn error(&self, offset: usize, message: impl Into<String>) -> ConfigError {
        ConfigError::Syntax {
            line: self.line,
            column: self.start + offset,
            message: message.into(),
        }
    }

    /// Whitespace-separated tokens with their byte offsets.
    fn tokens(&self, within: (usize, &str)) -> Vec<(usize, String)> {
        let (base, s) = within;
        let mut out = Vec::new();
        let mut at = None;
        for (k, ch) in s.char_indices() {
            match (ch.is_whitespace(), at) {
                (false, None) => at = Some(k),
                (true, Some(b)) => {
                    out.push((base + b, s[b..k].to_string()));
                    at = None;
                }
                _ => {}
            }
        }
        if let Some(b) = at {
            out.push((base + b, s[b..].to_string()));
        }
        out
    }

    fn segments(&self) -> Vec<(usize, &str)> {
        let mut out = Vec::new();
        let mut base = 0;
        for part in self.text.split(';') {
            out.push((base, part));
            base += part.len() + 1;
        }
        out
    }

    fn rational_row(&self, seg: (usize, &str)) -> Result<Vec<Rational>, ConfigError> {
        self.tokens(seg)
            .into_iter()
            .map(|(k, t)| Rational::from_str(&t).map_err(|_| self.error(k, format!("`{}` is not a rational number", t))))
            .collect()
    }

    fn rows(&self) -> Result<Vec<Vec<Rational>>, ConfigError> {
        let segments = self.segments();
        let mut rows = Vec::new();
        for seg in segments {
            let row = self.rational_row(seg)?;
            if row.is_empty() {
                return Err(self.error(seg.0, "empty row"));
            }
            rows.push(row);
        }
        Ok(rows)
    }

    fn vector(&self) -> Result<Vec<Rational>, ConfigError> {
        let row = self.rational_row((0, self.text))?;
        if row.is_empty() {
            return Err(self.error(0, "expected at least one number"));
        }
        Ok(row)
    }

    fn single(&self) -> Result<(usize, String), ConfigError> {
        let toks = self.tokens((0, self.text));
        match toks.len() {
            1 => Ok(toks.into_iter().next().unwrap()),
            0 => Err(self.error(0, "missing value")),
            _ => Err(self.error(toks[1].0, "expected a single value")),
        }
    }

    fn integer(&self) -> Result<usize, ConfigError> {
        let (k, t) = self.single()?;
        t.parse().map_err(|_| self.error(k, format!("`{}` is not a nonnegative integer", t)))
    }

    fn float(&self) -> Result<f64, ConfigError> {
        let (k, t) = self.single()?;
        parse_float(&t).ok_or_else(|| self.error(k, format!("`{}` is not a number", t)))
    }

    fn complex(&self) -> Result<Complex64, ConfigError> {
        let toks = self.tokens((0, self.text));
        let num = |(k, t): &(usize, String)| parse_float(t).ok_or_else(|| self.error(*k, format!("`{}` is not a number", t)));
        match toks.as_slice() {
            [re] => Ok(Complex64::new(num(re)?, 0.0)),
            [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
            [] => Err(self.error(0, "missing value")),
            [_, _, extra, ..] => Err(self.error(extra.0, "expected `re` or `re im`")),
        }
    }

    fn module(&self) -> Result<ModuleKind, ConfigError> {
        let (k, t) = self.single()?;
        parse_module(&t).ok_or_else(|| self.error(k, format!("unknown module kind `{}`", t)))
    }
}

fn parse_float(t: &str) -> Option<f64> {
    t.parse::<f64>().ok().filter(|x| x.is_finite())
}

pub fn parse_module(t: &str) -> Option<ModuleKind> {
    match t {
        "verma" => Some(ModuleKind::Verma),
        "irreducible" | "irr" => Some(ModuleKind::Irreducible),
        _ => None,
    }
}

/// Parse, apply defaults, and validate; symmetrizers are computed when absent.
pub fn parse_config(text: &str) -> Result<SessionConfig, ConfigError> {
    let mut raw = Raw::default();
    let mut seen = std::collections::BTreeSet::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let content = line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(ConfigError::Syntax {
                line: lineno,
                column: col,
                message: "expected `key = value`".into(),
            });
        };
        let key = content[..eq].trim();
        let key_col = content.len() - content.trim_start().len() + 1;
        if !KEYS.contains(&key) {
            return Err(ConfigError::Syntax {
                line: lineno,
                column: key_col,
                message: format!("unknown key `{}`", key),
            });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::Syntax {
                line: lineno,
                column: key_col,
                message: format!("repeated key `{}`", key),
            });
        }
        let cur = Cursor {
            line: lineno,
            start: eq + 2,
            text: &content[eq + 1..],
        };
        match key {
            "matrix" => raw.matrix = Some(cur.rows()?),
            "symmetrizers" => raw.symmetrizers = Some(cur.vector()?),
            "degree_cap" => raw.degree_cap = Some(cur.integer()?),
            "depth" => raw.depth = Some(cur.integer()?),
            "highest_weights" => raw.highest_weights = Some(cur.rows()?),
            "hbar" => raw.hbar = Some(cur.complex()?),
            "tolerance" => raw.tolerance = Some(cur.float()?),
            "word_length" => raw.word_length = Some(cur.integer()?),
            "strands" => raw.strands = Some(cur.integer()?),
            "module" => raw.module = Some(cur.module()?),
            "deviation_threshold" => raw.deviation_threshold = Some(cur.float()?),
            _ => unreachable!("key list checked above"),
        }
    }
    let matrix = raw
        .matrix
        .ok_or_else(|| ConfigError::Invalid("missing required key `matrix`".into()))?;
    SessionConfig::new(matrix, raw.symmetrizers)?.with_overrides(|c| {
        c.degree_cap = raw.degree_cap.unwrap_or(c.degree_cap);
        c.depth = raw.depth.unwrap_or(c.depth);
        c.highest_weights = raw.highest_weights.clone().unwrap_or_default();
        c.hbar = raw.hbar.unwrap_or(c.hbar);
        c.tolerance = raw.tolerance.unwrap_or(c.tolerance);
        c.word_length = raw.word_length.unwrap_or(c.word_length);
        c.strands = raw.strands.unwrap_or(c.strands);
        c.module = raw.module.unwrap_or(c.module);
        c.deviation_threshold = raw.deviation_threshold.unwrap_or(c.deviation_threshold);
    })
}

impl SessionConfig {
    /// A configuration with default settings for the given matrix.
    pub fn new(matrix: Vec<Vec<Rational>>, symmetrizers: Option<Vec<Rational>>) -> Result<Self, ConfigError> {
        let n = matrix.len();
        if let Some(bad) = matrix.iter().position(|r| r.len() != n) {
            return Err(ConfigError::Invalid(format!(
                "matrix row {} has {} entries, expected {}",
                bad + 1,
                matrix[bad].len(),
                n
            )));
        }
        let a = Matrix::from_rows(matrix.clone());
        let symmetrizers = match symmetrizers {
            Some(d) => d,
            None => symmetrize(&a)?,
        };
        let config = SessionConfig {
            matrix,
            symmetrizers,
            degree_cap: 6,
            depth: 4,
            highest_weights: Vec::new(),
            hbar: Complex64::new(0.1, 0.0),
            tolerance: 1e-9,
            word_length: 4,
            strands: 3,
            module: ModuleKind::Irreducible,
            deviation_threshold: 1e-6,
        };
        config.validate()?;
        Ok(config)
    }

    /// Apply changes and re-validate.
    pub fn with_overrides(mut self, f: impl FnOnce(&mut SessionConfig)) -> Result<Self, ConfigError> {
        f(&mut self);
        self.validate()?;
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn cartan_matrix(&self) -> Matrix<Rational> {
        Matrix::from_rows(self.matrix.clone())
    }

    pub fn datum(&self) -> Result<CartanDatum, gkm::Error> {
        build_realization(&self.cartan_matrix(), &self.symmetrizers)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = self.rank();
        if n == 0 {
            return Err(ConfigError::Invalid("matrix is empty".into()));
        }
        if self.symmetrizers.len() != n {
            return Err(ConfigError::Invalid(format!(
                "{} symmetrizers for a rank {} matrix",
                self.symmetrizers.len(),
                n
            )));
        }
        if self.degree_cap < 1 {
            return Err(ConfigError::Invalid("degree_cap must be at least 1".into()));
        }
        if self.strands < 2 {
            return Err(ConfigError::Invalid("strands must be at least 2".into()));
        }
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.tolerance) || !positive(self.deviation_threshold) {
            return Err(ConfigError::Invalid("tolerances must be positive".into()));
        }
        let cd = self.datum()?;
        for (k, w) in self.highest_weights.iter().enumerate() {
            if w.len() != n && w.len() != cd.h_dim() {
                return Err(ConfigError::Invalid(format!(
                    "highest weight {} has {} coordinates, expected {} or {}",
                    k + 1,
                    w.len(),
                    n,
                    cd.h_dim()
                )));
            }
        }
        Ok(())
    }

    /// Canonical text form; `parse_config(&c.emit()) == c`.
    pub fn emit(&self) -> String {
        let row = |r: &[Rational]| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let rows = |rs: &[Vec<Rational>]| rs.iter().map(|r| row(r)).collect::<Vec<_>>().join("; ");
        let mut out = String::new();
        let _ = writeln!(out, "matrix = {}", rows(&self.matrix));
        let _ = writeln!(out, "symmetrizers = {}", row(&self.symmetrizers));
        let _ = writeln!(out, "degree_cap = {}", self.degree_cap);
        let _ = writeln!(out, "depth = {}", self.depth);
        if !self.highest_weights.is_empty() {
            let _ = writeln!(out, "highest_weights = {}", rows(&self.highest_weights));
        }
        let _ = writeln!(out, "hbar = {:?} {:?}", self.hbar.re, self.hbar.im);
        let _ = writeln!(out, "tolerance = {:?}", self.tolerance);
        let _ = writeln!(out, "word_length = {}", self.word_length);
        let _ = writeln!(out, "strands = {}", self.strands);
        let _ = writeln!(out, "module = {}", self.module.name());
        let _ = writeln!(out, "deviation_threshold = {:?}", self.deviation_threshold);
        out
    }
}

/// Parse a matrix given inline, e.g. `"2 -1; -1 2"`.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<Rational>>, ConfigError> {
    Cursor {
        line: 1,
        start: 1,
        text,
    }
    .rows()
}

/// Parse a single weight vector, e.g. `"1 0"` or `"1/2 -1"`.
pub fn parse_vector(text: &str) -> Result<Vec<Rational>, ConfigError> {
    Cursor {
        line: 1,
        start: 1,
        text,
    }
    .vector()
}

#[cfg(test)]
mod tests {
    use super::*;
    use gkm::cartan::{int, rat};

    #[test]
    fn defaults_symmetrizers() {
        let c = parse_config("matrix = 2 -1; -1 2\n").unwrap();
        assert_eq!(c.symmetrizers, vec![int(1), int(1)]);
        assert_eq!(c.degree_cap, 6);
    }

    #[test]
    fn non_symmetrizable_surfaces_pair() {
        match parse_config("matrix = 2 -1; 0 2\n") {
            Err(ConfigError::Cartan(gkm::Error::NotSymmetrizable { pair, .. })) => assert_eq!(pair, (1, 2)),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn rational_matrix_accepted() {
        let c = parse_config("matrix = 2 -1/2; -1/2 2\n").unwrap();
        let cd = c.datum().unwrap();
        assert_eq!(cd.session_denominator(&[]).unwrap().value(), 2);
        assert_eq!(c.matrix[0][1], rat(-1, 2));
    }

    #[test]
    fn errors_carry_position() {
        match parse_config("matrix = 2 -1; -1 2\ndepth = x\n") {
            Err(ConfigError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 9)),
            other => panic!("unexpected {:?}", other),
        }
        match parse_config("matrix = 2 -1; -1 2q\n") {
            Err(ConfigError::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 19)),
            other => panic!("unexpected {:?}", other),
        }
        assert!(matches!(
            parse_config("matrix = 2 -1; -1 2\nbogus = 1\n"),
            Err(ConfigError::Syntax { line: 2, column: 1, .. })
        ));
        assert!(matches!(parse_config("matrix = 2 -1; -1 2 3\n"), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config("depth = 3\n"), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn weight_length_checked() {
        assert!(parse_config("matrix = 2 -2; -2 2\nhighest_weights = 1 0 0\n").is_ok());
        assert!(matches!(
            parse_config("matrix = 2 -1; -1 2\nhighest_weights = 1 0 0\n"),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn round_trip_full() {
        let text = "# comment\nmatrix = 2 -2; -1 2  # B2\ndegree_cap = 5\ndepth = 3\nhighest_weights = 1 0; 1/2 3\nhbar = 0.25 -0.5\ntolerance = 1e-10\nword_length = 3\nstrands = 4\nmodule = verma\ndeviation_threshold = 2.5e-7\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.symmetrizers, vec![int(1), int(2)]);
        assert_eq!(parse_config(&c.emit()).unwrap(), c);
    }
}
