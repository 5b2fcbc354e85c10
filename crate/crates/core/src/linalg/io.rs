//! Plain-text matrix format: a `rows cols` header line followed by one line
//! per row of whitespace-separated entries written with 17 significant digits.

use std::io::{BufRead, Write};

use super::Mat;
use crate::error::{Error, Result};

pub fn write_mat<W: Write>(out: &mut W, m: &Mat) -> Result<()> {
    writeln!(out, "{} {}", m.rows(), m.cols())?;
    let mut line = String::new();
    for i in 0..m.rows() {
        line.clear();
        for j in 0..m.cols() {
            if j > 0 {
                line.push(' ');
            }
            line.push_str(&format!("{:.16e}", m[(i, j)]));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn mat_to_string(m: &Mat) -> String {
    let mut buf = Vec::new();
    write_mat(&mut buf, m).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

/// Reads whitespace-separated tokens, pulling lines from the reader on demand.
pub(crate) struct Tokens<R> {
    reader: R,
    pending: std::collections::VecDeque<String>,
    line: usize,
}

impl<R: BufRead> Tokens<R> {
    pub(crate) fn new(reader: R) -> Self {
        Self {
            reader,
            pending: Default::default(),
            line: 0,
        }
    }

    pub(crate) fn next_token(&mut self) -> Result<Option<String>> {
        while self.pending.is_empty() {
            let mut buf = String::new();
            if self.reader.read_line(&mut buf)? == 0 {
                return Ok(None);
            }
            self.line += 1;
            let content = buf.split('#').next().unwrap_or("");
            self.pending
                .extend(content.split_whitespace().map(str::to_owned));
        }
        Ok(self.pending.pop_front())
    }

    pub(crate) fn expect<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let tok = self
            .next_token()?
            .ok_or_else(|| Error::Parse(format!("unexpected end of input reading {what}")))?;
        tok.parse()
            .map_err(|_| Error::Parse(format!("line {}: bad {what}: {tok:?}", self.line)))
    }
}

pub(crate) fn read_mat_tokens<R: BufRead>(tokens: &mut Tokens<R>) -> Result<Mat> {
    let rows: usize = tokens.expect("row count")?;
    let cols: usize = tokens.expect("column count")?;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(tokens.expect::<f64>("matrix entry")?);
    }
    Mat::new(rows, cols, data).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_mat<R: BufRead>(reader: R) -> Result<Mat> {
    read_mat_tokens(&mut Tokens::new(reader))
}

pub fn mat_from_str(s: &str) -> Result<Mat> {
    read_mat(s.as_bytes())
}

pub fn save_mat(path: impl AsRef<std::path::Path>, m: &Mat) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_mat(&mut f, m)?;
    f.flush()?;
    Ok(())
}

pub fn load_mat(path: impl AsRef<std::path::Path>) -> Result<Mat> {
    read_mat(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format_is_exact() {
        let m = Mat::from_rows(&[[0.1, -1.0 / 3.0, 1e-300], [2.5e17, 0.0, -7.0]]).unwrap();
        let s = mat_to_string(&m);
        assert!(s.starts_with("2 3\n"));
        assert_eq!(mat_from_str(&s).unwrap(), m);
    }

    #[test]
    fn parse_errors() {
        assert!(mat_from_str("2 2\n1 2 3").is_err());
        assert!(mat_from_str("1 1\nabc").is_err());
        assert!(mat_from_str("1 1\nnan").is_err());
    }
}
