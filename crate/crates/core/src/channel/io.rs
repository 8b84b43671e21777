//! Text import/export of fade vectors.
//!
//! Format: one realization per line, `2 * M` whitespace-separated decimal
//! numbers (`re1 im1 re2 im2 ...`). Blank lines and lines starting with
//! `#` are ignored.

use super::FadeVector;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

/// Parses fade vectors from `reader`. `expected_m`, when given, rejects
/// lines with the wrong subcarrier count; `prior_var` is the ensemble
/// variance assumed for the imported realizations.
pub fn read_fade_vectors<R: Read>(
    reader: R,
    source: &str,
    expected_m: Option<usize>,
    prior_var: f64,
) -> Result<Vec<FadeVector>> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: source.to_string(),
        line,
        msg,
    };

    let mut out = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut values = Vec::new();
        for tok in body.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(lineno, format!("invalid number '{tok}'")))?;
            if !v.is_finite() {
                return Err(parse_err(lineno, format!("non-finite value '{tok}'")));
            }
            values.push(v);
        }
        if values.len() % 2 != 0 {
            return Err(parse_err(
                lineno,
                format!("odd value count {} (need re/im pairs)", values.len()),
            ));
        }
        let m = values.len() / 2;
        if let Some(want) = expected_m {
            if m != want {
                return Err(parse_err(
                    lineno,
                    format!("{m} subcarriers on line, configuration expects {want}"),
                ));
            }
        }
        let h: Vec<Complex64> = values
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        out.push(
            FadeVector::new(h, prior_var)
                .map_err(|e| parse_err(lineno, e.to_string()))?,
        );
    }
    Ok(out)
}

/// Reads fade vectors from a file. See [`read_fade_vectors`].
pub fn import_fade_vectors(
    path: &Path,
    expected_m: Option<usize>,
    prior_var: f64,
) -> Result<Vec<FadeVector>> {
    let file = std::fs::File::open(path)?;
    read_fade_vectors(file, &path.display().to_string(), expected_m, prior_var)
}

/// Writes fade vectors to `writer`, one line per realization. Numbers use
/// the shortest representation that parses back to the same f64, so an
/// export/import round trip is exact.
pub fn write_fade_vectors<W: Write>(mut writer: W, vectors: &[FadeVector]) -> Result<()> {
    for fv in vectors {
        let mut first = true;
        for z in fv.coefficients() {
            if !first {
                write!(writer, " ")?;
            }
            write!(writer, "{} {}", z.re, z.im)?;
            first = false;
        }
        writeln!(writer)?;
    }
    Ok(())
}

/// Writes fade vectors to a file. See [`write_fade_vectors`].
pub fn export_fade_vectors(path: &Path, vectors: &[FadeVector]) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_fade_vectors(&mut file, vectors)
}
