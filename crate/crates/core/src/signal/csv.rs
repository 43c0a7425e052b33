//! CSV interchange for sample series.
//!
//! Format: UTF-8, LF line endings, header `t,v1,...,vn`, one decimal float
//! per field (scientific notation allowed). Values are written with 17
//! significant digits so a write/read round-trip is lossless.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{SampleSeries, SignalError};

fn parse_err(line: usize, message: impl Into<String>) -> SignalError {
    SignalError::Parse {
        line,
        message: message.into(),
    }
}

/// Read a sample series; parse errors name the 1-based line number.
pub fn read_csv(path: impl AsRef<Path>) -> Result<SampleSeries, SignalError> {
    let file = File::open(path)?;
    let mut lines = BufReader::new(file).lines();

    let header = match lines.next() {
        Some(h) => h?,
        None => return Err(parse_err(1, "empty file, expected header t,v1,...,vn")),
    };
    let cols: Vec<&str> = header.trim_end_matches('\r').split(',').collect();
    if cols.len() < 3 || cols[0] != "t" {
        return Err(parse_err(1, format!("expected header t,v1,...,vn, got `{header}`")));
    }
    for (i, col) in cols[1..].iter().enumerate() {
        let expected = format!("v{}", i + 1);
        if *col != expected {
            return Err(parse_err(
                1,
                format!("expected column `{expected}`, got `{col}`"),
            ));
        }
    }
    let n = cols.len() - 1;

    let mut series = SampleSeries::empty(n);
    let mut row = vec![0.0; n];
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let t_field = fields.next().unwrap();
        let t: f64 = t_field
            .trim()
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad timestamp `{t_field}`")))?;
        let mut count = 0;
        for field in fields {
            if count >= n {
                count += 1;
                continue;
            }
            row[count] = field
                .trim()
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad value `{field}`")))?;
            count += 1;
        }
        if count != n {
            return Err(parse_err(
                line_no,
                format!("expected {n} values, got {count}"),
            ));
        }
        series
            .push(t, &row)
            .map_err(|e| parse_err(line_no, e.to_string()))?;
    }
    Ok(series)
}

/// Write a sample series to `path` in the interchange format.
pub fn write_csv(series: &SampleSeries, path: impl AsRef<Path>) -> Result<(), SignalError> {
    let file = File::create(path)?;
    let mut out = BufWriter::new(file);
    write_header(&mut out, series.phase_count())?;
    for (t, row) in series.rows() {
        write!(out, "{t:.16e}")?;
        for v in row {
            write!(out, ",{v:.16e}")?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub(crate) fn write_header(out: &mut impl Write, n: usize) -> std::io::Result<()> {
    out.write_all(b"t")?;
    for i in 1..=n {
        write!(out, ",v{i}")?;
    }
    out.write_all(b"\n")
}
