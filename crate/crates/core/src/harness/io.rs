use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use super::run::ResultRecord;
use super::summary::SummaryStats;
use crate::charfreq::SampleMatrix;
use crate::{Error, Result};

pub const CSV_HEADER: &str = "replication,estimator,frob_error,wall_time_s,tau,U,lambda,admissible,status";

/// Numeric matrix, one observation per line. Fields are separated by
/// whitespace and/or commas; blank lines and `#` comments are skipped.
pub fn parse_data(text: &str) -> Result<SampleMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Parse { line: idx + 1, message: format!("not a number: {f:?}") })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {} fields, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    SampleMatrix::from_rows(&rows)
}

pub fn read_data(path: &Path) -> Result<SampleMatrix<f64>> {
    parse_data(&std::fs::read_to_string(path).map_err(Error::io_at(path))?)
}

fn opt<T: Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv(records: &[ResultRecord], mut out: impl Write) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.replication,
            r.estimator,
            opt(r.frob_error),
            r.wall_time_s,
            opt(r.tau),
            opt(r.u),
            opt(r.lambda),
            opt(r.admissible),
            r.status
        )?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(Error::io_at(dir))?;
    }
    Ok(std::io::BufWriter::new(std::fs::File::create(path).map_err(Error::io_at(path))?))
}

pub fn write_csv_file(records: &[ResultRecord], path: &Path) -> Result<()> {
    let mut f = create(path)?;
    write_csv(records, &mut f)?;
    f.flush()?;
    Ok(())
}

pub fn summary_json(stats: &[SummaryStats]) -> String {
    serde_json::to_string_pretty(stats).expect("summary is serialisable")
}

pub fn write_summary_file(stats: &[SummaryStats], path: &Path) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "{}", summary_json(stats))?;
    f.flush()?;
    Ok(())
}

/// Matrix rows as comma-separated values.
pub fn format_matrix(m: &ndarray::Array2<f64>) -> String {
    let mut s = String::new();
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}
