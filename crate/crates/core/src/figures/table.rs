use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::series::CurveSeries;

/// Where [`write_csv`] put the data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CsvOutput {
    /// All series shared one grid and went into a single file.
    Combined(PathBuf),
    /// Grids differed, so each series got its own `<stem>_<label>.csv`.
    Split(Vec<PathBuf>),
}

impl CsvOutput {
    pub fn paths(&self) -> Vec<&Path> {
        match self {
            CsvOutput::Combined(p) => vec![p.as_path()],
            CsvOutput::Split(ps) => ps.iter().map(PathBuf::as_path).collect(),
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source: e,
    }
}

fn write_one(path: &Path, series: &[&CurveSeries]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));
    let mut header = vec!["x".to_string()];
    header.extend(series.iter().map(|s| s.label().to_string()));
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    for (row, &(x, _)) in series[0].points().iter().enumerate() {
        let mut rec = Vec::with_capacity(series.len() + 1);
        rec.push(x.to_string());
        rec.extend(series.iter().map(|s| s.points()[row].1.to_string()));
        w.write_record(&rec).map_err(|e| csv_error(path, e))?;
    }
    let inner = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    let mut file = inner.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    file.flush().map_err(|e| Error::io(path, e))
}

/// Writes the series as CSV with header `x,<label...>`.
///
/// Series go into one file at `path` only when they sample exactly the same x
/// values; otherwise each series is written next to `path` as
/// `<stem>_<label>.csv` and [`CsvOutput::Split`] says so. Numbers use the
/// shortest representation that round-trips.
pub fn write_csv(series: &[CurveSeries], path: impl AsRef<Path>) -> Result<CsvOutput> {
    let path = path.as_ref();
    if series.is_empty() {
        return Err(Error::param("series", "at least one series is required"));
    }
    let mut seen = HashSet::new();
    if let Some(dup) = series.iter().find(|s| !seen.insert(s.label())) {
        return Err(Error::param("series", format!("duplicate label `{}`", dup.label())));
    }
    if series.iter().all(|s| s.same_grid(&series[0])) {
        let refs: Vec<&CurveSeries> = series.iter().collect();
        write_one(path, &refs)?;
        return Ok(CsvOutput::Combined(path.to_path_buf()));
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("series");
    let dir = path.parent().unwrap_or_else(|| Path::new(""));
    let mut out = Vec::with_capacity(series.len());
    for s in series {
        let p = dir.join(format!("{stem}_{}.csv", s.label()));
        write_one(&p, &[s])?;
        out.push(p);
    }
    Ok(CsvOutput::Split(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(label: &str, pts: &[(f64, f64)]) -> CurveSeries {
        CurveSeries::new(label, "x", "y", pts.to_vec()).unwrap()
    }

    #[test]
    fn single_series_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        let s = series("a", &[(0.0, 0.1), (0.5, 1e-20), (1.0, 2.5)]);
        assert_eq!(write_csv(&[s], &p).unwrap(), CsvOutput::Combined(p.clone()));
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "x,a\n0,0.1\n0.5,0.00000000000000000001\n1,2.5\n");
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn shared_grid_is_one_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ab.csv");
        let a = series("a", &[(0.0, 1.0), (1.0, 2.0)]);
        let b = series("b", &[(0.0, 3.0), (1.0, 0.30000000000000004)]);
        write_csv(&[a, b], &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "x,a,b\n0,1,3\n1,2,0.30000000000000004\n");
    }

    #[test]
    fn mismatched_grids_split() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("fig.csv");
        let a = series("a", &[(0.0, 1.0), (1.0, 2.0)]);
        let b = series("b", &[(0.0, 3.0), (2.0, 4.0)]);
        let out = write_csv(&[a, b], &p).unwrap();
        let CsvOutput::Split(paths) = out else {
            panic!("expected split")
        };
        assert_eq!(paths, vec![dir.path().join("fig_a.csv"), dir.path().join("fig_b.csv")]);
        assert!(!p.exists());
        assert_eq!(std::fs::read_to_string(&paths[1]).unwrap(), "x,b\n0,3\n2,4\n");
    }

    #[test]
    fn errors_are_distinct() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            write_csv(&[], dir.path().join("x.csv")),
            Err(Error::InvalidParameter { .. })
        ));
        let a = series("a", &[(0.0, 1.0)]);
        assert!(matches!(
            write_csv(&[a.clone(), a.clone()], dir.path().join("x.csv")),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            write_csv(&[a], dir.path().join("missing/x.csv")),
            Err(Error::Io { .. })
        ));
    }
}
