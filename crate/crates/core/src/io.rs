//! Loading and saving spaces.
//!
//! Two on-disk formats, chosen by file extension:
//!
//! * JSON (`.json`, the default): `{"dist": [[...], ...], "labels": [...],
//!   "size": m}` with keys sorted and reals printed with 17 significant
//!   digits, so a save/load round trip reproduces the matrix bit-for-bit.
//! * CSV (`.csv`): `m` rows of `m` comma-separated decimals with 12 decimal
//!   places, preceded by an optional header row of labels.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::space::{
    validate_metric, DefectKind, FiniteMetricSpace, MetricDefect, DEFAULT_TOL_METRIC,
};

/// Formats a real with 17 significant digits, enough to reproduce any f64
/// exactly on parse.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Canonical JSON text for a space: keys sorted, 17-significant-digit reals.
pub fn to_canonical_json(space: &FiniteMetricSpace) -> String {
    let mut out = String::new();
    out.push_str("{\"dist\":[");
    for i in 0..space.size() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for (j, &v) in space.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&fmt17(v));
        }
        out.push(']');
    }
    out.push(']');
    if let Some(labels) = space.labels() {
        out.push_str(",\"labels\":[");
        for (i, l) in labels.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&serde_json::to_string(l).expect("string serialization"));
        }
        out.push(']');
    }
    out.push_str(&format!(",\"size\":{}}}", space.size()));
    out
}

#[derive(Deserialize)]
struct SpaceFile {
    size: usize,
    #[serde(default)]
    labels: Option<Vec<String>>,
    dist: Vec<Vec<f64>>,
}

fn parse_json_raw(path: &str, text: &str) -> Result<(Vec<Vec<f64>>, Option<Vec<String>>)> {
    let file: SpaceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_string(),
        detail: e.to_string(),
    })?;
    if file.dist.len() != file.size {
        return Err(Error::Parse {
            path: path.to_string(),
            detail: format!(
                "declared size {} but dist has {} rows",
                file.size,
                file.dist.len()
            ),
        });
    }
    Ok((file.dist, file.labels))
}

fn parse_csv_raw(path: &str, text: &str) -> Result<(Vec<Vec<f64>>, Option<Vec<String>>)> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.is_empty() {
        return Err(Error::Parse {
            path: path.to_string(),
            detail: "empty file".into(),
        });
    }
    // A header is any first line whose fields do not all parse as reals.
    let first_fields: Vec<&str> = lines[0].split(',').map(str::trim).collect();
    let has_header = first_fields.iter().any(|f| f.parse::<f64>().is_err());
    let labels: Option<Vec<String>> = if has_header {
        Some(first_fields.iter().map(|s| s.to_string()).collect())
    } else {
        None
    };
    let data_lines = if has_header { &lines[1..] } else { &lines[..] };
    let m = data_lines.len();
    if m == 0 {
        return Err(Error::Parse {
            path: path.to_string(),
            detail: "header row but no data rows".into(),
        });
    }
    if let Some(l) = &labels {
        if l.len() != m {
            return Err(Error::Parse {
                path: path.to_string(),
                detail: format!("header has {} labels but there are {} data rows", l.len(), m),
            });
        }
    }
    let mut rows = Vec::with_capacity(m);
    for (li, line) in data_lines.iter().enumerate() {
        let line_no = li + 1 + usize::from(has_header);
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != m {
            return Err(Error::Parse {
                path: path.to_string(),
                detail: format!(
                    "line {}: expected {} fields, found {}",
                    line_no,
                    m,
                    fields.len()
                ),
            });
        }
        let mut row = Vec::with_capacity(m);
        for (fi, field) in fields.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                path: path.to_string(),
                detail: format!("line {}, field {}: not a real: {:?}", line_no, fi + 1, field),
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    Ok((rows, labels))
}

/// A leniently loaded space together with the defects that were tolerated
/// rather than rejected.
#[derive(Debug)]
pub struct LoadedSpace {
    pub space: FiniteMetricSpace,
    /// Zero distances between distinct points, if any; empty for a true
    /// metric.
    pub tolerated: Vec<MetricDefect>,
}

fn assemble(
    rows: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
    lenient: bool,
) -> Result<LoadedSpace> {
    let defects = validate_metric(&rows, DEFAULT_TOL_METRIC)?;
    let hard = !lenient && !defects.is_empty();
    let beyond_zero = defects
        .iter()
        .any(|d| d.kind != DefectKind::ZeroOffDiagonal);
    if hard || beyond_zero {
        return Err(Error::InvalidMetric(defects));
    }
    let space = FiniteMetricSpace::from_rows_trusted(rows, labels, None)?;
    Ok(LoadedSpace {
        space,
        tolerated: defects,
    })
}

fn to_csv(space: &FiniteMetricSpace) -> String {
    let mut out = String::new();
    if let Some(labels) = space.labels() {
        out.push_str(&labels.join(","));
        out.push('\n');
    }
    for i in 0..space.size() {
        let fields: Vec<String> = space.row(i).iter().map(|v| format!("{v:.12}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false)
}

fn read_raw(path: &Path) -> Result<(Vec<Vec<f64>>, Option<Vec<String>>)> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: name.clone(),
        source,
    })?;
    if is_csv(path) {
        parse_csv_raw(&name, &text)
    } else {
        parse_json_raw(&name, &text)
    }
}

/// Reads a space from `path`, dispatching on the extension (`.csv` is CSV,
/// anything else is JSON). The matrix is fully validated on load.
pub fn load_space<P: AsRef<Path>>(path: P) -> Result<FiniteMetricSpace> {
    let (rows, labels) = read_raw(path.as_ref())?;
    Ok(assemble(rows, labels, false)?.space)
}

/// Like [`load_space`], but a matrix whose only failing axiom is positivity —
/// zero distance between distinct points — is accepted, with the tolerated
/// defects reported so callers can warn. Search intermediates sometimes
/// collapse a pair; every other defect still rejects the file.
pub fn load_space_lenient<P: AsRef<Path>>(path: P) -> Result<LoadedSpace> {
    let (rows, labels) = read_raw(path.as_ref())?;
    assemble(rows, labels, true)
}

/// Writes a space to `path` in the format implied by the extension.
pub fn save_space<P: AsRef<Path>>(space: &FiniteMetricSpace, path: P) -> Result<()> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let text = if is_csv(path) {
        to_csv(space)
    } else {
        to_canonical_json(space)
    };
    std::fs::write(path, text).map_err(|source| Error::Io { path: name, source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::random_metric;

    #[test]
    fn json_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        let s = random_metric(5, 11).unwrap();
        save_space(&s, &path).unwrap();
        let t = load_space(&path).unwrap();
        assert_eq!(s.rows(), t.rows());
    }

    #[test]
    fn canonical_json_sorts_keys() {
        let s = FiniteMetricSpace::from_rows_with(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            Some(vec!["a".into(), "b".into()]),
            None,
        )
        .unwrap();
        let text = to_canonical_json(&s);
        let d = text.find("\"dist\"").unwrap();
        let l = text.find("\"labels\"").unwrap();
        let z = text.find("\"size\"").unwrap();
        assert!(d < l && l < z);
        // Canonical text is itself valid JSON.
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["size"], 2);
    }

    #[test]
    fn csv_round_trip_to_stated_precision() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let s = random_metric(6, 7).unwrap();
        save_space(&s, &path).unwrap();
        let t = load_space(&path).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!((s.dist(i, j) - t.dist(i, j)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn csv_header_row_round_trips_labels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let s = FiniteMetricSpace::from_rows_with(
            vec![vec![0.0, 0.5], vec![0.5, 0.0]],
            Some(vec!["p".into(), "q".into()]),
            None,
        )
        .unwrap();
        save_space(&s, &path).unwrap();
        let t = load_space(&path).unwrap();
        assert_eq!(t.labels(), Some(&["p".to_string(), "q".to_string()][..]));
    }

    #[test]
    fn csv_missing_row_is_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "0.0,1.0,2.0\n1.0,0.0,1.0\n").unwrap();
        assert!(matches!(load_space(&path), Err(Error::Parse { .. })));
    }

    #[test]
    fn lenient_load_tolerates_only_zero_off_diagonal() {
        let dir = tempfile::tempdir().unwrap();
        let collapsed = dir.path().join("collapsed.json");
        std::fs::write(
            &collapsed,
            r#"{"size":3,"dist":[[0,0,1],[0,0,1],[1,1,0]]}"#,
        )
        .unwrap();
        assert!(load_space(&collapsed).is_err());
        let loaded = load_space_lenient(&collapsed).unwrap();
        assert_eq!(loaded.space.size(), 3);
        assert!(!loaded.tolerated.is_empty());
        assert!(loaded
            .tolerated
            .iter()
            .all(|d| d.kind == DefectKind::ZeroOffDiagonal));

        let broken = dir.path().join("broken.json");
        std::fs::write(&broken, r#"{"size":3,"dist":[[0,1,3],[1,0,1],[3,1,0]]}"#).unwrap();
        assert!(matches!(
            load_space_lenient(&broken),
            Err(Error::InvalidMetric(_))
        ));
    }

    #[test]
    fn invalid_json_matrix_reports_defects() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(
            &path,
            r#"{"size":3,"dist":[[0,1,3],[1,0,1],[3,1,0]]}"#,
        )
        .unwrap();
        match load_space(&path) {
            Err(Error::InvalidMetric(defects)) => {
                assert!(!defects.is_empty());
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }
}
