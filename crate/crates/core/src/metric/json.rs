use std::io::Write;

use serde::Deserialize;
use serde_json::Value;

use super::{FiniteMetricSpace, MetricError, METRIC_TOL};
use crate::format::round_sig;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceJson {
    labels: Vec<Value>,
    dist: Vec<Vec<f64>>,
}

/// Parses `{"labels": [...], "dist": [[...]]}`.
///
/// Labels may be any JSON scalar; non-strings are kept in their JSON
/// spelling. The matrix must be square with a zero diagonal and symmetric
/// within tolerance. The full triangle inequality is not rechecked here
/// (it is cubic); call [`FiniteMetricSpace::validate`] when in doubt.
pub fn read_space_json(text: &str) -> Result<FiniteMetricSpace, MetricError> {
    let raw: SpaceJson = serde_json::from_str(text).map_err(|e| MetricError::Json {
        line: e.line(),
        column: e.column(),
        msg: crate::format::json_message(&e),
    })?;
    let n = raw.dist.len();
    if raw.labels.len() != n {
        return Err(MetricError::Malformed(format!(
            "{} labels but {n} matrix rows",
            raw.labels.len()
        )));
    }
    for (i, row) in raw.dist.iter().enumerate() {
        if row.len() != n {
            return Err(MetricError::Malformed(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    for (i, row) in raw.dist.iter().enumerate() {
        if row[i].abs() > METRIC_TOL {
            return Err(MetricError::NotAMetric(format!("dist[{i}][{i}] = {} is not zero", row[i])));
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(MetricError::Malformed(format!("dist[{i}][{j}] = {v} is not a length")));
            }
            if j > i && (v - raw.dist[j][i]).abs() > METRIC_TOL {
                return Err(MetricError::NotAMetric(format!(
                    "asymmetric: dist[{i}][{j}] = {v} but dist[{j}][{i}] = {}",
                    raw.dist[j][i]
                )));
            }
        }
    }
    let labels = raw
        .labels
        .into_iter()
        .map(|v| match v {
            Value::String(s) => s,
            other => other.to_string(),
        })
        .collect();
    FiniteMetricSpace::from_matrix_unchecked(labels, raw.dist)
}

/// Writes the space in the format read by [`read_space_json`], one matrix
/// row per line, entries rounded to 12 significant digits.
pub fn write_space_json<W: Write>(m: &FiniteMetricSpace, mut out: W) -> std::io::Result<()> {
    let labels = serde_json::to_string(m.labels())?;
    writeln!(out, "{{\"labels\": {labels},")?;
    write!(out, " \"dist\": [")?;
    for i in 0..m.len() {
        let row: Vec<f64> = m.row(i).into_iter().map(|v| round_sig(v, 12)).collect();
        let sep = if i + 1 == m.len() { "" } else { "," };
        write!(out, "\n  {}{sep}", serde_json::to_string(&row)?)?;
    }
    writeln!(out, "]}}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = FiniteMetricSpace::from_line_points(
            vec!["a".into(), "b".into(), "c".into()],
            vec![0.0, 0.1, 1.0 / 3.0],
        );
        let mut buf = Vec::new();
        write_space_json(&m, &mut buf).unwrap();
        let back = read_space_json(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.labels(), m.labels());
        assert!(back.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn numeric_labels_are_stringified() {
        let m = read_space_json(r#"{"labels":[1,"x"],"dist":[[0,2],[2,0]]}"#).unwrap();
        assert_eq!(m.labels(), &["1", "x"]);
        assert_eq!(m.dist(0, 1), 2.0);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = read_space_json("{\"labels\": [\n  \"a\",\n  ]}").unwrap_err();
        match err {
            MetricError::Json { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn asymmetry_rejected() {
        let err = read_space_json(r#"{"labels":["a","b"],"dist":[[0,1],[2,0]]}"#).unwrap_err();
        assert!(matches!(err, MetricError::NotAMetric(_)));
    }

    #[test]
    fn ragged_rejected() {
        let err = read_space_json(r#"{"labels":["a","b"],"dist":[[0,1],[1]]}"#).unwrap_err();
        assert!(matches!(err, MetricError::Malformed(_)));
    }
}
