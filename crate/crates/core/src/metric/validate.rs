use std::fmt;

use serde::Serialize;

use super::{FiniteMetricSpace, MetricError, METRIC_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    ZeroDiagonal,
    Symmetry,
    Positivity,
    Triangle,
}

/// One violated axiom with its worst witness.
///
/// For [`Axiom::Triangle`] the witness is `(i, k, j)` with
/// `magnitude = d(i,j) - d(i,k) - d(k,j)`; for the two-index axioms the
/// last entry repeats the second index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: (usize, usize, usize),
    pub magnitude: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_metric(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn get(&self, axiom: Axiom) -> Option<&Violation> {
        self.violations.iter().find(|v| v.axiom == axiom)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "all axioms hold");
        }
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                write!(f, "; ")?;
            }
            let (i, k, j) = v.witness;
            match v.axiom {
                Axiom::Triangle => write!(
                    f,
                    "triangle violated {} times, worst d({i},{j}) exceeds d({i},{k})+d({k},{j}) by {}",
                    v.count, v.magnitude
                )?,
                a => write!(
                    f,
                    "{a:?} violated {} times, worst at ({i},{k}) by {}",
                    v.count, v.magnitude
                )?,
            }
        }
        Ok(())
    }
}

#[derive(Default)]
struct Worst {
    witness: (usize, usize, usize),
    magnitude: f64,
    count: usize,
}

impl Worst {
    fn offer(&mut self, witness: (usize, usize, usize), magnitude: f64) {
        self.count += 1;
        if self.count == 1 || magnitude > self.magnitude {
            self.witness = witness;
            self.magnitude = magnitude;
        }
    }

    fn into_violation(self, axiom: Axiom) -> Option<Violation> {
        (self.count > 0).then_some(Violation {
            axiom,
            witness: self.witness,
            magnitude: self.magnitude,
            count: self.count,
        })
    }
}

/// Checks the metric axioms on a raw matrix.
///
/// Errors only when the matrix is not square or holds non-finite entries.
pub fn validate_metric(rows: &[Vec<f64>]) -> Result<ValidationReport, MetricError> {
    let n = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(MetricError::Malformed(format!(
                "row {i} has {} entries in a {n}-row matrix",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(MetricError::Malformed(format!("entry ({i},{j}) is not finite")));
        }
    }
    Ok(check(n, rows.iter().flatten().copied().collect()))
}

pub(crate) fn validate_space(m: &FiniteMetricSpace) -> ValidationReport {
    check(m.len(), m.to_dense())
}

/// `d` is the row-major `n × n` matrix.
fn check(n: usize, d: Vec<f64>) -> ValidationReport {
    let mut diag = Worst::default();
    let mut sym = Worst::default();
    let mut pos = Worst::default();
    let mut tri = Worst::default();
    // Column-major copy so that d(k, j) over k is contiguous.
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = d[i * n + j];
        }
    }
    for i in 0..n {
        let v = d[i * n + i].abs();
        if v > METRIC_TOL {
            diag.offer((i, i, i), v);
        }
        let ri = &d[i * n..(i + 1) * n];
        for j in 0..n {
            if i == j {
                continue;
            }
            let dij = ri[j];
            if i < j {
                let asym = (dij - d[j * n + i]).abs();
                if asym > METRIC_TOL {
                    sym.offer((i, j, j), asym);
                }
                if dij <= 0.0 {
                    pos.offer((i, j, j), -dij);
                }
            }
            let tj = &t[j * n..(j + 1) * n];
            let shortest = ri.iter().zip(tj).enumerate().fold(f64::INFINITY, |m, (k, (a, b))| {
                if k == i || k == j {
                    m
                } else {
                    m.min(a + b)
                }
            });
            if dij - shortest <= METRIC_TOL {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let excess = dij - ri[k] - tj[k];
                if excess > METRIC_TOL {
                    tri.offer((i, k, j), excess);
                }
            }
        }
    }
    let violations = [
        diag.into_violation(Axiom::ZeroDiagonal),
        sym.into_violation(Axiom::Symmetry),
        pos.into_violation(Axiom::Positivity),
        tri.into_violation(Axiom::Triangle),
    ]
    .into_iter()
    .flatten()
    .collect();
    ValidationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_metric_is_clean() {
        let r = validate_metric(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(r.is_metric(), "{r}");
    }

    #[test]
    fn triangle_witness_and_excess() {
        let r = validate_metric(&[
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ])
        .unwrap();
        let v = r.get(Axiom::Triangle).unwrap();
        assert_eq!(v.witness, (0, 1, 2));
        assert_eq!(v.magnitude, 3.0);
        assert_eq!(v.count, 2);
    }

    #[test]
    fn coincident_points_fail_positivity() {
        let r = validate_metric(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let v = r.get(Axiom::Positivity).unwrap();
        assert_eq!((v.witness.0, v.witness.1), (0, 1));
    }

    #[test]
    fn asymmetry_and_diagonal() {
        let r = validate_metric(&[vec![0.5, 1.0], vec![2.0, 0.0]]).unwrap();
        assert!(r.get(Axiom::Symmetry).is_some());
        assert!(r.get(Axiom::ZeroDiagonal).is_some());
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            validate_metric(&[vec![0.0, 1.0]]),
            Err(MetricError::Malformed(_))
        ));
        assert!(matches!(
            validate_metric(&[vec![0.0, f64::NAN], vec![1.0, 0.0]]),
            Err(MetricError::Malformed(_))
        ));
    }

    #[test]
    fn round_off_is_tolerated() {
        let r = validate_metric(&[
            vec![0.0, 1.0, 2.0 + 1e-12],
            vec![1.0, 0.0, 1.0],
            vec![2.0 + 1e-12, 1.0, 0.0],
        ])
        .unwrap();
        assert!(r.is_metric());
    }
}
