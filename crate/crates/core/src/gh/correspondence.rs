use serde::{Deserialize, Serialize};

use super::GhError;
use crate::metric::FiniteMetricSpace;

/// A relation between the points of two spaces, kept sorted and deduplicated.
///
/// Serializes as a list of `[i, j]` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        Self { pairs }
    }

    /// The graph of `f` on `0..f.len()`.
    pub fn from_map(f: &[usize]) -> Self {
        Self::new(f.iter().copied().enumerate().collect())
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        self.pairs.binary_search(&pair).is_ok()
    }

    pub fn transposed(&self) -> Self {
        Self::new(self.pairs.iter().map(|&(i, j)| (j, i)).collect())
    }

    /// Checks that every index of both sides is used and nothing is out of range.
    pub fn check_full(&self, nx: usize, ny: usize) -> Result<(), GhError> {
        let mut seen_x = vec![false; nx];
        let mut seen_y = vec![false; ny];
        for &(i, j) in &self.pairs {
            if i >= nx {
                return Err(GhError::Index { side: "X", index: i, len: nx });
            }
            if j >= ny {
                return Err(GhError::Index { side: "Y", index: j, len: ny });
            }
            seen_x[i] = true;
            seen_y[j] = true;
        }
        if let Some(i) = seen_x.iter().position(|s| !s) {
            return Err(GhError::NotFull { side: "X", index: i });
        }
        if let Some(j) = seen_y.iter().position(|s| !s) {
            return Err(GhError::NotFull { side: "Y", index: j });
        }
        Ok(())
    }
}

/// `max |dX(i,i') - dY(j,j')|` over pairs of pairs, without a fullness check.
pub(crate) fn raw_distortion(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    pairs: &[(usize, usize)],
) -> f64 {
    let mut worst = 0.0f64;
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for &(i2, j2) in &pairs[a + 1..] {
            worst = worst.max((x.dist(i, i2) - y.dist(j, j2)).abs());
        }
    }
    worst
}

/// Distortion of a full correspondence.
pub fn distortion_of_correspondence(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    r: &Correspondence,
) -> Result<f64, GhError> {
    r.check_full(x.len(), y.len())?;
    Ok(raw_distortion(x, y, r.pairs()))
}

/// Additive distortion of the map `f: X -> Y` and how far its image is from
/// covering `Y`: `max_y min_x dY(f(x), y)`.
pub fn map_distortion(
    f: &[usize],
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<(f64, f64), GhError> {
    if f.len() != x.len() {
        return Err(GhError::MapLength { got: f.len(), expected: x.len() });
    }
    if let Some(&bad) = f.iter().find(|&&j| j >= y.len()) {
        return Err(GhError::Index { side: "Y", index: bad, len: y.len() });
    }
    let mut dist = 0.0f64;
    for i in 0..f.len() {
        for i2 in i + 1..f.len() {
            dist = dist.max((x.dist(i, i2) - y.dist(f[i], f[i2])).abs());
        }
    }
    let mut image: Vec<usize> = f.to_vec();
    image.sort_unstable();
    image.dedup();
    let defect = (0..y.len())
        .map(|j| image.iter().map(|&fi| y.dist(fi, j)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok((dist, defect))
}
