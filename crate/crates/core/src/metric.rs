//! Finite metric spaces stored as dense distance matrices, plus the
//! transforms (snowflake, product, subspace) and set utilities that every
//! other module builds on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when validating floating-point matrices.
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

/// A finite metric space with a full distance matrix.
///
/// Construction only checks the shape of the input; call [`FiniteMetricSpace::validate`]
/// to certify the metric axioms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    n: usize,
    d: Vec<f64>,
    labels: Option<Vec<String>>,
}

/// A sorted set of point indices into some ambient space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointSet(Vec<usize>);

/// How the factor distances are combined in [`product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductNorm {
    Max,
    Euclidean,
    Sum,
}

/// One violated metric axiom, with the witnessing indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonZeroDiagonal { i: usize, value: f64 },
    Asymmetric { i: usize, j: usize, dij: f64, dji: f64 },
    NonPositive { i: usize, j: usize, value: f64 },
    NotFinite { i: usize, j: usize },
    /// `d[i][k] > d[i][via] + d[via][k]`.
    Triangle { i: usize, k: usize, via: usize, lhs: f64, rhs: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tolerance: f64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl PointSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        PointSet(indices)
    }

    pub fn singleton(i: usize) -> Self {
        PointSet(vec![i])
    }

    pub fn empty() -> Self {
        PointSet(Vec::new())
    }

    pub fn full(n: usize) -> Self {
        PointSet((0..n).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn into_indices(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.len() <= other.len() && self.iter().all(|i| other.contains(i))
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().any(|i| large.contains(i))
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        PointSet::new(v)
    }

    /// Re-index through `map` (subspace index -> ambient index).
    pub fn lift(&self, map: &[usize]) -> PointSet {
        PointSet::new(self.iter().map(|i| map[i]).collect())
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        PointSet::new(iter.into_iter().collect())
    }
}

impl FiniteMetricSpace {
    /// Builds a space from a square matrix. Only the shape is checked here.
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Structural("empty distance matrix".into()));
        }
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Structural(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            d.extend(row);
        }
        Ok(FiniteMetricSpace { n, d, labels: None })
    }

    /// Euclidean distances between the given coordinate vectors.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::Structural("empty point list".into()));
        }
        let dim = points[0].len();
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != dim) {
            return Err(Error::Structural(format!(
                "point {i} has dimension {}, expected {dim}",
                p.len()
            )));
        }
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = euclidean(&points[i], &points[j]);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Ok(FiniteMetricSpace { n, d, labels: None })
    }

    /// Builds a space from a distance function, evaluated on `i < j` and mirrored.
    pub fn from_fn(n: usize, mut dist: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Structural("empty space".into()));
        }
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = dist(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Ok(FiniteMetricSpace { n, d, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Structural(format!(
                "{} labels for {} points",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest distance between distinct points, `None` for a single point.
    pub fn min_positive_distance(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let v = self.d(i, j);
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        best
    }

    /// Checks the metric axioms with the default slack `1e-9 * (1 + diam)`.
    pub fn validate(&self) -> ValidationReport {
        self.validate_with_tolerance(TRIANGLE_TOLERANCE * (1.0 + self.diameter()))
    }

    pub fn validate_with_tolerance(&self, tol: f64) -> ValidationReport {
        let n = self.n;
        let mut violations = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if !self.d(i, j).is_finite() {
                    violations.push(Violation::NotFinite { i, j });
                }
            }
        }
        if !violations.is_empty() {
            return ValidationReport { tolerance: tol, violations };
        }
        for i in 0..n {
            if self.d(i, i) != 0.0 {
                violations.push(Violation::NonZeroDiagonal { i, value: self.d(i, i) });
            }
            for j in (i + 1)..n {
                let (a, b) = (self.d(i, j), self.d(j, i));
                if a != b {
                    violations.push(Violation::Asymmetric { i, j, dij: a, dji: b });
                }
                if a <= 0.0 {
                    violations.push(Violation::NonPositive { i, j, value: a });
                }
            }
        }
        for i in 0..n {
            for k in (i + 1)..n {
                let lhs = self.d(i, k);
                for via in 0..n {
                    if via == i || via == k {
                        continue;
                    }
                    let rhs = self.d(i, via) + self.d(via, k);
                    if lhs > rhs + tol {
                        violations.push(Violation::Triangle { i, k, via, lhs, rhs });
                    }
                }
            }
        }
        ValidationReport { tolerance: tol, violations }
    }

    /// Restriction to `indices`; returns the subspace and its index map back into `self`.
    pub fn subspace(&self, indices: &PointSet) -> Result<(FiniteMetricSpace, Vec<usize>)> {
        if indices.is_empty() {
            return Err(Error::Parameter("subspace of the empty set".into()));
        }
        if let Some(bad) = indices.iter().find(|&i| i >= self.n) {
            return Err(Error::Parameter(format!("index {bad} out of range 0..{}", self.n)));
        }
        let map = indices.indices().to_vec();
        let m = map.len();
        let mut d = Vec::with_capacity(m * m);
        for &a in &map {
            for &b in &map {
                d.push(self.d(a, b));
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| map.iter().map(|&i| l[i].clone()).collect());
        Ok((FiniteMetricSpace { n: m, d, labels }, map))
    }

    /// Distance from a point to a set; `+inf` for the empty set.
    pub fn point_set_distance(&self, x: usize, set: &PointSet) -> f64 {
        set.iter().map(|y| self.d(x, y)).fold(f64::INFINITY, f64::min)
    }

    /// Closed ball `B(x, radius)`.
    pub fn closed_ball(&self, x: usize, radius: f64) -> PointSet {
        PointSet((0..self.n).filter(|&y| self.d(x, y) <= radius).collect())
    }

    /// Closed `radius`-neighborhood of a set.
    pub fn closed_neighborhood(&self, set: &PointSet, radius: f64) -> PointSet {
        PointSet(
            (0..self.n)
                .filter(|&y| set.iter().any(|x| self.d(x, y) <= radius))
                .collect(),
        )
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// The snowflake `d^p`, for `p` in `(0, 1]`.
pub fn snowflake(space: &FiniteMetricSpace, p: f64) -> Result<FiniteMetricSpace> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Parameter(format!(
            "snowflake exponent {p} outside (0, 1]; p > 1 can break the triangle inequality"
        )));
    }
    let d = space
        .d
        .iter()
        .map(|&v| if p == 1.0 { v } else { v.powf(p) })
        .collect();
    Ok(FiniteMetricSpace { n: space.n, d, labels: space.labels.clone() })
}

/// Greedy maximal `s`-separated set.
///
/// Points are visited in `order` and admitted iff they are strictly farther
/// than `s` from every admitted point. The result is in admission order.
pub fn maximal_separated_net(space: &FiniteMetricSpace, s: f64, order: &[usize]) -> Result<Vec<usize>> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Parameter(format!("net scale must be positive and finite, got {s}")));
    }
    check_order(order, space.len())?;
    let mut net: Vec<usize> = Vec::new();
    for &x in order {
        if net.iter().all(|&z| space.d(x, z) > s) {
            net.push(x);
        }
    }
    Ok(net)
}

pub(crate) fn check_order(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::Parameter(format!(
            "order has {} entries, expected a permutation of 0..{n}",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return Err(Error::Parameter(format!("order is not a permutation (entry {i})")));
        }
        seen[i] = true;
    }
    Ok(())
}

pub fn identity_order(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Minimum distance between two non-empty sets.
pub fn set_distance(space: &FiniteMetricSpace, a: &PointSet, b: &PointSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Parameter("set distance to the empty set".into()));
    }
    Ok(set_distance_unchecked(space, a, b))
}

/// Like [`set_distance`] but returns `+inf` when either side is empty.
pub fn set_distance_unchecked(space: &FiniteMetricSpace, a: &PointSet, b: &PointSet) -> f64 {
    let mut best = f64::INFINITY;
    for x in a.iter() {
        for y in b.iter() {
            best = best.min(space.d(x, y));
        }
    }
    best
}

/// Maximum pairwise distance; zero for empty sets and singletons.
pub fn set_diameter(space: &FiniteMetricSpace, a: &PointSet) -> f64 {
    let idx = a.indices();
    let mut best = 0.0f64;
    for (k, &x) in idx.iter().enumerate() {
        for &y in &idx[k + 1..] {
            best = best.max(space.d(x, y));
        }
    }
    best
}

/// Product of two spaces; point `(a, b)` gets index `a * |B| + b`.
pub fn product(a: &FiniteMetricSpace, b: &FiniteMetricSpace, norm: ProductNorm) -> FiniteMetricSpace {
    let (na, nb) = (a.len(), b.len());
    let n = na * nb;
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let (ia, ib) = (i / nb, i % nb);
        for j in 0..n {
            let (ja, jb) = (j / nb, j % nb);
            let (x, y) = (a.d(ia, ja), b.d(ib, jb));
            d[i * n + j] = match norm {
                ProductNorm::Max => x.max(y),
                ProductNorm::Euclidean => x.hypot(y),
                ProductNorm::Sum => x + y,
            };
        }
    }
    FiniteMetricSpace { n, d, labels: None }
}
