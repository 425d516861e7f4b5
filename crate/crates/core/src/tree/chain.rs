use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{HierarchicalCovering, SetId};
use crate::metric::{set_distance_unchecked, FiniteMetricSpace, PointSet};

pub type NodeId = SetId;

/// The immediate-successor relation of a hierarchy, per color.
///
/// `parent[B] = C` when `C` is the lowest-level set of `B`'s color above
/// `B` that contains it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChildRelation {
    pub colors: usize,
    pub parent: BTreeMap<SetId, SetId>,
    pub children: BTreeMap<SetId, Vec<SetId>>,
    /// Sets without a parent, per color.
    pub roots: Vec<Vec<SetId>>,
    /// For each color and point, the lowest-level set containing it.
    pub minimal: Vec<Vec<SetId>>,
}

impl ChildRelation {
    pub fn of(h: &HierarchicalCovering) -> Result<Self> {
        let n = h.n_points;
        let mut parent = BTreeMap::new();
        let mut children: BTreeMap<SetId, Vec<SetId>> = BTreeMap::new();
        let mut roots = Vec::with_capacity(h.colors);
        let mut minimal = Vec::with_capacity(h.colors);
        for color in 0..h.colors {
            let ids = h.color_sets(color);
            let mut color_roots = Vec::new();
            for &b in &ids {
                let inner = h.set(b);
                let mut found: Option<Vec<SetId>> = None;
                for level in h.levels.iter().filter(|l| l.j > b.level) {
                    let hits: Vec<SetId> = level.families[color]
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| inner.is_subset(c))
                        .map(|(index, _)| SetId { level: level.j, color, index })
                        .collect();
                    if !hits.is_empty() {
                        found = Some(hits);
                        break;
                    }
                }
                match found {
                    None => color_roots.push(b),
                    Some(hits) if hits.len() == 1 => {
                        parent.insert(b, hits[0]);
                        children.entry(hits[0]).or_default().push(b);
                    }
                    Some(hits) => {
                        return Err(Error::Invariant(format!(
                            "set {b:?} has several immediate successors {hits:?}"
                        )))
                    }
                }
            }
            let mut per_point = Vec::with_capacity(n);
            for x in 0..n {
                let mut found = None;
                for level in &h.levels {
                    let hits: Vec<usize> = level.families[color]
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| c.contains(x))
                        .map(|(i, _)| i)
                        .collect();
                    match hits.len() {
                        0 => continue,
                        1 => {
                            found = Some(SetId { level: level.j, color, index: hits[0] });
                            break;
                        }
                        _ => {
                            return Err(Error::Invariant(format!(
                                "point {x} lies in several color-{color} sets at level {}",
                                level.j
                            )))
                        }
                    }
                }
                per_point.push(found.ok_or_else(|| {
                    Error::Invariant(format!("point {x} lies in no set of color {color}"))
                })?);
            }
            roots.push(color_roots);
            minimal.push(per_point);
        }
        Ok(ChildRelation { colors: h.colors, parent, children, roots, minimal })
    }

    pub fn children_of(&self, c: SetId) -> &[SetId] {
        self.children.get(&c).map_or(&[], Vec::as_slice)
    }

    /// `c` followed by its ancestors, lowest level first.
    pub fn ancestors(&self, c: SetId) -> Vec<SetId> {
        let mut out = vec![c];
        let mut cur = c;
        while let Some(&p) = self.parent.get(&cur) {
            out.push(p);
            cur = p;
        }
        out
    }
}

/// The largest pseudometric below `d^p` that vanishes on every child of one set.
///
/// Distances are shortest paths through the children: hop from a point to
/// a child at cost `d(x, B)^p`, between children at `d(B, B')^p`, or go
/// directly at `d(x, x')^p`. The metric is defined on all of `X`.
#[derive(Debug, Clone)]
pub struct ChainMetric<'a> {
    space: &'a FiniteMetricSpace,
    set: PointSet,
    p: f64,
    m: usize,
    to_child: Vec<f64>,
    between: Vec<f64>,
}

impl<'a> ChainMetric<'a> {
    pub fn new(space: &'a FiniteMetricSpace, set: &PointSet, children: &[PointSet], p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Parameter(format!("exponent p = {p} outside (0, 1]")));
        }
        if children.iter().any(PointSet::is_empty) {
            return Err(Error::Parameter("empty child set".into()));
        }
        let n = space.len();
        let m = children.len();
        let mut to_child = vec![0.0; n * m];
        for x in 0..n {
            for (b, child) in children.iter().enumerate() {
                to_child[x * m + b] = space.point_set_distance(x, child).powf(p);
            }
        }
        let mut between = vec![0.0; m * m];
        for a in 0..m {
            for b in (a + 1)..m {
                let w = set_distance_unchecked(space, &children[a], &children[b]).powf(p);
                between[a * m + b] = w;
                between[b * m + a] = w;
            }
        }
        Ok(ChainMetric { space, set: set.clone(), p, m, to_child, between })
    }

    pub fn children(&self) -> usize {
        self.m
    }

    /// Shortest chain cost from `x` to each child.
    pub fn from_source(&self, x: usize) -> Vec<f64> {
        let m = self.m;
        let mut dist: Vec<f64> = self.to_child[x * m..(x + 1) * m].to_vec();
        let mut done = vec![false; m];
        for _ in 0..m {
            let Some(u) = (0..m)
                .filter(|&u| !done[u])
                .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            else {
                break;
            };
            done[u] = true;
            for v in 0..m {
                if !done[v] {
                    let alt = dist[u] + self.between[u * m + v];
                    if alt < dist[v] {
                        dist[v] = alt;
                    }
                }
            }
        }
        dist
    }

    /// Completes a distance from the output of [`ChainMetric::from_source`] for `x`.
    pub fn distance_from(&self, src: &[f64], x: usize, y: usize) -> f64 {
        let m = self.m;
        let mut best = self.space.d(x, y).powf(self.p);
        for (b, &dx) in src.iter().enumerate() {
            best = best.min(dx + self.to_child[y * m + b]);
        }
        best
    }

    /// The pseudometric on arbitrary points of `X`.
    pub fn distance(&self, x: usize, y: usize) -> f64 {
        if x == y {
            return 0.0;
        }
        self.distance_from(&self.from_source(x), x, y)
    }

    /// The pseudometric restricted to the set; both points must lie in it.
    pub fn d_cp(&self, x: usize, y: usize) -> Result<f64> {
        for z in [x, y] {
            if !self.set.contains(z) {
                return Err(Error::Parameter(format!("point {z} is not in the set")));
            }
        }
        Ok(self.distance(x, y))
    }

    /// Distance from `x` to the complement of the set; `+inf` when the set is all of `X`.
    pub fn distance_to_complement(&self, x: usize) -> f64 {
        let src = self.from_source(x);
        (0..self.space.len())
            .filter(|&y| !self.set.contains(y))
            .map(|y| self.distance_from(&src, x, y))
            .fold(f64::INFINITY, f64::min)
    }

    /// Gluing height at `x` for a set at level `level` with base `base`:
    /// `max(0, min(d(x, X \ C), r^{pj}) - r^{p(j-1)})`.
    pub fn tau(&self, x: usize, base: f64, level: i32) -> f64 {
        let top = base.powf(self.p * f64::from(level));
        let floor = base.powf(self.p * f64::from(level - 1));
        (self.distance_to_complement(x).min(top) - floor).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collinear(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(xs.len(), |i, j| (xs[i] - xs[j]).abs()).unwrap()
    }

    #[test]
    fn no_children_is_plain_snowflake() {
        let line = collinear(&[0.0, 4.0]);
        let cm = ChainMetric::new(&line, &PointSet::full(2), &[], 0.5).unwrap();
        assert_eq!(cm.d_cp(0, 1).unwrap(), 2.0);
    }

    #[test]
    fn same_child_is_zero() {
        let line = collinear(&[0.0, 1.0, 10.0, 11.0]);
        let kids = [PointSet::new(vec![0, 1]), PointSet::new(vec![2, 3])];
        let cm = ChainMetric::new(&line, &PointSet::full(4), &kids, 0.5).unwrap();
        assert_eq!(cm.d_cp(0, 1).unwrap(), 0.0);
        assert_eq!(cm.d_cp(2, 3).unwrap(), 0.0);
    }

    #[test]
    fn four_point_example() {
        let line = collinear(&[0.0, 1.0, 10.0, 11.0]);
        let kids = [PointSet::new(vec![0, 1]), PointSet::new(vec![2, 3])];
        let cm = ChainMetric::new(&line, &PointSet::full(4), &kids, 0.5).unwrap();
        assert!((cm.d_cp(0, 3).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn outside_points_are_rejected() {
        let line = collinear(&[0.0, 1.0, 10.0]);
        let cm = ChainMetric::new(&line, &PointSet::new(vec![0, 1]), &[], 0.5).unwrap();
        assert!(cm.d_cp(0, 2).is_err());
        assert!(cm.distance(0, 2).is_finite());
    }

    #[test]
    fn tau_on_full_space_is_clipped_height() {
        let line = collinear(&[0.0, 1.0]);
        let cm = ChainMetric::new(&line, &PointSet::full(2), &[], 0.5).unwrap();
        let expected = 16f64.powf(0.5 * 2.0) - 16f64.powf(0.5);
        assert_eq!(cm.tau(0, 16.0, 2), expected);
    }

    #[test]
    fn tau_small_set_against_oracle() {
        let line = collinear(&[0.0, 1.0, 10.0, 11.0]);
        let c = PointSet::new(vec![0, 1]);
        let cm = ChainMetric::new(&line, &c, &[], 0.5).unwrap();
        // Nearest outside point is 10 away from point 0.
        let base: f64 = 100.0;
        let j = 1;
        let expected = (10f64.sqrt().min(base.powf(0.5)) - base.powf(0.0)).max(0.0);
        assert!((cm.tau(0, base, j) - expected).abs() < 1e-15);
    }
}
