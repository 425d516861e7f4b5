use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Export form of one interval: `node` is glued at its `0` end to `offset`
/// on `parent`'s interval `[0, parent.length]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub node: usize,
    pub parent: Option<usize>,
    pub offset: f64,
    pub length: f64,
}

/// A location on a tree: `offset` along the interval of `node`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreePoint {
    pub node: usize,
    pub offset: f64,
}

/// A connected tree of glued intervals with its path metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTree {
    length: Vec<f64>,
    parent: Vec<Option<(usize, f64)>>,
    depth: Vec<usize>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl MetricTree {
    /// Validates and assembles a tree from records listing each node `0..n` once.
    pub fn from_records(records: &[TreeRecord]) -> Result<Self> {
        let n = records.len();
        if n == 0 {
            return Err(Error::Structural("tree has no nodes".into()));
        }
        let mut length = vec![f64::NAN; n];
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        for rec in records {
            if rec.node >= n || seen[rec.node] {
                return Err(Error::Structural(format!(
                    "node ids must be 0..{n}, each once; got {}",
                    rec.node
                )));
            }
            seen[rec.node] = true;
            if !(rec.length.is_finite() && rec.length >= 0.0) {
                return Err(Error::Structural(format!("node {} has invalid length {}", rec.node, rec.length)));
            }
            length[rec.node] = rec.length;
        }
        for rec in records {
            match rec.parent {
                Some(p) => {
                    if p >= n {
                        return Err(Error::Structural(format!("node {} has unknown parent {p}", rec.node)));
                    }
                    if !(rec.offset.is_finite() && rec.offset >= 0.0 && rec.offset <= length[p]) {
                        return Err(Error::Structural(format!(
                            "node {} attached at {} outside [0, {}] of node {p}",
                            rec.node, rec.offset, length[p]
                        )));
                    }
                    parent[rec.node] = Some((p, rec.offset));
                }
                None => {
                    if rec.offset != 0.0 {
                        return Err(Error::Structural(format!("root node {} must have offset 0", rec.node)));
                    }
                }
            }
        }
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::Structural(format!("tree must have exactly one root, found {}", roots.len())));
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some((p, _)) = p {
                children[*p].push(v);
            }
        }
        let mut depth = vec![usize::MAX; n];
        depth[roots[0]] = 0;
        let mut stack = vec![roots[0]];
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                depth[c] = depth[v] + 1;
                stack.push(c);
            }
        }
        if let Some(v) = depth.iter().position(|&d| d == usize::MAX) {
            return Err(Error::Structural(format!("node {v} lies on a parent cycle")));
        }
        Ok(MetricTree { length, parent, depth, children, root: roots[0] })
    }

    pub fn records(&self) -> Vec<TreeRecord> {
        (0..self.len())
            .map(|v| TreeRecord {
                node: v,
                parent: self.parent[v].map(|(p, _)| p),
                offset: self.parent[v].map_or(0.0, |(_, o)| o),
                length: self.length[v],
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.length.len()
    }

    pub fn is_empty(&self) -> bool {
        self.length.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn length(&self, node: usize) -> f64 {
        self.length[node]
    }

    /// Parent node and the offset on it where `node` is glued.
    pub fn parent(&self, node: usize) -> Option<(usize, f64)> {
        self.parent[node]
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn depth(&self, node: usize) -> usize {
        self.depth[node]
    }

    pub fn contains(&self, p: &TreePoint) -> bool {
        p.node < self.len() && p.offset.is_finite() && p.offset >= 0.0 && p.offset <= self.length[p.node]
    }

    pub fn check_point(&self, p: &TreePoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Parameter(format!("tree point {p:?} is not on the tree")))
        }
    }

    /// Path distance; both points must lie on the tree.
    pub fn distance(&self, a: &TreePoint, b: &TreePoint) -> Result<f64> {
        self.check_point(a)?;
        self.check_point(b)?;
        Ok(self.distance_unchecked(a, b))
    }

    /// Climbs the deeper point until both sit on one interval.
    pub fn distance_unchecked(&self, a: &TreePoint, b: &TreePoint) -> f64 {
        let (mut na, mut oa) = (a.node, a.offset);
        let (mut nb, mut ob) = (b.node, b.offset);
        let mut up_a = 0.0;
        let mut up_b = 0.0;
        while na != nb {
            if self.depth[na] >= self.depth[nb] {
                let (p, o) = self.parent[na].expect("non-root while climbing");
                up_a += oa;
                na = p;
                oa = o;
            } else {
                let (p, o) = self.parent[nb].expect("non-root while climbing");
                up_b += ob;
                nb = p;
                ob = o;
            }
        }
        up_a + (oa - ob).abs() + up_b
    }

    /// Looks for a triangle-inequality or symmetry failure among `points`.
    pub fn find_metric_violation(&self, points: &[TreePoint], tol: f64) -> Option<(usize, usize, usize)> {
        let m = points.len();
        let mut d = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                d[i * m + j] = self.distance_unchecked(&points[i], &points[j]);
            }
        }
        for i in 0..m {
            for j in 0..m {
                if (d[i * m + j] - d[j * m + i]).abs() > tol {
                    return Some((i, j, j));
                }
                for k in 0..m {
                    if d[i * m + k] > d[i * m + j] + d[j * m + k] + tol {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}
