//! Covering transfer along a 1-Lipschitz map `f: X -> Y` with a sliding map
//! `h`, and its instance on finite samples of metric trees.
//!
//! Each member `C_j` of a covering of `Y` pulls back to `X^j = f^{-1}(C_j)`.
//! Points of `X^j` are moved to a common fiber `f^{-1}(y_j)` and slid for
//! time `t = μ(2λc+1)s`; points landing on the same spot form one class.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::cert::{all_hold, Certificate};
use crate::covering::{measure_multiplicity, CheckMode, CoverFamily, Multiplicity};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, PointSet};
use crate::tree::{MetricTree, TreePoint};

/// The map `f: X -> Y` (as point indices) with the transfer constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionData<'a> {
    pub x: &'a FiniteMetricSpace,
    pub y: &'a FiniteMetricSpace,
    pub f_map: Vec<usize>,
    pub lambda: f64,
    pub mu: f64,
}

impl<'a> ReductionData<'a> {
    pub fn new(x: &'a FiniteMetricSpace, y: &'a FiniteMetricSpace, f_map: Vec<usize>, lambda: f64, mu: f64) -> Result<Self> {
        if f_map.len() != x.len() {
            return Err(Error::Parameter(format!("f has {} values for {} points", f_map.len(), x.len())));
        }
        if let Some(bad) = f_map.iter().find(|&&v| v >= y.len()) {
            return Err(Error::Parameter(format!("f maps to {bad}, outside Y")));
        }
        if !(lambda > 0.0 && lambda.is_finite() && mu > 0.0 && mu.is_finite()) {
            return Err(Error::Parameter(format!("lambda = {lambda} and mu = {mu} must be positive")));
        }
        for a in 0..x.len() {
            for b in (a + 1)..x.len() {
                if y.d(f_map[a], f_map[b]) > x.d(a, b) {
                    return Err(Error::Contract(format!("f is not 1-Lipschitz on the pair ({a}, {b})")));
                }
            }
        }
        Ok(ReductionData { x, y, f_map, lambda, mu })
    }

    /// `c̃ = 2(λc + μ(2λc+1))`.
    pub fn diameter_constant(&self, c: f64) -> f64 {
        2.0 * (self.lambda * c + self.mu * (2.0 * self.lambda * c + 1.0))
    }

    /// Sliding time `t = μ(2λc+1)s`.
    pub fn slide_time(&self, s: f64, c: f64) -> f64 {
        self.mu * (2.0 * self.lambda * c + 1.0) * s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferResult {
    pub cover: CoverFamily,
    /// Member of the `Y` covering each class came from.
    pub source: Vec<usize>,
    /// Chosen fiber anchor `y_j` per `Y` member; `None` for empty preimages.
    pub anchors: Vec<Option<usize>>,
    pub slide_time: f64,
    pub c_tilde: f64,
    pub measured_diameter: f64,
    pub multiplicity: Multiplicity,
    pub input_multiplicity: usize,
    pub certificates: Vec<Certificate>,
}

/// Pulls a `cs`-bounded covering of `Y` back to `X`.
///
/// `h(x, t)` returns a comparable key for the slid position of `x`. The
/// anchor `y_j` minimises the largest distance from `X^j` to the fiber over
/// it; `π^j(x)` is the nearest fiber point (lowest index on ties). The output
/// is re-certified and any failure is a construction error.
pub fn transfer_covering<K: Ord>(
    data: &ReductionData<'_>,
    h: impl Fn(usize, f64) -> K,
    cover_y: &CoverFamily,
    s: f64,
    c: f64,
    check: CheckMode,
) -> Result<TransferResult> {
    if !(s > 0.0 && s.is_finite() && c > 0.0 && c.is_finite()) {
        return Err(Error::Parameter(format!("need s > 0 and c > 0, got s = {s}, c = {c}")));
    }
    let (x, y) = (data.x, data.y);
    if !cover_y.covers(&PointSet::new(data.f_map.clone())) {
        return Err(Error::Contract("the Y covering misses part of f(X)".into()));
    }
    let y_diam = cover_y.max_diameter(y);
    if y_diam > c * s {
        return Err(Error::Contract(format!("Y covering has diameter {y_diam} > cs = {}", c * s)));
    }
    let input_multiplicity = measure_multiplicity(y, cover_y, s, check)?.value;
    let t = data.slide_time(s, c);
    let reach = data.lambda * c * s;

    let mut members = Vec::new();
    let mut source = Vec::new();
    let mut anchors = Vec::with_capacity(cover_y.len());
    for (j, cj) in cover_y.members.iter().enumerate() {
        let pre: Vec<usize> = (0..x.len()).filter(|&p| cj.contains(data.f_map[p])).collect();
        if pre.is_empty() {
            anchors.push(None);
            continue;
        }
        let mut best: Option<(f64, usize, Vec<usize>)> = None;
        for yj in cj.iter() {
            let fiber: Vec<usize> = (0..x.len()).filter(|&p| data.f_map[p] == yj).collect();
            if fiber.is_empty() {
                continue;
            }
            let mut worst: f64 = 0.0;
            let mut pi = Vec::with_capacity(pre.len());
            for &p in &pre {
                let (q, d) = fiber
                    .iter()
                    .map(|&q| (q, x.d(p, q)))
                    .fold((usize::MAX, f64::INFINITY), |acc, e| if e.1 < acc.1 { e } else { acc });
                worst = worst.max(d);
                pi.push(q);
            }
            if best.as_ref().is_none_or(|b| worst < b.0) {
                best = Some((worst, yj, pi));
            }
        }
        let Some((_, yj, pi)) = best.filter(|b| b.0 <= reach) else {
            return Err(Error::Contract(format!(
                "member {j}: no fiber point within λcs = {reach} of every preimage point"
            )));
        };
        anchors.push(Some(yj));
        let mut classes: BTreeMap<K, Vec<usize>> = BTreeMap::new();
        for (&p, &q) in pre.iter().zip(&pi) {
            classes.entry(h(q, t)).or_default().push(p);
        }
        for class in classes.into_values() {
            members.push(PointSet::new(class));
            source.push(j);
        }
    }

    let c_tilde = data.diameter_constant(c);
    let cover = CoverFamily::new(members, s, c_tilde * s);
    let (measured_diameter, multiplicity, certificates) = certify_output(x, &cover, s, c_tilde, input_multiplicity, check)?;
    if !all_hold(&certificates) {
        return Err(Error::Construction(format!("transferred covering failed its bounds: {certificates:?}")));
    }
    Ok(TransferResult {
        cover,
        source,
        anchors,
        slide_time: t,
        c_tilde,
        measured_diameter,
        multiplicity,
        input_multiplicity,
        certificates,
    })
}

fn certify_output(
    x: &FiniteMetricSpace,
    cover: &CoverFamily,
    s: f64,
    c_tilde: f64,
    n_plus_one: usize,
    check: CheckMode,
) -> Result<(f64, Multiplicity, Vec<Certificate>)> {
    let diameter = cover.max_diameter(x);
    let multiplicity = measure_multiplicity(x, cover, s, check)?;
    let certs = vec![
        Certificate::flag("covers X", cover.covers(&PointSet::full(x.len()))),
        Certificate::at_most("diameter <= c~ s", diameter, c_tilde * s),
        Certificate::at_most("s-multiplicity", multiplicity.value as f64, n_plus_one as f64),
    ];
    Ok((diameter, multiplicity, certs))
}

/// A tree point made canonical: offset 0 on a non-root node is its
/// attachment point on the parent.
fn canonical(tree: &MetricTree, p: TreePoint) -> (usize, u64) {
    let (mut node, mut offset) = (p.node, p.offset);
    while offset == 0.0 {
        match tree.parent(node) {
            Some((q, o)) => {
                node = q;
                offset = o;
            }
            None => break,
        }
    }
    (node, (offset + 0.0).to_bits())
}

/// The tree cut at every sample point, branch point and the root, rooted
/// at the root point with heights computed once.
struct Skeleton {
    height: Vec<f64>,
    up: Vec<Option<usize>>,
}

impl Skeleton {
    fn build(tree: &MetricTree, marks: &[TreePoint], root: TreePoint) -> (Self, Vec<usize>, usize) {
        let mut ids: HashMap<(usize, u64), usize> = HashMap::new();
        let mut on_node: Vec<Vec<(f64, usize)>> = vec![Vec::new(); tree.len()];
        let mut vertex = |p: TreePoint, on_node: &mut Vec<Vec<(f64, usize)>>| -> usize {
            let key = canonical(tree, p);
            let next = ids.len();
            let id = *ids.entry(key).or_insert(next);
            if id == next {
                on_node[key.0].push((f64::from_bits(key.1), id));
            }
            id
        };
        let mark_ids: Vec<usize> = marks.iter().map(|&p| vertex(p, &mut on_node)).collect();
        let root_id = vertex(root, &mut on_node);
        for v in 0..tree.len() {
            vertex(TreePoint { node: v, offset: 0.0 }, &mut on_node);
            vertex(TreePoint { node: v, offset: tree.length(v) }, &mut on_node);
        }
        let m = ids.len();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        for v in 0..tree.len() {
            let mut list = on_node[v].clone();
            if tree.parent(v).is_some() {
                let start = ids[&canonical(tree, TreePoint { node: v, offset: 0.0 })];
                list.push((0.0, start));
            }
            list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            list.dedup_by_key(|e| e.1);
            for w in list.windows(2) {
                let len = w[1].0 - w[0].0;
                adj[w[0].1].push((w[1].1, len));
                adj[w[1].1].push((w[0].1, len));
            }
        }
        let mut height = vec![f64::NAN; m];
        let mut up = vec![None; m];
        height[root_id] = 0.0;
        let mut stack = vec![root_id];
        while let Some(u) = stack.pop() {
            for &(w, len) in &adj[u] {
                if height[w].is_nan() {
                    height[w] = height[u] + len;
                    up[w] = Some(u);
                    stack.push(w);
                }
            }
        }
        (Skeleton { height, up }, mark_ids, root_id)
    }

    /// Key of the point at height `target` on the path from `v` to the root:
    /// the lower end of its skeleton edge and the height, or `None` at the root.
    fn key_at(&self, mut v: usize, target: f64) -> Option<(usize, u64)> {
        if target <= 0.0 {
            return None;
        }
        while let Some(u) = self.up[v] {
            if self.height[u] < target {
                break;
            }
            v = u;
        }
        Some((v, target.to_bits()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeReduction {
    pub cover: CoverFamily,
    /// Interval index `k` of `[k cs, (k+1) cs)` each class came from.
    pub interval: Vec<usize>,
    pub heights: Vec<f64>,
    pub slide_time: f64,
    pub c_tilde: f64,
    pub measured_diameter: f64,
    pub multiplicity: Multiplicity,
    /// Same-height pairs checked for `h(x, t) = h(x', t)` at `t` just above `μ d(x, x')`.
    pub slide_pairs_checked: usize,
    pub slide_failures: Vec<(usize, usize)>,
    pub certificates: Vec<Certificate>,
}

impl TreeReduction {
    pub fn passed(&self) -> bool {
        all_hold(&self.certificates)
    }
}

/// Metric among sample points, `tree` path lengths.
pub fn sample_space(tree: &MetricTree, sample: &[TreePoint]) -> Result<FiniteMetricSpace> {
    if sample.is_empty() {
        return Err(Error::Parameter("empty sample".into()));
    }
    for p in sample {
        tree.check_point(p)?;
    }
    let space = FiniteMetricSpace::from_fn(sample.len(), |i, j| tree.distance_unchecked(&sample[i], &sample[j]))?;
    for i in 0..sample.len() {
        for j in (i + 1)..sample.len() {
            if !(space.d(i, j) > 0.0) {
                return Err(Error::Parameter(format!("sample points {i} and {j} coincide")));
            }
        }
    }
    Ok(space)
}

/// Covering of a tree sample with `s`-multiplicity at most 2 and diameter
/// at most `(4c+1)s`, from heights over `root` cut into intervals of length `cs`.
pub fn tree_reduction(
    tree: &MetricTree,
    sample: &[TreePoint],
    root: TreePoint,
    s: f64,
    c: f64,
    check: CheckMode,
) -> Result<TreeReduction> {
    tree.check_point(&root)
        .map_err(|_| Error::Parameter(format!("root {root:?} is not on the tree")))?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Parameter(format!("scale s = {s} must be positive")));
    }
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::Parameter(format!("c = {c} must be at least 1 so intervals are s-disjoint")));
    }
    let space = sample_space(tree, sample)?;
    let (skeleton, ids, _) = Skeleton::build(tree, sample, root);
    let heights: Vec<f64> = ids.iter().map(|&v| skeleton.height[v]).collect();
    let (lambda, mu) = (1.0, 0.5);
    let t = mu * (2.0 * lambda * c + 1.0) * s;
    let c_tilde = 2.0 * (lambda * c + mu * (2.0 * lambda * c + 1.0));
    let width = c * s;

    // (interval, slid position as (node, offset bits)); None is the root.
    type ClassKey = (usize, Option<(usize, u64)>);
    let mut groups: BTreeMap<ClassKey, Vec<usize>> = BTreeMap::new();
    for (x, &hx) in heights.iter().enumerate() {
        let k = (hx / width).floor() as usize;
        let target = (k as f64 * width - t).max(0.0);
        groups.entry((k, skeleton.key_at(ids[x], target))).or_default().push(x);
    }
    let interval = groups.keys().map(|g| g.0).collect();
    let members = groups.into_values().map(PointSet::new).collect();
    let cover = CoverFamily::new(members, s, c_tilde * s);

    let mut slide_pairs_checked = 0;
    let mut slide_failures = Vec::new();
    for a in 0..sample.len() {
        for b in (a + 1)..sample.len() {
            if heights[a] != heights[b] {
                continue;
            }
            slide_pairs_checked += 1;
            let tt = mu * space.d(a, b) * (1.0 + 1e-9);
            let target = heights[a] - tt;
            if skeleton.key_at(ids[a], target) != skeleton.key_at(ids[b], target) {
                slide_failures.push((a, b));
            }
        }
    }

    let (measured_diameter, multiplicity, mut certificates) = certify_output(&space, &cover, s, c_tilde, 2, check)?;
    certificates.push(Certificate::flag("slides agree on same-height pairs", slide_failures.is_empty()));
    Ok(TreeReduction {
        cover,
        interval,
        heights,
        slide_time: t,
        c_tilde,
        measured_diameter,
        multiplicity,
        slide_pairs_checked,
        slide_failures,
        certificates,
    })
}
