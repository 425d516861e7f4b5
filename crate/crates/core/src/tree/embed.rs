use serde::{Deserialize, Serialize};

use super::chain::{ChainMetric, ChildRelation};
use super::metric_tree::{MetricTree, TreePoint, TreeRecord};
use crate::cert::{all_hold, Certificate};
use crate::covering::CheckMode;
use crate::error::{Error, Result};
use crate::hierarchy::{build_hierarchy, HierarchicalCovering, HierarchyParams, LevelRange, SetId};
use crate::metric::FiniteMetricSpace;

/// Relative slack on the pairwise bounds.
pub const RELATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeNorm {
    Max,
    L2,
    L1,
}

impl TreeNorm {
    fn combine(self, parts: &[f64]) -> f64 {
        match self {
            TreeNorm::Max => parts.iter().copied().fold(0.0, f64::max),
            TreeNorm::L2 => parts.iter().map(|v| v * v).sum::<f64>().sqrt(),
            TreeNorm::L1 => parts.iter().sum(),
        }
    }

    /// Factor by which the per-coordinate upper constant grows under this norm.
    fn upper_factor(self, coords: usize) -> f64 {
        match self {
            TreeNorm::Max => 1.0,
            TreeNorm::L2 => (coords as f64).sqrt(),
            TreeNorm::L1 => coords as f64,
        }
    }
}

/// Largest exponent for which the chain lower bound holds: `log 2 / log(2 + c)`.
pub fn exponent_guard(c: f64) -> f64 {
    2f64.ln() / (2.0 + c).ln()
}

/// `min(0.99 * guard, 1/2)`.
pub fn default_exponent(c: f64) -> f64 {
    (0.99 * exponent_guard(c)).min(0.5)
}

/// `2c + 2` with `c = 5c' + 4`: the lower constant needs `r > 2c + 1`.
pub fn default_base(c_prime: f64) -> f64 {
    2.0 * (5.0 * c_prime + 4.0) + 2.0
}

/// `1 + (r^p / (r^p - 1)) (1 + r^p)`.
pub fn upper_constant(r: f64, p: f64) -> f64 {
    let rp = r.powf(p);
    1.0 + rp / (rp - 1.0) * (1.0 + rp)
}

/// `c^{-p} r^{-2p} (((r - c)/(c + 1))^p - 1)`.
pub fn lower_constant(r: f64, p: f64, c: f64) -> f64 {
    c.powf(-p) * r.powf(-2.0 * p) * (((r - c) / (c + 1.0)).powf(p) - 1.0)
}

fn check_exponent(p: f64, c: f64) -> Result<()> {
    let guard = exponent_guard(c);
    if !(p > 0.0) || p > guard {
        return Err(Error::Parameter(format!(
            "exponent p = {p} must lie in (0, log 2 / log(2 + c)] = (0, {guard}] for c = {c}"
        )));
    }
    Ok(())
}

fn children_sets(h: &HierarchicalCovering, rel: &ChildRelation, c: SetId) -> Vec<crate::metric::PointSet> {
    rel.children_of(c).iter().map(|&b| h.set(b).clone()).collect()
}

/// One tree of the product: node `i` is the interval of `sets[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorTree {
    pub color: usize,
    pub tree: MetricTree,
    /// Set behind each node; `None` for a virtual root.
    pub sets: Vec<Option<SetId>>,
    pub virtual_root: bool,
    /// Image of every point of `X`.
    pub images: Vec<TreePoint>,
    /// Node of the lowest-level set containing each point.
    pub minimal: Vec<usize>,
}

impl ColorTree {
    pub fn node_of(&self, id: SetId) -> Option<usize> {
        self.sets.iter().position(|s| *s == Some(id))
    }

    pub fn records(&self) -> Vec<TreeRecord> {
        self.tree.records()
    }
}

/// Builds one metric tree per color and the maps `X -> tree`.
pub fn build_trees(space: &FiniteMetricSpace, h: &HierarchicalCovering, p: f64) -> Result<Vec<ColorTree>> {
    check_exponent(p, h.c)?;
    let rel = ChildRelation::of(h)?;
    let n = space.len();
    let mut out = Vec::with_capacity(h.colors);
    for color in 0..h.colors {
        let ids = h.color_sets(color);
        let index_of = |id: SetId| ids.iter().position(|&s| s == id).expect("set of this color");
        let mut lengths = vec![0.0; ids.len()];
        let mut attach: Vec<Option<(usize, f64)>> = vec![None; ids.len()];
        let mut images = vec![TreePoint { node: 0, offset: 0.0 }; n];

        for (node, &c) in ids.iter().enumerate() {
            let set = h.set(c);
            let kids = rel.children_of(c);
            let metric = ChainMetric::new(space, set, &children_sets(h, &rel, c), p)?;
            let tau: Vec<(usize, f64)> = set.iter().map(|x| (x, metric.tau(x, h.base, c.level))).collect();
            lengths[node] = tau.iter().map(|t| t.1).fold(0.0, f64::max);
            let tau_at = |x: usize| tau.iter().find(|t| t.0 == x).expect("point of the set").1;
            for &b in kids {
                let child = h.set(b);
                let rep = tau_at(child.indices()[0]);
                for x in child.iter() {
                    let v = tau_at(x);
                    if (v - rep).abs() > 1e-12 * (1.0 + rep.abs()) {
                        return Err(Error::Invariant(format!(
                            "gluing height is not constant on child {b:?}: {v} vs {rep}"
                        )));
                    }
                }
                attach[index_of(b)] = Some((node, rep));
            }
            for x in set.iter() {
                if rel.minimal[color][x] == c {
                    images[x] = TreePoint { node, offset: tau_at(x) };
                }
            }
        }

        let roots = &rel.roots[color];
        let virtual_root = roots.len() > 1;
        let mut records: Vec<TreeRecord> = (0..ids.len())
            .map(|i| TreeRecord {
                node: i,
                parent: attach[i].map(|a| a.0),
                offset: attach[i].map_or(0.0, |a| a.1),
                length: lengths[i],
            })
            .collect();
        let mut sets: Vec<Option<SetId>> = ids.iter().copied().map(Some).collect();
        if virtual_root {
            let v = ids.len();
            for r in roots {
                records[index_of(*r)].parent = Some(v);
            }
            records.push(TreeRecord { node: v, parent: None, offset: 0.0, length: 0.0 });
            sets.push(None);
        }
        let tree = MetricTree::from_records(&records)
            .map_err(|e| Error::Invariant(format!("assembled tree for color {color} is invalid: {e}")))?;
        let minimal = (0..n).map(|x| index_of(rel.minimal[color][x])).collect();
        out.push(ColorTree { color, tree, sets, virtual_root, images, minimal });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundViolation {
    pub set: SetId,
    pub x: usize,
    pub y: usize,
    pub chain_distance: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub exponent: f64,
    pub pairs_checked: usize,
    /// Smallest `d_{C,p} / bound` over checked pairs with a positive bound.
    pub min_ratio: f64,
    pub violations: Vec<LowerBoundViolation>,
}

/// Checks `d_{C,p}(x, x') >= (c+1)^{-p} (d(x, x') - c r^{j-1})^p` for every
/// set `C` at level `j` and every pair with `d(x, x') >= c r^{j-1}`.
pub fn lower_bound_check(space: &FiniteMetricSpace, h: &HierarchicalCovering, p: f64) -> Result<LowerBoundReport> {
    check_exponent(p, h.c)?;
    let rel = ChildRelation::of(h)?;
    let c = h.c;
    let n = space.len();
    let mut pairs_checked = 0;
    let mut min_ratio = f64::INFINITY;
    let mut violations = Vec::new();
    for color in 0..h.colors {
        for id in h.color_sets(color) {
            let metric = ChainMetric::new(space, h.set(id), &children_sets(h, &rel, id), p)?;
            let gap = c * h.base.powi(id.level - 1);
            for x in 0..n {
                let src = metric.from_source(x);
                for y in (x + 1)..n {
                    let d = space.d(x, y);
                    if d < gap {
                        continue;
                    }
                    pairs_checked += 1;
                    let bound = (c + 1.0).powf(-p) * (d - gap).powf(p);
                    let dc = metric.distance_from(&src, x, y);
                    if bound > 0.0 {
                        min_ratio = min_ratio.min(dc / bound);
                    }
                    if dc < bound * (1.0 - RELATIVE_TOLERANCE) {
                        violations.push(LowerBoundViolation { set: id, x, y, chain_distance: dc, bound });
                    }
                }
            }
        }
    }
    Ok(LowerBoundReport { exponent: p, pairs_checked, min_ratio, violations })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedParams {
    pub c_prime: f64,
    pub base: Option<f64>,
    pub exponent: Option<f64>,
    pub norm: TreeNorm,
    pub order: Option<Vec<usize>>,
    pub check: CheckMode,
}

impl EmbedParams {
    pub fn new(c_prime: f64) -> Self {
        EmbedParams { c_prime, base: None, exponent: None, norm: TreeNorm::Max, order: None, check: CheckMode::Auto }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub x: usize,
    pub y: usize,
    pub distance: f64,
    pub product_distance: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub norm: TreeNorm,
    pub exponent: f64,
    pub base: f64,
    pub c: f64,
    pub trees: usize,
    pub k_up: f64,
    pub k_low: f64,
    pub distortion: f64,
    /// Largest `d_k / d^p` per coordinate.
    pub coordinate_lipschitz: Vec<f64>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub measured_distortion: f64,
    pub virtual_roots: Vec<usize>,
    pub certificates: Vec<Certificate>,
    pub witnesses: Vec<PairWitness>,
}

impl EmbeddingReport {
    pub fn passed(&self) -> bool {
        all_hold(&self.certificates)
    }
}

#[derive(Debug, Clone)]
pub struct Embedding {
    pub hierarchy: HierarchicalCovering,
    pub trees: Vec<ColorTree>,
    pub report: EmbeddingReport,
}

impl Embedding {
    /// Turns a failed certificate into an error.
    pub fn certify(&self) -> Result<()> {
        match self.report.certificates.iter().find(|c| !c.holds) {
            None => Ok(()),
            Some(c) => Err(Error::Certification(format!(
                "{}: measured {} against bound {} (witnesses {:?})",
                c.name, c.measured, c.bound, self.report.witnesses
            ))),
        }
    }
}

/// Hierarchy, trees, and a certified pairwise comparison of `d_prod` with `d^p`.
pub fn embed(space: &FiniteMetricSpace, params: &EmbedParams) -> Result<Embedding> {
    let c_prime = params.c_prime;
    let c = 5.0 * c_prime + 4.0;
    let base = params.base.unwrap_or_else(|| default_base(c_prime));
    if !(base >= 5.0 * c_prime + 6.0) || !(base > 2.0 * c + 1.0) || !base.is_finite() {
        return Err(Error::Parameter(format!(
            "base r = {base} must satisfy r >= 5c'+6 and r > 2c+1 = {} so the lower constant is positive",
            2.0 * c + 1.0
        )));
    }
    let p = params.exponent.unwrap_or_else(|| default_exponent(c));
    check_exponent(p, c)?;

    let hp = HierarchyParams {
        c_prime,
        base,
        levels: LevelRange::Auto,
        order: params.order.clone(),
        max_colors: None,
        check: params.check,
    };
    let hierarchy = build_hierarchy(space, &hp)?;
    let trees = build_trees(space, &hierarchy, p)?;
    let k = trees.len();
    let k_up_coord = upper_constant(base, p);
    let k_up = k_up_coord * params.norm.upper_factor(k);
    let k_low = lower_constant(base, p, c);

    let n = space.len();
    let mut coordinate_lipschitz = vec![0.0f64; k];
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    let mut upper_witness: Option<PairWitness> = None;
    let mut lower_witness: Option<PairWitness> = None;
    let mut parts = vec![0.0; k];
    for x in 0..n {
        for y in (x + 1)..n {
            let dp = space.d(x, y).powf(p);
            for (t, ct) in trees.iter().enumerate() {
                parts[t] = ct.tree.distance_unchecked(&ct.images[x], &ct.images[y]);
                coordinate_lipschitz[t] = coordinate_lipschitz[t].max(parts[t] / dp);
            }
            let prod = params.norm.combine(&parts);
            let ratio = prod / dp;
            let w = PairWitness { x, y, distance: space.d(x, y), product_distance: prod, ratio };
            if ratio < min_ratio {
                min_ratio = ratio;
                lower_witness = Some(w.clone());
            }
            if ratio > max_ratio {
                max_ratio = ratio;
                upper_witness = Some(w);
            }
        }
    }
    if n < 2 {
        min_ratio = k_low;
        max_ratio = 0.0;
    }

    let mut certificates = vec![
        Certificate::at_most("product distance / d^p <= K_up", max_ratio, k_up * (1.0 + RELATIVE_TOLERANCE)),
        Certificate::at_least("product distance / d^p >= K_low", min_ratio, k_low * (1.0 - RELATIVE_TOLERANCE)),
        Certificate::at_most(
            "per-coordinate Lipschitz constant",
            coordinate_lipschitz.iter().copied().fold(0.0, f64::max),
            k_up_coord * (1.0 + RELATIVE_TOLERANCE),
        ),
    ];
    certificates.extend(chain_certificates(space, &hierarchy, &trees, p)?);
    certificates.push(tree_metric_certificate(&trees));

    let mut witnesses = Vec::new();
    if !certificates[0].holds {
        witnesses.extend(upper_witness);
    }
    if !certificates[1].holds {
        witnesses.extend(lower_witness);
    }
    let report = EmbeddingReport {
        norm: params.norm,
        exponent: p,
        base,
        c,
        trees: k,
        k_up,
        k_low,
        distortion: k_up / k_low,
        coordinate_lipschitz,
        min_ratio,
        max_ratio,
        measured_distortion: if min_ratio > 0.0 { max_ratio / min_ratio } else { f64::INFINITY },
        virtual_roots: trees.iter().filter(|t| t.virtual_root).map(|t| t.color).collect(),
        certificates,
        witnesses,
    };
    Ok(Embedding { hierarchy, trees, report })
}

fn point_at_zero(node: usize) -> TreePoint {
    TreePoint { node, offset: 0.0 }
}

/// Displacement along minimal-set chains and the positivity trigger.
fn chain_certificates(
    space: &FiniteMetricSpace,
    h: &HierarchicalCovering,
    trees: &[ColorTree],
    p: f64,
) -> Result<Vec<Certificate>> {
    let rel = ChildRelation::of(h)?;
    let rp = h.base.powf(p);
    let factor = rp / (rp - 1.0);
    let n = space.len();
    let mut worst_disp: f64 = 0.0;
    let mut worst_trigger: f64 = 0.0;
    for ct in trees {
        let color = ct.color;
        for x in 0..n {
            for a in rel.ancestors(rel.minimal[color][x]) {
                let node = ct.node_of(a).expect("set has a node");
                let disp = ct.tree.distance_unchecked(&ct.images[x], &point_at_zero(node));
                let bound = factor * h.base.powf(p * f64::from(a.level));
                worst_disp = worst_disp.max(disp / bound);
            }
        }
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let ax = rel.ancestors(rel.minimal[color][x]);
                let ay = rel.ancestors(rel.minimal[color][y]);
                let Some(pos) = ay.iter().position(|s| ax.contains(s)) else { continue };
                let dp = space.d(x, y).powf(p);
                // Chain below the common set leading to y: ay[pos-1], ..., ay[0].
                for l in (1..pos).rev() {
                    let upper = ay[l];
                    let lower = ay[l - 1];
                    let un = ct.node_of(upper).expect("node");
                    let ln = ct.node_of(lower).expect("node");
                    let gap = ct.tree.distance_unchecked(&point_at_zero(un), &point_at_zero(ln));
                    if gap > 0.0 {
                        let need = h.base.powf(p * f64::from(upper.level - 1));
                        worst_trigger = worst_trigger.max(need / dp);
                    }
                }
            }
        }
    }
    Ok(vec![
        Certificate::at_most("chain displacement / (r^p/(r^p-1)) r^{pj}", worst_disp, 1.0 + RELATIVE_TOLERANCE),
        Certificate::at_most("positive gluing forces r^{p(j-1)} <= d^p", worst_trigger, 1.0 + RELATIVE_TOLERANCE),
    ])
}

fn tree_metric_certificate(trees: &[ColorTree]) -> Certificate {
    let ok = trees.iter().all(|ct| {
        let mut pts = ct.images.clone();
        pts.extend((0..ct.tree.len()).map(point_at_zero));
        pts.truncate(48);
        ct.tree.find_metric_violation(&pts, 1e-9).is_none()
            && (0..ct.tree.len()).all(|v| {
                ct.tree.parent(v).is_none_or(|(p, o)| o >= 0.0 && o <= ct.tree.length(p))
            })
    });
    Certificate::flag("trees are valid metric trees", ok)
}
