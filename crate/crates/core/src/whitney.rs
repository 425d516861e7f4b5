//! Lipschitz extension from a subset `Z` into Euclidean space.
//!
//! The complement of `Z` is cut into layers `R_i = {r^i <= d(x, Z) < r^{i+1}}`,
//! each layer gets a ball covering, and the covering sets grown by `r^i/2`
//! around a separated net carry bump functions. Bumps of neighbouring layers
//! are merged so that every point sees at most `n + 1` of them, and the
//! extension is the bump-weighted average of the values at the retracted
//! anchor points.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cert::{all_hold, Certificate};
use crate::covering::{doubling_cover, measure_multiplicity, CheckMode, CoverFamily};
use crate::error::{Error, Result};
use crate::metric::{identity_order, set_diameter, FiniteMetricSpace, PointSet};

/// A subset `Z` of a finite space and values `f: Z -> R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionProblem {
    pub space: FiniteMetricSpace,
    pub subset: PointSet,
    /// `values[x]` is set exactly for `x` in `subset`.
    pub values: Vec<Option<Vec<f64>>>,
    pub dim: usize,
    /// Lipschitz constant of `f` over pairs of `Z`.
    pub lambda: f64,
}

impl ExtensionProblem {
    pub fn new(space: FiniteMetricSpace, subset: PointSet, values: &BTreeMap<usize, Vec<f64>>) -> Result<Self> {
        let n = space.len();
        if subset.is_empty() {
            return Err(Error::Parameter("the subset Z must be non-empty".into()));
        }
        if let Some(bad) = subset.iter().find(|&z| z >= n) {
            return Err(Error::Parameter(format!("subset index {bad} is not a point of X (n = {n})")));
        }
        let dim = values.values().next().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::Parameter("values must be non-empty vectors".into()));
        }
        let mut table = vec![None; n];
        for (&x, v) in values {
            if !subset.contains(x) {
                return Err(Error::Parameter(format!("value given for {x}, which is not in Z")));
            }
            if v.len() != dim || v.iter().any(|c| !c.is_finite()) {
                return Err(Error::Parameter(format!("value at {x} must be a finite vector of length {dim}")));
            }
            table[x] = Some(v.clone());
        }
        if let Some(missing) = subset.iter().find(|&z| table[z].is_none()) {
            return Err(Error::Parameter(format!("no value given for point {missing} of Z")));
        }
        let mut lambda: f64 = 0.0;
        let zs = subset.indices();
        for (a, &z) in zs.iter().enumerate() {
            for &w in &zs[a + 1..] {
                let gap = euclid(table[z].as_ref().unwrap(), table[w].as_ref().unwrap());
                lambda = lambda.max(gap / space.d(z, w));
            }
        }
        Ok(ExtensionProblem { space, subset, values: table, dim, lambda })
    }

    pub fn value(&self, z: usize) -> &[f64] {
        self.values[z].as_deref().expect("point of Z")
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// The two base conditions, in units of `r^i`:
/// `2(2c+1)/r + 1 <= 2` and `r - 1 >= 1/(2r) + (2c+1) + r/2`.
pub fn base_conditions_hold(r: f64, c: f64) -> bool {
    2.0 * (2.0 * c + 1.0) / r + 1.0 <= 2.0 && r - 1.0 >= 0.5 / r + (2.0 * c + 1.0) + 0.5 * r
}

/// Smallest `r >= 2` satisfying [`base_conditions_hold`].
pub fn minimal_base(c: f64) -> f64 {
    let a = 4.0 * c + 4.0;
    let mut r = (2.0 * (2.0 * c + 1.0)).max((a + (a * a + 4.0).sqrt()) / 2.0).max(2.0);
    while !base_conditions_hold(r, c) {
        r = r.next_up();
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitneyParams {
    /// Defaults to [`minimal_base`].
    pub base: Option<f64>,
    /// Layer covers are `2c r^i`-bounded; ball covers give `c = 2`.
    pub c: f64,
    pub check: CheckMode,
}

impl Default for WhitneyParams {
    fn default() -> Self {
        WhitneyParams { base: None, c: 2.0, check: CheckMode::Auto }
    }
}

/// One layer `R_i` with its covering and grown sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitneyLayer {
    pub i: i32,
    pub points: PointSet,
    pub net: PointSet,
    /// Ball covering `D^i_l` of the layer.
    pub cover: Vec<PointSet>,
    /// `C^i_l`: points off `Z` strictly within `r^i/2` of `D^i_l ∩ N_i`.
    pub grown: Vec<PointSet>,
    pub multiplicity: usize,
}

/// A merged bump `σ^i_k` and the sets it absorbed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedBump {
    pub i: i32,
    pub k: usize,
    pub anchor: usize,
    /// Indices `j` of the layer `i - 1` sets merged in.
    pub absorbed: Vec<usize>,
    pub support: PointSet,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitneyStructure {
    pub base: f64,
    pub c: f64,
    /// Multiplicity bound `n + 1` measured on the layer covers.
    pub n_plus_one: usize,
    /// Layer index of each point, `None` on `Z`.
    pub layer_of: Vec<Option<i32>>,
    pub layers: Vec<WhitneyLayer>,
    pub net: PointSet,
    /// Nearest point of `Z` (lowest index on ties) for every point.
    pub retraction: Vec<usize>,
    pub bumps: Vec<MergedBump>,
    /// Points at distance exactly `r^i/2` from a net part, left out of `C^i_l`.
    pub boundary_ties: usize,
    pub certificates: Vec<Certificate>,
}

impl WhitneyStructure {
    pub fn passed(&self) -> bool {
        all_hold(&self.certificates)
    }

    fn layer(&self, i: i32) -> Option<&WhitneyLayer> {
        self.layers.iter().find(|l| l.i == i)
    }

    pub fn bump_total(&self, x: usize) -> f64 {
        self.bumps.iter().map(|b| b.values[x]).sum()
    }
}

fn floor_log(base: f64, x: f64) -> i32 {
    let mut q = (x.ln() / base.ln()).floor() as i32;
    while base.powi(q + 1) <= x {
        q += 1;
    }
    while base.powi(q) > x {
        q -= 1;
    }
    q
}

pub fn build_structure(problem: &ExtensionProblem, params: &WhitneyParams) -> Result<WhitneyStructure> {
    let space = &problem.space;
    let n = space.len();
    let c = params.c;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Parameter(format!("covering constant c must be positive, got {c}")));
    }
    let r = match params.base {
        None => minimal_base(c),
        Some(r) => {
            if !(r >= 2.0 && base_conditions_hold(r, c)) || !r.is_finite() {
                return Err(Error::Parameter(format!(
                    "base r = {r} violates the layer conditions for c = {c}; minimal feasible r is {}",
                    minimal_base(c)
                )));
            }
            r
        }
    };
    let z = &problem.subset;

    let mut retraction = vec![0; n];
    let mut dz = vec![0.0; n];
    for x in 0..n {
        let (best, d) = z
            .iter()
            .map(|w| (w, space.d(x, w)))
            .fold((usize::MAX, f64::INFINITY), |acc, e| if e.1 < acc.1 { e } else { acc });
        retraction[x] = best;
        dz[x] = d;
    }
    let layer_of: Vec<Option<i32>> = (0..n)
        .map(|x| if z.contains(x) { None } else { Some(floor_log(r, dz[x])) })
        .collect();

    // Net: admit x unless some admitted x' in an adjacent layer is closer than r^{min}/4.
    let mut net_pts: Vec<usize> = Vec::new();
    for x in 0..n {
        let Some(q) = layer_of[x] else { continue };
        let ok = net_pts.iter().all(|&y| {
            let qy = layer_of[y].expect("net avoids Z");
            (q - qy).abs() > 1 || space.d(x, y) >= r.powi(q.min(qy)) / 4.0
        });
        if ok {
            net_pts.push(x);
        }
    }
    let net = PointSet::new(net_pts);

    let mut by_layer: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        if let Some(q) = layer_of[x] {
            by_layer.entry(q).or_default().push(x);
        }
    }

    let mut layers = Vec::new();
    let mut boundary_ties = 0;
    let mut n_plus_one = 1;
    let mut certificates = Vec::new();
    let mut worst_cover_ratio: f64 = 0.0;
    let mut worst_grown_ratio: f64 = 0.0;
    for (&i, pts) in &by_layer {
        let ri = r.powi(i);
        let points = PointSet::new(pts.clone());
        let (sub, map) = space.subspace(&points)?;
        let dc = doubling_cover(&sub, 2.0 * ri, &identity_order(sub.len()))?;
        let lifted = dc.cover.lift(&map);
        let diam = lifted.max_diameter(space);
        worst_cover_ratio = worst_cover_ratio.max(diam / (2.0 * c * ri));
        if diam > 2.0 * c * ri {
            return Err(Error::Parameter(format!(
                "layer {i} ball cover has diameter {diam} > 2c r^i = {}; raise c",
                2.0 * c * ri
            )));
        }
        let cover = CoverFamily::new(lifted.members.clone(), 2.0 * ri, 2.0 * c * ri);
        let multiplicity = measure_multiplicity(space, &cover, 2.0 * ri, params.check)?.value;
        n_plus_one = n_plus_one.max(multiplicity);

        let layer_net: Vec<usize> = net.iter().filter(|&x| layer_of[x] == Some(i)).collect();
        let mut grown = Vec::with_capacity(cover.len());
        for d in &cover.members {
            let core: Vec<usize> = d.iter().filter(|x| layer_net.contains(x)).collect();
            let mut set = Vec::new();
            for x in (0..n).filter(|&x| layer_of[x].is_some()) {
                let dist = core.iter().map(|&y| space.d(x, y)).fold(f64::INFINITY, f64::min);
                if dist < ri / 2.0 {
                    set.push(x);
                } else if dist == ri / 2.0 {
                    boundary_ties += 1;
                }
            }
            let set = PointSet::new(set);
            worst_grown_ratio = worst_grown_ratio.max(set_diameter(space, &set) / ((2.0 * c + 1.0) * ri));
            grown.push(set);
        }
        layers.push(WhitneyLayer {
            i,
            points,
            net: PointSet::new(layer_net),
            cover: cover.members,
            grown,
            multiplicity,
        });
    }
    certificates.push(Certificate::at_most("layer cover diameter / 2c r^i", worst_cover_ratio, 1.0));
    certificates.push(Certificate::at_most("grown set diameter / (2c+1) r^i", worst_grown_ratio, 1.0));

    let mut structure = WhitneyStructure {
        base: r,
        c,
        n_plus_one,
        layer_of,
        layers,
        net,
        retraction,
        bumps: Vec::new(),
        boundary_ties,
        certificates,
    };
    structure.bumps = merge_bumps(space, &structure)?;
    let audit = audit_structure(space, &structure);
    structure.certificates.extend(audit);
    Ok(structure)
}

fn tau(space: &FiniteMetricSpace, s: &WhitneyStructure, layer: &WhitneyLayer, l: usize, x: usize) -> f64 {
    if s.layer_of[x].is_none() {
        return 0.0;
    }
    let ri = s.base.powi(layer.i);
    let dist = layer.cover[l]
        .iter()
        .filter(|&y| layer.net.contains(y))
        .map(|y| space.d(x, y))
        .fold(f64::INFINITY, f64::min);
    (2.0 - 4.0 / ri * dist).max(0.0)
}

fn merge_bumps(space: &FiniteMetricSpace, s: &WhitneyStructure) -> Result<Vec<MergedBump>> {
    let n = space.len();
    let Some(lo) = s.layers.first().map(|l| l.i) else { return Ok(Vec::new()) };
    let hi = s.layers.last().map(|l| l.i).expect("non-empty");
    let empty: Vec<PointSet> = Vec::new();
    let grown = |i: i32| s.layer(i).map_or(&empty, |l| &l.grown);

    // No set of layer i may touch both layer i-1 and layer i+1.
    for i in lo..=hi {
        for (k, ck) in grown(i).iter().enumerate() {
            let below = grown(i - 1).iter().position(|cj| cj.intersects(ck));
            let above = grown(i + 1).iter().position(|cl| cl.intersects(ck));
            if let (Some(j), Some(l)) = (below, above) {
                return Err(Error::Construction(format!(
                    "grown sets ({}, {j}), ({i}, {k}), ({}, {l}) form a chain across three layers",
                    i - 1,
                    i + 1
                )));
            }
        }
    }

    let kept = |i: i32| -> Vec<usize> {
        grown(i)
            .iter()
            .enumerate()
            .filter(|(_, ck)| !ck.is_empty() && grown(i + 1).iter().all(|cl| !cl.intersects(ck)))
            .map(|(k, _)| k)
            .collect()
    };

    let mut bumps = Vec::new();
    for i in lo..=(hi + 1) {
        let keep = kept(i);
        let keep_below = kept(i - 1);
        let mut absorbed: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (j, cj) in grown(i - 1).iter().enumerate() {
            if cj.is_empty() || keep_below.contains(&j) {
                continue;
            }
            let kj = grown(i)
                .iter()
                .position(|ck| ck.intersects(cj))
                .ok_or_else(|| Error::Invariant(format!("set ({}, {j}) meets no set of layer {i}", i - 1)))?;
            if !keep.contains(&kj) {
                return Err(Error::Construction(format!(
                    "set ({}, {j}) was assigned to ({i}, {kj}), which is not kept",
                    i - 1
                )));
            }
            absorbed.entry(kj).or_default().push(j);
        }
        let Some(layer) = s.layer(i) else { continue };
        let below = s.layer(i - 1);
        for &k in &keep {
            let absorbed_here = absorbed.remove(&k).unwrap_or_default();
            let mut values = vec![0.0; n];
            for (x, v) in values.iter_mut().enumerate() {
                let mut best = tau(space, s, layer, k, x);
                for &j in &absorbed_here {
                    best = best.max(tau(space, s, below.expect("absorbed from an existing layer"), j, x));
                }
                *v = best;
            }
            let anchor = layer.cover[k]
                .iter()
                .find(|&y| layer.net.contains(y))
                .ok_or_else(|| Error::Invariant(format!("kept set ({i}, {k}) has no net point")))?;
            let support = PointSet::new((0..n).filter(|&x| values[x] > 0.0).collect());
            bumps.push(MergedBump { i, k, anchor, absorbed: absorbed_here, support, values });
        }
    }
    Ok(bumps)
}

fn audit_structure(space: &FiniteMetricSpace, s: &WhitneyStructure) -> Vec<Certificate> {
    let n = space.len();
    let r = s.base;
    let off: Vec<usize> = (0..n).filter(|&x| s.layer_of[x].is_some()).collect();

    let min_total = off.iter().map(|&x| s.bump_total(x)).fold(f64::INFINITY, f64::min);
    let max_support = off
        .iter()
        .map(|&x| s.bumps.iter().filter(|b| b.values[x] > 0.0).count())
        .max()
        .unwrap_or(0);

    let mut net_ok = true;
    let mut disp_ok = true;
    for x in s.net.iter() {
        let q = s.layer_of[x].expect("net avoids Z");
        if space.d(x, s.retraction[x]) > r.powi(q + 1) {
            disp_ok = false;
        }
        for y in s.net.iter().filter(|&y| y > x) {
            let qy = s.layer_of[y].expect("net avoids Z");
            if (q - qy).abs() <= 1 && space.d(x, y) < r.powi(q.min(qy)) / 4.0 {
                net_ok = false;
            }
        }
    }

    let domain: Vec<usize> = (0..n).filter(|&x| s.layer_of[x].is_none() || s.net.contains(x)).collect();
    let mut lip_rho: f64 = 0.0;
    for (a, &x) in domain.iter().enumerate() {
        for &y in &domain[a + 1..] {
            lip_rho = lip_rho.max(space.d(s.retraction[x], s.retraction[y]) / space.d(x, y));
        }
    }

    let mut bump_lip: f64 = 0.0;
    let mut anchor_ratio: f64 = 0.0;
    for b in &s.bumps {
        let bound = 4.0 * r.powi(-(b.i - 1));
        for (a, &x) in off.iter().enumerate() {
            for &y in &off[a + 1..] {
                bump_lip = bump_lip.max((b.values[x] - b.values[y]).abs() / space.d(x, y) / bound);
            }
        }
        for x in b.support.iter() {
            let q = s.layer_of[x].expect("support avoids Z");
            let limit = (4.0 * s.c + 2.0) * r.powi(q + 1);
            anchor_ratio = anchor_ratio.max(space.d(x, b.anchor) / limit);
        }
    }

    let partition_ok = off.iter().all(|&x| {
        let q = s.layer_of[x].unwrap();
        let dzx = space.d(x, s.retraction[x]);
        r.powi(q) <= dzx && dzx < r.powi(q + 1)
    });

    vec![
        Certificate::flag("layers partition the complement of Z", partition_ok),
        Certificate::flag("net separation across adjacent layers", net_ok),
        Certificate::flag("retraction displacement d(x, rho(x)) <= r^{i+1}", disp_ok),
        Certificate::at_least("bump sum floor", if off.is_empty() { 1.0 } else { min_total }, 1.0),
        Certificate::at_most("merged bump multiplicity", max_support as f64, s.n_plus_one as f64),
        Certificate::at_most("Lip(rho)", lip_rho, 1.0 + 4.0 * r + 4.0 * r * r),
        Certificate::at_most("bump Lipschitz / 4 r^{-(i-1)}", bump_lip, 1.0 + 1e-12),
        Certificate::at_most("anchor distance / (4c+2) r^{q+1}", anchor_ratio, 1.0),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionResult {
    pub values: Vec<Vec<f64>>,
    pub measured_lip: f64,
    pub lambda: f64,
    /// `measured_lip / lambda`; 1 when both vanish.
    pub bound_constant: f64,
}

/// Barycentric extension `f̄(x) = Σ (σ^i_k(x)/σ̄(x)) f(ρ(x^i_k))` off `Z`.
pub fn extend(problem: &ExtensionProblem, structure: &WhitneyStructure) -> Result<ExtensionResult> {
    let space = &problem.space;
    let n = space.len();
    let mut values = Vec::with_capacity(n);
    for x in 0..n {
        if problem.subset.contains(x) {
            values.push(problem.value(x).to_vec());
            continue;
        }
        let total = structure.bump_total(x);
        if !(total >= 1.0) {
            return Err(Error::Invariant(format!("bump sum {total} < 1 at point {x}")));
        }
        let mut terms = structure.bumps.iter().filter(|b| b.values[x] > 0.0);
        let first = terms.next().expect("positive total has a term");
        let base = problem.value(structure.retraction[first.anchor]);
        let mut v = base.to_vec();
        for b in std::iter::once(first).chain(terms) {
            let w = b.values[x] / total;
            let y = problem.value(structure.retraction[b.anchor]);
            for (out, (yi, bi)) in v.iter_mut().zip(y.iter().zip(base)) {
                *out += w * (yi - bi);
            }
        }
        values.push(v);
    }
    let mut measured_lip: f64 = 0.0;
    for x in 0..n {
        for y in (x + 1)..n {
            measured_lip = measured_lip.max(euclid(&values[x], &values[y]) / space.d(x, y));
        }
    }
    let bound_constant = if problem.lambda > 0.0 {
        measured_lip / problem.lambda
    } else if measured_lip == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    Ok(ExtensionResult { values, measured_lip, lambda: problem.lambda, bound_constant })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionCertificate {
    /// First point of `Z` where the extension differs from `f`.
    pub restriction_mismatch: Option<usize>,
    /// Largest `|f̄(x) - f(z)| / (λ d(x, z))` over `z` in `Z`, `x` off `Z`.
    pub max_ratio: f64,
    /// `C3 = 2 (C2 + (4c+2) r + 1) r` with `C2 = sqrt(n+1) (8c+4) Lip(rho)`.
    pub c3: f64,
    pub certificates: Vec<Certificate>,
}

impl ExtensionCertificate {
    pub fn passed(&self) -> bool {
        self.restriction_mismatch.is_none() && all_hold(&self.certificates)
    }
}

pub fn certify_extension(
    problem: &ExtensionProblem,
    structure: &WhitneyStructure,
    result: &ExtensionResult,
) -> ExtensionCertificate {
    let space = &problem.space;
    let n = space.len();
    let restriction_mismatch = problem.subset.iter().find(|&z| result.values[z] != problem.value(z));
    let lip_rho = structure
        .certificates
        .iter()
        .find(|c| c.name == "Lip(rho)")
        .map_or(1.0, |c| c.measured.max(1.0));
    let r = structure.base;
    let c2 = (structure.n_plus_one as f64).sqrt() * (8.0 * structure.c + 4.0) * lip_rho;
    let c3 = 2.0 * (c2 + (4.0 * structure.c + 2.0) * r + 1.0) * r;
    let mut max_ratio: f64 = 0.0;
    for z in problem.subset.iter() {
        for x in (0..n).filter(|&x| !problem.subset.contains(x)) {
            let gap = euclid(&result.values[x], problem.value(z));
            let ratio = if problem.lambda > 0.0 {
                gap / (problem.lambda * space.d(x, z))
            } else if gap == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            max_ratio = max_ratio.max(ratio);
        }
    }
    let certificates = vec![
        Certificate::flag("extension restricts to f on Z", restriction_mismatch.is_none()),
        Certificate::at_most("Z to complement ratio / C3", max_ratio, c3),
        Certificate::at_most("measured Lip(extension) is finite", result.measured_lip, f64::MAX),
    ];
    ExtensionCertificate { restriction_mismatch, max_ratio, c3, certificates }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collinear(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(xs.len(), |i, j| (xs[i] - xs[j]).abs()).unwrap()
    }

    fn problem(xs: &[f64], z: &[usize], f: &[(usize, Vec<f64>)]) -> ExtensionProblem {
        let values: BTreeMap<usize, Vec<f64>> = f.iter().cloned().collect();
        ExtensionProblem::new(collinear(xs), PointSet::new(z.to_vec()), &values).unwrap()
    }

    #[test]
    fn minimal_base_satisfies_both_conditions() {
        let r = minimal_base(2.0);
        assert!(base_conditions_hold(r, 2.0));
        assert!(!base_conditions_hold(r.next_down(), 2.0));
        assert!((r - (12.0 + 148f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn full_subset_gives_empty_structure() {
        let p = problem(&[0.0, 1.0], &[0, 1], &[(0, vec![0.0]), (1, vec![3.0])]);
        let s = build_structure(&p, &WhitneyParams::default()).unwrap();
        assert!(s.layers.is_empty() && s.bumps.is_empty());
        let e = extend(&p, &s).unwrap();
        assert_eq!(e.values, vec![vec![0.0], vec![3.0]]);
        assert_eq!(e.measured_lip, p.lambda);
        assert_eq!(e.bound_constant, 1.0);
    }

    #[test]
    fn single_point_subset_gives_constant() {
        let p = problem(&[0.0, 1.0, 5.0], &[1], &[(1, vec![2.5, -1.0])]);
        let s = build_structure(&p, &WhitneyParams::default()).unwrap();
        let e = extend(&p, &s).unwrap();
        assert!(e.values.iter().all(|v| v == &vec![2.5, -1.0]));
        assert_eq!(e.measured_lip, 0.0);
        assert_eq!(e.bound_constant, 1.0);
    }

    #[test]
    fn three_collinear_points() {
        let p = problem(&[0.0, 1.0, 2.0], &[0, 2], &[(0, vec![0.0]), (2, vec![2.0])]);
        let s = build_structure(&p, &WhitneyParams::default()).unwrap();
        assert_eq!(s.layer_of[1], Some(0));
        assert!(s.net.contains(1));
        assert_eq!(s.retraction[1], 0);
        assert!(s.passed(), "{:?}", s.certificates);
        let e = extend(&p, &s).unwrap();
        let v = e.values[1][0];
        assert!((0.0..=2.0).contains(&v));
        assert!((v - 0.0).abs() <= e.bound_constant * p.lambda * 1.0 + 1e-12);
        assert!((v - 2.0).abs() <= e.bound_constant * p.lambda * 1.0 + 1e-12);
        assert!(certify_extension(&p, &s, &e).passed());
    }

    #[test]
    fn base_below_minimum_is_rejected() {
        let p = problem(&[0.0, 1.0, 2.0], &[0], &[(0, vec![0.0])]);
        let params = WhitneyParams { base: Some(10.0), ..WhitneyParams::default() };
        assert!(matches!(build_structure(&p, &params), Err(Error::Parameter(_))));
    }

    #[test]
    fn bad_subset_is_a_parameter_error() {
        let values: BTreeMap<usize, Vec<f64>> = [(7, vec![1.0])].into_iter().collect();
        let err = ExtensionProblem::new(collinear(&[0.0, 1.0]), PointSet::new(vec![7]), &values).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
    }
}
