//! Covering families and their `s`-multiplicity.
//!
//! The exact checker maximizes, over all sets of diameter at most `s`, the
//! number of members met. On a finite space those sets are the cliques of
//! the graph `{d <= s}`, so the search runs over cliques with a
//! branch-and-bound on the member hit count. The ball checker is the cheap
//! surrogate sandwiched between `exact(s)` and `exact(2s)`.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{
    check_order, maximal_separated_net, set_diameter, set_distance_unchecked, FiniteMetricSpace, PointSet,
};

/// Point budget above which the exact multiplicity search refuses to run.
pub const DEFAULT_EXACT_BUDGET: usize = 64;

/// A scale-tagged, optionally colored family of point sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverFamily {
    pub members: Vec<PointSet>,
    /// Scale `s` the family was built for.
    pub scale: f64,
    /// Declared diameter bound `D`.
    pub bound: f64,
    /// Optional color per member.
    pub colors: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiplicityMethod {
    Exact,
    Ball,
}

/// Which checker to use; `Auto` picks exact up to the point budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exact,
    Ball,
    Auto,
}

/// A measured multiplicity together with a witness set achieving it.
///
/// For the ball method the value is an upper bound on the exact
/// `s`-multiplicity, so `value <= n + 1` still certifies the exact bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub value: usize,
    pub witness: Vec<usize>,
    pub method: MultiplicityMethod,
}

impl CoverFamily {
    pub fn new(members: Vec<PointSet>, scale: f64, bound: f64) -> Self {
        CoverFamily { members, scale, bound, colors: None }
    }

    pub fn with_colors(mut self, colors: Vec<usize>) -> Result<Self> {
        if colors.len() != self.members.len() {
            return Err(Error::Structural(format!(
                "{} colors for {} members",
                colors.len(),
                self.members.len()
            )));
        }
        self.colors = Some(colors);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn num_colors(&self) -> usize {
        match &self.colors {
            Some(c) => c.iter().max().map_or(0, |m| m + 1),
            None => usize::from(!self.members.is_empty()),
        }
    }

    /// Sub-family of the members with color `k`.
    pub fn color_class(&self, k: usize) -> CoverFamily {
        let members = match &self.colors {
            Some(colors) => self
                .members
                .iter()
                .zip(colors)
                .filter(|(_, &c)| c == k)
                .map(|(m, _)| m.clone())
                .collect(),
            None if k == 0 => self.members.clone(),
            None => Vec::new(),
        };
        CoverFamily::new(members, self.scale, self.bound)
    }

    pub fn union(&self) -> PointSet {
        PointSet::new(self.members.iter().flat_map(|m| m.iter()).collect())
    }

    pub fn covers(&self, domain: &PointSet) -> bool {
        domain.is_subset(&self.union())
    }

    pub fn max_diameter(&self, space: &FiniteMetricSpace) -> f64 {
        self.members
            .iter()
            .map(|m| set_diameter(space, m))
            .fold(0.0, f64::max)
    }

    /// Re-index every member through `map` (subspace index -> ambient index).
    pub fn lift(&self, map: &[usize]) -> CoverFamily {
        CoverFamily {
            members: self.members.iter().map(|m| m.lift(map)).collect(),
            scale: self.scale,
            bound: self.bound,
            colors: self.colors.clone(),
        }
    }
}

fn incidence(cover: &CoverFamily, domain: &[usize], n: usize) -> Vec<FixedBitSet> {
    let mut pos = vec![usize::MAX; n];
    for (k, &x) in domain.iter().enumerate() {
        pos[x] = k;
    }
    let mut hits = vec![FixedBitSet::with_capacity(cover.len()); domain.len()];
    for (m, member) in cover.members.iter().enumerate() {
        for x in member.iter() {
            if pos[x] != usize::MAX {
                hits[pos[x]].insert(m);
            }
        }
    }
    hits
}

/// Exact `s`-multiplicity with the default point budget.
pub fn s_multiplicity_exact(space: &FiniteMetricSpace, cover: &CoverFamily, s: f64) -> Result<Multiplicity> {
    s_multiplicity_exact_with_budget(space, cover, s, DEFAULT_EXACT_BUDGET)
}

/// Maximum number of members met by a set of diameter `<= s` (closed condition).
///
/// Only points lying in some member matter: dropping the others from a test
/// set keeps its diameter bound and its hit count. The budget applies to
/// that domain.
pub fn s_multiplicity_exact_with_budget(
    space: &FiniteMetricSpace,
    cover: &CoverFamily,
    s: f64,
    budget: usize,
) -> Result<Multiplicity> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::Parameter(format!("multiplicity scale must be >= 0, got {s}")));
    }
    let domain = cover.union().into_indices();
    if domain.len() > budget {
        return Err(Error::Capacity { points: domain.len(), budget });
    }
    let m = domain.len();
    if m == 0 {
        return Ok(Multiplicity { value: 0, witness: Vec::new(), method: MultiplicityMethod::Exact });
    }
    let hits = incidence(cover, &domain, space.len());
    let mut adj = vec![FixedBitSet::with_capacity(m); m];
    for a in 0..m {
        for b in (a + 1)..m {
            if space.d(domain[a], domain[b]) <= s {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
    }
    let mut search = CliqueSearch { adj: &adj, hits: &hits, best: 0, best_clique: Vec::new() };
    let mut all = FixedBitSet::with_capacity(m);
    all.insert_range(..);
    let mut r = Vec::new();
    search.expand(&mut r, &FixedBitSet::with_capacity(cover.len()), all, FixedBitSet::with_capacity(m));
    let witness = search.best_clique.iter().map(|&k| domain[k]).collect();
    Ok(Multiplicity { value: search.best, witness, method: MultiplicityMethod::Exact })
}

struct CliqueSearch<'a> {
    adj: &'a [FixedBitSet],
    hits: &'a [FixedBitSet],
    best: usize,
    best_clique: Vec<usize>,
}

impl CliqueSearch<'_> {
    // Bron-Kerbosch with pivoting; prunes when even absorbing every
    // candidate cannot beat the incumbent.
    fn expand(&mut self, r: &mut Vec<usize>, r_hits: &FixedBitSet, mut p: FixedBitSet, mut x: FixedBitSet) {
        let current = r_hits.count_ones(..);
        if current > self.best {
            self.best = current;
            self.best_clique = r.clone();
        }
        if p.is_clear() {
            return;
        }
        let mut reach = r_hits.clone();
        for v in p.ones() {
            reach.union_with(&self.hits[v]);
        }
        if reach.count_ones(..) <= self.best {
            return;
        }
        let pivot = p
            .ones()
            .chain(x.ones())
            .max_by_key(|&u| p.intersection(&self.adj[u]).count())
            .expect("p is non-empty");
        let mut candidates = p.clone();
        candidates.difference_with(&self.adj[pivot]);
        for v in candidates.ones().collect::<Vec<_>>() {
            let mut np = p.clone();
            np.intersect_with(&self.adj[v]);
            let mut nx = x.clone();
            nx.intersect_with(&self.adj[v]);
            let mut nh = r_hits.clone();
            nh.union_with(&self.hits[v]);
            r.push(v);
            self.expand(r, &nh, np, nx);
            r.pop();
            p.set(v, false);
            x.insert(v);
        }
    }
}

/// Maximum over centers `x` of the number of members meeting the closed ball `B(x, s)`.
pub fn s_multiplicity_ball(space: &FiniteMetricSpace, cover: &CoverFamily, s: f64) -> Multiplicity {
    let mut best = 0;
    let mut witness = Vec::new();
    for x in 0..space.len() {
        let ball = space.closed_ball(x, s);
        let count = cover.members.iter().filter(|m| m.intersects(&ball)).count();
        if count > best {
            best = count;
            witness = vec![x];
        }
    }
    Multiplicity { value: best, witness, method: MultiplicityMethod::Ball }
}

/// Dispatches on `mode`; `Auto` uses the exact search when the domain fits the budget.
pub fn measure_multiplicity(
    space: &FiniteMetricSpace,
    cover: &CoverFamily,
    s: f64,
    mode: CheckMode,
) -> Result<Multiplicity> {
    match mode {
        CheckMode::Exact => s_multiplicity_exact(space, cover, s),
        CheckMode::Ball => Ok(s_multiplicity_ball(space, cover, s)),
        CheckMode::Auto => match s_multiplicity_exact(space, cover, s) {
            Err(Error::Capacity { .. }) => Ok(s_multiplicity_ball(space, cover, s)),
            other => other,
        },
    }
}

/// Colored ball covering from a maximal `s`-separated net.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingCover {
    pub cover: CoverFamily,
    /// Net centers in admission order; member `i` is `B(net[i], s)`.
    pub net: Vec<usize>,
    pub colors_used: usize,
}

/// Closed balls `B(z, s)` around a greedy net, greedily colored so that
/// centers with `0 < d(z, z') <= 3s` differ in color.
///
/// Two centers of one color are more than `3s` apart, so no set of
/// diameter `<= s` can meet both balls: each color class has
/// `s`-multiplicity at most one.
pub fn doubling_cover(space: &FiniteMetricSpace, s: f64, order: &[usize]) -> Result<DoublingCover> {
    check_order(order, space.len())?;
    let net = maximal_separated_net(space, s, order)?;
    let mut colors: Vec<usize> = Vec::with_capacity(net.len());
    for (a, &z) in net.iter().enumerate() {
        let mut taken = FixedBitSet::with_capacity(net.len() + 1);
        for (b, &w) in net[..a].iter().enumerate() {
            let dz = space.d(z, w);
            if dz > 0.0 && dz <= 3.0 * s {
                taken.insert(colors[b]);
            }
        }
        let color = (0..).find(|&c| c >= taken.len() || !taken.contains(c)).expect("unbounded range");
        colors.push(color);
    }
    let members = net.iter().map(|&z| space.closed_ball(z, s)).collect();
    let colors_used = colors.iter().max().map_or(0, |m| m + 1);
    let cover = CoverFamily::new(members, s, 2.0 * s).with_colors(colors)?;
    Ok(DoublingCover { cover, net, colors_used })
}

/// Optimal single-color covering at scale `s`: the connected components of
/// the graph `{d <= s}`.
///
/// Any covering with `s`-multiplicity one has disjoint members, and two
/// points at distance `<= s` must share a member, so every such covering
/// is a coarsening of the components. The components therefore minimize
/// the largest member diameter.
pub fn single_color_cover(space: &FiniteMetricSpace, s: f64) -> Result<CoverFamily> {
    if !(s > 0.0) {
        return Err(Error::Parameter(format!("scale must be positive, got {s}")));
    }
    let n = space.len();
    let mut comp = vec![usize::MAX; n];
    let mut members = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = members.len();
        let mut stack = vec![start];
        comp[start] = id;
        let mut pts = Vec::new();
        while let Some(x) = stack.pop() {
            pts.push(x);
            for y in 0..n {
                if comp[y] == usize::MAX && space.d(x, y) <= s {
                    comp[y] = id;
                    stack.push(y);
                }
            }
        }
        members.push(PointSet::new(pts));
    }
    let mut cover = CoverFamily::new(members, s, 0.0);
    cover.bound = cover.max_diameter(space);
    let k = cover.len();
    cover.with_colors(vec![0; k])
}

/// Product-grid covering `A_i x B_j` of a product space built by
/// [`crate::metric::product`]; color `(a, b)` becomes `a * colors_b + b`.
pub fn product_cover(cover_a: &CoverFamily, cover_b: &CoverFamily, nb: usize) -> Result<CoverFamily> {
    let kb = cover_b.num_colors().max(1);
    let mut members = Vec::new();
    let mut colors = Vec::new();
    for (i, ma) in cover_a.members.iter().enumerate() {
        let ca = cover_a.colors.as_ref().map_or(0, |c| c[i]);
        for (j, mb) in cover_b.members.iter().enumerate() {
            let cb = cover_b.colors.as_ref().map_or(0, |c| c[j]);
            members.push(PointSet::new(
                ma.iter().flat_map(|a| mb.iter().map(move |b| a * nb + b)).collect(),
            ));
            colors.push(ca * kb + cb);
        }
    }
    CoverFamily::new(members, cover_a.scale.min(cover_b.scale), cover_a.bound.max(cover_b.bound))
        .with_colors(colors)
}

/// Bookkeeping for one absorbed member of the second covering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeLink {
    /// Index into the second covering (the `D_k`).
    pub k: usize,
    /// Index into the first covering it joins (the `C_j`).
    pub j: usize,
    pub y: usize,
    pub z: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeResult {
    pub cover: CoverFamily,
    /// Members of the second covering kept on their own.
    pub untouched: Vec<usize>,
    pub links: Vec<MergeLink>,
    pub bound: f64,
    pub measured_diameter: f64,
    pub multiplicity: Multiplicity,
}

/// Merges a covering of `Y` and a covering of `Z` into one covering of `Y ∪ Z`.
///
/// `cover_z` must be `cs`-bounded with `s`-multiplicity `<= n + 1`;
/// `cover_y` must be `c(3+2c)s`-bounded with `(3+2c)s`-multiplicity `<= n + 1`.
/// Each member of `cover_z` within `s` of `Y` is absorbed into the first
/// member of `cover_y` it touches; the rest are kept. The output is
/// re-certified: diameter `<= c(3+2c)s + 2(1+c)s` and `s`-multiplicity `<= n + 1`.
pub fn merge_union_coverings(
    space: &FiniteMetricSpace,
    cover_y: &CoverFamily,
    cover_z: &CoverFamily,
    s: f64,
    c: f64,
    n: usize,
    mode: CheckMode,
) -> Result<MergeResult> {
    if !(s > 0.0 && c > 0.0) {
        return Err(Error::Parameter(format!("need s > 0 and c > 0, got s = {s}, c = {c}")));
    }
    let wide = (3.0 + 2.0 * c) * s;
    let bound = c * wide + 2.0 * (1.0 + c) * s;

    // Preconditions.
    for (k, d) in cover_z.members.iter().enumerate() {
        let diam = set_diameter(space, d);
        if diam > c * s {
            return Err(Error::Contract(format!(
                "member {k} of the Z-covering has diameter {diam} > cs = {}",
                c * s
            )));
        }
    }
    let mz = measure_multiplicity(space, cover_z, s, mode)?;
    if mz.value > n + 1 {
        return Err(Error::Contract(format!(
            "Z-covering has s-multiplicity {} > n+1 = {} (witness {:?})",
            mz.value,
            n + 1,
            mz.witness
        )));
    }
    for (j, cm) in cover_y.members.iter().enumerate() {
        let diam = set_diameter(space, cm);
        if diam > c * wide {
            return Err(Error::Contract(format!(
                "member {j} of the Y-covering has diameter {diam} > c(3+2c)s = {}",
                c * wide
            )));
        }
    }
    let my = measure_multiplicity(space, cover_y, wide, mode)?;
    if my.value > n + 1 {
        return Err(Error::Contract(format!(
            "Y-covering has (3+2c)s-multiplicity {} > n+1 = {} (witness {:?})",
            my.value,
            n + 1,
            my.witness
        )));
    }

    let mut members: Vec<PointSet> = cover_y.members.clone();
    let mut untouched = Vec::new();
    let mut links = Vec::new();
    for (k, d) in cover_z.members.iter().enumerate() {
        let link = cover_y.members.iter().enumerate().find_map(|(j, cm)| {
            cm.iter().find_map(|y| {
                d.iter().find(|&z| space.d(y, z) <= s).map(|z| MergeLink { k, j, y, z })
            })
        });
        match link {
            Some(link) => {
                members[link.j] = members[link.j].union(d);
                links.push(link);
            }
            None => untouched.push(k),
        }
    }
    members.extend(untouched.iter().map(|&k| cover_z.members[k].clone()));

    let cover = CoverFamily::new(members, s, bound);
    let measured_diameter = cover.max_diameter(space);
    if measured_diameter > bound {
        return Err(Error::Construction(format!(
            "merged covering has diameter {measured_diameter} > {bound}"
        )));
    }
    let multiplicity = measure_multiplicity(space, &cover, s, mode)?;
    if multiplicity.value > n + 1 {
        return Err(Error::Construction(format!(
            "merged covering has s-multiplicity {} > {} (witness {:?})",
            multiplicity.value,
            n + 1,
            multiplicity.witness
        )));
    }
    Ok(MergeResult { cover, untouched, links, bound, measured_diameter, multiplicity })
}

/// One scale of an empirical covering profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub scale: f64,
    /// Fewest colors any tried order needed.
    pub colors: usize,
    /// Index of the order achieving `colors`.
    pub best_order: usize,
    /// `D / s` of the ball cover, i.e. 2.
    pub bound_c: f64,
    /// Largest member diameter divided by `s`.
    pub measured_c: f64,
    /// Smallest `c` achievable by a single-color covering at this scale.
    pub single_color_c: f64,
    pub within_budget: bool,
}

/// Runs [`doubling_cover`] at each scale and keeps the fewest colors over `orders`.
///
/// This only records feasible `(colors, c)` pairs; it is an upper-bound
/// certificate, not a computation of the dimension.
pub fn estimate_nagata_profile(
    space: &FiniteMetricSpace,
    scales: &[f64],
    max_colors: usize,
    orders: &[Vec<usize>],
) -> Result<Vec<ProfileRecord>> {
    let default_order = [crate::metric::identity_order(space.len())];
    let orders: &[Vec<usize>] = if orders.is_empty() { &default_order } else { orders };
    let mut out = Vec::with_capacity(scales.len());
    for &s in scales {
        if !(s > 0.0) {
            return Err(Error::Parameter(format!("profile scales must be positive, got {s}")));
        }
        let mut best: Option<(usize, usize, f64)> = None;
        for (o, order) in orders.iter().enumerate() {
            let dc = doubling_cover(space, s, order)?;
            let measured = dc.cover.max_diameter(space) / s;
            if best.is_none_or(|(c, _, _)| dc.colors_used < c) {
                best = Some((dc.colors_used, o, measured));
            }
        }
        let (colors, best_order, measured_c) = best.expect("at least one order");
        let single = single_color_cover(space, s)?;
        out.push(ProfileRecord {
            scale: s,
            colors,
            best_order,
            bound_c: 2.0,
            measured_c,
            single_color_c: single.max_diameter(space) / s,
            within_budget: colors <= max_colors,
        });
    }
    Ok(out)
}

/// Convenience: largest member diameter and whether every member stays within `bound`.
pub fn bounded_by(space: &FiniteMetricSpace, cover: &CoverFamily, bound: f64) -> (f64, bool) {
    let diam = cover.max_diameter(space);
    (diam, diam <= bound)
}

/// Smallest distance between members of two families; `+inf` if either is empty.
pub fn family_distance(space: &FiniteMetricSpace, a: &CoverFamily, b: &CoverFamily) -> f64 {
    let mut best = f64::INFINITY;
    for x in &a.members {
        for y in &b.members {
            best = best.min(set_distance_unchecked(space, x, y));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::identity_order;

    fn collinear(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(xs.len(), |i, j| (xs[i] - xs[j]).abs()).unwrap()
    }

    fn fam(sets: &[&[usize]], s: f64) -> CoverFamily {
        CoverFamily::new(sets.iter().map(|m| PointSet::new(m.to_vec())).collect(), s, 0.0)
    }

    #[test]
    fn exact_multiplicity_examples() {
        let line = collinear(&[0.0, 1.0, 2.0]);
        let cover = fam(&[&[0, 1], &[1, 2], &[2]], 1.0);
        let m = s_multiplicity_exact(&line, &cover, 1.0).unwrap();
        assert_eq!(m.value, 3);
        assert_eq!(m.witness, vec![1, 2]);

        let disjoint = fam(&[&[0], &[2]], 1.0);
        assert_eq!(s_multiplicity_exact(&line, &disjoint, 1.5).unwrap().value, 1);
        let whole = fam(&[&[0, 1, 2]], 1.0);
        assert_eq!(s_multiplicity_exact(&line, &whole, 100.0).unwrap().value, 1);
    }

    #[test]
    fn exact_refuses_over_budget() {
        let big = collinear(&(0..70).map(f64::from).collect::<Vec<_>>());
        let cover = CoverFamily::new(vec![PointSet::full(70)], 1.0, 69.0);
        assert_eq!(
            s_multiplicity_exact(&big, &cover, 1.0).unwrap_err(),
            Error::Capacity { points: 70, budget: 64 }
        );
        let auto = measure_multiplicity(&big, &cover, 1.0, CheckMode::Auto).unwrap();
        assert_eq!(auto.method, MultiplicityMethod::Ball);
    }

    #[test]
    fn ball_multiplicity_examples() {
        let line = collinear(&[0.0, 1.0, 2.0]);
        let cover = fam(&[&[0, 1], &[1, 2], &[2]], 1.0);
        assert_eq!(s_multiplicity_ball(&line, &cover, 1.0).value, 3);
        let singletons = fam(&[&[0], &[1], &[2]], 0.4);
        assert_eq!(s_multiplicity_ball(&line, &singletons, 0.4).value, 1);
        let whole = fam(&[&[0, 1, 2]], 1.0);
        assert_eq!(s_multiplicity_ball(&line, &whole, 5.0).value, 1);
    }

    #[test]
    fn doubling_cover_single_point() {
        let one = FiniteMetricSpace::from_matrix(vec![vec![0.0]]).unwrap();
        let dc = doubling_cover(&one, 1.0, &[0]).unwrap();
        assert_eq!(dc.cover.members, vec![PointSet::singleton(0)]);
        assert_eq!(dc.colors_used, 1);
    }

    #[test]
    fn doubling_cover_collinear_five() {
        let line = collinear(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let dc = doubling_cover(&line, 1.0, &identity_order(5)).unwrap();
        assert_eq!(dc.net, vec![0, 2, 4]);
        assert_eq!(dc.cover.colors, Some(vec![0, 1, 0]));
        assert_eq!(dc.colors_used, 2);
        assert_eq!(dc.cover.bound, 2.0);
        for k in 0..2 {
            let class = dc.cover.color_class(k);
            assert!(s_multiplicity_exact(&line, &class, 1.0).unwrap().value <= 1);
        }
    }

    #[test]
    fn doubling_cover_uniform_metric() {
        let uniform = FiniteMetricSpace::from_fn(6, |_, _| 1.0).unwrap();
        let dc = doubling_cover(&uniform, 1.0, &identity_order(6)).unwrap();
        assert_eq!(dc.net, vec![0]);
        assert_eq!(dc.cover.members, vec![PointSet::full(6)]);
        assert_eq!(dc.colors_used, 1);
    }

    #[test]
    fn single_color_cover_is_components() {
        let line = collinear(&[0.0, 1.0, 5.0, 5.5]);
        let cover = single_color_cover(&line, 1.0).unwrap();
        assert_eq!(cover.members, vec![PointSet::new(vec![0, 1]), PointSet::new(vec![2, 3])]);
        assert_eq!(s_multiplicity_exact(&line, &cover, 1.0).unwrap().value, 1);
    }

    #[test]
    fn merge_with_empty_second_cover_is_identity() {
        let line = collinear(&[0.0, 1.0, 2.0, 3.0]);
        let y = fam(&[&[0, 1], &[2, 3]], 1.0);
        let z = fam(&[], 1.0);
        let merged = merge_union_coverings(&line, &y, &z, 0.5, 2.0, 1, CheckMode::Exact).unwrap();
        assert_eq!(merged.cover.members, y.members);
    }

    #[test]
    fn merge_far_apart_keeps_both() {
        let line = collinear(&[0.0, 1.0, 10.0, 11.0]);
        let y = fam(&[&[0, 1]], 1.0);
        let z = fam(&[&[2, 3]], 1.0);
        let merged = merge_union_coverings(&line, &y, &z, 1.0, 1.0, 0, CheckMode::Exact).unwrap();
        assert_eq!(merged.untouched, vec![0]);
        assert_eq!(merged.cover.members.len(), 2);
        assert_eq!(merged.multiplicity.value, 1);
    }

    #[test]
    fn merge_rejects_bad_precondition() {
        let line = collinear(&[0.0, 1.0, 2.0]);
        let y = fam(&[&[0]], 1.0);
        let z = fam(&[&[1, 2], &[2]], 1.0);
        let err = merge_union_coverings(&line, &y, &z, 1.0, 1.0, 0, CheckMode::Exact).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn profile_uniform_metric() {
        let uniform = FiniteMetricSpace::from_fn(5, |_, _| 1.0).unwrap();
        let prof = estimate_nagata_profile(&uniform, &[1.0, 2.0, 4.0], 1, &[]).unwrap();
        for rec in prof {
            assert_eq!(rec.colors, 1);
            assert!(rec.measured_c <= 2.0);
        }
    }

    #[test]
    fn profile_keeps_best_order() {
        let line = collinear(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let orders = vec![identity_order(5), vec![1, 3, 0, 2, 4]];
        let prof = estimate_nagata_profile(&line, &[1.0], 4, &orders).unwrap();
        let a = doubling_cover(&line, 1.0, &orders[0]).unwrap().colors_used;
        let b = doubling_cover(&line, 1.0, &orders[1]).unwrap().colors_used;
        assert_eq!(prof[0].colors, a.min(b));
    }
}
