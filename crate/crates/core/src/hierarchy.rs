//! Hierarchical colored coverings: one colored covering per level `j`,
//! with member diameters `<= c r^j`, ball containment at radius `r^j`,
//! a full-space member in every color, and the nested-or-far property
//! across levels.
//!
//! Construction: ball covers at radius `5 r^j`, inflation by `r^j`, then
//! closure of every set under chains of nearby lower-level sets of the
//! same color.

use serde::{Deserialize, Serialize};

use crate::covering::{doubling_cover, measure_multiplicity, CheckMode, MultiplicityMethod};
use crate::error::{Error, Result};
use crate::metric::{identity_order, set_diameter, set_distance_unchecked, FiniteMetricSpace, PointSet};

/// Identifies a set of a hierarchy by level, color and position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SetId {
    pub level: i32,
    pub color: usize,
    pub index: usize,
}

/// Members of one level, split by color.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub j: i32,
    pub families: Vec<Vec<PointSet>>,
}

/// `upper ≻ lower`: same color, lower level, within `3 r^i` after inflation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEdge {
    pub upper: SetId,
    pub lower: SetId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalCovering {
    pub base: f64,
    pub c_prime: f64,
    /// Diameter constant the families are checked against, `5c' + 4`.
    pub c: f64,
    /// Largest `diam / r^j` actually attained.
    pub measured_c: f64,
    pub colors: usize,
    pub basepoint: usize,
    pub n_points: usize,
    pub levels: Vec<Level>,
    pub chains: Vec<ChainEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum LevelRange {
    Auto,
    Explicit { min: i32, max: i32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyParams {
    pub c_prime: f64,
    pub base: f64,
    pub levels: LevelRange,
    /// Net order for the per-level ball covers; index order when absent.
    pub order: Option<Vec<usize>>,
    pub max_colors: Option<usize>,
    pub check: CheckMode,
}

impl HierarchyParams {
    /// `c' = 2` (the ball-cover constant) and the smallest admissible base.
    pub fn new(c_prime: f64) -> Self {
        HierarchyParams {
            c_prime,
            base: min_base(c_prime),
            levels: LevelRange::Auto,
            order: None,
            max_colors: None,
            check: CheckMode::Auto,
        }
    }

    pub fn with_base(mut self, base: f64) -> Self {
        self.base = base;
        self
    }
}

/// Smallest base the closure argument allows: `5c' + 6`.
pub fn min_base(c_prime: f64) -> f64 {
    5.0 * c_prime + 6.0
}

impl HierarchicalCovering {
    pub fn scale(&self, j: i32) -> f64 {
        self.base.powi(j)
    }

    pub fn j_min(&self) -> i32 {
        self.levels.first().map_or(0, |l| l.j)
    }

    pub fn j_max(&self) -> i32 {
        self.levels.last().map_or(0, |l| l.j)
    }

    pub fn level(&self, j: i32) -> Option<&Level> {
        let k = j.checked_sub(self.j_min())?;
        self.levels.get(usize::try_from(k).ok()?)
    }

    pub fn set(&self, id: SetId) -> &PointSet {
        &self.level(id.level).expect("level in range").families[id.color][id.index]
    }

    /// Every set of one color, ordered by level then index.
    pub fn color_sets(&self, color: usize) -> Vec<SetId> {
        let mut out = Vec::new();
        for level in &self.levels {
            if let Some(fam) = level.families.get(color) {
                out.extend((0..fam.len()).map(|index| SetId { level: level.j, color, index }));
            }
        }
        out
    }
}

fn floor_log(base: f64, x: f64) -> i32 {
    let mut j = (x.ln() / base.ln()).floor() as i32;
    while base.powi(j + 1) <= x {
        j += 1;
    }
    while base.powi(j) > x {
        j -= 1;
    }
    j
}

fn ceil_log(base: f64, x: f64) -> i32 {
    let mut j = (x.ln() / base.ln()).ceil() as i32;
    while base.powi(j - 1) >= x {
        j -= 1;
    }
    while base.powi(j) < x {
        j += 1;
    }
    j
}

/// Builds and certifies a hierarchical covering.
///
/// Automatic levels run from one below `floor(log_r(min distance))` up to
/// `K - 1` levels past the first `j` with `r^j >= diam X`, where `K` is the
/// number of colors; at those top levels the only member is `X`, and the
/// color permutation below hands `X` to every color once.
pub fn build_hierarchy(space: &FiniteMetricSpace, params: &HierarchyParams) -> Result<HierarchicalCovering> {
    let HierarchyParams { c_prime, base, .. } = *params;
    if !(c_prime > 0.0 && c_prime.is_finite()) {
        return Err(Error::Parameter(format!("c' must be positive, got {c_prime}")));
    }
    if !(base >= min_base(c_prime)) || !base.is_finite() {
        return Err(Error::Parameter(format!(
            "base r = {base} is below 5c'+6 = {}",
            min_base(c_prime)
        )));
    }
    let n = space.len();
    let order = match &params.order {
        Some(o) => o.clone(),
        None => identity_order(n),
    };
    crate::metric::check_order(&order, n)?;
    let basepoint = order[0];

    // Raw colored ball covers at radius 5 r^j.
    let mut raw: Vec<(i32, Vec<PointSet>, Vec<usize>)> = Vec::new();
    let mut colors = 1usize;
    let cover_level = |j: i32| -> Result<(Vec<PointSet>, Vec<usize>)> {
        let rj = base.powi(j);
        let dc = doubling_cover(space, 5.0 * rj, &order)?;
        let diam = dc.cover.max_diameter(space);
        if diam > 5.0 * c_prime * rj {
            return Err(Error::Parameter(format!(
                "ball cover at level {j} has diameter {diam} > 5c' r^j = {}; raise c'",
                5.0 * c_prime * rj
            )));
        }
        let cols = dc.cover.colors.clone().expect("ball covers are colored");
        Ok((dc.cover.members, cols))
    };
    let (j_min, j_max) = match params.levels {
        LevelRange::Explicit { min, max } => {
            if min > max {
                return Err(Error::Parameter(format!("empty level range {min}:{max}")));
            }
            (min, max)
        }
        LevelRange::Auto => match space.min_positive_distance() {
            None => (0, 0),
            Some(dmin) => {
                let j_min = floor_log(base, dmin) - 1;
                let j_top = ceil_log(base, space.diameter());
                (j_min, j_top)
            }
        },
    };
    for j in j_min..=j_max {
        let (members, cols) = cover_level(j)?;
        colors = colors.max(cols.iter().max().map_or(0, |m| m + 1));
        raw.push((j, members, cols));
    }
    if params.levels == LevelRange::Auto && n > 1 {
        for j in (j_max + 1)..(j_max + colors as i32) {
            let (members, cols) = cover_level(j)?;
            raw.push((j, members, cols));
        }
    }
    if let Some(limit) = params.max_colors {
        if colors > limit {
            return Err(Error::Parameter(format!("ball covers need {colors} colors, budget is {limit}")));
        }
    }

    // Basepoint normalization, then inflation by r^j.
    let mut inflated = Vec::with_capacity(raw.len());
    for (j, members, cols) in raw {
        let rj = base.powi(j);
        let shift = j.rem_euclid(colors as i32) as usize;
        let mut families = vec![Vec::new(); colors];
        for (m, c) in members.into_iter().zip(cols) {
            let c = if c == 0 {
                shift
            } else if c == shift {
                0
            } else {
                c
            };
            families[c].push(space.closed_neighborhood(&m, rj));
        }
        inflated.push(Level { j, families });
    }

    let chains = chain_relation(space, base, &inflated);
    let levels = apply_closure(&inflated, &chains);

    let bound = 5.0 * c_prime + 4.0;
    let mut measured_c: f64 = 0.0;
    for level in &levels {
        let rj = base.powi(level.j);
        for fam in &level.families {
            for m in fam {
                measured_c = measured_c.max(set_diameter(space, m) / rj);
            }
        }
    }
    let h = HierarchicalCovering {
        base,
        c_prime,
        c: bound,
        measured_c,
        colors,
        basepoint,
        n_points: n,
        levels,
        chains,
    };
    let report = check_hierarchy(space, &h, params.check)?;
    if !report.passed() {
        return Err(Error::Construction(format!(
            "hierarchy failed its checks: {:?}",
            report.violations
        )));
    }
    Ok(h)
}

/// Edges `C ≻ B`: same color, `B` at a lower level `i`, and some pair of
/// points within `3 r^i`.
pub fn chain_relation(space: &FiniteMetricSpace, base: f64, levels: &[Level]) -> Vec<ChainEdge> {
    let mut edges = Vec::new();
    for (b, upper) in levels.iter().enumerate() {
        for lower in &levels[..b] {
            let reach = 3.0 * base.powi(lower.j);
            for (color, fam) in upper.families.iter().enumerate() {
                let Some(low_fam) = lower.families.get(color) else { continue };
                for (ci, c) in fam.iter().enumerate() {
                    for (bi, bset) in low_fam.iter().enumerate() {
                        if set_distance_unchecked(space, c, bset) <= reach {
                            edges.push(ChainEdge {
                                upper: SetId { level: upper.j, color, index: ci },
                                lower: SetId { level: lower.j, color, index: bi },
                            });
                        }
                    }
                }
            }
        }
    }
    edges
}

/// Replaces each set by its union with everything reachable through `edges`.
///
/// Levels must be sorted ascending; since edges point strictly downward,
/// one ascending pass computes `Ĉ = C ∪ ⋃_{C ≻ B} B̂`.
pub fn apply_closure(levels: &[Level], edges: &[ChainEdge]) -> Vec<Level> {
    let j0 = levels.first().map_or(0, |l| l.j);
    let mut out: Vec<Level> = levels.to_vec();
    let mut by_upper: std::collections::BTreeMap<SetId, Vec<SetId>> = std::collections::BTreeMap::new();
    for e in edges {
        by_upper.entry(e.upper).or_default().push(e.lower);
    }
    for li in 0..out.len() {
        for color in 0..out[li].families.len() {
            for idx in 0..out[li].families[color].len() {
                let id = SetId { level: out[li].j, color, index: idx };
                let Some(lowers) = by_upper.get(&id) else { continue };
                let mut pts: Vec<usize> = out[li].families[color][idx].indices().to_vec();
                for low in lowers {
                    let lj = (low.level - j0) as usize;
                    pts.extend(out[lj].families[low.color][low.index].iter());
                }
                out[li].families[color][idx] = PointSet::new(pts);
            }
        }
    }
    out
}

/// One failed property, with its witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HierarchyViolation {
    Diameter { set: SetId, diameter: f64, bound: f64 },
    Multiplicity { level: i32, color: usize, value: usize, witness: Vec<usize> },
    BallNotContained { level: i32, point: usize },
    NoFullMember { color: usize },
    NeitherNestedNorFar { lower: SetId, upper: SetId, distance: f64 },
}

impl HierarchyViolation {
    /// Which of the four properties this violates, numbered 1 to 4.
    pub fn property(&self) -> usize {
        match self {
            HierarchyViolation::Diameter { .. } | HierarchyViolation::Multiplicity { .. } => 1,
            HierarchyViolation::BallNotContained { .. } => 2,
            HierarchyViolation::NoFullMember { .. } => 3,
            HierarchyViolation::NeitherNestedNorFar { .. } => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyReport {
    pub violations: Vec<HierarchyViolation>,
    /// Whether some level/color fell back to the ball surrogate.
    pub used_ball_surrogate: bool,
    pub max_multiplicity: usize,
    pub measured_c: f64,
}

impl HierarchyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn holds(&self, property: usize) -> bool {
        self.violations.iter().all(|v| v.property() != property)
    }
}

/// Exhaustively verifies the four hierarchy properties.
pub fn check_hierarchy(
    space: &FiniteMetricSpace,
    h: &HierarchicalCovering,
    mode: CheckMode,
) -> Result<HierarchyReport> {
    let n = space.len();
    if h.n_points != n {
        return Err(Error::Parameter(format!(
            "hierarchy is over {} points, space has {n}",
            h.n_points
        )));
    }
    let mut violations = Vec::new();
    let mut used_ball_surrogate = false;
    let mut max_multiplicity = 0;
    let mut measured_c: f64 = 0.0;

    for level in &h.levels {
        let rj = h.scale(level.j);
        for (color, fam) in level.families.iter().enumerate() {
            for (index, m) in fam.iter().enumerate() {
                let diameter = set_diameter(space, m);
                measured_c = measured_c.max(diameter / rj);
                if diameter > h.c * rj {
                    violations.push(HierarchyViolation::Diameter {
                        set: SetId { level: level.j, color, index },
                        diameter,
                        bound: h.c * rj,
                    });
                }
            }
            let cover = crate::covering::CoverFamily::new(fam.clone(), rj, h.c * rj);
            let mult = measure_multiplicity(space, &cover, rj, mode)?;
            used_ball_surrogate |= mult.method == MultiplicityMethod::Ball;
            max_multiplicity = max_multiplicity.max(mult.value);
            if mult.value > 1 {
                violations.push(HierarchyViolation::Multiplicity {
                    level: level.j,
                    color,
                    value: mult.value,
                    witness: mult.witness,
                });
            }
        }
        for x in 0..n {
            let ball = space.closed_ball(x, rj);
            let held = level.families.iter().flatten().any(|m| ball.is_subset(m));
            if !held {
                violations.push(HierarchyViolation::BallNotContained { level: level.j, point: x });
            }
        }
    }

    for color in 0..h.colors {
        let full = h
            .levels
            .iter()
            .any(|l| l.families.get(color).is_some_and(|f| f.iter().any(|m| m.len() == n)));
        if !full {
            violations.push(HierarchyViolation::NoFullMember { color });
        }
    }

    for (b, upper) in h.levels.iter().enumerate() {
        for lower in &h.levels[..b] {
            let ri = h.scale(lower.j);
            for (color, fam) in upper.families.iter().enumerate() {
                let Some(low_fam) = lower.families.get(color) else { continue };
                for (ci, c) in fam.iter().enumerate() {
                    for (bi, bset) in low_fam.iter().enumerate() {
                        if bset.is_subset(c) {
                            continue;
                        }
                        let distance = set_distance_unchecked(space, bset, c);
                        if distance <= ri {
                            violations.push(HierarchyViolation::NeitherNestedNorFar {
                                lower: SetId { level: lower.j, color, index: bi },
                                upper: SetId { level: upper.j, color, index: ci },
                                distance,
                            });
                        }
                    }
                }
            }
        }
    }

    Ok(HierarchyReport { violations, used_ball_surrogate, max_multiplicity, measured_c })
}
