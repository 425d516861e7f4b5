//! Partitions of unity subordinate to a covering and the nerve map
//! `x -> (mass * σ_i(x) / σ̄(x))_i` into a simplex.

use serde::{Deserialize, Serialize};

use crate::covering::CoverFamily;
use crate::error::{Error, Result};
use crate::metric::{set_diameter, FiniteMetricSpace, PointSet};

/// Dense bump table `σ_i(x) = max(0, r/2 - d(x, B_i))`, member by point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    pub bumps: Vec<Vec<f64>>,
    pub scale: f64,
    /// Lower bound on `σ̄ = Σ_i σ_i` over the domain.
    pub floor: f64,
}

impl PartitionOfUnity {
    pub fn total(&self, x: usize) -> f64 {
        self.bumps.iter().map(|row| row[x]).sum()
    }

    /// Members whose bump is positive at `x`.
    pub fn support(&self, x: usize) -> Vec<usize> {
        (0..self.bumps.len()).filter(|&i| self.bumps[i][x] > 0.0).collect()
    }
}

pub fn build_bumps(space: &FiniteMetricSpace, cover: &CoverFamily, r: f64) -> Result<PartitionOfUnity> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Parameter(format!("bump scale must be positive, got {r}")));
    }
    if !cover.covers(&PointSet::full(space.len())) {
        return Err(Error::Contract("covering does not cover the space".into()));
    }
    let half = r / 2.0;
    let bumps = cover
        .members
        .iter()
        .map(|m| {
            (0..space.len())
                .map(|x| (half - space.point_set_distance(x, m)).max(0.0))
                .collect()
        })
        .collect();
    Ok(PartitionOfUnity { bumps, scale: r, floor: half })
}

/// Sparse coordinates `(member, mass * σ_i(x) / σ̄(x))`, zero entries omitted.
pub fn nerve_coordinates(pou: &PartitionOfUnity, x: usize, mass: f64) -> Result<Vec<(usize, f64)>> {
    let total = pou.total(x);
    if !(total >= pou.floor) {
        return Err(Error::Invariant(format!(
            "bump sum {total} at point {x} is below the floor {}",
            pou.floor
        )));
    }
    Ok(pou
        .support(x)
        .into_iter()
        .map(|i| (i, mass * pou.bumps[i][x] / total))
        .collect())
}

/// Diameter of each `{σ_i > 0}`.
pub fn star_preimage_diameters(space: &FiniteMetricSpace, pou: &PartitionOfUnity) -> Vec<f64> {
    pou.bumps
        .iter()
        .map(|row| {
            let support = PointSet::new((0..space.len()).filter(|&x| row[x] > 0.0).collect());
            set_diameter(space, &support)
        })
        .collect()
}

fn l2_gap(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let mut sum = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ka = a.get(i).map_or(usize::MAX, |e| e.0);
        let kb = b.get(j).map_or(usize::MAX, |e| e.0);
        let diff = if ka == kb {
            i += 1;
            j += 1;
            a[i - 1].1 - b[j - 1].1
        } else if ka < kb {
            i += 1;
            a[i - 1].1
        } else {
            j += 1;
            b[j - 1].1
        };
        sum += diff * diff;
    }
    sum.sqrt()
}

/// A nerve map scaled to be 1-Lipschitz into `l2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NerveMap {
    /// Lipschitz constant of the unscaled map (`mass = 1`).
    pub unscaled_lipschitz: f64,
    /// `1 / (r L)`, so that `mass = λ r = 1 / L`.
    pub lambda: f64,
    pub mass: f64,
    pub coordinates: Vec<Vec<(usize, f64)>>,
    /// Largest `|v(x) - v(x')| / d(x, x')` after scaling.
    pub scaled_lipschitz: f64,
}

/// Largest `|v(x) - v(x')|_2 / d(x, x')` over all pairs.
pub fn coordinate_lipschitz(space: &FiniteMetricSpace, coords: &[Vec<(usize, f64)>]) -> f64 {
    let n = space.len();
    let mut best: f64 = 0.0;
    for x in 0..n {
        for y in (x + 1)..n {
            best = best.max(l2_gap(&coords[x], &coords[y]) / space.d(x, y));
        }
    }
    best
}

/// Measures the Lipschitz constant `L` of the unit-mass map and rescales by `1 / L`.
pub fn nerve_map(space: &FiniteMetricSpace, cover: &CoverFamily, r: f64) -> Result<NerveMap> {
    let pou = build_bumps(space, cover, r)?;
    let unit: Vec<_> = (0..space.len())
        .map(|x| nerve_coordinates(&pou, x, 1.0))
        .collect::<Result<_>>()?;
    let unscaled_lipschitz = coordinate_lipschitz(space, &unit);
    let (lambda, mass) = if unscaled_lipschitz > 0.0 {
        (1.0 / (r * unscaled_lipschitz), 1.0 / unscaled_lipschitz)
    } else {
        (1.0 / r, 1.0)
    };
    let coordinates: Vec<_> = (0..space.len())
        .map(|x| nerve_coordinates(&pou, x, mass))
        .collect::<Result<_>>()?;
    let scaled_lipschitz = coordinate_lipschitz(space, &coordinates);
    Ok(NerveMap { unscaled_lipschitz, lambda, mass, coordinates, scaled_lipschitz })
}
