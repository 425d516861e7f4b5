//! Seeded generators for test and benchmark instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::covering::{doubling_cover, CoverFamily};
use crate::error::Result;
use crate::metric::{identity_order, FiniteMetricSpace, PointSet};
use crate::reduction::sample_space;
use crate::tree::{MetricTree, TreePoint, TreeRecord};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Points on a line at the given coordinates.
pub fn collinear(xs: &[f64]) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::from_fn(xs.len(), |i, j| (xs[i] - xs[j]).abs())
}

/// `{0} ∪ {1/i : 1 <= i <= k}`, point 0 at the origin.
pub fn harmonic(k: usize) -> Result<FiniteMetricSpace> {
    let mut xs = vec![0.0];
    xs.extend((1..=k).map(|i| 1.0 / i as f64));
    collinear(&xs)
}

/// A `w x h` integer grid in the plane.
pub fn grid(w: usize, h: usize, spacing: f64) -> Result<FiniteMetricSpace> {
    let pts: Vec<Vec<f64>> = (0..w * h)
        .map(|i| vec![(i % w) as f64 * spacing, (i / w) as f64 * spacing])
        .collect();
    FiniteMetricSpace::from_points(&pts)
}

/// A grid with every point moved uniformly within `jitter` per coordinate.
pub fn perturbed_grid(w: usize, h: usize, jitter: f64, rng: &mut impl Rng) -> Result<FiniteMetricSpace> {
    let pts: Vec<Vec<f64>> = (0..w * h)
        .map(|i| {
            vec![
                (i % w) as f64 + rng.random_range(-jitter..=jitter),
                (i / w) as f64 + rng.random_range(-jitter..=jitter),
            ]
        })
        .collect();
    FiniteMetricSpace::from_points(&pts)
}

/// `n` uniform points in `[0, side]^dim`.
pub fn random_euclidean(n: usize, dim: usize, side: f64, rng: &mut impl Rng) -> Result<FiniteMetricSpace> {
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..side)).collect())
        .collect();
    FiniteMetricSpace::from_points(&pts)
}

/// Random tree on `nodes` intervals with lengths in `[1, 10]`; attachment
/// offsets are multiples of 1/4 so that equal heights occur.
pub fn random_tree(nodes: usize, rng: &mut impl Rng) -> Result<MetricTree> {
    let mut records: Vec<TreeRecord> = Vec::with_capacity(nodes);
    for v in 0..nodes.max(1) {
        let length = f64::from(rng.random_range(4u32..=40)) / 4.0;
        let (parent, offset) = if v == 0 {
            (None, 0.0)
        } else {
            let p = rng.random_range(0..v);
            let steps = records[p].length * 4.0;
            (Some(p), f64::from(rng.random_range(0..=steps as u32)) / 4.0)
        };
        records.push(TreeRecord { node: v, parent, offset, length });
    }
    MetricTree::from_records(&records)
}

/// Up to `m` distinct quarter-grid points on the tree.
pub fn tree_sample(tree: &MetricTree, m: usize, rng: &mut impl Rng) -> Vec<TreePoint> {
    let mut out: Vec<TreePoint> = Vec::with_capacity(m);
    for _ in 0..(4 * m) {
        if out.len() == m {
            break;
        }
        let node = rng.random_range(0..tree.len());
        let steps = (tree.length(node) * 4.0) as u32;
        let p = TreePoint { node, offset: f64::from(rng.random_range(0..=steps)) / 4.0 };
        if out.iter().all(|q| tree.distance_unchecked(q, &p) > 0.0) {
            out.push(p);
        }
    }
    out
}

/// A finite subset of a random tree, as a metric space.
pub fn tree_subset(nodes: usize, m: usize, rng: &mut impl Rng) -> Result<FiniteMetricSpace> {
    let tree = random_tree(nodes, rng)?;
    let sample = tree_sample(&tree, m, rng);
    sample_space(&tree, &sample)
}

/// One of grid, perturbed grid or tree subset, chosen by `kind % 3`, with at most `max_points` points.
pub fn doubling_instance(kind: usize, max_points: usize, rng: &mut impl Rng) -> Result<FiniteMetricSpace> {
    let side = ((max_points as f64).sqrt() as usize).max(2);
    match kind % 3 {
        0 => {
            let w = rng.random_range(2..=side);
            let h = rng.random_range(1..=(max_points / w).min(side + 2));
            grid(w, h, 1.0)
        }
        1 => {
            let w = rng.random_range(2..=side);
            let h = rng.random_range(1..=(max_points / w).min(side + 2));
            perturbed_grid(w, h, 0.3, rng)
        }
        _ => {
            let nodes = rng.random_range(2..=8);
            let m = rng.random_range(4..=max_points);
            tree_subset(nodes, m, rng)
        }
    }
}

/// A random covering: `members` random non-empty subsets plus singletons for missed points.
pub fn random_cover(n: usize, members: usize, rng: &mut impl Rng) -> CoverFamily {
    let mut sets: Vec<PointSet> = (0..members)
        .map(|_| {
            let size = rng.random_range(1..=n.min(4));
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(rng);
            PointSet::new(idx[..size].to_vec())
        })
        .collect();
    let covered = sets.iter().fold(PointSet::empty(), |acc, s| acc.union(s));
    sets.extend((0..n).filter(|&x| !covered.contains(x)).map(PointSet::singleton));
    CoverFamily::new(sets, 0.0, f64::INFINITY)
}

/// A split `X = Y ∪ Z` with ball covers satisfying the merge preconditions for `c = 2`.
#[derive(Debug, Clone)]
pub struct SplitInstance {
    pub space: FiniteMetricSpace,
    pub y: PointSet,
    pub z: PointSet,
    pub cover_y: CoverFamily,
    pub cover_z: CoverFamily,
    pub s: f64,
    pub c: f64,
}

pub fn split_instance(n: usize, rng: &mut impl Rng) -> Result<SplitInstance> {
    let space = random_euclidean(n, 2, 10.0, rng)?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let cut = rng.random_range(1..n);
    let y = PointSet::new(idx[..cut].to_vec());
    let z = PointSet::new(idx[cut..].to_vec());
    let s = rng.random_range(0.3..1.5);
    let c = 2.0;
    let cover_on = |part: &PointSet, scale: f64| -> Result<CoverFamily> {
        let (sub, map) = space.subspace(part)?;
        Ok(doubling_cover(&sub, scale, &identity_order(sub.len()))?.cover.lift(&map))
    };
    let cover_y = cover_on(&y, (3.0 + 2.0 * c) * s)?;
    let cover_z = cover_on(&z, s)?;
    Ok(SplitInstance { space, y, z, cover_y, cover_z, s, c })
}
