//! Acceptance suite: one PASS/FAIL line per criterion, with runtime limits.
//!
//! Runs without the libtest harness so the lines are always printed.

#![allow(clippy::too_many_arguments)]

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use nagata_core::covering::{
    doubling_cover, merge_union_coverings, s_multiplicity_ball, s_multiplicity_exact,
    s_multiplicity_exact_with_budget, single_color_cover, CheckMode, CoverFamily,
};
use nagata_core::hierarchy::{build_hierarchy, check_hierarchy, HierarchicalCovering, HierarchyParams};
use nagata_core::instances::{self, rng};
use nagata_core::metric::{identity_order, set_diameter, FiniteMetricSpace, PointSet};
use nagata_core::reduction::tree_reduction;
use nagata_core::tree::{
    embed, exponent_guard, lower_bound_check, ChainMetric, ChildRelation, EmbedParams, MetricTree, TreePoint,
    TreeRecord,
};
use nagata_core::whitney::{build_structure, certify_extension, extend, ExtensionProblem, WhitneyParams};
use rand::seq::SliceRandom;
use rand::Rng;

const REL_TOL: f64 = 1e-9;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn scales(space: &FiniteMetricSpace, k: usize) -> Vec<f64> {
    let lo = space.min_positive_distance().unwrap_or(1.0);
    let hi = space.diameter().max(lo);
    (0..k)
        .map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64))
        .collect()
}

fn criterion_1() -> Outcome {
    let mut r = rng(101);
    let mut worst_class = 0;
    let mut worst_diam_ratio: f64 = 0.0;
    for inst in 0..50 {
        let space = instances::doubling_instance(inst, 40, &mut r).unwrap();
        for s in scales(&space, 5) {
            let dc = doubling_cover(&space, s, &identity_order(space.len())).unwrap();
            for color in 0..dc.colors_used {
                let class = dc.cover.color_class(color);
                let m = s_multiplicity_exact(&space, &class, s).unwrap().value;
                worst_class = worst_class.max(m);
            }
            worst_diam_ratio = worst_diam_ratio.max(dc.cover.max_diameter(&space) / (2.0 * s));
            if !dc.cover.covers(&PointSet::full(space.len())) {
                return outcome(false, format!("instance {inst} at s = {s}: not a covering"));
            }
        }
    }
    outcome(
        worst_class <= 1 && worst_diam_ratio <= 1.0,
        format!("max class multiplicity {worst_class}, max diameter / 2s = {worst_diam_ratio:.6}"),
    )
}

fn criterion_2() -> Outcome {
    let mut r = rng(202);
    for inst in 0..100 {
        let n = r.random_range(3..=20);
        let space = instances::random_euclidean(n, 2, 10.0, &mut r).unwrap();
        let cover = instances::random_cover(n, r.random_range(1..=8), &mut r);
        let s = r.random_range(0.1..4.0);
        let exact = s_multiplicity_exact(&space, &cover, s).unwrap().value;
        let ball = s_multiplicity_ball(&space, &cover, s).value;
        let exact2 = s_multiplicity_exact(&space, &cover, 2.0 * s).unwrap().value;
        if !(exact <= ball && ball <= exact2) {
            return outcome(false, format!("instance {inst}: exact {exact}, ball {ball}, exact(2s) {exact2}"));
        }
    }
    outcome(true, "exact(s) <= ball(s) <= exact(2s) on 100 covers")
}

fn criterion_3() -> Outcome {
    let mut r = rng(303);
    let mut worst: f64 = 0.0;
    for inst in 0..30 {
        let n = r.random_range(6..=30);
        let split = instances::split_instance(n, &mut r).unwrap();
        let (s, c) = (split.s, split.c);
        let wide = (3.0 + 2.0 * c) * s;
        let mz = s_multiplicity_exact(&split.space, &split.cover_z, s).unwrap().value;
        let my = s_multiplicity_exact(&split.space, &split.cover_y, wide).unwrap().value;
        let n_dim = mz.max(my) - 1;
        let merged = match merge_union_coverings(&split.space, &split.cover_y, &split.cover_z, s, c, n_dim, CheckMode::Exact) {
            Ok(m) => m,
            Err(e) => return outcome(false, format!("instance {inst}: {e}")),
        };
        let bound = c * (3.0 + 2.0 * c) * s + 2.0 * (1.0 + c) * s;
        let diam = merged.cover.max_diameter(&split.space);
        let mult = s_multiplicity_exact(&split.space, &merged.cover, s).unwrap().value;
        worst = worst.max(diam / bound);
        if diam > bound || mult > n_dim + 1 || !merged.cover.covers(&PointSet::full(n)) {
            return outcome(false, format!("instance {inst}: diameter {diam} vs {bound}, multiplicity {mult} vs {}", n_dim + 1));
        }
    }
    outcome(true, format!("max diameter / bound = {worst:.6}"))
}

fn hierarchy_instances() -> Vec<FiniteMetricSpace> {
    let mut r = rng(404);
    (0..20).map(|k| instances::doubling_instance(k, 30, &mut r).unwrap()).collect()
}

fn criterion_4(spaces: &[FiniteMetricSpace], out: &mut Vec<HierarchicalCovering>) -> Outcome {
    let c_prime = 2.0;
    let params = HierarchyParams { check: CheckMode::Exact, ..HierarchyParams::new(c_prime) };
    let mut worst_c: f64 = 0.0;
    for (k, space) in spaces.iter().enumerate() {
        let h = match build_hierarchy(space, &params) {
            Ok(h) => h,
            Err(e) => return outcome(false, format!("instance {k}: {e}")),
        };
        let report = check_hierarchy(space, &h, CheckMode::Exact).unwrap();
        if !report.passed() || report.used_ball_surrogate {
            return outcome(false, format!("instance {k}: {:?}", report.violations.first()));
        }
        worst_c = worst_c.max(report.measured_c);
        out.push(h);
    }
    let bound = 5.0 * c_prime + 4.0;
    outcome(worst_c <= bound, format!("r = 16, max measured c = {worst_c:.6} <= {bound}"))
}

/// Cheapest chain from `x` to `y` over ordered sequences of distinct children.
fn chain_oracle(space: &FiniteMetricSpace, kids: &[PointSet], p: f64, x: usize, y: usize) -> f64 {
    fn dist(space: &FiniteMetricSpace, a: &PointSet, b: &PointSet) -> f64 {
        a.iter().flat_map(|u| b.iter().map(move |v| space.d(u, v))).fold(f64::INFINITY, f64::min)
    }
    fn go(
        space: &FiniteMetricSpace,
        kids: &[PointSet],
        p: f64,
        used: &mut Vec<bool>,
        last: usize,
        acc: f64,
        y: usize,
        best: &mut f64,
    ) {
        let finish = acc + dist(space, &kids[last], &PointSet::singleton(y)).powf(p);
        *best = best.min(finish);
        for next in 0..kids.len() {
            if !used[next] {
                used[next] = true;
                let step = dist(space, &kids[last], &kids[next]).powf(p);
                go(space, kids, p, used, next, acc + step, y, best);
                used[next] = false;
            }
        }
    }
    let mut best = space.d(x, y).powf(p);
    let mut used = vec![false; kids.len()];
    for first in 0..kids.len() {
        used[first] = true;
        let start = dist(space, &PointSet::singleton(x), &kids[first]).powf(p);
        go(space, kids, p, &mut used, first, start, y, &mut best);
        used[first] = false;
    }
    best
}

fn criterion_5(spaces: &[FiniteMetricSpace], hs: &[HierarchicalCovering]) -> Outcome {
    let mut checked = 0usize;
    let mut worst: f64 = 0.0;
    let mut compare = |space: &FiniteMetricSpace, set: &PointSet, kids: &[PointSet], p: f64| -> Option<String> {
        let metric = ChainMetric::new(space, set, kids, p).unwrap();
        for x in set.iter() {
            for y in set.iter().filter(|&y| y > x) {
                let got = metric.d_cp(x, y).unwrap();
                let want = chain_oracle(space, kids, p, x, y);
                let rel = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
                worst = worst.max(rel);
                checked += 1;
                if rel > 1e-12 {
                    return Some(format!("pair ({x}, {y}): {got} vs oracle {want}"));
                }
            }
        }
        None
    };
    for (space, h) in spaces.iter().zip(hs) {
        let rel = ChildRelation::of(h).unwrap();
        let p = exponent_guard(h.c);
        for color in 0..h.colors {
            for id in h.color_sets(color) {
                let kids: Vec<PointSet> = rel.children_of(id).iter().map(|&b| h.set(b).clone()).collect();
                if kids.len() > 6 {
                    continue;
                }
                if let Some(msg) = compare(space, h.set(id), &kids, p) {
                    return outcome(false, msg);
                }
            }
        }
    }
    let mut r = rng(505);
    for _ in 0..40 {
        let n = r.random_range(4..=14);
        let space = instances::random_euclidean(n, 2, 10.0, &mut r).unwrap();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut r);
        let m = r.random_range(0..=6.min(n));
        let kids: Vec<PointSet> = (0..m).map(|k| PointSet::new(idx.iter().skip(k).step_by(m.max(1) + 1).copied().collect())).filter(|k: &PointSet| !k.is_empty()).collect();
        let p = r.random_range(0.2..=1.0);
        if let Some(msg) = compare(&space, &PointSet::full(n), &kids, p) {
            return outcome(false, msg);
        }
    }
    outcome(true, format!("{checked} pairs, max relative gap {worst:.3e}"))
}

fn criterion_6(spaces: &[FiniteMetricSpace], hs: &[HierarchicalCovering]) -> Outcome {
    let mut pairs = 0;
    let mut min_ratio = f64::INFINITY;
    for (k, (space, h)) in spaces.iter().zip(hs).enumerate() {
        let p = exponent_guard(h.c);
        let report = lower_bound_check(space, h, p).unwrap();
        pairs += report.pairs_checked;
        min_ratio = min_ratio.min(report.min_ratio);
        if let Some(v) = report.violations.first() {
            return outcome(false, format!("instance {k}: {v:?}"));
        }
    }
    outcome(true, format!("{pairs} pairs, min chain / bound = {min_ratio:.6}"))
}

fn tree_distance(tree: &MetricTree, a: &TreePoint, b: &TreePoint) -> f64 {
    tree.distance(a, b).unwrap()
}

fn criterion_7(spaces: &[FiniteMetricSpace]) -> Outcome {
    let c_prime = 2.0;
    let c = 5.0 * c_prime + 4.0;
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut k_bounds = (0.0, 0.0);
    for (k, space) in spaces.iter().enumerate() {
        let params = EmbedParams { check: CheckMode::Exact, ..EmbedParams::new(c_prime) };
        let emb = match embed(space, &params) {
            Ok(e) => e,
            Err(e) => return outcome(false, format!("instance {k}: {e}")),
        };
        let (r, p) = (emb.report.base, emb.report.exponent);
        let rp = r.powf(p);
        let k_up = 1.0 + rp / (rp - 1.0) * (1.0 + rp);
        let k_low = c.powf(-p) * r.powf(-2.0 * p) * (((r - c) / (c + 1.0)).powf(p) - 1.0);
        k_bounds = (k_low, k_up);
        for t in &emb.trees {
            let recs: Vec<TreeRecord> = t.tree.records();
            if MetricTree::from_records(&recs).is_err() || t.tree.find_metric_violation(&t.images, 1e-9).is_some() {
                return outcome(false, format!("instance {k}: tree of color {} is not a metric tree", t.color));
            }
        }
        for x in 0..space.len() {
            for y in (x + 1)..space.len() {
                let prod = emb
                    .trees
                    .iter()
                    .map(|t| tree_distance(&t.tree, &t.images[x], &t.images[y]))
                    .fold(0.0, f64::max);
                let dp = space.d(x, y).powf(p);
                lo = lo.min(prod / dp);
                hi = hi.max(prod / dp);
                if prod > k_up * dp * (1.0 + REL_TOL) || prod < k_low * dp * (1.0 - REL_TOL) {
                    return outcome(false, format!("instance {k}, pair ({x}, {y}): {prod} vs [{k_low}, {k_up}] d^p"));
                }
            }
        }
    }
    outcome(
        true,
        format!("r = 30, ratios in [{lo:.6}, {hi:.6}] within [K_low, K_up] = [{:.6}, {:.6}]", k_bounds.0, k_bounds.1),
    )
}

fn criterion_8() -> Outcome {
    let mut r = rng(808);
    let mut baseline = Vec::new();
    for inst in 0..20 {
        let n = r.random_range(12..=40);
        let dim_space = r.random_range(1..=3);
        let space = instances::random_euclidean(n, dim_space, 10.0, &mut r).unwrap();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut r);
        let zsize = r.random_range(1..=8.min(n - 1));
        let z = PointSet::new(idx[..zsize].to_vec());
        let dim = 1 + inst % 3;
        let values: BTreeMap<usize, Vec<f64>> =
            z.iter().map(|p| (p, (0..dim).map(|_| r.random_range(-5.0..5.0)).collect())).collect();
        let problem = ExtensionProblem::new(space, z.clone(), &values).unwrap();
        let structure = match build_structure(&problem, &WhitneyParams::default()) {
            Ok(s) => s,
            Err(e) => return outcome(false, format!("instance {inst}: {e}")),
        };
        let result = extend(&problem, &structure).unwrap();
        let cert = certify_extension(&problem, &structure, &result);
        if z.iter().any(|p| result.values[p] != problem.value(p)) || cert.restriction_mismatch.is_some() {
            return outcome(false, format!("instance {inst}: restriction differs from f"));
        }
        let rb = structure.base;
        let lip_bound = 1.0 + 4.0 * rb + 4.0 * rb * rb;
        for x in (0..n).filter(|&x| !z.contains(x)) {
            let total: f64 = structure.bumps.iter().map(|b| b.values[x]).sum();
            let support = structure.bumps.iter().filter(|b| b.values[x] > 0.0).count();
            if total < 1.0 || support > structure.n_plus_one {
                return outcome(false, format!("instance {inst}, point {x}: bump sum {total}, support {support}"));
            }
        }
        let domain: Vec<usize> = (0..n).filter(|&x| z.contains(x) || structure.net.contains(x)).collect();
        let mut lip_rho: f64 = 0.0;
        for (a, &x) in domain.iter().enumerate() {
            for &y in &domain[a + 1..] {
                let (rx, ry) = (structure.retraction[x], structure.retraction[y]);
                lip_rho = lip_rho.max(problem.space.d(rx, ry) / problem.space.d(x, y));
            }
        }
        if lip_rho > lip_bound || !result.bound_constant.is_finite() {
            return outcome(false, format!("instance {inst}: Lip(rho) {lip_rho}, constant {}", result.bound_constant));
        }
        baseline.push(result.bound_constant);
    }
    let max = baseline.iter().copied().fold(0.0, f64::max);
    let mean = baseline.iter().sum::<f64>() / baseline.len() as f64;
    outcome(true, format!("Lip(extension)/lambda baseline: mean {mean:.4}, max {max:.4}"))
}

fn criterion_9() -> Outcome {
    let mut r = rng(909);
    let mut worst: f64 = 0.0;
    for inst in 0..10 {
        let tree = instances::random_tree(r.random_range(2..=10), &mut r).unwrap();
        let sample = instances::tree_sample(&tree, r.random_range(10..=60), &mut r);
        let s = r.random_range(0.25..3.0);
        let c = [1.0, 1.5, 2.0][inst % 3];
        let root = TreePoint { node: tree.root(), offset: 0.0 };
        let out = match tree_reduction(&tree, &sample, root, s, c, CheckMode::Exact) {
            Ok(o) => o,
            Err(e) => return outcome(false, format!("instance {inst}: {e}")),
        };
        let space = nagata_core::reduction::sample_space(&tree, &sample).unwrap();
        let (lambda, mu) = (1.0, 0.5);
        let bound = 2.0 * (lambda * c + mu * (2.0 * lambda * c + 1.0)) * s;
        let diam = out.cover.max_diameter(&space);
        let mult = s_multiplicity_exact(&space, &out.cover, s).unwrap().value;
        worst = worst.max(diam / bound);
        if mult > 2 || diam > bound || !out.cover.covers(&PointSet::full(sample.len())) {
            return outcome(false, format!("instance {inst}: multiplicity {mult}, diameter {diam} vs {bound}"));
        }
    }
    outcome(true, format!("max diameter / bound = {worst:.6}"))
}

/// Every set partition of `0..n`, as block labels.
fn partitions(n: usize, f: &mut impl FnMut(&[usize])) {
    fn go(i: usize, n: usize, blocks: usize, label: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if i == n {
            f(label);
            return;
        }
        for b in 0..=blocks {
            label.push(b);
            go(i + 1, n, blocks.max(b + 1), label, f);
            label.pop();
        }
    }
    go(0, n, 0, &mut Vec::new(), f);
}

/// Smallest `c` over single-member-per-test-set coverings built from blocks of `parts`.
fn min_single_color_c(space: &FiniteMetricSpace, parts: &[PointSet], s: f64) -> f64 {
    let mut best = f64::INFINITY;
    partitions(parts.len(), &mut |label| {
        let k = label.iter().max().map_or(0, |m| m + 1);
        let members: Vec<PointSet> = (0..k)
            .map(|b| parts.iter().zip(label).filter(|(_, &l)| l == b).fold(PointSet::empty(), |acc, (p, _)| acc.union(p)))
            .collect();
        for a in 0..k {
            for b in (a + 1)..k {
                let close = members[a].iter().any(|x| members[b].iter().any(|y| space.d(x, y) <= s));
                if close {
                    return;
                }
            }
        }
        let c = members.iter().map(|m| set_diameter(space, m)).fold(0.0, f64::max) / s;
        best = best.min(c);
    });
    best
}

fn criterion_10() -> Outcome {
    // The coarsening search over components agrees with a search over all partitions of points.
    for k in [3, 6, 9] {
        let space = instances::harmonic(k).unwrap();
        let s = 1.0 / k as f64;
        let points: Vec<PointSet> = (0..space.len()).map(PointSet::singleton).collect();
        let full = min_single_color_c(&space, &points, s);
        let comps = single_color_cover(&space, s).unwrap().members;
        let coarse = min_single_color_c(&space, &comps, s);
        if full != coarse {
            return outcome(false, format!("harmonic({k}): point search {full} vs component search {coarse}"));
        }
    }
    let mut single = Vec::new();
    let mut two_color_worst: f64 = 0.0;
    for m in [4usize, 6, 8] {
        let space = instances::harmonic(m * m).unwrap();
        let s = 1.0 / (m * m) as f64;
        let comps = single_color_cover(&space, s).unwrap().members;
        single.push(min_single_color_c(&space, &comps, s));

        let xs: Vec<f64> = (0..space.len()).map(|i| space.d(0, i)).collect();
        let tree = MetricTree::from_records(&[TreeRecord { node: 0, parent: None, offset: 0.0, length: 1.0 }]).unwrap();
        let sample: Vec<TreePoint> = xs.iter().map(|&x| TreePoint { node: 0, offset: x }).collect();
        for scale in [s, 2.0 * s, 1.0 / m as f64, 0.25] {
            let red = tree_reduction(&tree, &sample, sample[0], scale, 1.0, CheckMode::Auto).unwrap();
            let total = s_multiplicity_exact_with_budget(&space, &red.cover, scale, 128).unwrap().value;
            if total > 2 {
                return outcome(false, format!("m = {m}, s = {scale}: two-color cover has multiplicity {total}"));
            }
            let colors: Vec<usize> = red.interval.iter().map(|k| k % 2).collect();
            let cover = CoverFamily::new(red.cover.members.clone(), scale, 4.0 * scale).with_colors(colors).unwrap();
            for color in 0..2 {
                let class = cover.color_class(color);
                if class.is_empty() {
                    continue;
                }
                let mc = s_multiplicity_exact_with_budget(&space, &class, scale, 128).unwrap().value;
                if mc > 1 {
                    return outcome(false, format!("m = {m}, s = {scale}: color {color} has multiplicity {mc}"));
                }
            }
            two_color_worst = two_color_worst.max(cover.max_diameter(&space) / scale);
        }
    }
    let increasing = single.windows(2).all(|w| w[0] < w[1]);
    outcome(
        increasing && two_color_worst <= 4.0,
        format!("single-color minimal c for m = 4, 6, 8: {single:?}; two-color max c = {two_color_worst:.6}"),
    )
}

fn main() {
    let mut failures = 0;
    let mut report = |n: usize, limit: Option<u64>, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= Duration::from_secs(l));
        let ok = out.ok && in_time;
        if !ok {
            failures += 1;
        }
        let limit_txt = limit.map_or(String::new(), |l| format!(" / {l} s"));
        println!(
            "criterion {n}: {} ({}) [{:.2} s{limit_txt}]",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    };
    report(1, Some(60), &mut criterion_1);
    report(2, Some(30), &mut criterion_2);
    report(3, Some(60), &mut criterion_3);
    let spaces = hierarchy_instances();
    let mut hs = Vec::new();
    report(4, Some(120), &mut || criterion_4(&spaces, &mut hs));
    report(5, Some(30), &mut || criterion_5(&spaces, &hs));
    report(6, None, &mut || criterion_6(&spaces, &hs));
    report(7, Some(120), &mut || criterion_7(&spaces));
    report(8, Some(120), &mut criterion_8);
    report(9, Some(30), &mut criterion_9);
    report(10, Some(60), &mut criterion_10);
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
