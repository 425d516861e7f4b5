use std::fs;
use std::path::{Path, PathBuf};

use nagata_core::cert::{all_hold, Certificate};
use nagata_core::covering::{doubling_cover, estimate_nagata_profile, measure_multiplicity, CheckMode};
use nagata_core::hierarchy::{build_hierarchy, check_hierarchy, HierarchyParams, LevelRange};
use nagata_core::instances::rng;
use nagata_core::io::{parse_order, parse_sample, parse_space, parse_subset, parse_tree, parse_values, SpaceInput};
use nagata_core::metric::{identity_order, PointSet};
use nagata_core::reduction::tree_reduction;
use nagata_core::tree::{embed, EmbedParams, MetricTree, TreeNorm, TreePoint};
use nagata_core::whitney::{build_structure, certify_extension, extend, ExtensionProblem, WhitneyParams};
use nagata_core::{Error, Result};
use rand::seq::SliceRandom;
use serde_json::{json, Value};

use crate::{Command, Common, Norm};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_space(common: &Common) -> Result<SpaceInput> {
    parse_space(&read(&common.input)?)
}

fn load_order(common: &Common, n: usize) -> Result<Option<Vec<usize>>> {
    match common.order.as_deref() {
        None => Ok(None),
        Some("index") => Ok(Some(identity_order(n))),
        Some(path) => parse_order(&read(Path::new(path))?).map(Some),
    }
}

fn number_or_auto(flag: &str, text: &str) -> Result<Option<f64>> {
    if text == "auto" {
        return Ok(None);
    }
    text.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::Parameter(format!("--{flag} must be `auto` or a number, got {text:?}")))
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn output_path(cmd: &Command) -> Option<&PathBuf> {
    match cmd {
        Command::Validate(a) => a.common.output.as_ref(),
        Command::Cover(a) => a.common.output.as_ref(),
        Command::Hierarchy(a) => a.common.output.as_ref(),
        Command::Embed(a) => a.common.output.as_ref(),
        Command::ReduceTree(a) => a.output.as_ref(),
        Command::Extend(a) => a.common.output.as_ref(),
        Command::DimProfile(a) => a.common.output.as_ref(),
    }
}

pub fn emit(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs one command; returns the report and whether every certificate holds.
pub fn run(cmd: &Command) -> Result<(Value, bool)> {
    let (mut report, certs) = match cmd {
        Command::Validate(a) => validate(&a.common)?,
        Command::Cover(a) => cover(&a.common, a.scale)?,
        Command::Hierarchy(a) => hierarchy(&a.common, a.c_prime, a.base, &a.levels)?,
        Command::Embed(a) => embed_cmd(&a.common, a.c_prime, a.base, number_or_auto("exponent", &a.exponent)?, a.norm, a.export_prefix.as_deref())?,
        Command::ReduceTree(a) => reduce_tree(a)?,
        Command::Extend(a) => extend_cmd(a)?,
        Command::DimProfile(a) => profile(a)?,
    };
    let passed = all_hold(&certs);
    report["certificates"] = to_json(&certs);
    Ok((report, passed))
}

type Outcome = Result<(Value, Vec<Certificate>)>;

fn validate(common: &Common) -> Outcome {
    let input = load_space(common)?;
    let report = input.validate();
    let certs = vec![Certificate::at_most("metric axiom violations", report.violations.len() as f64, 0.0)];
    Ok((
        json!({
            "command": "validate",
            "points": input.space.len(),
            "exact_arithmetic": input.exact.is_some(),
            "tolerance": report.tolerance,
            "violations": to_json(&report.violations),
        }),
        certs,
    ))
}

fn cover(common: &Common, s: f64) -> Outcome {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Parameter(format!("scale must be positive, got {s}")));
    }
    let space = load_space(common)?.space;
    let order = load_order(common, space.len())?.unwrap_or_else(|| identity_order(space.len()));
    let mode: CheckMode = common.check.into();
    let dc = doubling_cover(&space, s, &order)?;
    let mut class_multiplicity = Vec::new();
    let mut worst = 0;
    for color in 0..dc.colors_used {
        let m = measure_multiplicity(&space, &dc.cover.color_class(color), s, mode)?;
        worst = worst.max(m.value);
        class_multiplicity.push(to_json(&m));
    }
    let total = measure_multiplicity(&space, &dc.cover, s, mode)?;
    let diameter = dc.cover.max_diameter(&space);
    let certs = vec![
        Certificate::flag("covers X", dc.cover.covers(&PointSet::full(space.len()))),
        Certificate::at_most("diameter <= 2s", diameter, 2.0 * s),
        Certificate::at_most("color class s-multiplicity", worst as f64, 1.0),
        Certificate::at_most("s-multiplicity <= colors", total.value as f64, dc.colors_used as f64),
    ];
    Ok((
        json!({
            "command": "cover",
            "scale": s,
            "colors": dc.colors_used,
            "net": dc.net,
            "members": to_json(&dc.cover.members),
            "member_colors": dc.cover.colors,
            "measured_diameter": diameter,
            "class_multiplicity": class_multiplicity,
            "multiplicity": to_json(&total),
        }),
        certs,
    ))
}

fn parse_levels(t: &str) -> Result<LevelRange> {
    if t == "auto" {
        return Ok(LevelRange::Auto);
    }
    let bad = || Error::Parameter(format!("levels must be `min:max`, got {t:?}"));
    let (a, b) = t.split_once(':').ok_or_else(bad)?;
    let (min, max) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if min > max {
        return Err(bad());
    }
    Ok(LevelRange::Explicit { min, max })
}

fn hierarchy(common: &Common, c_prime: f64, base: Option<f64>, levels: &str) -> Outcome {
    let space = load_space(common)?.space;
    let mut params = HierarchyParams::new(c_prime);
    if let Some(b) = base {
        params = params.with_base(b);
    }
    params.levels = parse_levels(levels)?;
    params.order = load_order(common, space.len())?;
    params.check = common.check.into();
    let h = build_hierarchy(&space, &params)?;
    let report = check_hierarchy(&space, &h, params.check)?;
    let mut certs: Vec<Certificate> = (1..=4)
        .map(|k| Certificate::flag(format!("hierarchy property {k}"), report.holds(k)))
        .collect();
    certs.push(Certificate::at_most("measured c <= 5c'+4", report.measured_c, h.c));
    Ok((json!({ "command": "hierarchy", "hierarchy": to_json(&h), "audit": to_json(&report) }), certs))
}

fn embed_cmd(common: &Common, c_prime: f64, base: Option<f64>, p: Option<f64>, norm: Norm, export: Option<&str>) -> Outcome {
    let space = load_space(common)?.space;
    let params = EmbedParams {
        c_prime,
        base,
        exponent: p,
        norm: match norm {
            Norm::Max => TreeNorm::Max,
            Norm::L2 => TreeNorm::L2,
            Norm::L1 => TreeNorm::L1,
        },
        order: load_order(common, space.len())?,
        check: common.check.into(),
    };
    let emb = embed(&space, &params)?;
    let trees: Vec<Value> = emb
        .trees
        .iter()
        .map(|t| {
            json!({
                "color": t.color,
                "virtual_root": t.virtual_root,
                "records": to_json(&t.records()),
                "sets": to_json(&t.sets),
                "images": to_json(&t.images),
            })
        })
        .collect();
    if let Some(prefix) = export {
        for t in &emb.trees {
            let write = |name: String, v: Value| {
                fs::write(&name, crate::output::render(&v))
                    .map_err(|e| Error::Parameter(format!("cannot write {name}: {e}")))
            };
            write(format!("{prefix}tree{}.json", t.color), to_json(&t.records()))?;
            write(format!("{prefix}sample{}.json", t.color), to_json(&distinct_images(&t.tree, &t.images)?))?;
        }
    }
    Ok((
        json!({
            "command": "embed",
            "report": to_json(&emb.report),
            "hierarchy_levels": [emb.hierarchy.j_min(), emb.hierarchy.j_max()],
            "trees": trees,
        }),
        emb.report.certificates.clone(),
    ))
}

/// Images in first-occurrence order with coincident points dropped.
fn distinct_images(tree: &MetricTree, images: &[TreePoint]) -> Result<Vec<TreePoint>> {
    let mut kept: Vec<TreePoint> = Vec::new();
    for p in images {
        let mut fresh = true;
        for q in &kept {
            if tree.distance(p, q)? == 0.0 {
                fresh = false;
                break;
            }
        }
        if fresh {
            kept.push(*p);
        }
    }
    Ok(kept)
}

fn reduce_tree(a: &crate::ReduceTreeArgs) -> Outcome {
    let tree = parse_tree(&read(&a.tree)?)?;
    let sample = parse_sample(&read(&a.sample)?)?;
    let root = TreePoint { node: a.root_node.unwrap_or(tree.root()), offset: a.root_offset };
    let out = tree_reduction(&tree, &sample, root, a.scale, a.c, a.check.into())?;
    let certs = out.certificates.clone();
    Ok((json!({ "command": "reduce-tree", "reduction": to_json(&out) }), certs))
}

fn extend_cmd(a: &crate::ExtendArgs) -> Outcome {
    let space = load_space(&a.common)?.space;
    let subset = parse_subset(&read(&a.subset)?)?;
    let values = parse_values(&read(&a.values)?)?;
    if let Some(dim) = a.dim {
        if let Some((k, v)) = values.iter().find(|(_, v)| v.len() != dim) {
            return Err(Error::Parameter(format!("value at {k} has length {}, expected --dim {dim}", v.len())));
        }
    }
    let base = number_or_auto("base-r", &a.base_r)?;
    let problem = ExtensionProblem::new(space, subset, &values)?;
    let params = WhitneyParams { base, c: a.c, check: a.common.check.into() };
    let structure = build_structure(&problem, &params)?;
    let result = extend(&problem, &structure)?;
    let cert = certify_extension(&problem, &structure, &result);
    let mut certs = structure.certificates.clone();
    certs.extend(cert.certificates.iter().cloned());
    let layers: Vec<Value> = structure
        .layers
        .iter()
        .map(|l| json!({ "i": l.i, "points": l.points.len(), "net": l.net.len(), "cover": l.cover.len(), "multiplicity": l.multiplicity }))
        .collect();
    Ok((
        json!({
            "command": "extend",
            "values": result.values,
            "measured_lip": result.measured_lip,
            "lambda": result.lambda,
            "bound_constant": result.bound_constant,
            "max_ratio": cert.max_ratio,
            "c3": cert.c3,
            "structure": {
                "base": structure.base,
                "c": structure.c,
                "n_plus_one": structure.n_plus_one,
                "layers": layers,
                "net": to_json(&structure.net),
                "bumps": structure.bumps.len(),
                "boundary_ties": structure.boundary_ties,
            },
        }),
        certs,
    ))
}

fn profile(a: &crate::ProfileArgs) -> Outcome {
    let space = load_space(&a.common)?.space;
    let scales = if a.scales.is_empty() {
        let lo = space.min_positive_distance().unwrap_or(1.0);
        let hi = space.diameter().max(lo);
        (0..5).map(|i| lo * (hi / lo).powf(f64::from(i) / 4.0)).collect()
    } else {
        a.scales.clone()
    };
    let mut orders = vec![load_order(&a.common, space.len())?.unwrap_or_else(|| identity_order(space.len()))];
    let mut r = rng(a.seed);
    for _ in 0..a.orders {
        let mut o = identity_order(space.len());
        o.shuffle(&mut r);
        orders.push(o);
    }
    let records = estimate_nagata_profile(&space, &scales, a.max_colors, &orders)?;
    let certs = records
        .iter()
        .map(|rec| Certificate::at_most(format!("colors at s = {:e}", rec.scale), rec.colors as f64, a.max_colors as f64))
        .collect();
    Ok((json!({ "command": "dim-profile", "profile": to_json(&records) }), certs))
}
