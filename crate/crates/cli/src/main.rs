//! `nagata`: coverings, hierarchies, tree embeddings, tree reductions and
//! Lipschitz extensions of finite metric spaces, with certified reports.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nagata_core::covering::CheckMode;
use nagata_core::Error;
use serde::Serialize;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "nagata", version, about = "Certified coverings and embeddings of finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Check the metric axioms of a space file.
    Validate(ValidateArgs),
    /// Colored ball covering at one scale.
    Cover(CoverArgs),
    /// Hierarchical covering with its four-property audit.
    Hierarchy(HierarchyArgs),
    /// Snowflake embedding into a product of metric trees.
    Embed(EmbedArgs),
    /// Multiplicity-2 covering of a sample of a metric tree.
    ReduceTree(ReduceTreeArgs),
    /// Lipschitz extension of vector values from a subset.
    Extend(ExtendArgs),
    /// Colors and diameter constants of ball coverings over several scales.
    DimProfile(ProfileArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Check {
    Exact,
    Ball,
    Auto,
}

impl From<Check> for CheckMode {
    fn from(c: Check) -> Self {
        match c {
            Check::Exact => CheckMode::Exact,
            Check::Ball => CheckMode::Ball,
            Check::Auto => CheckMode::Auto,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Norm {
    Max,
    L2,
    L1,
}

#[derive(Args, Debug, Serialize)]
struct Common {
    /// Space file: {"metric":"matrix","d":[[..]]} or {"metric":"euclidean","points":[[..]]}.
    #[arg(long, alias = "space")]
    input: PathBuf,
    /// Report path; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    check: Check,
    /// Order in which points are offered to nets: `index` or a JSON array file.
    #[arg(long)]
    order: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Serialize)]
struct CoverArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    scale: f64,
}

#[derive(Args, Debug, Serialize)]
struct HierarchyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "cprime", alias = "c-prime", default_value_t = 2.0)]
    c_prime: f64,
    /// Base r; defaults to 5c'+6.
    #[arg(long = "base-r", alias = "base")]
    base: Option<f64>,
    /// `auto` or an explicit level range `min:max`.
    #[arg(long, default_value = "auto")]
    levels: String,
}

#[derive(Args, Debug, Serialize)]
struct EmbedArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "cprime", alias = "c-prime", default_value_t = 2.0)]
    c_prime: f64,
    /// Base r; defaults to 2c+2 with c = 5c'+4.
    #[arg(long = "base-r", alias = "base")]
    base: Option<f64>,
    /// Snowflake exponent: `auto` (min(0.99 log 2 / log(2+c), 1/2)) or a number.
    #[arg(long, alias = "p", default_value = "auto")]
    exponent: String,
    #[arg(long, value_enum, default_value = "max")]
    norm: Norm,
    /// Writes `<prefix>tree<k>.json` and `<prefix>sample<k>.json` (distinct images) for every color.
    #[arg(long)]
    export_prefix: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct ReduceTreeArgs {
    /// Tree file: array of {node, parent, offset, length}.
    #[arg(long)]
    tree: PathBuf,
    /// Sample file: array of {node, offset}.
    #[arg(long)]
    sample: PathBuf,
    #[arg(long)]
    scale: f64,
    #[arg(long)]
    c: f64,
    /// Root node; the tree's own root when omitted.
    #[arg(long)]
    root_node: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    root_offset: f64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    check: Check,
}

#[derive(Args, Debug, Serialize)]
struct ExtendArgs {
    #[command(flatten)]
    common: Common,
    /// JSON array of the indices of Z.
    #[arg(long)]
    subset: PathBuf,
    /// JSON object from point index to value vector.
    #[arg(long)]
    values: PathBuf,
    /// `auto` or a number.
    #[arg(long, default_value = "auto")]
    base_r: String,
    /// Diameter constant of the layer coverings.
    #[arg(long, default_value_t = 2.0)]
    c: f64,
    /// Expected length of every value vector.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct ProfileArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated scales; five geometric steps from the smallest distance to the diameter by default.
    #[arg(long, value_delimiter = ',')]
    scales: Vec<f64>,
    /// Number of random net orders tried besides the identity.
    #[arg(long, default_value_t = 0)]
    orders: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    max_colors: usize,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::Certification(_) | Error::Construction(_) | Error::Invariant(_) => 1,
        Error::Structural(_) | Error::Parameter(_) | Error::Contract(_) | Error::Capacity { .. } => 3,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Structural(_) => "structural",
        Error::Parameter(_) => "parameter",
        Error::Capacity { .. } => "capacity",
        Error::Contract(_) => "contract",
        Error::Construction(_) => "construction",
        Error::Certification(_) => "certification",
        Error::Invariant(_) => "invariant",
        Error::Parse(_) => "parse",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo = serde_json::to_value(&cli.command).expect("arguments serialize");
    match commands::run(&cli.command) {
        Ok((report, passed)) => {
            let mut report = report;
            report["params"] = echo;
            report["version"] = json!(env!("CARGO_PKG_VERSION"));
            report["passed"] = json!(passed);
            let text = output::render(&report);
            if let Err(e) = commands::emit(commands::output_path(&cli.command), &text) {
                eprintln!("{}", output::render(&json!({"error": "io", "message": e.to_string()})));
                return ExitCode::from(2);
            }
            ExitCode::from(if passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("{}", output::render(&json!({"error": error_kind(&e), "message": e.to_string(), "params": echo})));
            ExitCode::from(exit_code(&e))
        }
    }
}
