//! Command-line interface: `profile`, `config`, `list` and `export`.
//!
//! Exit codes: 0 on success, 2 for validation failures, 3 for unknown
//! frameworks, models or operations.

use crate::aggregate::{aggregate, ProfileReport};
use crate::autograd::{Graph, GraphOptions};
use crate::config::{FrameworkConfig, FrameworkRegistry};
use crate::cost::{ConvDims, OpExtras, SecurityParams};
use crate::error::{Error, Result};
use crate::lowering::{AnalysisOptions, RecipeKnobs};
use crate::model_spec::ModelSpec;
use crate::nn::{trace_model, Mode, Model, Optimizer, RunConfig};
use crate::report::{self, comparison_to_table, group_report, Grouping, Phase};
use crate::tree::BlockTree;
use crate::zoo;
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "mpcprof",
    about = "Static communication-cost profiler for secret-shared machine learning",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Profile a model under one or more frameworks.
    Profile(ProfileArgs),
    /// Validate a framework configuration file.
    Config { path: PathBuf },
    /// List built-in models and frameworks.
    List,
    /// Export a cost table over a grid of operation dimensions.
    Export(ExportArgs),
}

#[derive(Args)]
struct ProfileArgs {
    /// Framework name(s), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    framework: Vec<String>,
    /// Zoo model name or path to a model spec file.
    #[arg(long)]
    model: String,
    #[arg(long, default_value = "inference")]
    mode: String,
    /// Ring bit length k.
    #[arg(long, default_value_t = 64)]
    bitlen: u64,
    /// Fractional bit length f.
    #[arg(long, default_value_t = 16)]
    frac: u64,
    /// Statistical security parameter.
    #[arg(long = "sec-stat", default_value_t = 40)]
    sec_stat: u64,
    /// Computational security parameter.
    #[arg(long = "sec-comp", default_value_t = 128)]
    sec_comp: u64,
    /// Party count; defaults to each framework's own.
    #[arg(long)]
    parties: Option<u64>,
    #[arg(long, default_value_t = 1)]
    batches: u64,
    #[arg(long = "batch-size")]
    batch_size: Option<u64>,
    /// Phase columns in table output: online, offline or both.
    #[arg(long, default_value = "both")]
    phase: String,
    /// Row grouping: label, operator or fb.
    #[arg(long, default_value = "label")]
    group: String,
    /// Output format: table, csv or json.
    #[arg(long, default_value = "table")]
    format: String,
    /// Output path; multi-framework runs insert the framework name.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Additional framework configuration files to register.
    #[arg(long = "config")]
    configs: Vec<PathBuf>,
    /// Optimizer override for training runs (sgd or adam).
    #[arg(long)]
    optimizer: Option<String>,
    #[arg(long)]
    lr: Option<f64>,
    /// Use the unfused broadcast backward (comparison only).
    #[arg(long)]
    strawman_broadcast: bool,
    /// Emit grouped convolutions sequentially.
    #[arg(long)]
    sequential_groups: bool,
    /// Local-compute price for the ciphertext-count search.
    #[arg(long)]
    lp: Option<f64>,
    /// Bandwidth price for the ciphertext-count search.
    #[arg(long)]
    bp: Option<f64>,
    /// HE polynomial degree override.
    #[arg(long = "he-deg")]
    he_deg: Option<u64>,
    /// HE modulus bit widths override, comma separated.
    #[arg(long = "he-mod", value_delimiter = ',')]
    he_mod: Option<Vec<u64>>,
    /// Iterations of the exponential recipe.
    #[arg(long = "exp-iters")]
    exp_iters: Option<u32>,
    /// Newton iterations of the reciprocal recipe.
    #[arg(long = "recip-iters")]
    recip_iters: Option<u32>,
    /// Newton iterations of the inverse-square-root recipe.
    #[arg(long = "invsqrt-iters")]
    invsqrt_iters: Option<u32>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    framework: String,
    #[arg(long, default_value = "matmuls")]
    op: String,
    /// Dimension grid, e.g. "2,3,4;8,8,8".
    #[arg(long, default_value = "")]
    grid: String,
    #[arg(long, default_value_t = 64)]
    bitlen: u64,
    #[arg(long, default_value_t = 16)]
    frac: u64,
    #[arg(long = "sec-stat", default_value_t = 40)]
    sec_stat: u64,
    #[arg(long = "sec-comp", default_value_t = 128)]
    sec_comp: u64,
    #[arg(long)]
    parties: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Entry point used by the binary.
pub fn main_entry() -> i32 {
    run_from(std::env::args())
}

/// Parses the given arguments and runs the command; returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Profile(args) => run_profile(&args),
        Command::Config { path } => run_config(&path),
        Command::List => run_list(),
        Command::Export(args) => run_export(&args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn build_registry(configs: &[PathBuf]) -> Result<FrameworkRegistry> {
    let mut registry = FrameworkRegistry::with_builtins();
    for path in configs {
        let config = FrameworkConfig::load_path(path)?;
        registry.register(config, true)?;
    }
    Ok(registry)
}

/// Compiles the requested model once; the tree is framework-independent.
fn compile_tree(args: &ProfileArgs) -> Result<BlockTree> {
    let options = GraphOptions {
        strawman_broadcast: args.strawman_broadcast,
        sequential_groups: args.sequential_groups,
    };
    if args.model == "demo" {
        let mut tracer = crate::trace::Tracer::new();
        zoo::trace_demo(&mut tracer)?;
        return Ok(tracer.finish());
    }
    let mode = match args.mode.as_str() {
        "inference" => Mode::Inference,
        "train" => Mode::Train,
        other => return Err(Error::Request(format!("unknown mode `{other}`"))),
    };
    let mut g = Graph::with_options(options);
    let model: Model = if zoo::is_known(&args.model) {
        zoo::build(&mut g, &args.model, mode == Mode::Train)?
    } else if Path::new(&args.model).exists() {
        ModelSpec::from_path(Path::new(&args.model))?.build(&mut g, mode == Mode::Train)?
    } else {
        return Err(Error::UnknownModel(args.model.clone()));
    };
    let optimizer = match args.optimizer.as_deref() {
        None => None,
        Some("sgd") => Some(Optimizer::sgd(args.lr.unwrap_or(0.01))),
        Some("adam") => Some(Optimizer::adam(args.lr.unwrap_or(0.001))),
        Some(other) => return Err(Error::Request(format!("unknown optimizer `{other}`"))),
    };
    let run = RunConfig {
        mode,
        batches: args.batches,
        batch_size: args.batch_size,
        optimizer,
    };
    trace_model(&mut g, &model, &run)?;
    Ok(g.finish())
}

fn analysis_options(args: &ProfileArgs) -> AnalysisOptions {
    let defaults = RecipeKnobs::default();
    AnalysisOptions {
        knobs: RecipeKnobs {
            exp_iterations: args.exp_iters.unwrap_or(defaults.exp_iterations),
            reciprocal_iterations: args.recip_iters.unwrap_or(defaults.reciprocal_iterations),
            inv_sqrt_iterations: args.invsqrt_iters.unwrap_or(defaults.inv_sqrt_iterations),
        },
        lp: args.lp,
        bp: args.bp,
        deg: args.he_deg,
        modulus: args.he_mod.clone(),
    }
}

fn out_path_for(base: &Path, framework: &str, multi: bool) -> PathBuf {
    if !multi {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    let ext = base.extension().and_then(|s| s.to_str());
    let name = match ext {
        Some(ext) => format!("{stem}.{framework}.{ext}"),
        None => format!("{stem}.{framework}"),
    };
    base.with_file_name(name)
}

fn render(report: &ProfileReport, grouping: Grouping, phase: Phase, format: &str) -> Result<String> {
    // machine formats carry the full four-component schema; grouping applies
    // to the entry keys, phase only to the human table
    let grouped_report = ProfileReport {
        framework: report.framework.clone(),
        params: report.params,
        entries: group_report(report, grouping),
        fingerprint: report.fingerprint.clone(),
    };
    match format {
        "table" => Ok(report::to_table(report, grouping, phase)),
        "json" => Ok(report::to_json(&grouped_report)),
        "csv" => Ok(report::to_csv(&grouped_report)),
        other => Err(Error::Request(format!("unknown format `{other}`"))),
    }
}

fn run_profile(args: &ProfileArgs) -> Result<()> {
    let registry = build_registry(&args.configs)?;
    let grouping = Grouping::parse(&args.group)?;
    let phase = Phase::parse(&args.phase)?;
    if !["table", "json", "csv"].contains(&args.format.as_str()) {
        return Err(Error::Request(format!("unknown format `{}`", args.format)));
    }
    let tree = compile_tree(args)?;
    let options = analysis_options(args);
    let multi = args.framework.len() > 1;
    let mut reports = Vec::new();
    for name in &args.framework {
        let framework = registry.get(name)?;
        let parties = args.parties.unwrap_or_else(|| framework.parties.default_parties());
        let params =
            SecurityParams::new(args.bitlen, args.sec_stat, args.sec_comp, args.frac, parties)?;
        let report = aggregate(&tree, framework, &params, &options)?;
        let rendered = render(&report, grouping, phase, &args.format)?;
        match &args.out {
            Some(base) => {
                std::fs::write(out_path_for(base, &framework.name, multi), rendered)?
            }
            None => print!("{rendered}"),
        }
        reports.push(report);
    }
    if multi && args.format == "table" && args.out.is_none() {
        let table = crate::report::compare_frameworks(&reports)?;
        println!("\n# online share per operator\n{}", comparison_to_table(&table));
    }
    Ok(())
}

fn run_config(path: &Path) -> Result<()> {
    let config = FrameworkConfig::load_path(path)?;
    config.validate()?;
    smoke_evaluate(&config)?;
    println!(
        "ok: framework `{}` with {} operations",
        config.name,
        config.formulas.len()
    );
    Ok(())
}

/// Evaluates every declared formula once at representative parameters so
/// config mistakes (negative costs, missing extras) surface immediately.
fn smoke_evaluate(config: &FrameworkConfig) -> Result<()> {
    let m = config.parties.default_parties();
    let params = SecurityParams::with_parties(m);
    let extras = OpExtras {
        size: Some(2),
        p: Some(2),
        q: Some(3),
        r: Some(4),
        deg: config.he_deg.or(Some(8192)),
        modulus: config.he_modulus.clone().or_else(|| Some(vec![59, 55, 49, 49])),
        knownmsb: Some(false),
        conv: Some(ConvDims {
            batch: 1,
            in_channel: 3,
            out_channel: 8,
            inw: 8,
            inh: 8,
            outw: 8,
            outh: 8,
            kw: 3,
            kh: 3,
        }),
        lp: None,
        bp: None,
    };
    for op in config.declared_ops().map(str::to_owned).collect::<Vec<_>>() {
        config.evaluate(&op, &params, &extras)?;
    }
    Ok(())
}

fn run_list() -> Result<()> {
    let registry = FrameworkRegistry::with_builtins();
    println!("models:");
    for name in zoo::NAMES {
        println!("  {name}");
    }
    println!("frameworks:");
    for name in registry.names() {
        println!("  {name}");
    }
    Ok(())
}

fn parse_grid(text: &str) -> Result<Vec<(u64, u64, u64)>> {
    let mut grid = Vec::new();
    for triple in text.split(';').filter(|t| !t.trim().is_empty()) {
        let dims: Vec<&str> = triple.split(',').collect();
        if dims.len() != 3 {
            return Err(Error::Request(format!("bad grid entry `{triple}`")));
        }
        let parse = |s: &str| -> Result<u64> {
            s.trim()
                .parse()
                .map_err(|_| Error::Request(format!("bad grid number `{s}`")))
        };
        grid.push((parse(dims[0])?, parse(dims[1])?, parse(dims[2])?));
    }
    Ok(grid)
}

fn run_export(args: &ExportArgs) -> Result<()> {
    let registry = FrameworkRegistry::with_builtins();
    let framework = registry.get(&args.framework)?;
    let parties = args.parties.unwrap_or_else(|| framework.parties.default_parties());
    let params =
        SecurityParams::new(args.bitlen, args.sec_stat, args.sec_comp, args.frac, parties)?;
    let grid = parse_grid(&args.grid)?;
    let csv = report::export_cost_table(framework, &params, &args.op, &grid)?;
    match &args.out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("").unwrap(), vec![]);
        assert_eq!(parse_grid("2,3,4").unwrap(), vec![(2, 3, 4)]);
        assert_eq!(
            parse_grid("2,3,4;8, 8, 8").unwrap(),
            vec![(2, 3, 4), (8, 8, 8)]
        );
        assert!(parse_grid("2,3").is_err());
        assert!(parse_grid("a,b,c").is_err());
    }

    #[test]
    fn out_paths_gain_framework_names_when_multi() {
        let base = PathBuf::from("/tmp/report.json");
        assert_eq!(out_path_for(&base, "aby3", false), base);
        assert_eq!(
            out_path_for(&base, "aby3", true),
            PathBuf::from("/tmp/report.aby3.json")
        );
    }
}
