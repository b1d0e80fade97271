//! Per-operator and forward/backward breakdowns of a transformer encoder
//! block, the kind of query used to find which operator to replace when
//! hunting communication bottlenecks.

use mpcprof::aggregate::aggregate;
use mpcprof::lowering::AnalysisOptions;
use mpcprof::nn::{trace_model, RunConfig};
use mpcprof::report::{group_report, Grouping};
use mpcprof::{zoo, FrameworkRegistry, Graph, SecurityParams};

pub fn main() -> mpcprof::Result<()> {
    let mut g = Graph::new();
    let model = zoo::build(&mut g, "transformer-block", true)?;
    trace_model(&mut g, &model, &RunConfig::train(1))?;
    let tree = g.finish();

    let registry = FrameworkRegistry::with_builtins();
    let report = aggregate(
        &tree,
        registry.get("crypten")?,
        &SecurityParams::with_parties(2),
        &AnalysisOptions::default(),
    )?;

    println!("-- by operator (online bits) --");
    let mut rows: Vec<_> = group_report(&report, Grouping::Operator).into_iter().collect();
    rows.sort_by(|a, b| b.1.online_bits.cmp(&a.1.online_bits));
    let total = report.total().online_bits as f64;
    for (op, cost) in rows {
        println!(
            "{op:14} {:>16} bits  {:>6.2}%",
            cost.online_bits,
            100.0 * cost.online_bits as f64 / total
        );
    }

    println!();
    println!("-- forward vs backward --");
    for (phase, cost) in group_report(&report, Grouping::ForwardBackward) {
        println!("{phase:10} {cost}");
    }

    println!();
    println!("gelu alone: forward {}", report.query_prefix("initial-gelu-forward"));
    println!("gelu alone: backward {}", report.query_prefix("initial-gelu-backward"));
    Ok(())
}
