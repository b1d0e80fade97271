//! Direct use of the emission layer: labels, raw instructions and
//! statically-bounded loops, plus prefix queries over the result.

use mpcprof::aggregate::aggregate;
use mpcprof::lowering::AnalysisOptions;
use mpcprof::tree::Instruction;
use mpcprof::{FrameworkRegistry, SecurityParams, Tracer};

pub fn main() -> mpcprof::Result<()> {
    let mut tracer = Tracer::new();

    // an epoch of fifty identical steps: the body compiles once and its
    // costs are scaled by the trip count
    tracer.for_range(50, |tr, _i| {
        tr.with_label("step", |tr| {
            tr.with_label("score", |tr| {
                tr.emit(Instruction::matmuls(1, 16, 1, 1));
                tr.emit(Instruction::trunc_pr(1, false));
            })?;
            tr.emit(Instruction::ltz(1));
            Ok(())
        })?
    })?;
    tracer.emit(Instruction::reveal(1));

    let tree = tracer.finish();
    let registry = FrameworkRegistry::with_builtins();
    let report = aggregate(
        &tree,
        registry.get("aby3")?,
        &SecurityParams::with_parties(3),
        &AnalysisOptions::default(),
    )?;

    for (label, cost) in &report.entries {
        println!("{label:32} {cost}");
    }
    println!();
    println!("whole program   {}", report.query_prefix("initial"));
    println!("inside step     {}", report.query_prefix("initial-step"));
    println!("score only      {}", report.query_prefix("initial-step-score"));
    Ok(())
}
