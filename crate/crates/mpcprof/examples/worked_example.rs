//! The smallest end-to-end run: a labeled `test` function calling a labeled
//! `mul` function on secret integers, profiled under a 3-party replicated
//! sharing at k = 64. Prints the per-label cost mapping.

use mpcprof::aggregate::aggregate;
use mpcprof::lowering::AnalysisOptions;
use mpcprof::tree::Instruction;
use mpcprof::{FrameworkRegistry, SecurityParams, Tracer};

pub fn main() -> mpcprof::Result<()> {
    let mut tracer = Tracer::new();
    tracer.with_label("test", |tr| -> mpcprof::Result<()> {
        tr.with_label("mul", |tr| tr.emit(Instruction::muls(1)))?;
        tr.emit(Instruction::reveal(1));
        Ok(())
    })??;
    let tree = tracer.finish();

    let registry = FrameworkRegistry::with_builtins();
    let report = aggregate(
        &tree,
        registry.get("aby3")?,
        &SecurityParams::with_parties(3),
        &AnalysisOptions::default(),
    )?;

    println!("{{");
    for (label, cost) in &report.entries {
        println!("  {label:?}: {cost},");
    }
    println!("}}");
    assert_eq!(report.entries["initial-test"].as_array(), [192, 1, 0, 0]);
    assert_eq!(report.entries["initial-test-mul"].as_array(), [192, 1, 0, 0]);
    Ok(())
}
