//! Where do the communication bottlenecks sit under different security
//! models? Profiles one ResNet-18 inference under four frameworks spanning
//! dishonest/honest majority and semi-honest/malicious adversaries, then
//! prints each operator's share of the online communication.

use mpcprof::aggregate::aggregate;
use mpcprof::lowering::AnalysisOptions;
use mpcprof::nn::{trace_model, RunConfig};
use mpcprof::report::{compare_frameworks, comparison_to_table};
use mpcprof::{zoo, FrameworkRegistry, Graph, SecurityParams};

pub fn main() -> mpcprof::Result<()> {
    // compile once; the tree does not depend on the framework
    let mut g = Graph::new();
    let model = zoo::build(&mut g, "resnet18", false)?;
    trace_model(&mut g, &model, &RunConfig::inference())?;
    let tree = g.finish();

    let registry = FrameworkRegistry::with_builtins();
    let mut reports = Vec::new();
    for (name, parties) in [("aby", 2), ("spdz2k", 2), ("aby3", 3), ("falcon", 3)] {
        let report = aggregate(
            &tree,
            registry.get(name)?,
            &SecurityParams::with_parties(parties),
            &AnalysisOptions::default(),
        )?;
        println!(
            "{name:8} total online: {:>16} bits, {:>4} rounds",
            report.total().online_bits,
            report.total().online_rounds
        );
        reports.push(report);
    }

    println!();
    let table = compare_frameworks(&reports)?;
    print!("{}", comparison_to_table(&table));
    println!();
    println!("dishonest-majority columns concentrate on conv2d/linear;");
    println!("honest-majority columns shift the weight onto relu/maxpool.");
    Ok(())
}
