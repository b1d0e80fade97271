//! Choosing an optimizer for secure training: the same LeNet training step
//! under SGD and Adam, on a dishonest-majority 2-party protocol (where the
//! optimizer is almost free) and a replicated 3-party protocol (where Adam's
//! elementwise pipeline dominates).

use mpcprof::aggregate::aggregate;
use mpcprof::lowering::AnalysisOptions;
use mpcprof::nn::{trace_model, Mode, Optimizer, RunConfig};
use mpcprof::{zoo, FrameworkRegistry, Graph, SecurityParams};

pub fn main() -> mpcprof::Result<()> {
    let registry = FrameworkRegistry::with_builtins();
    println!(
        "{:10} {:6} {:>18} {:>18} {:>8}",
        "framework", "optim", "grad bits", "optimizer bits", "share"
    );
    for (fw, parties) in [("aby", 2u64), ("aby3", 3)] {
        for (name, optimizer) in [
            ("sgd", Optimizer::sgd(0.01)),
            ("adam", Optimizer::adam(0.001)),
        ] {
            let mut g = Graph::new();
            let model = zoo::build(&mut g, "lenet", true)?;
            trace_model(
                &mut g,
                &model,
                &RunConfig {
                    mode: Mode::Train,
                    batches: 1,
                    batch_size: Some(128),
                    optimizer: Some(optimizer),
                },
            )?;
            let report = aggregate(
                &g.finish(),
                registry.get(fw)?,
                &SecurityParams::with_parties(parties),
                &AnalysisOptions::default(),
            )?;
            let optimizer_bits = report.query_prefix("initial-optimizer").online_bits;
            let total = report.total().online_bits;
            println!(
                "{fw:10} {name:6} {:>18} {optimizer_bits:>18} {:>7.2}%",
                total - optimizer_bits,
                100.0 * optimizer_bits as f64 / total as f64
            );
        }
    }
    Ok(())
}
