//! The broadcast-multiplication backward pass, fused versus unfused. The
//! unfused variant materializes an output-sized intermediate before the
//! reduction; on frameworks whose costs track result sizes, fusing the dot
//! products saves exactly the reduction factor.

use mpcprof::aggregate::aggregate;
use mpcprof::lowering::AnalysisOptions;
use mpcprof::{FrameworkRegistry, Graph, GraphOptions, SecurityParams};

fn backward_bits(small: &[u64], big: &[u64], strawman: bool) -> mpcprof::Result<u64> {
    let mut g = Graph::with_options(GraphOptions {
        strawman_broadcast: strawman,
        ..Default::default()
    });
    let a = g.param(small);
    let b = g.input(big, 0)?;
    let c = g.mul(a, b)?;
    let loss = g.mean_all(c)?;
    g.backward(loss)?;
    let registry = FrameworkRegistry::with_builtins();
    let report = aggregate(
        &g.finish(),
        registry.get("aby3")?,
        &SecurityParams::with_parties(3),
        &AnalysisOptions::default(),
    )?;
    Ok(report.query_prefix("initial-mul-backward").online_bits)
}

pub fn main() -> mpcprof::Result<()> {
    println!("{:>16} {:>16} {:>10} {:>10} {:>6}", "grad of", "against", "fused", "unfused", "ratio");
    for (small, big) in [
        (vec![1, 2], vec![2, 2]),
        (vec![3, 2], vec![5, 3, 2]),
        (vec![1, 128], vec![64, 128]),
        (vec![16, 16], vec![16, 16]), // no reduction: identical paths
    ] {
        let fused = backward_bits(&small, &big, false)?;
        let unfused = backward_bits(&small, &big, true)?;
        println!(
            "{:>16} {:>16} {fused:>10} {unfused:>10} {:>6.2}",
            format!("{small:?}"),
            format!("{big:?}"),
            unfused as f64 / fused as f64
        );
    }
    Ok(())
}
