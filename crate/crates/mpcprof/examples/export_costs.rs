//! Exporting a cost table for an external computational-graph optimizer:
//! each row maps a parameterized matrix-product signature to its online
//! communication bits under the chosen framework.

use mpcprof::report::export_cost_table;
use mpcprof::{FrameworkRegistry, SecurityParams};

pub fn main() -> mpcprof::Result<()> {
    let registry = FrameworkRegistry::with_builtins();
    let framework = registry.get("deepmpc")?;
    let params = SecurityParams::with_parties(3);

    let mut grid = Vec::new();
    for p in [64, 256, 1024] {
        for q in [64, 576] {
            for r in [64, 256] {
                grid.push((p, q, r));
            }
        }
    }
    let csv = export_cost_table(framework, &params, "matmuls", &grid)?;
    print!("{csv}");
    Ok(())
}
