//! Profiling a model described in a JSON spec file, including a labeled
//! sub-module whose prefix separates its operators in the report.

use mpcprof::aggregate::aggregate;
use mpcprof::lowering::AnalysisOptions;
use mpcprof::model_spec::ModelSpec;
use mpcprof::nn::{trace_model, RunConfig};
use mpcprof::report::{to_table, Grouping, Phase};
use mpcprof::{FrameworkRegistry, Graph, SecurityParams};

const SPEC: &str = r#"{
    "inputs": [{"shape": [3, 32, 32], "from_party": 0}],
    "layers": [
        {"kind": "Labeled", "label": "features", "layers": [
            {"kind": "Conv2d", "in_channels": 3, "out_channels": 16,
             "kernel_size": 3, "padding": 1},
            {"kind": "BatchNorm2d", "num_features": 16},
            {"kind": "ReLU"},
            {"kind": "MaxPool2d", "kernel_size": 2}
        ]},
        {"kind": "Labeled", "label": "classifier", "layers": [
            {"kind": "Flatten"},
            {"kind": "Linear", "in_features": 4096, "out_features": 10},
            {"kind": "Softmax"}
        ]}
    ],
    "loss": "cross_entropy",
    "optimizer": {"kind": "Adam", "lr": 0.001},
    "batch_size": 8
}"#;

pub fn main() -> mpcprof::Result<()> {
    let spec = ModelSpec::from_json(SPEC)?;
    let mut g = Graph::new();
    let model = spec.build(&mut g, true)?;
    trace_model(&mut g, &model, &RunConfig::train(1))?;
    let tree = g.finish();

    let registry = FrameworkRegistry::with_builtins();
    let report = aggregate(
        &tree,
        registry.get("semi2k")?,
        &SecurityParams::with_parties(2),
        &AnalysisOptions::default(),
    )?;
    print!("{}", to_table(&report, Grouping::Label, Phase::Online));
    println!();
    println!("features subtotal   {}", report.query_prefix("initial-features"));
    println!("classifier subtotal {}", report.query_prefix("initial-classifier"));
    Ok(())
}
