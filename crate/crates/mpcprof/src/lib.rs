//! Static communication-cost profiler for secret-shared machine learning.
//!
//! A model's forward, backward and optimizer computation is compiled into a
//! tree of labeled instruction blocks, and per-framework cost formulas are
//! evaluated over that tree to report online/offline communication bits and
//! rounds per model component, without running any secure protocol.
//!
//! The crate is a library first; `examples/` holds one runnable example per
//! capability and `src/bin/mpcprof.rs` is a thin CLI over [`cli`].

pub mod aggregate;
pub mod autograd;
pub mod builtins;
pub mod cli;
pub mod config;
pub mod cost;
pub mod counting;
pub mod dsl;
pub mod error;
pub mod lowering;
pub mod model_spec;
pub mod nn;
pub mod report;
pub mod trace;
pub mod tree;
pub mod zoo;

pub use aggregate::{aggregate, ProfileReport};
pub use autograd::{Graph, GraphOptions, Kind, Tensor};
pub use config::{evaluate_cost, FrameworkConfig, FrameworkRegistry};
pub use cost::{CostTuple, OpExtras, SecurityParams};
pub use error::{Error, Result};
pub use lowering::{AnalysisOptions, RecipeKnobs};
pub use trace::Tracer;
pub use tree::BlockTree;
