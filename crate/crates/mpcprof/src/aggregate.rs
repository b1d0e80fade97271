//! Block-tree analysis: walking the labeled tree and summing per-label costs.
//!
//! A `ReqNode` adds the cost of every communicating instruction in its blocks
//! to the entry keyed by the block label, then recurses into its children. A
//! scaled child aggregates its children into a scratch map, multiplies each
//! entry by its loop factor and merges the result upward.

use crate::config::FrameworkConfig;
use crate::cost::{CostTuple, SecurityParams};
use crate::error::Result;
use crate::lowering::{instruction_cost, AnalysisOptions};
use crate::tree::{BlockTree, ReqChild, ReqNode, TreeChild};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

pub type Entries = IndexMap<String, CostTuple>;

/// Per-label communication costs for one framework and parameter set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub framework: String,
    pub params: SecurityParams,
    pub entries: Entries,
    /// Structural hash of the profiled program; not part of the wire format.
    #[serde(skip)]
    pub fingerprint: String,
}

impl ProfileReport {
    /// Whole-program total, equal to `query_prefix("initial")`.
    pub fn total(&self) -> CostTuple {
        self.entries.values().fold(CostTuple::ZERO, |acc, v| acc + *v)
    }

    /// Component-wise sum over entries whose label starts with `prefix` on a
    /// whole segment boundary; an empty match is the zero tuple.
    pub fn query_prefix(&self, prefix: &str) -> CostTuple {
        self.entries
            .iter()
            .filter(|(label, _)| label_has_prefix(label, prefix))
            .fold(CostTuple::ZERO, |acc, (_, v)| acc + *v)
    }
}

/// Segment-aligned prefix test: `initial-exp` matches `initial-exp-forward`
/// but not `initial-expanded`.
pub fn label_has_prefix(label: &str, prefix: &str) -> bool {
    label == prefix
        || (label.len() > prefix.len()
            && label.starts_with(prefix)
            && label.as_bytes()[prefix.len()] == b'-')
}

fn add_entry(entries: &mut Entries, label: &str, cost: CostTuple) {
    if let Some(existing) = entries.get_mut(label) {
        *existing += cost;
    } else {
        entries.insert(label.to_string(), cost);
    }
}

fn aggregate_node(
    node: &ReqNode,
    framework: &FrameworkConfig,
    params: &SecurityParams,
    options: &AnalysisOptions,
    entries: &mut Entries,
) -> Result<()> {
    for block in &node.blocks {
        for instruction in &block.instructions {
            if !instruction.requires_communication {
                continue;
            }
            let cost = instruction_cost(instruction, framework, params, options)?;
            add_entry(entries, &block.label, cost);
        }
    }
    for child in &node.children {
        match child {
            TreeChild::Node(n) => aggregate_node(n, framework, params, options, entries)?,
            TreeChild::Scaled(s) => aggregate_scaled(s, framework, params, options, entries)?,
        }
    }
    Ok(())
}

fn aggregate_scaled(
    child: &ReqChild,
    framework: &FrameworkConfig,
    params: &SecurityParams,
    options: &AnalysisOptions,
    entries: &mut Entries,
) -> Result<()> {
    let mut scratch = Entries::new();
    for node in &child.children {
        aggregate_node(node, framework, params, options, &mut scratch)?;
    }
    for (label, cost) in scratch {
        add_entry(entries, &label, cost.scale(child.factor));
    }
    Ok(())
}

/// Analyzes a finished tree under one framework and parameter set.
pub fn aggregate(
    tree: &BlockTree,
    framework: &FrameworkConfig,
    params: &SecurityParams,
    options: &AnalysisOptions,
) -> Result<ProfileReport> {
    framework.check_params(params)?;
    let mut entries = Entries::new();
    aggregate_node(&tree.root, framework, params, options, &mut entries)?;
    Ok(ProfileReport {
        framework: framework.name.clone(),
        params: *params,
        entries,
        fingerprint: tree.fingerprint(),
    })
}
