//! The emission context: a label stack, a pending statement list and the
//! block tree under construction.
//!
//! Labels follow a prefix structure. The stack starts at `initial`; entering
//! a labeled scope flushes pending instructions into a block under the outer
//! label, pushes the segment, and flushes again under the inner label on the
//! way out. Statically-bounded loops compile their body once into a child
//! node scaled by the trip count; data-dependent control flow has no
//! representation here by design.

use crate::error::{Error, Result};
use crate::tree::{Block, BlockTree, Instruction, ReqChild, ReqNode, TreeChild, LABEL_SEPARATOR, ROOT_LABEL};

pub struct Tracer {
    segments: Vec<String>,
    pending: Vec<Instruction>,
    // node_stack[0] is the root; loops push a fresh node for their body
    node_stack: Vec<ReqNode>,
}

impl Default for Tracer {
    fn default() -> Self {
        Self::new()
    }
}

impl Tracer {
    pub fn new() -> Self {
        Tracer {
            segments: vec![ROOT_LABEL.to_string()],
            pending: Vec::new(),
            node_stack: vec![ReqNode::default()],
        }
    }

    /// The `-`-joined label instructions are currently attributed to.
    pub fn current_label(&self) -> String {
        self.segments.join("-")
    }

    /// Appends an instruction to the pending statement list; it materializes
    /// into a block at the next flush point under the then-current label.
    pub fn emit(&mut self, instruction: Instruction) {
        self.pending.push(instruction);
    }

    fn flush(&mut self) {
        if self.pending.is_empty() {
            return;
        }
        let label = self.current_label();
        let instructions = std::mem::take(&mut self.pending);
        self.node_stack
            .last_mut()
            .expect("tracer always has a root node")
            .blocks
            .push(Block { label, instructions });
    }

    pub(crate) fn enter_label(&mut self, segment: &str) -> Result<()> {
        if segment.is_empty() || segment.contains(LABEL_SEPARATOR) {
            return Err(Error::InvalidLabel(segment.to_string()));
        }
        self.flush();
        self.segments.push(segment.to_string());
        Ok(())
    }

    pub(crate) fn exit_label(&mut self) {
        self.flush();
        self.segments.pop();
        debug_assert!(!self.segments.is_empty(), "label stack underflow");
    }

    /// Runs `body` with `segment` appended to the prefix label.
    pub fn with_label<R>(
        &mut self,
        segment: &str,
        body: impl FnOnce(&mut Self) -> R,
    ) -> Result<R> {
        self.enter_label(segment)?;
        let out = body(self);
        self.exit_label();
        Ok(out)
    }

    pub(crate) fn begin_subtree(&mut self) {
        self.flush();
        self.node_stack.push(ReqNode::default());
    }

    pub(crate) fn take_subtree(&mut self) -> ReqNode {
        self.flush();
        debug_assert!(self.node_stack.len() > 1, "unbalanced subtree");
        self.node_stack.pop().expect("subtree present")
    }

    pub(crate) fn attach_scaled(&mut self, node: ReqNode, factor: u64) {
        self.node_stack
            .last_mut()
            .expect("tracer always has a root node")
            .children
            .push(TreeChild::Scaled(ReqChild { factor, children: vec![node] }));
    }

    /// Compiles `body` once and attaches it scaled by `n`. For `n >= 2` the
    /// body is compiled a second time at a different index and the two
    /// structures must match; a mismatch means the emitted structure depends
    /// on the loop index, which the cost model cannot represent.
    pub fn for_range(
        &mut self,
        n: u64,
        mut body: impl FnMut(&mut Self, u64) -> Result<()>,
    ) -> Result<()> {
        if n == 0 {
            return Ok(());
        }
        self.begin_subtree();
        body(self, 0)?;
        let compiled = self.take_subtree();
        if n >= 2 {
            self.begin_subtree();
            body(self, 1)?;
            let probe = self.take_subtree();
            if probe != compiled {
                return Err(Error::InputDependentLoop);
            }
        }
        self.attach_scaled(compiled, n);
        Ok(())
    }

    /// Flushes trailing statements and returns the finished tree.
    pub fn finish(mut self) -> BlockTree {
        self.flush();
        debug_assert_eq!(self.node_stack.len(), 1, "unbalanced loop compilation");
        BlockTree { root: self.node_stack.pop().expect("root") }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::OpKind;

    #[test]
    fn labels_nest_with_prefixes() {
        let mut tr = Tracer::new();
        tr.with_label("a", |tr| {
            tr.emit(Instruction::muls(1));
            tr.with_label("b", |tr| {
                tr.emit(Instruction::muls(1));
                tr.with_label("c", |tr| {
                    tr.emit(Instruction::muls(1));
                })
                .unwrap();
            })
            .unwrap();
        })
        .unwrap();
        let tree = tr.finish();
        let labels: Vec<_> = tree.root.blocks.iter().map(|b| b.label.clone()).collect();
        assert_eq!(labels, vec!["initial-a", "initial-a-b", "initial-a-b-c"]);
    }

    #[test]
    fn empty_scope_creates_no_block() {
        let mut tr = Tracer::new();
        tr.with_label("a", |_| {}).unwrap();
        let tree = tr.finish();
        assert!(tree.root.blocks.is_empty());
    }

    #[test]
    fn consecutive_emissions_share_a_block() {
        let mut tr = Tracer::new();
        tr.emit(Instruction::muls(1));
        tr.emit(Instruction::reveal(1));
        let tree = tr.finish();
        assert_eq!(tree.root.blocks.len(), 1);
        assert_eq!(tree.root.blocks[0].label, "initial");
        assert_eq!(tree.root.blocks[0].instructions.len(), 2);
    }

    #[test]
    fn emission_before_scope_flushes_under_outer_label() {
        let mut tr = Tracer::new();
        tr.emit(Instruction::muls(1));
        tr.with_label("inner", |tr| tr.emit(Instruction::reveal(1))).unwrap();
        let tree = tr.finish();
        let labels: Vec<_> = tree.root.blocks.iter().map(|b| b.label.clone()).collect();
        assert_eq!(labels, vec!["initial", "initial-inner"]);
    }

    #[test]
    fn separator_in_segment_is_rejected() {
        let mut tr = Tracer::new();
        assert!(matches!(
            tr.with_label("bad-label", |_| {}),
            Err(Error::InvalidLabel(_))
        ));
        assert!(matches!(tr.with_label("", |_| {}), Err(Error::InvalidLabel(_))));
    }

    #[test]
    fn loops_scale_and_validate_structure() {
        let mut tr = Tracer::new();
        tr.for_range(50, |tr, _| {
            tr.emit(Instruction::muls(1));
            Ok(())
        })
        .unwrap();
        let tree = tr.finish();
        match &tree.root.children[0] {
            crate::tree::TreeChild::Scaled(s) => {
                assert_eq!(s.factor, 50);
                assert_eq!(s.children[0].blocks[0].instructions[0].op, OpKind::Muls);
            }
            other => panic!("expected a scaled child, got {other:?}"),
        }
    }

    #[test]
    fn zero_iteration_loop_is_absent() {
        let mut tr = Tracer::new();
        tr.for_range(0, |tr, _| {
            tr.emit(Instruction::muls(1));
            Ok(())
        })
        .unwrap();
        let tree = tr.finish();
        assert!(tree.root.children.is_empty());
        assert!(tree.root.blocks.is_empty());
    }

    #[test]
    fn index_dependent_body_is_rejected() {
        let mut tr = Tracer::new();
        let err = tr.for_range(4, |tr, i| {
            // emits a different structure on the second probe
            tr.emit(Instruction::muls(i + 1));
            Ok(())
        });
        assert!(matches!(err, Err(Error::InputDependentLoop)));
    }
}
