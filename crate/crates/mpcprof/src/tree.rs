//! The labeled instruction-block tree.
//!
//! A program compiles into a tree of two node kinds: `ReqNode` holds labeled
//! instruction blocks plus children, and `ReqChild` scales the costs of its
//! child nodes by a loop factor. The root is always a `ReqNode`.

use crate::cost::{ConvDims, OpExtras};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

pub const ROOT_LABEL: &str = "initial";
pub const LABEL_SEPARATOR: char = '-';

/// Instruction opcodes the lowering layer emits. Basic ops map one-to-one to
/// framework formulas; the remaining ops resolve per framework, either to a
/// declared formula or to a default composition of basic ops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpKind {
    Share,
    Reveal,
    Muls,
    Matmuls,
    TruncPr,
    Ltz,
    Conv2d,
    Exp,
    Reciprocal,
    InvSqrt,
    Div,
}

impl OpKind {
    pub fn name(&self) -> &'static str {
        match self {
            OpKind::Share => "share",
            OpKind::Reveal => "reveal",
            OpKind::Muls => "muls",
            OpKind::Matmuls => "matmuls",
            OpKind::TruncPr => "TruncPr",
            OpKind::Ltz => "LTZ",
            OpKind::Conv2d => "conv2d",
            OpKind::Exp => "exp",
            OpKind::Reciprocal => "reciprocal",
            OpKind::InvSqrt => "inv_sqrt",
            OpKind::Div => "div",
        }
    }

    /// Framework op names that satisfy this instruction directly, in
    /// preference order.
    pub fn direct_candidates(&self) -> &'static [&'static str] {
        match self {
            OpKind::Share => &["share"],
            OpKind::Reveal => &["reveal"],
            OpKind::Muls => &["muls"],
            OpKind::Matmuls => &["matmuls"],
            OpKind::TruncPr => &["TruncPr"],
            OpKind::Ltz => &["LTZ"],
            OpKind::Conv2d => &["conv2d"],
            OpKind::Exp => &["exp", "exp_fx", "Pow2"],
            OpKind::Reciprocal => &["reciprocal", "Reciprocal"],
            OpKind::InvSqrt => &["inv_sqrt", "InvSqrt"],
            OpKind::Div => &["div"],
        }
    }

    /// Ops with a default composition when the framework declares nothing.
    pub fn has_default_composition(&self) -> bool {
        matches!(
            self,
            OpKind::Conv2d | OpKind::Exp | OpKind::Reciprocal | OpKind::InvSqrt | OpKind::Div
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub op: OpKind,
    pub extras: OpExtras,
    pub requires_communication: bool,
}

impl Instruction {
    pub fn new(op: OpKind, extras: OpExtras) -> Self {
        Instruction { op, extras, requires_communication: true }
    }

    pub fn share(n: u64) -> Self {
        Instruction::new(OpKind::Share, OpExtras::size(n))
    }

    pub fn reveal(n: u64) -> Self {
        Instruction::new(OpKind::Reveal, OpExtras::size(n))
    }

    pub fn muls(n: u64) -> Self {
        Instruction::new(OpKind::Muls, OpExtras::size(n))
    }

    pub fn trunc_pr(n: u64, knownmsb: bool) -> Self {
        Instruction::new(OpKind::TruncPr, OpExtras::size(n).with_knownmsb(knownmsb))
    }

    pub fn ltz(n: u64) -> Self {
        Instruction::new(OpKind::Ltz, OpExtras::size(n))
    }

    pub fn matmuls(p: u64, q: u64, r: u64, parallel: u64) -> Self {
        Instruction::new(OpKind::Matmuls, OpExtras::matmul(p, q, r).with_size(parallel))
    }

    pub fn conv2d(dims: ConvDims, parallel: u64) -> Self {
        Instruction::new(
            OpKind::Conv2d,
            OpExtras::default().with_conv(dims).with_size(parallel),
        )
    }

    pub fn exp(n: u64) -> Self {
        Instruction::new(OpKind::Exp, OpExtras::size(n))
    }

    pub fn reciprocal(n: u64) -> Self {
        Instruction::new(OpKind::Reciprocal, OpExtras::size(n))
    }

    pub fn inv_sqrt(n: u64) -> Self {
        Instruction::new(OpKind::InvSqrt, OpExtras::size(n))
    }

    pub fn div(n: u64) -> Self {
        Instruction::new(OpKind::Div, OpExtras::size(n))
    }

    pub fn local(mut self) -> Self {
        self.requires_communication = false;
        self
    }
}

/// A straight-line run of instructions under one prefix label.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub label: String,
    pub instructions: Vec<Instruction>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeChild {
    Node(ReqNode),
    Scaled(ReqChild),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReqNode {
    pub blocks: Vec<Block>,
    pub children: Vec<TreeChild>,
}

/// Control-flow scaler: the costs aggregated from `children` are multiplied
/// by `factor` (a loop's trip count) before merging into the parent.
#[derive(Clone, Debug, PartialEq)]
pub struct ReqChild {
    pub factor: u64,
    pub children: Vec<ReqNode>,
}

/// A finalized compilation result.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockTree {
    pub root: ReqNode,
}

impl BlockTree {
    /// Content hash of the tree structure; two traces of the same program
    /// have equal fingerprints regardless of the target framework.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        let mut buf = String::new();
        write_node(&mut buf, &self.root);
        hasher.update(buf.as_bytes());
        let digest = hasher.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            let _ = write!(out, "{byte:02x}");
        }
        out
    }

    pub fn instruction_count(&self) -> usize {
        fn count(node: &ReqNode) -> usize {
            node.blocks.iter().map(|b| b.instructions.len()).sum::<usize>()
                + node
                    .children
                    .iter()
                    .map(|c| match c {
                        TreeChild::Node(n) => count(n),
                        TreeChild::Scaled(s) => s.children.iter().map(count).sum(),
                    })
                    .sum::<usize>()
        }
        count(&self.root)
    }
}

fn write_extras(buf: &mut String, e: &OpExtras) {
    let _ = write!(
        buf,
        "s{:?}p{:?}q{:?}r{:?}d{:?}km{:?}",
        e.size, e.p, e.q, e.r, e.deg, e.knownmsb
    );
    if let Some(m) = &e.modulus {
        let _ = write!(buf, "m{m:?}");
    }
    if let Some(c) = &e.conv {
        let _ = write!(buf, "c{c:?}");
    }
}

fn write_node(buf: &mut String, node: &ReqNode) {
    buf.push('N');
    for block in &node.blocks {
        let _ = write!(buf, "B[{}](", block.label);
        for i in &block.instructions {
            let _ = write!(buf, "{}:{}:", i.op.name(), i.requires_communication);
            write_extras(buf, &i.extras);
            buf.push(';');
        }
        buf.push(')');
    }
    for child in &node.children {
        match child {
            TreeChild::Node(n) => write_node(buf, n),
            TreeChild::Scaled(s) => {
                let _ = write!(buf, "S{}{{", s.factor);
                for n in &s.children {
                    write_node(buf, n);
                }
                buf.push('}');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprints_distinguish_structure() {
        let mut a = ReqNode::default();
        a.blocks.push(Block {
            label: "initial".into(),
            instructions: vec![Instruction::muls(1)],
        });
        let tree_a = BlockTree { root: a.clone() };

        let mut b = a.clone();
        b.blocks[0].instructions[0] = Instruction::muls(2);
        let tree_b = BlockTree { root: b };

        assert_eq!(tree_a.fingerprint(), BlockTree { root: a }.fingerprint());
        assert_ne!(tree_a.fingerprint(), tree_b.fingerprint());
    }
}
