//! Lowering of fixed-point tensor operations to framework instructions.
//!
//! Emission helpers write instructions into a [`Tracer`]; they are
//! framework-independent. Resolution happens at analysis time: an instruction
//! either maps to an op the framework declares (the direct path) or expands
//! into a default composition of basic ops. Iteration counts of the default
//! recipes are knobs, not protocol facts.

use crate::config::FrameworkConfig;
use crate::cost::{ConvDims, CostTuple, OpExtras, SecurityParams};
use crate::error::{Error, Result};
use crate::trace::Tracer;
use crate::tree::{Instruction, OpKind};

/// Iteration counts for the default compositions of complicated operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecipeKnobs {
    /// Squarings for the limit approximation of the exponential.
    pub exp_iterations: u32,
    /// Newton-Raphson iterations for the reciprocal (2 multiplies each).
    pub reciprocal_iterations: u32,
    /// Newton iterations for the inverse square root (3 multiplies each).
    pub inv_sqrt_iterations: u32,
}

impl Default for RecipeKnobs {
    fn default() -> Self {
        RecipeKnobs {
            exp_iterations: 8,
            reciprocal_iterations: 10,
            inv_sqrt_iterations: 3,
        }
    }
}

/// Analysis-time options: recipe knobs plus overrides for the HE and pricing
/// parameters that are otherwise taken from the framework configuration.
#[derive(Clone, Debug, Default)]
pub struct AnalysisOptions {
    pub knobs: RecipeKnobs,
    pub lp: Option<f64>,
    pub bp: Option<f64>,
    pub deg: Option<u64>,
    pub modulus: Option<Vec<u64>>,
}

impl AnalysisOptions {
    fn as_extras(&self) -> OpExtras {
        OpExtras {
            deg: self.deg,
            modulus: self.modulus.clone(),
            lp: self.lp,
            bp: self.bp,
            ..Default::default()
        }
    }
}

// ---------------------------------------------------------------------------
// emission helpers
// ---------------------------------------------------------------------------

/// Secret-secret fixed-point multiply: one vectorized muls plus the rescale.
pub fn fp_mul(tr: &mut Tracer, n: u64, knownmsb: bool) {
    if n == 0 {
        return;
    }
    tr.emit(Instruction::muls(n));
    tr.emit(Instruction::trunc_pr(n, knownmsb));
}

/// Multiplication by a public constant costs only the rescale.
pub fn fp_public_scale(tr: &mut Tracer, n: u64, knownmsb: bool) {
    if n == 0 {
        return;
    }
    tr.emit(Instruction::trunc_pr(n, knownmsb));
}

/// One matrix product with the rescale of its p*r outputs; `parallel` packs
/// that many independent products into the same rounds.
pub fn fp_matmul(tr: &mut Tracer, p: u64, q: u64, r: u64, parallel: u64) {
    if parallel == 0 || p == 0 || q == 0 || r == 0 {
        return;
    }
    tr.emit(Instruction::matmuls(p, q, r, parallel));
    tr.emit(Instruction::trunc_pr(p * r * parallel, false));
}

/// Matrix product without the rescale (public operand on one side).
pub fn fp_matmul_public(tr: &mut Tracer, p: u64, r: u64, parallel: u64) {
    if parallel == 0 || p == 0 || r == 0 {
        return;
    }
    tr.emit(Instruction::trunc_pr(p * r * parallel, false));
}

/// Vectorized sign test.
pub fn fp_ltz(tr: &mut Tracer, n: u64) {
    if n == 0 {
        return;
    }
    tr.emit(Instruction::ltz(n));
}

/// Bit-mask select: the mask has no fractional part, so no rescale.
pub fn mask_mul(tr: &mut Tracer, n: u64) {
    if n == 0 {
        return;
    }
    tr.emit(Instruction::muls(n));
}

pub fn share_input(tr: &mut Tracer, n: u64) {
    if n == 0 {
        return;
    }
    tr.emit(Instruction::share(n));
}

pub fn emit_complicated(tr: &mut Tracer, op: ComplicatedOp, n: u64) {
    if n == 0 {
        return;
    }
    tr.emit(match op {
        ComplicatedOp::Exp => Instruction::exp(n),
        ComplicatedOp::Reciprocal => Instruction::reciprocal(n),
        ComplicatedOp::InvSqrt => Instruction::inv_sqrt(n),
        ComplicatedOp::Div => Instruction::div(n),
    });
}

// ---------------------------------------------------------------------------
// resolution
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplicatedOp {
    Exp,
    Reciprocal,
    InvSqrt,
    Div,
}

impl ComplicatedOp {
    pub fn op_kind(&self) -> OpKind {
        match self {
            ComplicatedOp::Exp => OpKind::Exp,
            ComplicatedOp::Reciprocal => OpKind::Reciprocal,
            ComplicatedOp::InvSqrt => OpKind::InvSqrt,
            ComplicatedOp::Div => OpKind::Div,
        }
    }
}

/// How one complicated op resolves under a framework.
#[derive(Clone, Debug, PartialEq)]
pub enum LoweringPlan {
    /// The framework declares the op under this name.
    Direct(String),
    /// Default composition into instructions that themselves resolve.
    Composite(Vec<Instruction>),
}

fn direct_name(op: OpKind, framework: &FrameworkConfig) -> Option<&'static str> {
    op.direct_candidates()
        .iter()
        .copied()
        .find(|name| framework.declares(name))
}

fn composite_recipe(op: ComplicatedOp, n: u64, knobs: &RecipeKnobs) -> Vec<Instruction> {
    let mut out = Vec::new();
    let push_fp_mul = |out: &mut Vec<Instruction>, times: u32| {
        for _ in 0..times {
            out.push(Instruction::muls(n));
            out.push(Instruction::trunc_pr(n, false));
        }
    };
    match op {
        // (1 + x/2^i)^(2^i): one squaring per iteration
        ComplicatedOp::Exp => push_fp_mul(&mut out, knobs.exp_iterations),
        // sign normalization for the initial guess, then 2 multiplies per step
        ComplicatedOp::Reciprocal => {
            out.push(Instruction::ltz(n));
            out.push(Instruction::muls(n));
            push_fp_mul(&mut out, 2 * knobs.reciprocal_iterations);
        }
        ComplicatedOp::InvSqrt => push_fp_mul(&mut out, 3 * knobs.inv_sqrt_iterations),
        // reciprocal followed by one multiply
        ComplicatedOp::Div => {
            out.push(Instruction::reciprocal(n));
            push_fp_mul(&mut out, 1);
        }
    }
    out
}

/// Resolves one complicated op: direct whenever declared, otherwise the
/// default composition sized for `n` parallel elements.
pub fn resolve_complicated(
    op: ComplicatedOp,
    n: u64,
    framework: &FrameworkConfig,
    knobs: &RecipeKnobs,
) -> LoweringPlan {
    if let Some(name) = direct_name(op.op_kind(), framework) {
        LoweringPlan::Direct(name.to_string())
    } else {
        LoweringPlan::Composite(composite_recipe(op, n, knobs))
    }
}

fn conv2d_composite(dims: &ConvDims, parallel: u64) -> Vec<Instruction> {
    // im2col: every output element is a dot product of length cin*kh*kw
    let p = dims.batch * dims.outh * dims.outw;
    let q = dims.in_channel * dims.kh * dims.kw;
    let r = dims.out_channel;
    vec![Instruction::matmuls(p, q, r, parallel)]
}

/// Cost of one instruction under a framework: the declared formula when the
/// op resolves directly, otherwise the summed cost of its composition.
pub fn instruction_cost(
    instruction: &Instruction,
    framework: &FrameworkConfig,
    params: &SecurityParams,
    options: &AnalysisOptions,
) -> Result<CostTuple> {
    let extras = instruction.extras.merged_with(&options.as_extras());
    if let Some(name) = direct_name(instruction.op, framework) {
        return framework.evaluate(name, params, &extras);
    }
    if !instruction.op.has_default_composition() {
        return Err(Error::UnresolvableOp {
            framework: framework.name.clone(),
            op: instruction.op.name().to_string(),
        });
    }
    let n = extras.size.unwrap_or(1);
    let parts = match instruction.op {
        OpKind::Conv2d => {
            let dims = extras
                .conv
                .ok_or_else(|| Error::MissingParameter("conv".into()))?;
            conv2d_composite(&dims, n)
        }
        OpKind::Exp => composite_recipe(ComplicatedOp::Exp, n, &options.knobs),
        OpKind::Reciprocal => composite_recipe(ComplicatedOp::Reciprocal, n, &options.knobs),
        OpKind::InvSqrt => composite_recipe(ComplicatedOp::InvSqrt, n, &options.knobs),
        OpKind::Div => composite_recipe(ComplicatedOp::Div, n, &options.knobs),
        _ => unreachable!("non-composable op handled above"),
    };
    let mut total = CostTuple::ZERO;
    for part in &parts {
        total += instruction_cost(part, framework, params, options)?;
    }
    Ok(total)
}
