//! Shape-carrying symbolic tensors with reverse-mode differentiation.
//!
//! Tensors hold no values, only shapes and sharing kinds; operators emit
//! instructions and append a tape node whose backward emitter runs when
//! `backward` walks the tape in reverse. Forward emission happens under
//! `<op>-forward`; backward emitters run under `<op>-backward` nested at the
//! prefix active when `backward` is called. Public arithmetic is free, and
//! structural operations (reshape, permute, sum, slices) never communicate.

use crate::error::{Error, Result};
use crate::lowering::{self, ComplicatedOp};
use crate::trace::Tracer;
use crate::tree::BlockTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Secret,
    Public,
}

/// Lightweight handle into a [`Graph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tensor(usize);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GraphOptions {
    /// Use the unfused broadcast backward (materializes the output-sized
    /// intermediate); kept for comparison, never the default.
    pub strawman_broadcast: bool,
    /// Emit grouped convolutions one group at a time instead of packing the
    /// groups into parallel instructions.
    pub sequential_groups: bool,
}

struct TensorMeta {
    shape: Vec<u64>,
    kind: Kind,
    requires_grad: bool,
    nonneg: bool,
    grad: Option<Tensor>,
}

struct TapeEntry {
    op: &'static str,
    output: Tensor,
    needs_backward: bool,
    backward: Box<dyn FnOnce(&mut Graph, Tensor) -> Result<()>>,
}

/// One compilation context: the tracer plus the operator tape.
pub struct Graph {
    pub tracer: Tracer,
    options: GraphOptions,
    tensors: Vec<TensorMeta>,
    tape: Vec<TapeEntry>,
    backward_consumed: bool,
}

impl Default for Graph {
    fn default() -> Self {
        Self::new()
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::with_options(GraphOptions::default())
    }

    pub fn with_options(options: GraphOptions) -> Self {
        Graph {
            tracer: Tracer::new(),
            options,
            tensors: Vec::new(),
            tape: Vec::new(),
            backward_consumed: false,
        }
    }

    pub fn options(&self) -> GraphOptions {
        self.options
    }

    pub fn finish(self) -> BlockTree {
        self.tracer.finish()
    }

    // -- tensor bookkeeping -------------------------------------------------

    pub(crate) fn alloc(&mut self, shape: Vec<u64>, kind: Kind, requires_grad: bool, nonneg: bool) -> Tensor {
        assert!(!shape.is_empty(), "tensors are at least rank 1");
        self.tensors.push(TensorMeta { shape, kind, requires_grad, nonneg, grad: None });
        Tensor(self.tensors.len() - 1)
    }

    fn meta(&self, t: Tensor) -> &TensorMeta {
        &self.tensors[t.0]
    }

    pub fn shape(&self, t: Tensor) -> &[u64] {
        &self.meta(t).shape
    }

    pub fn numel(&self, t: Tensor) -> u64 {
        self.meta(t).shape.iter().product()
    }

    pub fn kind(&self, t: Tensor) -> Kind {
        self.meta(t).kind
    }

    pub fn requires_grad(&self, t: Tensor) -> bool {
        self.meta(t).requires_grad
    }

    pub fn is_nonneg(&self, t: Tensor) -> bool {
        self.meta(t).nonneg
    }

    pub fn grad(&self, t: Tensor) -> Option<Tensor> {
        self.meta(t).grad
    }

    pub fn zero_grad(&mut self) {
        for meta in &mut self.tensors {
            meta.grad = None;
        }
    }

    pub(crate) fn secret(&mut self, shape: Vec<u64>) -> Tensor {
        self.alloc(shape, Kind::Secret, false, false)
    }

    pub(crate) fn is_secret(&self, t: Tensor) -> bool {
        self.meta(t).kind == Kind::Secret
    }

    /// Declares an input shared by `_party`; emits the sharing once.
    pub fn input(&mut self, shape: &[u64], _party: u64) -> Result<Tensor> {
        let n: u64 = shape.iter().product();
        self.op_scope("dataloader", |g| lowering::share_input(&mut g.tracer, n))?;
        Ok(self.alloc(shape.to_vec(), Kind::Secret, false, false))
    }

    /// A trainable parameter; already secret-shared, so declaring it is free.
    pub fn param(&mut self, shape: &[u64]) -> Tensor {
        self.alloc(shape.to_vec(), Kind::Secret, true, false)
    }

    pub fn public(&mut self, shape: &[u64]) -> Tensor {
        self.alloc(shape.to_vec(), Kind::Public, false, false)
    }

    /// Reveals a secret tensor to every party.
    pub fn reveal(&mut self, t: Tensor) -> Result<()> {
        let n = self.numel(t);
        if self.is_secret(t) && n > 0 {
            self.op_scope("reveal", |g| {
                g.tracer.emit(crate::tree::Instruction::reveal(n));
            })?;
        }
        Ok(())
    }

    // -- labels and loops ---------------------------------------------------

    pub fn with_label<R>(
        &mut self,
        segment: &str,
        body: impl FnOnce(&mut Self) -> Result<R>,
    ) -> Result<R> {
        self.tracer.enter_label(segment)?;
        let out = body(self);
        self.tracer.exit_label();
        out
    }

    pub(crate) fn op_scope<R>(&mut self, op: &'static str, body: impl FnOnce(&mut Self) -> R) -> Result<R> {
        self.with_label(op, |g| g.with_label("forward", |g| Ok(body(g))))
    }

    /// Statically-bounded loop; the body must emit the same structure at
    /// every index.
    pub fn for_range(
        &mut self,
        n: u64,
        mut body: impl FnMut(&mut Self, u64) -> Result<()>,
    ) -> Result<()> {
        if n == 0 {
            return Ok(());
        }
        self.tracer.begin_subtree();
        body(self, 0)?;
        let compiled = self.tracer.take_subtree();
        if n >= 2 {
            self.tracer.begin_subtree();
            body(self, 1)?;
            let probe = self.tracer.take_subtree();
            if probe != compiled {
                return Err(Error::InputDependentLoop);
            }
        }
        self.tracer.attach_scaled(compiled, n);
        Ok(())
    }

    // -- tape ---------------------------------------------------------------

    pub(crate) fn push_tape(
        &mut self,
        op: &'static str,
        output: Tensor,
        needs_backward: bool,
        backward: impl FnOnce(&mut Graph, Tensor) -> Result<()> + 'static,
    ) {
        self.backward_consumed = false;
        self.tape.push(TapeEntry {
            op,
            output,
            needs_backward,
            backward: Box::new(backward),
        });
    }

    pub(crate) fn accumulate_grad(&mut self, t: Tensor, g: Tensor) -> Result<()> {
        if self.shape(t) != self.shape(g) {
            return Err(Error::Shape(format!(
                "gradient shape {:?} does not match tensor shape {:?}",
                self.shape(g),
                self.shape(t)
            )));
        }
        // accumulation is a share addition, which is local
        let merged = match self.meta(t).grad {
            None => g,
            Some(prev) => {
                let shape = self.shape(prev).to_vec();
                self.secret(shape)
            }
        };
        self.tensors[t.0].grad = Some(merged);
        Ok(())
    }

    /// Walks the tape in reverse, emitting each operator's derivative under
    /// `<op>-backward` and populating gradients of `requires_grad` tensors.
    pub fn backward(&mut self, loss: Tensor) -> Result<()> {
        let shape = self.shape(loss).to_vec();
        if shape.iter().product::<u64>() != 1 {
            return Err(Error::NonScalarLoss(shape));
        }
        if self.tape.is_empty() {
            if self.backward_consumed {
                return Err(Error::BackwardTwice);
            }
            self.backward_consumed = true;
            return Ok(());
        }
        self.backward_consumed = true;
        let seed = self.secret(shape);
        self.tensors[loss.0].grad = Some(seed);
        let tape = std::mem::take(&mut self.tape);
        for entry in tape.into_iter().rev() {
            let Some(gout) = self.meta(entry.output).grad else {
                continue;
            };
            if !entry.needs_backward {
                continue;
            }
            let f = entry.backward;
            self.with_label(entry.op, |g| g.with_label("backward", |g| f(g, gout)))?;
        }
        Ok(())
    }

    pub(crate) fn backprop_into(&mut self, t: Tensor) -> Result<()> {
        let shape = self.shape(t).to_vec();
        let grad = self.secret(shape);
        self.accumulate_grad(t, grad)
    }

    // -- elementwise arithmetic ----------------------------------------------

    pub(crate) fn any_secret(&self, ts: &[Tensor]) -> bool {
        ts.iter().any(|t| self.is_secret(*t))
    }

    pub(crate) fn any_requires(&self, ts: &[Tensor]) -> bool {
        ts.iter().any(|t| self.requires_grad(*t))
    }

    pub fn add(&mut self, a: Tensor, b: Tensor) -> Result<Tensor> {
        self.add_like(a, b, true)
    }

    pub fn sub(&mut self, a: Tensor, b: Tensor) -> Result<Tensor> {
        self.add_like(a, b, false)
    }

    // share addition is local; backward routes the gradient with free sums
    fn add_like(&mut self, a: Tensor, b: Tensor, plus: bool) -> Result<Tensor> {
        let shape = broadcast_shapes(self.shape(a), self.shape(b))?;
        let secret = self.any_secret(&[a, b]);
        if !secret {
            return Ok(self.alloc(shape, Kind::Public, false, false));
        }
        let needs = self.any_requires(&[a, b]);
        let nonneg = plus && self.is_nonneg(a) && self.is_nonneg(b);
        let out = self.alloc(shape, Kind::Secret, needs, nonneg);
        if needs {
            self.push_tape("add", out, true, move |g, _gout| {
                for t in [a, b] {
                    if g.requires_grad(t) {
                        g.backprop_into(t)?;
                    }
                }
                Ok(())
            });
        }
        Ok(out)
    }

    pub fn neg(&mut self, a: Tensor) -> Result<Tensor> {
        let shape = self.shape(a).to_vec();
        let kind = self.kind(a);
        let needs = self.requires_grad(a);
        let out = self.alloc(shape, kind, needs, false);
        if needs {
            self.push_tape("neg", out, true, move |g, _gout| g.backprop_into(a));
        }
        Ok(out)
    }

    /// Broadcast elementwise multiplication. Secret-secret inputs pay one
    /// vectorized multiply over the output; a public factor costs only the
    /// rescale. The gradient of a broadcast operand is fused into parallel
    /// dot products sized by that operand, never materializing the
    /// output-sized intermediate (unless the strawman flag is set).
    pub fn mul(&mut self, a: Tensor, b: Tensor) -> Result<Tensor> {
        let shape = broadcast_shapes(self.shape(a), self.shape(b))?;
        let n: u64 = shape.iter().product();
        if !self.any_secret(&[a, b]) {
            return Ok(self.alloc(shape, Kind::Public, false, false));
        }
        let both_secret = self.is_secret(a) && self.is_secret(b);
        let knownmsb = self.is_nonneg(a) && self.is_nonneg(b);
        self.op_scope("mul", |g| {
            if both_secret {
                lowering::fp_mul(&mut g.tracer, n, knownmsb);
            } else {
                lowering::fp_public_scale(&mut g.tracer, n, knownmsb);
            }
        })?;
        let needs = self.any_requires(&[a, b]);
        let out = self.alloc(shape, Kind::Secret, needs, knownmsb);
        if needs {
            let strawman = self.options.strawman_broadcast;
            self.push_tape("mul", out, true, move |g, gout| {
                let out_elems = g.numel(gout);
                for (t, other) in [(a, b), (b, a)] {
                    if !g.requires_grad(t) {
                        continue;
                    }
                    let t_elems = g.numel(t);
                    let rho = out_elems / t_elems.max(1);
                    let other_secret = g.is_secret(other);
                    if rho <= 1 || strawman {
                        // elementwise product over the output, then a free
                        // reduction when the operand was broadcast
                        if other_secret {
                            lowering::fp_mul(&mut g.tracer, out_elems, false);
                        } else {
                            lowering::fp_public_scale(&mut g.tracer, out_elems, false);
                        }
                    } else {
                        // fused: t_elems parallel dot products of length rho
                        if other_secret {
                            lowering::fp_matmul(&mut g.tracer, 1, rho, 1, t_elems);
                        } else {
                            lowering::fp_matmul_public(&mut g.tracer, 1, 1, t_elems);
                        }
                    }
                    g.backprop_into(t)?;
                }
                Ok(())
            });
        }
        Ok(out)
    }

    // -- matrix products ------------------------------------------------------

    pub fn matmul(&mut self, a: Tensor, b: Tensor) -> Result<Tensor> {
        let (sa, sb) = (self.shape(a).to_vec(), self.shape(b).to_vec());
        if sa.len() != 2 || sb.len() != 2 || sa[1] != sb[0] {
            return Err(Error::Shape(format!(
                "matmul expects (p,q) x (q,r), got {sa:?} x {sb:?}"
            )));
        }
        let (p, q, r) = (sa[0], sa[1], sb[1]);
        self.emit_matmul_family("matmul", a, b, p, q, r, 1, vec![p, r])
    }

    /// Batched matrix product over the shared leading dimension.
    pub fn bmm(&mut self, a: Tensor, b: Tensor) -> Result<Tensor> {
        let (sa, sb) = (self.shape(a).to_vec(), self.shape(b).to_vec());
        if sa.len() != 3 || sb.len() != 3 || sa[0] != sb[0] || sa[2] != sb[1] {
            return Err(Error::Shape(format!(
                "bmm expects (B,n,m) x (B,m,p), got {sa:?} x {sb:?}"
            )));
        }
        let (batch, p, q, r) = (sa[0], sa[1], sa[2], sb[2]);
        self.emit_matmul_family("bmm", a, b, p, q, r, batch, vec![batch, p, r])
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn emit_matmul_family(
        &mut self,
        op: &'static str,
        a: Tensor,
        b: Tensor,
        p: u64,
        q: u64,
        r: u64,
        parallel: u64,
        out_shape: Vec<u64>,
    ) -> Result<Tensor> {
        if !self.any_secret(&[a, b]) {
            return Ok(self.alloc(out_shape, Kind::Public, false, false));
        }
        let both_secret = self.is_secret(a) && self.is_secret(b);
        self.op_scope(op, |g| {
            if both_secret {
                lowering::fp_matmul(&mut g.tracer, p, q, r, parallel);
            } else {
                lowering::fp_matmul_public(&mut g.tracer, p, r, parallel);
            }
        })?;
        let needs = self.any_requires(&[a, b]);
        let out = self.alloc(out_shape, Kind::Secret, needs, false);
        if needs {
            self.push_tape(op, out, true, move |g, _gout| {
                // dA = dC.B^T and dB = A^T.dC
                if g.requires_grad(a) {
                    if g.is_secret(b) {
                        lowering::fp_matmul(&mut g.tracer, p, r, q, parallel);
                    } else {
                        lowering::fp_matmul_public(&mut g.tracer, p, q, parallel);
                    }
                    g.backprop_into(a)?;
                }
                if g.requires_grad(b) {
                    if g.is_secret(a) {
                        lowering::fp_matmul(&mut g.tracer, q, p, r, parallel);
                    } else {
                        lowering::fp_matmul_public(&mut g.tracer, q, r, parallel);
                    }
                    g.backprop_into(b)?;
                }
                Ok(())
            });
        }
        Ok(out)
    }

    // -- complicated elementwise ops -------------------------------------------

    fn unary_complicated(
        &mut self,
        op: &'static str,
        kind: ComplicatedOp,
        a: Tensor,
        nonneg_out: bool,
        backward_fp_muls: u32,
    ) -> Result<Tensor> {
        let shape = self.shape(a).to_vec();
        let n: u64 = shape.iter().product();
        if !self.is_secret(a) {
            return Ok(self.alloc(shape, Kind::Public, false, nonneg_out));
        }
        self.op_scope(op, |g| lowering::emit_complicated(&mut g.tracer, kind, n))?;
        let needs = self.requires_grad(a);
        let out = self.alloc(shape, Kind::Secret, needs, nonneg_out);
        if needs {
            self.push_tape(op, out, true, move |g, _gout| {
                for _ in 0..backward_fp_muls {
                    lowering::fp_mul(&mut g.tracer, n, false);
                }
                g.backprop_into(a)
            });
        }
        Ok(out)
    }

    /// Elementwise exponential; the derivative reuses the output, one multiply.
    pub fn exp(&mut self, a: Tensor) -> Result<Tensor> {
        self.unary_complicated("exp", ComplicatedOp::Exp, a, true, 1)
    }

    /// Elementwise reciprocal; derivative `-out^2 * dout`.
    pub fn reciprocal(&mut self, a: Tensor) -> Result<Tensor> {
        self.unary_complicated("reciprocal", ComplicatedOp::Reciprocal, a, false, 2)
    }

    /// Elementwise inverse square root; derivative `-out^3 * dout / 2`.
    pub fn inv_sqrt(&mut self, a: Tensor) -> Result<Tensor> {
        self.unary_complicated("invsqrt", ComplicatedOp::InvSqrt, a, true, 3)
    }

    /// Elementwise division of equal-shaped secrets.
    pub fn div(&mut self, a: Tensor, b: Tensor) -> Result<Tensor> {
        if self.shape(a) != self.shape(b) {
            return Err(Error::Shape("div expects equal shapes".into()));
        }
        let shape = self.shape(a).to_vec();
        let n: u64 = shape.iter().product();
        if !self.any_secret(&[a, b]) {
            return Ok(self.alloc(shape, Kind::Public, false, false));
        }
        self.op_scope("div", |g| {
            lowering::emit_complicated(&mut g.tracer, ComplicatedOp::Div, n)
        })?;
        let needs = self.any_requires(&[a, b]);
        let out = self.alloc(shape, Kind::Secret, needs, false);
        if needs {
            self.push_tape("div", out, true, move |g, _gout| {
                if g.requires_grad(a) {
                    lowering::emit_complicated(&mut g.tracer, ComplicatedOp::Div, n);
                    g.backprop_into(a)?;
                }
                if g.requires_grad(b) {
                    lowering::fp_mul(&mut g.tracer, n, false);
                    lowering::emit_complicated(&mut g.tracer, ComplicatedOp::Div, n);
                    g.backprop_into(b)?;
                }
                Ok(())
            });
        }
        Ok(out)
    }

    // -- activations ------------------------------------------------------------

    /// Sign test plus bit-mask select; the mask is cached for backward.
    pub fn relu(&mut self, a: Tensor) -> Result<Tensor> {
        let shape = self.shape(a).to_vec();
        let n: u64 = shape.iter().product();
        if !self.is_secret(a) {
            return Ok(self.alloc(shape, Kind::Public, false, true));
        }
        self.op_scope("relu", |g| {
            lowering::fp_ltz(&mut g.tracer, n);
            lowering::mask_mul(&mut g.tracer, n);
        })?;
        let needs = self.requires_grad(a);
        let out = self.alloc(shape, Kind::Secret, needs, true);
        if needs {
            self.push_tape("relu", out, true, move |g, _gout| {
                // forward mask reused: one select, no fresh comparison
                lowering::mask_mul(&mut g.tracer, n);
                g.backprop_into(a)
            });
        }
        Ok(out)
    }

    /// Logistic function: one exponential and one reciprocal per element.
    pub fn sigmoid(&mut self, a: Tensor) -> Result<Tensor> {
        let shape = self.shape(a).to_vec();
        let n: u64 = shape.iter().product();
        if !self.is_secret(a) {
            return Ok(self.alloc(shape, Kind::Public, false, true));
        }
        self.op_scope("sigmoid", |g| {
            lowering::emit_complicated(&mut g.tracer, ComplicatedOp::Exp, n);
            lowering::emit_complicated(&mut g.tracer, ComplicatedOp::Reciprocal, n);
        })?;
        let needs = self.requires_grad(a);
        let out = self.alloc(shape, Kind::Secret, needs, true);
        if needs {
            self.push_tape("sigmoid", out, true, move |g, _gout| {
                // s * (1 - s) * dout with s cached
                lowering::fp_mul(&mut g.tracer, n, false);
                lowering::fp_mul(&mut g.tracer, n, false);
                g.backprop_into(a)
            });
        }
        Ok(out)
    }

    /// Sigmoid-based approximation: two multiplies shaping the argument, the
    /// sigmoid (exp + reciprocal), and the final product with the input.
    pub fn gelu(&mut self, a: Tensor) -> Result<Tensor> {
        let shape = self.shape(a).to_vec();
        let n: u64 = shape.iter().product();
        if !self.is_secret(a) {
            return Ok(self.alloc(shape, Kind::Public, false, false));
        }
        self.op_scope("gelu", |g| {
            lowering::fp_mul(&mut g.tracer, n, false);
            lowering::fp_mul(&mut g.tracer, n, false);
            lowering::emit_complicated(&mut g.tracer, ComplicatedOp::Exp, n);
            lowering::emit_complicated(&mut g.tracer, ComplicatedOp::Reciprocal, n);
            lowering::fp_mul(&mut g.tracer, n, false);
        })?;
        let needs = self.requires_grad(a);
        let out = self.alloc(shape, Kind::Secret, needs, false);
        if needs {
            self.push_tape("gelu", out, true, move |g, _gout| {
                for _ in 0..3 {
                    lowering::fp_mul(&mut g.tracer, n, false);
                }
                g.backprop_into(a)
            });
        }
        Ok(out)
    }

    /// Max-stabilized softmax along `axis`: a comparison tree for the row
    /// max, exponentials, one reciprocal per row and the normalization.
    pub fn softmax(&mut self, a: Tensor, axis: usize) -> Result<Tensor> {
        let shape = self.shape(a).to_vec();
        if axis >= shape.len() {
            return Err(Error::Shape(format!(
                "softmax axis {axis} out of range for {shape:?}"
            )));
        }
        let n = shape[axis];
        let total: u64 = shape.iter().product();
        let rows = total / n;
        if !self.is_secret(a) {
            return Ok(self.alloc(shape, Kind::Public, false, true));
        }
        self.op_scope("softmax", |g| {
            emit_softmax_recipe(&mut g.tracer, n, rows);
        })?;
        let needs = self.requires_grad(a);
        let out = self.alloc(shape, Kind::Secret, needs, true);
        if needs {
            self.push_tape("softmax", out, true, move |g, _gout| {
                // y * (dout - sum(dout * y))
                lowering::fp_mul(&mut g.tracer, total, false);
                lowering::fp_mul(&mut g.tracer, total, false);
                g.backprop_into(a)
            });
        }
        Ok(out)
    }

    // -- structural ops -----------------------------------------------------------

    pub fn reshape(&mut self, a: Tensor, shape: &[u64]) -> Result<Tensor> {
        let n: u64 = shape.iter().product();
        if n != self.numel(a) {
            return Err(Error::Shape(format!(
                "cannot reshape {:?} into {shape:?}",
                self.shape(a)
            )));
        }
        self.structural(a, shape.to_vec(), "reshape")
    }

    pub fn flatten(&mut self, a: Tensor) -> Result<Tensor> {
        let rows = self.shape(a)[0];
        let rest: u64 = self.shape(a)[1..].iter().product();
        self.structural(a, vec![rows, rest], "flatten")
    }

    pub fn permute(&mut self, a: Tensor, perm: &[usize]) -> Result<Tensor> {
        let shape = self.shape(a);
        if perm.len() != shape.len() {
            return Err(Error::Shape("permutation arity mismatch".into()));
        }
        let mut seen = vec![false; perm.len()];
        for &axis in perm {
            if axis >= perm.len() || seen[axis] {
                return Err(Error::Shape("invalid permutation".into()));
            }
            seen[axis] = true;
        }
        let new_shape: Vec<u64> = perm.iter().map(|&i| shape[i]).collect();
        self.structural(a, new_shape, "permute")
    }

    /// Rows `[start, start+count)` along the leading axis.
    pub fn slice_rows(&mut self, a: Tensor, start: u64, count: u64) -> Result<Tensor> {
        let shape = self.shape(a).to_vec();
        if start + count > shape[0] {
            return Err(Error::Shape(format!(
                "slice {start}..{} out of range for {shape:?}",
                start + count
            )));
        }
        let mut out = shape;
        out[0] = count;
        self.structural(a, out, "slice")
    }

    pub fn sum_axis(&mut self, a: Tensor, axis: usize) -> Result<Tensor> {
        let shape = self.shape(a).to_vec();
        if axis >= shape.len() {
            return Err(Error::Shape(format!("sum axis {axis} out of range")));
        }
        let mut out = shape;
        out.remove(axis);
        if out.is_empty() {
            out.push(1);
        }
        self.structural(a, out, "sum")
    }

    pub fn sum_all(&mut self, a: Tensor) -> Result<Tensor> {
        self.structural(a, vec![1], "sum")
    }

    // additions and share rearrangement are local; backward is a free
    // broadcast or scatter
    fn structural(&mut self, a: Tensor, out_shape: Vec<u64>, op: &'static str) -> Result<Tensor> {
        let kind = self.kind(a);
        let needs = self.requires_grad(a);
        let nonneg = self.is_nonneg(a);
        let out = self.alloc(out_shape, kind, needs, nonneg);
        if needs {
            self.push_tape(op, out, true, move |g, _gout| g.backprop_into(a));
        }
        Ok(out)
    }

    /// Mean over every element: sums are free, the division by the public
    /// count is one rescale of the output.
    pub fn mean_all(&mut self, a: Tensor) -> Result<Tensor> {
        self.mean_reduce(a, vec![1])
    }

    /// Mean along `axis`.
    pub fn mean_axis(&mut self, a: Tensor, axis: usize) -> Result<Tensor> {
        let shape = self.shape(a).to_vec();
        if axis >= shape.len() {
            return Err(Error::Shape(format!("mean axis {axis} out of range")));
        }
        let mut out = shape;
        out.remove(axis);
        if out.is_empty() {
            out.push(1);
        }
        self.mean_reduce(a, out)
    }

    fn mean_reduce(&mut self, a: Tensor, out_shape: Vec<u64>) -> Result<Tensor> {
        let nonneg = self.is_nonneg(a);
        let n_out: u64 = out_shape.iter().product();
        if !self.is_secret(a) {
            return Ok(self.alloc(out_shape, Kind::Public, false, nonneg));
        }
        self.op_scope("mean", |g| {
            lowering::fp_public_scale(&mut g.tracer, n_out, nonneg);
        })?;
        let needs = self.requires_grad(a);
        let out = self.alloc(out_shape, Kind::Secret, needs, nonneg);
        if needs {
            self.push_tape("mean", out, true, move |g, _gout| {
                // scale the small gradient, broadcast for free
                lowering::fp_public_scale(&mut g.tracer, n_out, false);
                g.backprop_into(a)
            });
        }
        Ok(out)
    }

    /// Multiplication by a public scalar; only the rescale communicates.
    pub fn public_scale(&mut self, a: Tensor) -> Result<Tensor> {
        let shape = self.shape(a).to_vec();
        let n: u64 = shape.iter().product();
        if !self.is_secret(a) {
            return Ok(self.alloc(shape, Kind::Public, false, false));
        }
        self.op_scope("scale", |g| {
            lowering::fp_public_scale(&mut g.tracer, n, false);
        })?;
        let needs = self.requires_grad(a);
        let out = self.alloc(shape, Kind::Secret, needs, false);
        if needs {
            self.push_tape("scale", out, true, move |g, _gout| {
                lowering::fp_public_scale(&mut g.tracer, n, false);
                g.backprop_into(a)
            });
        }
        Ok(out)
    }
}

/// Pairwise-maximum tournament over `n` lanes, vectorized across `rows`
/// independent reductions: each stage is one comparison and one bit-mask
/// select over every surviving pair.
pub(crate) fn emit_max_tree(tr: &mut Tracer, n: u64, rows: u64) {
    let mut remaining = n;
    while remaining > 1 {
        let pairs = remaining / 2;
        lowering::fp_ltz(tr, pairs * rows);
        lowering::mask_mul(tr, pairs * rows);
        remaining = remaining.div_ceil(2);
    }
}

/// Shared softmax emission: max tree, exponentials, one reciprocal per row,
/// then the normalization multiply.
pub(crate) fn emit_softmax_recipe(tr: &mut Tracer, n: u64, rows: u64) {
    let total = n * rows;
    emit_max_tree(tr, n, rows);
    lowering::emit_complicated(tr, ComplicatedOp::Exp, total);
    lowering::emit_complicated(tr, ComplicatedOp::Reciprocal, rows);
    lowering::fp_mul(tr, total, true);
}

/// Right-aligned broadcast of two shapes.
pub fn broadcast_shapes(a: &[u64], b: &[u64]) -> Result<Vec<u64>> {
    let rank = a.len().max(b.len());
    let mut out = Vec::with_capacity(rank);
    for i in 0..rank {
        let da = if i < rank - a.len() { 1 } else { a[i - (rank - a.len())] };
        let db = if i < rank - b.len() { 1 } else { b[i - (rank - b.len())] };
        if da != db && da != 1 && db != 1 {
            return Err(Error::Shape(format!("cannot broadcast {a:?} with {b:?}")));
        }
        out.push(da.max(db));
    }
    Ok(out)
}

/// The 2-D view a broadcast pair normalizes to: the full-shape operand
/// becomes `(rho, elems)` and the broadcast operand `(1, elems)`.
pub fn broadcast_normalized_2d(big: &[u64], small: &[u64]) -> Result<((u64, u64), (u64, u64))> {
    let out = broadcast_shapes(big, small)?;
    let total: u64 = out.iter().product();
    let small_elems: u64 = small.iter().product();
    let rho = total / small_elems.max(1);
    Ok(((rho, small_elems), (1, small_elems)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::{aggregate, ProfileReport};
    use crate::config::FrameworkRegistry;
    use crate::cost::{CostTuple, SecurityParams};
    use crate::lowering::AnalysisOptions;

    fn report(g: Graph, fw: &str, m: u64) -> ProfileReport {
        let reg = FrameworkRegistry::with_builtins();
        aggregate(
            &g.finish(),
            reg.get(fw).unwrap(),
            &SecurityParams::with_parties(m),
            &AnalysisOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn addition_of_secrets_is_free() {
        let mut g = Graph::new();
        let a = g.param(&[4]);
        let b = g.param(&[4]);
        g.add(a, b).unwrap();
        let r = report(g, "aby3", 3);
        assert!(r.entries.is_empty());
    }

    #[test]
    fn exp_emits_under_forward_label() {
        let mut g = Graph::new();
        let x = g.param(&[3]);
        g.exp(x).unwrap();
        let r = report(g, "crypten", 2);
        assert_eq!(r.entries.len(), 1);
        assert_eq!(
            r.entries["initial-exp-forward"],
            CostTuple::new(3 * 16 * 64, 8, 3 * 8 * 64, 24)
        );
    }

    #[test]
    fn exp_backward_is_one_multiply() {
        let mut g = Graph::new();
        let x = g.param(&[3]);
        let y = g.exp(x).unwrap();
        let loss = g.mean_all(y).unwrap();
        g.backward(loss).unwrap();
        let r = report(g, "aby3", 3);
        assert_eq!(
            r.entries["initial-exp-backward"],
            CostTuple::new(3 * 3 * 64 + 3 * 64, 2, 0, 0)
        );
        assert!(r.entries.contains_key("initial-mean-backward"));
    }

    #[test]
    fn matmul_backward_dimensions() {
        let mut g = Graph::new();
        let a = g.param(&[2, 3]);
        let b = g.param(&[3, 4]);
        let c = g.matmul(a, b).unwrap();
        assert_eq!(g.shape(c), &[2, 4]);
        let loss = g.mean_all(c).unwrap();
        g.backward(loss).unwrap();
        assert_eq!(g.shape(g.grad(a).unwrap()), &[2, 3]);
        assert_eq!(g.shape(g.grad(b).unwrap()), &[3, 4]);
        let r = report(g, "aby3", 3);
        assert_eq!(
            r.entries["initial-matmul-forward"],
            CostTuple::new(3 * 8 * 64 + 8 * 64, 2, 0, 0)
        );
        // dA via (2,4,3) + rescale of 6, dB via (3,2,4) + rescale of 12
        assert_eq!(
            r.entries["initial-matmul-backward"],
            CostTuple::new((3 * 6 * 64 + 6 * 64) + (3 * 12 * 64 + 12 * 64), 4, 0, 0)
        );
    }

    #[test]
    fn mul_by_public_costs_only_rescale() {
        let mut g = Graph::new();
        let w = g.param(&[5]);
        let lr = g.public(&[1]);
        g.mul(w, lr).unwrap();
        let r = report(g, "aby3", 3);
        assert_eq!(r.entries["initial-mul-forward"], CostTuple::new(5 * 64, 1, 0, 0));

        // free on local-truncation frameworks
        let mut g = Graph::new();
        let w = g.param(&[5]);
        let lr = g.public(&[1]);
        g.mul(w, lr).unwrap();
        let r = report(g, "aby", 2);
        assert_eq!(r.query_prefix("initial"), CostTuple::ZERO);
    }

    #[test]
    fn broadcast_backward_fused_vs_strawman() {
        // shapes (1,2) x (2,2): the reduced operand's gradient costs 512
        // fused versus 1024 unfused at k = 64
        let run = |strawman: bool| -> ProfileReport {
            let mut g = Graph::with_options(GraphOptions {
                strawman_broadcast: strawman,
                ..Default::default()
            });
            let a = g.param(&[1, 2]);
            let b = g.input(&[2, 2], 0).unwrap();
            let c = g.mul(a, b).unwrap();
            assert_eq!(g.shape(c), &[2, 2]);
            let loss = g.mean_all(c).unwrap();
            g.backward(loss).unwrap();
            report(g, "aby3", 3)
        };
        let fused = run(false);
        let strawman = run(true);
        assert_eq!(fused.entries["initial-mul-backward"].online_bits, 512);
        assert_eq!(strawman.entries["initial-mul-backward"].online_bits, 1024);
        assert_eq!(fused.entries["initial-mul-forward"], CostTuple::new(1024, 2, 0, 0));
    }

    #[test]
    fn equal_shapes_have_identical_backward_paths() {
        let run = |strawman: bool| -> CostTuple {
            let mut g = Graph::with_options(GraphOptions {
                strawman_broadcast: strawman,
                ..Default::default()
            });
            let a = g.param(&[2, 2]);
            let b = g.input(&[2, 2], 0).unwrap();
            let c = g.mul(a, b).unwrap();
            let loss = g.mean_all(c).unwrap();
            g.backward(loss).unwrap();
            report(g, "aby3", 3).entries["initial-mul-backward"]
        };
        assert_eq!(run(false), run(true));
    }

    #[test]
    fn complex_broadcast_normalizes_to_two_dims() {
        let ((rho, e_big), (one, e_small)) = broadcast_normalized_2d(&[5, 3, 2], &[3, 2]).unwrap();
        assert_eq!((rho, e_big), (5, 6));
        assert_eq!((one, e_small), (1, 6));
    }

    #[test]
    fn backward_twice_errors() {
        let mut g = Graph::new();
        let x = g.param(&[2]);
        let y = g.exp(x).unwrap();
        let loss = g.mean_all(y).unwrap();
        g.backward(loss).unwrap();
        assert!(matches!(g.backward(loss), Err(Error::BackwardTwice)));
    }

    #[test]
    fn non_scalar_loss_is_rejected() {
        let mut g = Graph::new();
        let x = g.param(&[2, 2]);
        let y = g.exp(x).unwrap();
        assert!(matches!(g.backward(y), Err(Error::NonScalarLoss(_))));
    }

    #[test]
    fn leaf_only_graph_backward_is_silent() {
        let mut g = Graph::new();
        let x = g.param(&[1]);
        g.backward(x).unwrap();
        let r = report(g, "aby3", 3);
        assert!(r.entries.is_empty());
    }

    #[test]
    fn structural_ops_are_free() {
        let mut g = Graph::new();
        let x = g.param(&[4, 5]);
        let s = g.sum_axis(x, 0).unwrap();
        assert_eq!(g.shape(s), &[5]);
        let p = g.permute(x, &[1, 0]).unwrap();
        assert_eq!(g.shape(p), &[5, 4]);
        let r = g.reshape(x, &[20]).unwrap();
        assert_eq!(g.shape(r), &[20]);
        let rep = report(g, "aby3", 3);
        assert!(rep.entries.is_empty());
    }

    #[test]
    fn mean_costs_one_truncation() {
        let mut g = Graph::new();
        let x = g.param(&[10]);
        g.mean_all(x).unwrap();
        let r = report(g, "aby3", 3);
        assert_eq!(r.entries["initial-mean-forward"], CostTuple::new(64, 1, 0, 0));
    }

    #[test]
    fn relu_costs_and_mask_reuse() {
        let mut g = Graph::new();
        let x = g.param(&[1]);
        let y = g.relu(x).unwrap();
        assert!(g.is_nonneg(y));
        let loss = g.mean_all(y).unwrap();
        g.backward(loss).unwrap();
        let r = report(g, "aby3", 3);
        assert_eq!(
            r.entries["initial-relu-forward"],
            CostTuple::new(576 + 192, 9, 0, 0)
        );
        // one bit-mask multiply, no comparison, no rescale
        assert_eq!(r.entries["initial-relu-backward"], CostTuple::new(192, 1, 0, 0));
    }

    #[test]
    fn relu_outputs_mark_known_msb() {
        let mut g = Graph::new();
        let x = g.param(&[2]);
        let a = g.relu(x).unwrap();
        let b = g.relu(x).unwrap();
        let c = g.mul(a, b).unwrap();
        assert!(g.is_nonneg(c));
        let tree = g.finish();
        let has_knownmsb = tree.root.blocks.iter().flat_map(|b| &b.instructions).any(|i| {
            i.op == crate::tree::OpKind::TruncPr && i.extras.knownmsb == Some(true)
        });
        assert!(has_knownmsb);
    }

    #[test]
    fn input_emits_one_share() {
        let mut g = Graph::new();
        g.input(&[784], 0).unwrap();
        let r = report(g, "aby3", 3);
        assert_eq!(
            r.entries["initial-dataloader-forward"],
            CostTuple::new(3 * 64 * 784, 1, 0, 0)
        );
        // free where inputs are held locally
        let mut g = Graph::new();
        g.input(&[784], 0).unwrap();
        let r = report(g, "cryptflow2", 2);
        assert_eq!(r.total().online_bits, 0);
    }

    #[test]
    fn broadcast_shape_rules() {
        assert_eq!(broadcast_shapes(&[1, 2], &[2, 2]).unwrap(), vec![2, 2]);
        assert_eq!(broadcast_shapes(&[5, 3, 2], &[3, 2]).unwrap(), vec![5, 3, 2]);
        assert_eq!(broadcast_shapes(&[4], &[1]).unwrap(), vec![4]);
        assert!(broadcast_shapes(&[3], &[4]).is_err());
    }

    #[test]
    fn softmax_composes_declared_ops() {
        let mut g = Graph::new();
        let x = g.param(&[1, 4]);
        g.softmax(x, 1).unwrap();
        let r = report(g, "crypten", 2);

        // independent composition: 3 maxes in two tree stages, then the
        // exponential, one reciprocal per row and the normalization
        let reg = FrameworkRegistry::with_builtins();
        let params = SecurityParams::with_parties(2);
        let e = |op: &str, n: u64| {
            crate::config::evaluate_cost(
                &reg,
                "crypten",
                op,
                &params,
                &crate::cost::OpExtras::size(n),
            )
            .unwrap()
        };
        let expected = e("LTZ", 2)
            + e("muls", 2)
            + e("LTZ", 1)
            + e("muls", 1)
            + e("exp_fx", 4)
            + e("Reciprocal", 1)
            + e("muls", 4)
            + e("TruncPr", 4);
        assert_eq!(r.entries["initial-softmax-forward"], expected);
    }

    #[test]
    fn gradient_isolation_by_requires_grad() {
        // only the reduced operand requires grad, so backward has exactly
        // the fused dot-product cost
        let mut g = Graph::new();
        let a = g.param(&[1, 2]);
        let b = g.input(&[2, 2], 0).unwrap();
        assert!(!g.requires_grad(b));
        let c = g.mul(a, b).unwrap();
        let loss = g.mean_all(c).unwrap();
        g.backward(loss).unwrap();
        assert!(g.grad(a).is_some());
        assert!(g.grad(b).is_none());
    }
}
