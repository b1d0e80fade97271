//! Layers, containers, losses, optimizers and the data loader.
//!
//! Layers are immutable specs holding parameter tensors; tracing a forward
//! pass emits the layer's instructions under its operator label. Containers
//! compose layers, and `Labeled` adds a sub-module segment to the prefix so
//! per-sub-module breakdowns come out of the same trace.

use crate::autograd::{emit_softmax_recipe, Graph, Kind, Tensor};
use crate::cost::ConvDims;
use crate::error::{Error, Result};
use crate::lowering::{self, ComplicatedOp};

// ---------------------------------------------------------------------------
// graph-level NN operations
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Conv2dCfg {
    pub stride: u64,
    pub padding: u64,
    pub groups: u64,
}

impl Default for Conv2dCfg {
    fn default() -> Self {
        Conv2dCfg { stride: 1, padding: 0, groups: 1 }
    }
}

fn pool_out(extent: u64, window: u64, stride: u64) -> Result<u64> {
    if window == 0 || stride == 0 || window > extent {
        return Err(Error::Shape(format!(
            "pooling window {window} (stride {stride}) does not fit extent {extent}"
        )));
    }
    if (extent - window) % stride != 0 {
        return Err(Error::Shape(format!(
            "pooling window {window} (stride {stride}) does not tile extent {extent}"
        )));
    }
    Ok((extent - window) / stride + 1)
}

impl Graph {
    /// Matrix product of a batch of rows against a weight matrix, labeled as
    /// the linear layer it implements.
    pub fn linear(&mut self, x: Tensor, w: Tensor) -> Result<Tensor> {
        let (sx, sw) = (self.shape(x).to_vec(), self.shape(w).to_vec());
        if sx.len() != 2 || sw.len() != 2 || sx[1] != sw[0] {
            return Err(Error::Shape(format!(
                "linear expects (b,in) x (in,out), got {sx:?} x {sw:?}"
            )));
        }
        self.emit_matmul_family("linear", x, w, sx[0], sx[1], sw[1], 1, vec![sx[0], sw[1]])
    }

    /// 2-D convolution. Frameworks that price `conv2d` directly receive the
    /// per-group geometry; everywhere else the op lowers to one im2col matrix
    /// product per group. Groups run in parallel rounds unless the graph was
    /// built with `sequential_groups`.
    pub fn conv2d(&mut self, x: Tensor, w: Tensor, cfg: &Conv2dCfg) -> Result<Tensor> {
        let (sx, sw) = (self.shape(x).to_vec(), self.shape(w).to_vec());
        if sx.len() != 4 || sw.len() != 4 {
            return Err(Error::Shape("conv2d expects (b,c,h,w) input and (o,c/g,kh,kw) weight".into()));
        }
        let (batch, cin, ih, iw) = (sx[0], sx[1], sx[2], sx[3]);
        let (cout, wc, kh, kw) = (sw[0], sw[1], sw[2], sw[3]);
        let g = cfg.groups.max(1);
        if cin % g != 0 || cout % g != 0 || wc != cin / g {
            return Err(Error::Shape(format!(
                "channel/group mismatch: in {cin}, out {cout}, groups {g}, weight channels {wc}"
            )));
        }
        let (h_pad, w_pad) = (ih + 2 * cfg.padding, iw + 2 * cfg.padding);
        if kh > h_pad || kw > w_pad || cfg.stride == 0 {
            return Err(Error::Shape("kernel does not fit padded input".into()));
        }
        let oh = (h_pad - kh) / cfg.stride + 1;
        let ow = (w_pad - kw) / cfg.stride + 1;
        let out_shape = vec![batch, cout, oh, ow];
        let out_elems: u64 = out_shape.iter().product();
        if !self.is_secret(x) && !self.is_secret(w) {
            return Ok(self.alloc(out_shape, Kind::Public, false, false));
        }
        let both_secret = self.is_secret(x) && self.is_secret(w);
        let knownmsb = self.is_nonneg(x) && self.is_nonneg(w);
        let dims = ConvDims {
            batch,
            in_channel: cin / g,
            out_channel: cout / g,
            inw: iw,
            inh: ih,
            outw: ow,
            outh: oh,
            kw,
            kh,
        };
        let sequential = self.options().sequential_groups;
        self.op_scope("conv2d", |gr| {
            if both_secret {
                if sequential && g > 1 {
                    for _ in 0..g {
                        gr.tracer.emit(crate::tree::Instruction::conv2d(dims, 1));
                        gr.tracer
                            .emit(crate::tree::Instruction::trunc_pr(out_elems / g, knownmsb));
                    }
                } else {
                    gr.tracer.emit(crate::tree::Instruction::conv2d(dims, g));
                    gr.tracer
                        .emit(crate::tree::Instruction::trunc_pr(out_elems, knownmsb));
                }
            } else {
                lowering::fp_public_scale(&mut gr.tracer, out_elems, knownmsb);
            }
        })?;
        let needs = self.any_requires(&[x, w]);
        let out = self.alloc(out_shape, Kind::Secret, needs, false);
        if needs {
            let x_elems: u64 = sx.iter().product();
            let w_elems: u64 = sw.iter().product();
            let patch = (cin / g) * kh * kw;
            self.push_tape("conv2d", out, true, move |gr, _gout| {
                // dW = dY^T . X_cols and dX = dY . W^T, one product per group
                if gr.requires_grad(w) {
                    if gr.is_secret(x) {
                        lowering::fp_matmul(&mut gr.tracer, cout / g, batch * oh * ow, patch, g);
                    } else {
                        lowering::fp_matmul_public(&mut gr.tracer, cout / g, patch, g);
                    }
                    gr.tracer
                        .emit(crate::tree::Instruction::trunc_pr(w_elems, false));
                    gr.backprop_into(w)?;
                }
                if gr.requires_grad(x) {
                    if gr.is_secret(w) {
                        lowering::fp_matmul(&mut gr.tracer, batch * oh * ow, cout / g, patch, g);
                    } else {
                        lowering::fp_matmul_public(&mut gr.tracer, batch * oh * ow, patch, g);
                    }
                    gr.tracer
                        .emit(crate::tree::Instruction::trunc_pr(x_elems, false));
                    gr.backprop_into(x)?;
                }
                Ok(())
            });
        }
        Ok(out)
    }

    /// Average pooling: window sums are local, one rescale per output for the
    /// division by the window size.
    pub fn avgpool2d(&mut self, x: Tensor, window: u64, stride: u64) -> Result<Tensor> {
        let sx = self.shape(x).to_vec();
        if sx.len() != 4 {
            return Err(Error::Shape("avgpool2d expects (b,c,h,w)".into()));
        }
        let oh = pool_out(sx[2], window, stride)?;
        let ow = pool_out(sx[3], window, stride)?;
        let out_shape = vec![sx[0], sx[1], oh, ow];
        let out_elems: u64 = out_shape.iter().product();
        let nonneg = self.is_nonneg(x);
        if !self.is_secret(x) {
            return Ok(self.alloc(out_shape, Kind::Public, false, nonneg));
        }
        if window == 1 && stride == 1 {
            // identity window
            return self.structural_passthrough(x, out_shape, "avgpool");
        }
        self.op_scope("avgpool", |g| {
            lowering::fp_public_scale(&mut g.tracer, out_elems, nonneg);
        })?;
        let needs = self.requires_grad(x);
        let out = self.alloc(out_shape, Kind::Secret, needs, nonneg);
        if needs {
            self.push_tape("avgpool", out, true, move |g, _gout| {
                lowering::fp_public_scale(&mut g.tracer, out_elems, false);
                g.backprop_into(x)
            });
        }
        Ok(out)
    }

    /// Max pooling: a pairwise tournament per window (one comparison and one
    /// bit-mask select per pair), vectorized across every window. Backward
    /// reuses the recorded one-hot argmax, one select per input element.
    pub fn maxpool2d(&mut self, x: Tensor, window: u64, stride: u64) -> Result<Tensor> {
        let sx = self.shape(x).to_vec();
        if sx.len() != 4 {
            return Err(Error::Shape("maxpool2d expects (b,c,h,w)".into()));
        }
        let oh = pool_out(sx[2], window, stride)?;
        let ow = pool_out(sx[3], window, stride)?;
        let out_shape = vec![sx[0], sx[1], oh, ow];
        let windows: u64 = out_shape.iter().product();
        let lanes = window * window;
        let nonneg = self.is_nonneg(x);
        if !self.is_secret(x) {
            return Ok(self.alloc(out_shape, Kind::Public, false, nonneg));
        }
        if lanes == 1 {
            return self.structural_passthrough(x, out_shape, "maxpool");
        }
        self.op_scope("maxpool", |g| {
            crate::autograd::emit_max_tree(&mut g.tracer, lanes, windows);
        })?;
        let needs = self.requires_grad(x);
        let in_elems: u64 = sx.iter().product();
        let out = self.alloc(out_shape, Kind::Secret, needs, nonneg);
        if needs {
            self.push_tape("maxpool", out, true, move |g, _gout| {
                lowering::mask_mul(&mut g.tracer, in_elems);
                g.backprop_into(x)
            });
        }
        Ok(out)
    }

    fn structural_passthrough(
        &mut self,
        x: Tensor,
        out_shape: Vec<u64>,
        op: &'static str,
    ) -> Result<Tensor> {
        let needs = self.requires_grad(x);
        let nonneg = self.is_nonneg(x);
        let out = self.alloc(out_shape, Kind::Secret, needs, nonneg);
        if needs {
            self.push_tape(op, out, true, move |g, _gout| g.backprop_into(x));
        }
        Ok(out)
    }

    /// Batch normalization over (b,c,h,w). Inference is one secret
    /// scale-and-shift per element; training adds the batch statistics: per-
    /// channel means, centered squares, and one inverse square root per
    /// channel.
    pub fn batchnorm2d(
        &mut self,
        x: Tensor,
        gamma: Tensor,
        beta: Tensor,
        training: bool,
    ) -> Result<Tensor> {
        let sx = self.shape(x).to_vec();
        if sx.len() != 4 {
            return Err(Error::Shape("batchnorm2d expects (b,c,h,w)".into()));
        }
        let channels = sx[1];
        if self.shape(gamma) != [channels] || self.shape(beta) != [channels] {
            return Err(Error::Shape(format!(
                "batchnorm parameters must have shape [{channels}]"
            )));
        }
        let n: u64 = sx.iter().product();
        if !self.is_secret(x) {
            return Ok(self.alloc(sx, Kind::Public, false, false));
        }
        self.op_scope("batchnorm", |g| {
            if training {
                // channel means, variance via centered squares, per-channel
                // inverse std, then normalize and apply the affine pair
                lowering::fp_public_scale(&mut g.tracer, channels, false);
                lowering::fp_mul(&mut g.tracer, n, false);
                lowering::fp_public_scale(&mut g.tracer, channels, false);
                lowering::emit_complicated(&mut g.tracer, ComplicatedOp::InvSqrt, channels);
                lowering::fp_mul(&mut g.tracer, n, false);
                lowering::fp_mul(&mut g.tracer, n, false);
            } else {
                lowering::fp_mul(&mut g.tracer, n, false);
            }
        })?;
        let needs = self.any_requires(&[x, gamma, beta]);
        let out = self.alloc(sx, Kind::Secret, needs, false);
        if needs {
            self.push_tape("batchnorm", out, true, move |g, _gout| {
                // dgamma = sum(dy * x_hat), dx needs two products with the
                // cached normalized input plus per-channel means
                lowering::fp_mul(&mut g.tracer, n, false);
                lowering::fp_public_scale(&mut g.tracer, channels, false);
                if g.requires_grad(gamma) {
                    g.backprop_into(gamma)?;
                }
                if g.requires_grad(beta) {
                    g.backprop_into(beta)?;
                }
                if g.requires_grad(x) {
                    lowering::fp_mul(&mut g.tracer, n, false);
                    lowering::fp_mul(&mut g.tracer, n, false);
                    lowering::fp_public_scale(&mut g.tracer, channels, false);
                    g.backprop_into(x)?;
                }
                Ok(())
            });
        }
        Ok(out)
    }

    /// Softmax cross-entropy against one-hot labels. The forward pays the
    /// softmax; the backward is the fused `softmax(x) - y`, a free
    /// subtraction, so it adds nothing beyond upstream propagation.
    pub fn cross_entropy(&mut self, logits: Tensor, targets: Tensor) -> Result<Tensor> {
        let (sl, st) = (self.shape(logits).to_vec(), self.shape(targets).to_vec());
        if sl.len() != 2 || sl != st {
            return Err(Error::Shape(format!(
                "cross entropy expects matching (batch, classes) shapes, got {sl:?} vs {st:?}"
            )));
        }
        let (batch, classes) = (sl[0], sl[1]);
        if !self.is_secret(logits) {
            return Ok(self.alloc(vec![1], Kind::Public, false, false));
        }
        self.op_scope("crossentropy", |g| {
            emit_softmax_recipe(&mut g.tracer, classes, batch);
        })?;
        let needs = self.requires_grad(logits);
        let out = self.alloc(vec![1], Kind::Secret, needs, false);
        if needs {
            self.push_tape("crossentropy", out, true, move |g, _gout| {
                g.backprop_into(logits)
            });
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// layers and containers
// ---------------------------------------------------------------------------

pub trait Layer {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor>;
    fn params(&self) -> Vec<Tensor>;
}

pub struct Linear {
    pub w: Tensor,
    pub b: Tensor,
}

impl Linear {
    pub fn new(g: &mut Graph, in_features: u64, out_features: u64) -> Self {
        Linear {
            w: g.param(&[in_features, out_features]),
            b: g.param(&[out_features]),
        }
    }
}

impl Layer for Linear {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        let y = g.linear(x, self.w)?;
        g.add(y, self.b)
    }
    fn params(&self) -> Vec<Tensor> {
        vec![self.w, self.b]
    }
}

pub struct Conv2d {
    pub w: Tensor,
    pub b: Tensor,
    pub cfg: Conv2dCfg,
}

impl Conv2d {
    pub fn new(
        g: &mut Graph,
        in_channels: u64,
        out_channels: u64,
        kernel: u64,
        cfg: Conv2dCfg,
    ) -> Self {
        let groups = cfg.groups.max(1);
        Conv2d {
            w: g.param(&[out_channels, in_channels / groups, kernel, kernel]),
            b: g.param(&[out_channels, 1, 1]),
            cfg,
        }
    }
}

impl Layer for Conv2d {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        let y = g.conv2d(x, self.w, &self.cfg)?;
        g.add(y, self.b)
    }
    fn params(&self) -> Vec<Tensor> {
        vec![self.w, self.b]
    }
}

pub struct BatchNorm2d {
    pub gamma: Tensor,
    pub beta: Tensor,
    pub training: bool,
}

impl BatchNorm2d {
    pub fn new(g: &mut Graph, num_features: u64, training: bool) -> Self {
        BatchNorm2d {
            gamma: g.param(&[num_features]),
            beta: g.param(&[num_features]),
            training,
        }
    }
}

impl Layer for BatchNorm2d {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        g.batchnorm2d(x, self.gamma, self.beta, self.training)
    }
    fn params(&self) -> Vec<Tensor> {
        vec![self.gamma, self.beta]
    }
}

pub struct ReLU;

impl Layer for ReLU {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        g.relu(x)
    }
    fn params(&self) -> Vec<Tensor> {
        Vec::new()
    }
}

pub struct Gelu;

impl Layer for Gelu {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        g.gelu(x)
    }
    fn params(&self) -> Vec<Tensor> {
        Vec::new()
    }
}

pub struct Sigmoid;

impl Layer for Sigmoid {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        g.sigmoid(x)
    }
    fn params(&self) -> Vec<Tensor> {
        Vec::new()
    }
}

pub struct AvgPool2d {
    pub window: u64,
    pub stride: u64,
}

impl AvgPool2d {
    pub fn new(window: u64) -> Self {
        AvgPool2d { window, stride: window }
    }
}

impl Layer for AvgPool2d {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        g.avgpool2d(x, self.window, self.stride)
    }
    fn params(&self) -> Vec<Tensor> {
        Vec::new()
    }
}

pub struct MaxPool2d {
    pub window: u64,
    pub stride: u64,
}

impl MaxPool2d {
    pub fn new(window: u64) -> Self {
        MaxPool2d { window, stride: window }
    }
}

impl Layer for MaxPool2d {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        g.maxpool2d(x, self.window, self.stride)
    }
    fn params(&self) -> Vec<Tensor> {
        Vec::new()
    }
}

pub struct Softmax {
    pub axis: usize,
}

impl Layer for Softmax {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        g.softmax(x, self.axis)
    }
    fn params(&self) -> Vec<Tensor> {
        Vec::new()
    }
}

pub struct Flatten;

impl Layer for Flatten {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        g.flatten(x)
    }
    fn params(&self) -> Vec<Tensor> {
        Vec::new()
    }
}

pub struct Sequential {
    layers: Vec<Box<dyn Layer>>,
}

impl Sequential {
    pub fn new(layers: Vec<Box<dyn Layer>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::ModelSpec("sequential container must not be empty".into()));
        }
        Ok(Sequential { layers })
    }
}

impl Layer for Sequential {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        let mut cur = x;
        for layer in &self.layers {
            cur = layer.forward(g, cur)?;
        }
        Ok(cur)
    }
    fn params(&self) -> Vec<Tensor> {
        self.layers.iter().flat_map(|l| l.params()).collect()
    }
}

/// Wraps a module's forward in an extra label segment so nested operator
/// entries gain a `...-<label>-...` prefix.
pub struct Labeled {
    pub label: String,
    pub inner: Box<dyn Layer>,
}

impl Labeled {
    pub fn new(label: &str, inner: Box<dyn Layer>) -> Self {
        Labeled { label: label.to_string(), inner }
    }
}

impl Layer for Labeled {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        g.with_label(&self.label, |g| self.inner.forward(g, x))
    }
    fn params(&self) -> Vec<Tensor> {
        self.inner.params()
    }
}

/// Skip connection: the body's output plus the (optionally projected) input.
pub struct Residual {
    pub body: Sequential,
    pub shortcut: Option<Sequential>,
}

impl Layer for Residual {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        let main = self.body.forward(g, x)?;
        let skip = match &self.shortcut {
            Some(s) => s.forward(g, x)?,
            None => x,
        };
        g.add(main, skip)
    }
    fn params(&self) -> Vec<Tensor> {
        let mut p = self.body.params();
        if let Some(s) = &self.shortcut {
            p.extend(s.params());
        }
        p
    }
}

// ---------------------------------------------------------------------------
// optimizers
// ---------------------------------------------------------------------------

/// Step costs are vectorized over the total number of parameter elements.
#[derive(Clone, Debug, PartialEq)]
pub enum Optimizer {
    /// `w -= lr * g`: one public scaling.
    Sgd { lr: f64 },
    /// Moment updates (four public scalings), the squared gradient, the
    /// inverse root of the second moment and the division, then the final
    /// public scaling by the learning rate.
    Adam { lr: f64, beta1: f64, beta2: f64, eps: f64 },
}

impl Optimizer {
    pub fn sgd(lr: f64) -> Self {
        Optimizer::Sgd { lr }
    }

    pub fn adam(lr: f64) -> Self {
        Optimizer::Adam { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }

    pub fn step(&self, g: &mut Graph, params: &[Tensor]) -> Result<()> {
        let total: u64 = params
            .iter()
            .filter(|p| g.grad(**p).is_some())
            .map(|p| g.numel(*p))
            .sum();
        if total == 0 {
            return Err(Error::StepBeforeBackward);
        }
        g.with_label("optimizer", |g| {
            g.with_label("step", |g| {
                match self {
                    Optimizer::Sgd { .. } => {
                        lowering::fp_public_scale(&mut g.tracer, total, false);
                    }
                    Optimizer::Adam { .. } => {
                        for _ in 0..4 {
                            lowering::fp_public_scale(&mut g.tracer, total, false);
                        }
                        lowering::fp_mul(&mut g.tracer, total, false);
                        lowering::emit_complicated(&mut g.tracer, ComplicatedOp::InvSqrt, total);
                        lowering::emit_complicated(&mut g.tracer, ComplicatedOp::Div, total);
                        lowering::fp_public_scale(&mut g.tracer, total, false);
                    }
                }
                Ok(())
            })
        })
    }
}

// ---------------------------------------------------------------------------
// data loading
// ---------------------------------------------------------------------------

/// Serves fixed-size batches out of an already-shared dataset. Batching is a
/// free slice; the shuffle is a public permutation of shares and also free.
pub struct DataLoader {
    data: Tensor,
    labels: Option<Tensor>,
    batch_size: u64,
    len: u64,
    wraparound: bool,
}

impl DataLoader {
    pub fn new(
        g: &Graph,
        data: Tensor,
        labels: Option<Tensor>,
        batch_size: u64,
    ) -> Result<Self> {
        let len = g.shape(data)[0];
        if batch_size == 0 || batch_size > len {
            return Err(Error::Request(format!(
                "batch size {batch_size} does not fit dataset of {len} rows"
            )));
        }
        if let Some(l) = labels {
            if g.shape(l)[0] != len {
                return Err(Error::Request("label count differs from data rows".into()));
            }
        }
        Ok(DataLoader { data, labels, batch_size, len, wraparound: false })
    }

    pub fn with_wraparound(mut self) -> Self {
        self.wraparound = true;
        self
    }

    pub fn num_batches(&self) -> u64 {
        self.len / self.batch_size
    }

    pub fn batch(&self, g: &mut Graph, index: u64) -> Result<(Tensor, Option<Tensor>)> {
        let start = if self.wraparound {
            (index * self.batch_size) % self.len
        } else {
            let start = index * self.batch_size;
            if start + self.batch_size > self.len {
                return Err(Error::BatchOutOfRange { batch: index, len: self.len });
            }
            start
        };
        let start = start.min(self.len - self.batch_size);
        let x = g.slice_rows(self.data, start, self.batch_size)?;
        let y = match self.labels {
            Some(l) => Some(g.slice_rows(l, start, self.batch_size)?),
            None => None,
        };
        Ok((x, y))
    }
}

// ---------------------------------------------------------------------------
// model runner
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Inference,
    Train,
}

pub struct Model {
    pub layers: Box<dyn Layer>,
    /// Per-sample input shape, batch dimension excluded.
    pub sample_shape: Vec<u64>,
    pub classes: u64,
    pub default_batch_size: u64,
    pub default_optimizer: Optimizer,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub batches: u64,
    pub batch_size: Option<u64>,
    pub optimizer: Option<Optimizer>,
}

impl RunConfig {
    pub fn inference() -> Self {
        RunConfig { mode: Mode::Inference, batches: 1, batch_size: None, optimizer: None }
    }

    pub fn train(batches: u64) -> Self {
        RunConfig { mode: Mode::Train, batches, batch_size: None, optimizer: None }
    }
}

/// Shares the dataset once, then loops `batches` times over forward (and in
/// training mode loss, backward and the optimizer step).
pub fn trace_model(g: &mut Graph, model: &Model, run: &RunConfig) -> Result<()> {
    if run.batches == 0 {
        return Err(Error::Request("batch count must be at least 1".into()));
    }
    let batch_size = run.batch_size.unwrap_or(model.default_batch_size);
    let rows = batch_size * run.batches;
    let mut data_shape = vec![rows];
    data_shape.extend_from_slice(&model.sample_shape);
    let data = g.input(&data_shape, 0)?;
    match run.mode {
        Mode::Inference => {
            let loader = DataLoader::new(g, data, None, batch_size)?;
            g.for_range(run.batches, |g, i| {
                let (x, _) = loader.batch(g, i)?;
                model.layers.forward(g, x)?;
                Ok(())
            })
        }
        Mode::Train => {
            if model.classes == 0 {
                return Err(Error::Request(
                    "model declares no classes; training needs a classifier head".into(),
                ));
            }
            let labels = g.input(&[rows, model.classes], 0)?;
            let loader = DataLoader::new(g, data, Some(labels), batch_size)?;
            let optimizer = run
                .optimizer
                .clone()
                .unwrap_or_else(|| model.default_optimizer.clone());
            let params = model.layers.params();
            g.for_range(run.batches, |g, i| {
                g.zero_grad();
                let (x, y) = loader.batch(g, i)?;
                let logits = model.layers.forward(g, x)?;
                let loss = g.cross_entropy(logits, y.expect("labels present in training"))?;
                g.backward(loss)?;
                optimizer.step(g, &params)?;
                Ok(())
            })
        }
    }
}
