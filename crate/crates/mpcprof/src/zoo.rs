//! Built-in models, addressable by name from the CLI and the library.

use crate::autograd::{Graph, Tensor};
use crate::error::{Error, Result};
use crate::nn::{
    AvgPool2d, BatchNorm2d, Conv2d, Conv2dCfg, Flatten, Layer, Linear, MaxPool2d, Model,
    Optimizer, ReLU, Residual, Sequential, Sigmoid, Softmax,
};
use crate::trace::Tracer;
use crate::tree::Instruction;

/// Zoo model names. `demo` is the two-function micro program; the rest are
/// networks built from the layer library.
pub const NAMES: [&str; 8] = [
    "demo",
    "logreg",
    "lenet",
    "minionn",
    "vgg16",
    "resnet18",
    "resnet50",
    "transformer-block",
];

pub fn is_known(name: &str) -> bool {
    NAMES.contains(&name) || name == "transformer"
}

/// The micro demo: a labeled `test` function that calls a labeled `mul`
/// function on two secret integers and reveals the product.
pub fn trace_demo(tr: &mut Tracer) -> Result<()> {
    tr.with_label("test", |tr| {
        tr.with_label("mul", |tr| tr.emit(Instruction::muls(1)))?;
        tr.emit(Instruction::reveal(1));
        Ok(())
    })?
}

/// Builds a zoo model inside `g`. `training` selects training-mode batch
/// normalization and attaches classifier heads where the base model has none.
pub fn build(g: &mut Graph, name: &str, training: bool) -> Result<Model> {
    match name {
        "logreg" => Ok(logreg(g)),
        "lenet" => Ok(lenet(g)),
        "minionn" => Ok(minionn(g)),
        "vgg16" => Ok(vgg16(g)),
        "resnet18" => Ok(resnet(g, training, &[2, 2, 2, 2], false)),
        "resnet50" => Ok(resnet(g, training, &[3, 4, 6, 3], true)),
        "transformer-block" | "transformer" => Ok(transformer_block(g, training)),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

fn seq(layers: Vec<Box<dyn Layer>>) -> Sequential {
    Sequential::new(layers).expect("zoo layer lists are non-empty")
}

fn logreg(g: &mut Graph) -> Model {
    let layers = seq(vec![
        Box::new(Linear::new(g, 784, 10)) as Box<dyn Layer>,
        Box::new(Sigmoid),
    ]);
    Model {
        layers: Box::new(layers),
        sample_shape: vec![784],
        classes: 10,
        default_batch_size: 128,
        default_optimizer: Optimizer::sgd(0.01),
    }
}

fn lenet(g: &mut Graph) -> Model {
    let layers = seq(vec![
        Box::new(Conv2d::new(g, 3, 6, 5, Conv2dCfg::default())) as Box<dyn Layer>,
        Box::new(ReLU),
        Box::new(AvgPool2d::new(2)),
        Box::new(Conv2d::new(g, 6, 16, 5, Conv2dCfg::default())),
        Box::new(ReLU),
        Box::new(AvgPool2d::new(2)),
        Box::new(Flatten),
        Box::new(Linear::new(g, 16 * 4 * 4, 120)),
        Box::new(ReLU),
        Box::new(Linear::new(g, 120, 84)),
        Box::new(ReLU),
        Box::new(Linear::new(g, 84, 10)),
        Box::new(Softmax { axis: 1 }),
    ]);
    Model {
        layers: Box::new(layers),
        sample_shape: vec![3, 28, 28],
        classes: 10,
        default_batch_size: 128,
        default_optimizer: Optimizer::sgd(0.01),
    }
}

fn minionn(g: &mut Graph) -> Model {
    let pad = Conv2dCfg { stride: 1, padding: 1, groups: 1 };
    let layers = seq(vec![
        Box::new(Conv2d::new(g, 3, 64, 3, pad)) as Box<dyn Layer>,
        Box::new(ReLU),
        Box::new(Conv2d::new(g, 64, 64, 3, pad)),
        Box::new(ReLU),
        Box::new(AvgPool2d::new(2)),
        Box::new(Conv2d::new(g, 64, 64, 3, pad)),
        Box::new(ReLU),
        Box::new(Conv2d::new(g, 64, 64, 3, pad)),
        Box::new(ReLU),
        Box::new(AvgPool2d::new(2)),
        Box::new(Conv2d::new(g, 64, 64, 3, pad)),
        Box::new(ReLU),
        Box::new(Conv2d::new(g, 64, 64, 1, Conv2dCfg::default())),
        Box::new(ReLU),
        Box::new(Conv2d::new(g, 64, 16, 1, Conv2dCfg::default())),
        Box::new(ReLU),
        Box::new(Flatten),
        Box::new(Linear::new(g, 16 * 8 * 8, 10)),
    ]);
    Model {
        layers: Box::new(layers),
        sample_shape: vec![3, 32, 32],
        classes: 10,
        default_batch_size: 1,
        default_optimizer: Optimizer::sgd(0.01),
    }
}

fn vgg16(g: &mut Graph) -> Model {
    let pad = Conv2dCfg { stride: 1, padding: 1, groups: 1 };
    let mut layers: Vec<Box<dyn Layer>> = Vec::new();
    let mut channels = 3;
    for (count, width) in [(2u32, 64u64), (2, 128), (3, 256), (3, 512), (3, 512)] {
        for _ in 0..count {
            layers.push(Box::new(Conv2d::new(g, channels, width, 3, pad)));
            layers.push(Box::new(ReLU));
            channels = width;
        }
        layers.push(Box::new(MaxPool2d::new(2)));
    }
    layers.push(Box::new(Flatten));
    layers.push(Box::new(Linear::new(g, 512 * 7 * 7, 4096)));
    layers.push(Box::new(ReLU));
    layers.push(Box::new(Linear::new(g, 4096, 4096)));
    layers.push(Box::new(ReLU));
    layers.push(Box::new(Linear::new(g, 4096, 1000)));
    Model {
        layers: Box::new(seq(layers)),
        sample_shape: vec![3, 224, 224],
        classes: 1000,
        default_batch_size: 128,
        default_optimizer: Optimizer::sgd(0.01),
    }
}

fn basic_block(g: &mut Graph, cin: u64, cout: u64, stride: u64, training: bool) -> Residual {
    let body = seq(vec![
        Box::new(Conv2d::new(g, cin, cout, 3, Conv2dCfg { stride, padding: 1, groups: 1 }))
            as Box<dyn Layer>,
        Box::new(BatchNorm2d::new(g, cout, training)),
        Box::new(ReLU),
        Box::new(Conv2d::new(g, cout, cout, 3, Conv2dCfg { stride: 1, padding: 1, groups: 1 })),
        Box::new(BatchNorm2d::new(g, cout, training)),
    ]);
    let shortcut = (stride != 1 || cin != cout).then(|| {
        seq(vec![
            Box::new(Conv2d::new(g, cin, cout, 1, Conv2dCfg { stride, padding: 0, groups: 1 }))
                as Box<dyn Layer>,
            Box::new(BatchNorm2d::new(g, cout, training)),
        ])
    });
    Residual { body, shortcut }
}

fn bottleneck(g: &mut Graph, cin: u64, width: u64, stride: u64, training: bool) -> Residual {
    let cout = width * 4;
    let body = seq(vec![
        Box::new(Conv2d::new(g, cin, width, 1, Conv2dCfg::default())) as Box<dyn Layer>,
        Box::new(BatchNorm2d::new(g, width, training)),
        Box::new(ReLU),
        Box::new(Conv2d::new(g, width, width, 3, Conv2dCfg { stride, padding: 1, groups: 1 })),
        Box::new(BatchNorm2d::new(g, width, training)),
        Box::new(ReLU),
        Box::new(Conv2d::new(g, width, cout, 1, Conv2dCfg::default())),
        Box::new(BatchNorm2d::new(g, cout, training)),
    ]);
    let shortcut = (stride != 1 || cin != cout).then(|| {
        seq(vec![
            Box::new(Conv2d::new(g, cin, cout, 1, Conv2dCfg { stride, padding: 0, groups: 1 }))
                as Box<dyn Layer>,
            Box::new(BatchNorm2d::new(g, cout, training)),
        ])
    });
    Residual { body, shortcut }
}

fn resnet(g: &mut Graph, training: bool, depths: &[u32; 4], use_bottleneck: bool) -> Model {
    let mut layers: Vec<Box<dyn Layer>> = vec![
        Box::new(Conv2d::new(g, 3, 64, 7, Conv2dCfg { stride: 2, padding: 3, groups: 1 })),
        Box::new(BatchNorm2d::new(g, 64, training)),
        Box::new(ReLU),
        Box::new(MaxPool2d::new(2)),
    ];
    let widths = [64u64, 128, 256, 512];
    let mut cin = 64;
    for (stage, (&depth, &width)) in depths.iter().zip(widths.iter()).enumerate() {
        for block in 0..depth {
            let stride = if stage > 0 && block == 0 { 2 } else { 1 };
            if use_bottleneck {
                layers.push(Box::new(bottleneck(g, cin, width, stride, training)));
                cin = width * 4;
            } else {
                layers.push(Box::new(basic_block(g, cin, width, stride, training)));
                cin = width;
            }
            layers.push(Box::new(ReLU));
        }
    }
    layers.push(Box::new(AvgPool2d::new(7)));
    layers.push(Box::new(Flatten));
    layers.push(Box::new(Linear::new(g, cin, 1000)));
    Model {
        layers: Box::new(seq(layers)),
        sample_shape: vec![3, 224, 224],
        classes: 1000,
        default_batch_size: 1,
        default_optimizer: Optimizer::sgd(0.01),
    }
}

/// One self-attention encoder block: query/key/value/output projections,
/// scaled dot-product attention with a softmax, then a two-layer
/// feed-forward with the gelu activation. Training mode appends a mean-pool
/// classifier head.
struct EncoderBlock {
    seq_len: u64,
    d_model: u64,
    heads: u64,
    wq: Tensor,
    wk: Tensor,
    wv: Tensor,
    wo: Tensor,
    w1: Tensor,
    w2: Tensor,
    head: Option<Linear>,
}

impl EncoderBlock {
    fn new(
        g: &mut Graph,
        seq_len: u64,
        d_model: u64,
        heads: u64,
        d_ff: u64,
        classes: Option<u64>,
    ) -> Self {
        EncoderBlock {
            seq_len,
            d_model,
            heads,
            wq: g.param(&[d_model, d_model]),
            wk: g.param(&[d_model, d_model]),
            wv: g.param(&[d_model, d_model]),
            wo: g.param(&[d_model, d_model]),
            w1: g.param(&[d_model, d_ff]),
            w2: g.param(&[d_ff, d_model]),
            head: classes.map(|c| Linear::new(g, d_model, c)),
        }
    }

    fn split_heads(&self, g: &mut Graph, x: Tensor, batch: u64) -> Result<Tensor> {
        let dh = self.d_model / self.heads;
        let x = g.reshape(x, &[batch, self.seq_len, self.heads, dh])?;
        let x = g.permute(x, &[0, 2, 1, 3])?;
        g.reshape(x, &[batch * self.heads, self.seq_len, dh])
    }
}

impl Layer for EncoderBlock {
    fn forward(&self, g: &mut Graph, x: Tensor) -> Result<Tensor> {
        let shape = g.shape(x).to_vec();
        if shape.len() != 3 || shape[1] != self.seq_len || shape[2] != self.d_model {
            return Err(Error::Shape(format!(
                "encoder block expects (b, {}, {}), got {shape:?}",
                self.seq_len, self.d_model
            )));
        }
        let batch = shape[0];
        let dh = self.d_model / self.heads;
        let flat = g.reshape(x, &[batch * self.seq_len, self.d_model])?;

        let q = g.matmul(flat, self.wq)?;
        let k = g.matmul(flat, self.wk)?;
        let v = g.matmul(flat, self.wv)?;
        let q = self.split_heads(g, q, batch)?;
        let k = self.split_heads(g, k, batch)?;
        let v = self.split_heads(g, v, batch)?;

        let kt = g.permute(k, &[0, 2, 1])?;
        let scores = g.bmm(q, kt)?;
        let scores = g.public_scale(scores)?; // 1/sqrt(d_h)
        let attn = g.softmax(scores, 2)?;
        let ctx = g.bmm(attn, v)?;

        let ctx = g.reshape(ctx, &[batch, self.heads, self.seq_len, dh])?;
        let ctx = g.permute(ctx, &[0, 2, 1, 3])?;
        let ctx = g.reshape(ctx, &[batch * self.seq_len, self.d_model])?;
        let proj = g.matmul(ctx, self.wo)?;
        let attn_out = g.add(proj, flat)?;

        let hidden = g.matmul(attn_out, self.w1)?;
        let hidden = g.gelu(hidden)?;
        let ff = g.matmul(hidden, self.w2)?;
        let block_out = g.add(ff, attn_out)?;
        let out = g.reshape(block_out, &[batch, self.seq_len, self.d_model])?;

        match &self.head {
            None => Ok(out),
            Some(head) => {
                let pooled = g.mean_axis(out, 1)?;
                head.forward(g, pooled)
            }
        }
    }

    fn params(&self) -> Vec<Tensor> {
        let mut p = vec![self.wq, self.wk, self.wv, self.wo, self.w1, self.w2];
        if let Some(head) = &self.head {
            p.extend(head.params());
        }
        p
    }
}

fn transformer_block(g: &mut Graph, training: bool) -> Model {
    let (seq_len, d_model, heads, d_ff) = (512, 768, 12, 3072);
    let classes = 2;
    let block = EncoderBlock::new(g, seq_len, d_model, heads, d_ff, training.then_some(classes));
    Model {
        layers: Box::new(block),
        sample_shape: vec![seq_len, d_model],
        classes,
        default_batch_size: 1,
        default_optimizer: Optimizer::sgd(0.01),
    }
}
