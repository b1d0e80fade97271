//! JSON model descriptions: inputs, a layer list, the loss and the optimizer.
//!
//! ```json
//! {
//!   "inputs": [{"shape": [784], "from_party": 0}],
//!   "layers": [
//!     {"kind": "Linear", "in_features": 784, "out_features": 10},
//!     {"kind": "Softmax"}
//!   ],
//!   "loss": "cross_entropy",
//!   "optimizer": {"kind": "SGD", "lr": 0.01},
//!   "batch_size": 128
//! }
//! ```

use crate::autograd::Graph;
use crate::error::{Error, Result};
use crate::nn::{
    AvgPool2d, BatchNorm2d, Conv2d, Conv2dCfg, Flatten, Gelu, Labeled, Layer, Linear, MaxPool2d,
    Model, Optimizer, ReLU, Residual, Sequential, Sigmoid, Softmax,
};
use serde::Deserialize;
use std::path::Path;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub inputs: Vec<InputSpec>,
    pub layers: Vec<LayerSpec>,
    #[serde(default)]
    pub loss: Option<String>,
    #[serde(default)]
    pub optimizer: Option<OptimizerSpec>,
    #[serde(default)]
    pub classes: Option<u64>,
    #[serde(default)]
    pub batch_size: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    /// Per-sample shape; the batch dimension is added by the profiler.
    pub shape: Vec<u64>,
    #[serde(default)]
    pub from_party: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum LayerSpec {
    Linear {
        in_features: u64,
        out_features: u64,
    },
    Conv2d {
        in_channels: u64,
        out_channels: u64,
        kernel_size: u64,
        #[serde(default = "one")]
        stride: u64,
        #[serde(default)]
        padding: u64,
        #[serde(default = "one")]
        groups: u64,
    },
    BatchNorm2d {
        num_features: u64,
    },
    ReLU {},
    GELU {},
    Sigmoid {},
    AvgPool2d {
        kernel_size: u64,
        #[serde(default)]
        stride: Option<u64>,
    },
    MaxPool2d {
        kernel_size: u64,
        #[serde(default)]
        stride: Option<u64>,
    },
    Softmax {
        #[serde(default = "one_usize")]
        axis: usize,
    },
    Flatten {},
    #[serde(rename = "Residual-Add")]
    ResidualAdd {
        body: Vec<LayerSpec>,
        #[serde(default)]
        shortcut: Option<Vec<LayerSpec>>,
    },
    Sequential {
        layers: Vec<LayerSpec>,
    },
    /// Extra prefix segment around a sub-module.
    Labeled {
        label: String,
        layers: Vec<LayerSpec>,
    },
}

fn one() -> u64 {
    1
}

fn one_usize() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    pub kind: String,
    #[serde(default)]
    pub lr: Option<f64>,
    #[serde(default)]
    pub betas: Option<(f64, f64)>,
    #[serde(default)]
    pub eps: Option<f64>,
}

impl OptimizerSpec {
    pub fn build(&self) -> Result<Optimizer> {
        let lr = self.lr.unwrap_or(0.01);
        match self.kind.to_lowercase().as_str() {
            "sgd" => Ok(Optimizer::Sgd { lr }),
            "adam" => {
                let (beta1, beta2) = self.betas.unwrap_or((0.9, 0.999));
                Ok(Optimizer::Adam { lr, beta1, beta2, eps: self.eps.unwrap_or(1e-8) })
            }
            other => Err(Error::ModelSpec(format!("unknown optimizer `{other}`"))),
        }
    }
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<ModelSpec> {
        serde_json::from_str(text).map_err(|e| Error::ModelSpec(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<ModelSpec> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Instantiates the spec inside a graph. Training mode is decided by the
    /// caller and selects batch-statistics normalization.
    pub fn build(&self, g: &mut Graph, training: bool) -> Result<Model> {
        if self.inputs.is_empty() {
            return Err(Error::ModelSpec("at least one input is required".into()));
        }
        if self.layers.is_empty() {
            return Err(Error::ModelSpec("at least one layer is required".into()));
        }
        if let Some(loss) = &self.loss {
            if loss != "cross_entropy" {
                return Err(Error::ModelSpec(format!("unknown loss `{loss}`")));
            }
        }
        let layers = build_layers(g, &self.layers, training)?;
        let classes = match self.classes {
            Some(c) => c,
            None => infer_classes(&self.layers).unwrap_or(0),
        };
        Ok(Model {
            layers: Box::new(layers),
            sample_shape: self.inputs[0].shape.clone(),
            classes,
            default_batch_size: self.batch_size.unwrap_or(1),
            default_optimizer: self
                .optimizer
                .as_ref()
                .map(|o| o.build())
                .transpose()?
                .unwrap_or(Optimizer::Sgd { lr: 0.01 }),
        })
    }
}

fn infer_classes(layers: &[LayerSpec]) -> Option<u64> {
    let mut classes = None;
    for layer in layers {
        match layer {
            LayerSpec::Linear { out_features, .. } => classes = Some(*out_features),
            LayerSpec::Sequential { layers } | LayerSpec::Labeled { layers, .. } => {
                if let Some(c) = infer_classes(layers) {
                    classes = Some(c);
                }
            }
            LayerSpec::ResidualAdd { body, .. } => {
                if let Some(c) = infer_classes(body) {
                    classes = Some(c);
                }
            }
            _ => {}
        }
    }
    classes
}

fn build_layers(g: &mut Graph, specs: &[LayerSpec], training: bool) -> Result<Sequential> {
    let mut layers: Vec<Box<dyn Layer>> = Vec::with_capacity(specs.len());
    for spec in specs {
        layers.push(build_layer(g, spec, training)?);
    }
    Sequential::new(layers)
}

fn build_layer(g: &mut Graph, spec: &LayerSpec, training: bool) -> Result<Box<dyn Layer>> {
    Ok(match spec {
        LayerSpec::Linear { in_features, out_features } => {
            Box::new(Linear::new(g, *in_features, *out_features))
        }
        LayerSpec::Conv2d { in_channels, out_channels, kernel_size, stride, padding, groups } => {
            Box::new(Conv2d::new(
                g,
                *in_channels,
                *out_channels,
                *kernel_size,
                Conv2dCfg { stride: *stride, padding: *padding, groups: *groups },
            ))
        }
        LayerSpec::BatchNorm2d { num_features } => {
            Box::new(BatchNorm2d::new(g, *num_features, training))
        }
        LayerSpec::ReLU {} => Box::new(ReLU),
        LayerSpec::GELU {} => Box::new(Gelu),
        LayerSpec::Sigmoid {} => Box::new(Sigmoid),
        LayerSpec::AvgPool2d { kernel_size, stride } => Box::new(AvgPool2d {
            window: *kernel_size,
            stride: stride.unwrap_or(*kernel_size),
        }),
        LayerSpec::MaxPool2d { kernel_size, stride } => Box::new(MaxPool2d {
            window: *kernel_size,
            stride: stride.unwrap_or(*kernel_size),
        }),
        LayerSpec::Softmax { axis } => Box::new(Softmax { axis: *axis }),
        LayerSpec::Flatten {} => Box::new(Flatten),
        LayerSpec::ResidualAdd { body, shortcut } => {
            let body = build_layers(g, body, training)?;
            let shortcut = match shortcut {
                Some(s) => Some(build_layers(g, s, training)?),
                None => None,
            };
            Box::new(Residual { body, shortcut })
        }
        LayerSpec::Sequential { layers } => Box::new(build_layers(g, layers, training)?),
        LayerSpec::Labeled { label, layers } => {
            let inner = build_layers(g, layers, training)?;
            Box::new(Labeled::new(label, Box::new(inner)))
        }
    })
}
