//! Sequential layer stacks with reverse-mode gradients.

use rand::Rng;

use super::layers::{self, KERNEL};
use super::scalar::Scalar;
use super::tensor::Tensor;
use crate::error::{shape_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerSpec {
    Conv2d { filters: usize },
    TConv2d { filters: usize },
    MaxPool2d,
    Upsample2d,
    Dense { units: usize },
    Flatten,
    Reshape { shape: [usize; 3] },
    Relu,
    Sigmoid,
}

/// Weight initialization scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    HeUniform,
    GlorotUniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Params<T = f64> {
    pub weight: Tensor<T>,
    pub bias: Tensor<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer<T = f64> {
    pub spec: LayerSpec,
    /// Parameter name prefix, e.g. `enc.conv1`; set for parameterized layers.
    pub name: Option<String>,
    pub params: Option<Params<T>>,
}

impl<T: Scalar> Layer<T> {
    pub fn plain(spec: LayerSpec) -> Self {
        Self {
            spec,
            name: None,
            params: None,
        }
    }

    pub fn with_params(spec: LayerSpec, name: &str, weight: Tensor<T>, bias: Tensor<T>) -> Self {
        Self {
            spec,
            name: Some(name.to_string()),
            params: Some(Params { weight, bias }),
        }
    }

    /// Weight shape of a parameterized layer given its per-sample input shape.
    pub fn weight_shape(spec: LayerSpec, input: &[usize]) -> Option<Vec<usize>> {
        match (spec, input) {
            (LayerSpec::Conv2d { filters } | LayerSpec::TConv2d { filters }, &[_, _, c]) => {
                Some(vec![KERNEL, KERNEL, c, filters])
            }
            (LayerSpec::Dense { units }, _) => Some(vec![input.iter().product(), units]),
            _ => None,
        }
    }

    /// Seeded initialization; biases start at zero. Draws are made in `f64`
    /// so both scalar types see the same values.
    pub fn init(
        spec: LayerSpec,
        name: &str,
        input: &[usize],
        init: Init,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let shape = Self::weight_shape(spec, input).ok_or_else(|| {
            Error::InvalidArgument(format!("{spec:?} has no parameters for input {input:?}"))
        })?;
        let (fan_in, fan_out) = match shape[..] {
            [kh, kw, ci, co] => (kh * kw * ci, kh * kw * co),
            [n, m] => (n, m),
            _ => unreachable!(),
        };
        let limit = match init {
            Init::HeUniform => (6.0 / fan_in as f64).sqrt(),
            Init::GlorotUniform => (6.0 / (fan_in + fan_out) as f64).sqrt(),
        };
        let weight = Tensor::from_fn(&shape, |_| T::of_f64(rng.random_range(-limit..limit)));
        let bias = Tensor::zeros(&[*shape.last().unwrap()]);
        Ok(Self::with_params(spec, name, weight, bias))
    }

    /// Per-sample output shape, without the batch axis.
    pub fn output_shape(&self, input: &[usize]) -> Result<Vec<usize>> {
        let out = match (self.spec, input) {
            (LayerSpec::Conv2d { filters } | LayerSpec::TConv2d { filters }, &[h, w, _]) => {
                vec![h, w, filters]
            }
            (LayerSpec::MaxPool2d, &[h, w, c]) if h % 2 == 0 && w % 2 == 0 => vec![h / 2, w / 2, c],
            (LayerSpec::Upsample2d, &[h, w, c]) => vec![2 * h, 2 * w, c],
            (LayerSpec::Dense { units }, _) => vec![units],
            (LayerSpec::Flatten, _) => vec![input.iter().product()],
            (LayerSpec::Reshape { shape }, _)
                if shape.iter().product::<usize>() == input.iter().product::<usize>() =>
            {
                shape.to_vec()
            }
            (LayerSpec::Relu | LayerSpec::Sigmoid, _) => input.to_vec(),
            _ => return shape_err(format!("{:?} cannot take input {input:?}", self.spec)),
        };
        Ok(out)
    }

    fn params(&self) -> Result<&Params<T>> {
        self.params
            .as_ref()
            .ok_or_else(|| Error::Shape(format!("{:?} layer has no parameters", self.spec)))
    }
}

/// What a layer's backward pass needs from its forward pass.
#[derive(Debug, Clone)]
enum Saved<T> {
    Input(Tensor<T>),
    Output(Tensor<T>),
    PoolIndices {
        indices: Vec<usize>,
        input_shape: Vec<usize>,
    },
    Shape(Vec<usize>),
    Nothing,
}

/// Forward activations kept for [`Network::backward`].
#[derive(Debug, Clone)]
pub struct ForwardCache<T = f64> {
    saved: Vec<Saved<T>>,
    pub output: Tensor<T>,
}

/// Parameter gradients aligned with the network's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T = f64> {
    pub layers: Vec<Option<Params<T>>>,
}

impl<T: Scalar> Gradients<T> {
    pub fn zeros_like(net: &Network<T>) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| {
                    l.params.as_ref().map(|p| Params {
                        weight: Tensor::zeros(p.weight.shape()),
                        bias: Tensor::zeros(p.bias.shape()),
                    })
                })
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients<T>) -> Result<()> {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            match (a, b) {
                (Some(a), Some(b)) => {
                    a.weight.add_assign(&b.weight)?;
                    a.bias.add_assign(&b.bias)?;
                }
                (None, None) => {}
                _ => return shape_err("gradient layouts differ"),
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, k: T) {
        for p in self.layers.iter_mut().flatten() {
            p.weight.scale(k);
            p.bias.scale(k);
        }
    }

    /// Flat view in layer order, weight before bias.
    pub fn tensors(&self) -> impl Iterator<Item = &Tensor<T>> {
        self.layers
            .iter()
            .flatten()
            .flat_map(|p| [&p.weight, &p.bias])
    }
}

/// Layers applied in order to a batch: feature maps `(N, H, W, C)`,
/// vectors `(N, F)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network<T = f64> {
    pub layers: Vec<Layer<T>>,
}

impl<T: Scalar> Network<T> {
    pub fn new(layers: Vec<Layer<T>>) -> Self {
        Self { layers }
    }

    pub fn forward(&self, input: &Tensor<T>) -> Result<Tensor<T>> {
        let mut x = input.clone();
        for layer in &self.layers {
            x = Self::apply(layer, &x)?.0;
        }
        Ok(x)
    }

    pub fn forward_cached(&self, input: &Tensor<T>) -> Result<ForwardCache<T>> {
        let mut saved = Vec::with_capacity(self.layers.len());
        let mut x = input.clone();
        for layer in &self.layers {
            let (y, s) = Self::apply(layer, &x)?;
            saved.push(match s {
                Some(s) => s,
                None => Saved::Input(x),
            });
            x = y;
        }
        Ok(ForwardCache { saved, output: x })
    }

    /// Output plus, for layers that do not just need their input, the
    /// alternative saved state.
    fn apply(layer: &Layer<T>, x: &Tensor<T>) -> Result<(Tensor<T>, Option<Saved<T>>)> {
        Ok(match layer.spec {
            LayerSpec::Conv2d { .. } => {
                let p = layer.params()?;
                (layers::conv2d_forward(x, &p.weight, &p.bias)?, None)
            }
            LayerSpec::TConv2d { .. } => {
                let p = layer.params()?;
                (layers::tconv2d_forward(x, &p.weight, &p.bias)?, None)
            }
            LayerSpec::Dense { .. } => {
                let p = layer.params()?;
                (layers::dense_forward(x, &p.weight, &p.bias)?, None)
            }
            LayerSpec::MaxPool2d => {
                let (y, indices) = layers::maxpool2d_forward(x)?;
                let s = Saved::PoolIndices {
                    indices,
                    input_shape: x.shape().to_vec(),
                };
                (y, Some(s))
            }
            LayerSpec::Upsample2d => (layers::upsample2d(x)?, Some(Saved::Nothing)),
            LayerSpec::Flatten => {
                let n = batch_len(x)?;
                let f = x.len() / n.max(1);
                (
                    x.clone().reshape(&[n, f])?,
                    Some(Saved::Shape(x.shape().to_vec())),
                )
            }
            LayerSpec::Reshape { shape } => {
                let n = batch_len(x)?;
                let y = x.clone().reshape(&[n, shape[0], shape[1], shape[2]])?;
                (y, Some(Saved::Shape(x.shape().to_vec())))
            }
            LayerSpec::Relu => (layers::relu(x), None),
            LayerSpec::Sigmoid => {
                let y = layers::sigmoid(x);
                (y.clone(), Some(Saved::Output(y)))
            }
        })
    }

    /// Reverse pass from `grad_output` (dLoss/dOutput). Returns parameter
    /// gradients and, when requested, dLoss/dInput.
    pub fn backward(
        &self,
        cache: &ForwardCache<T>,
        grad_output: &Tensor<T>,
        need_input_grad: bool,
    ) -> Result<(Gradients<T>, Option<Tensor<T>>)> {
        if grad_output.shape() != cache.output.shape() {
            return shape_err(format!(
                "output gradient {:?} does not match output {:?}",
                grad_output.shape(),
                cache.output.shape()
            ));
        }
        let mut grads = vec![None; self.layers.len()];
        let mut g = grad_output.clone();
        for (idx, (layer, saved)) in self.layers.iter().zip(&cache.saved).enumerate().rev() {
            let want_input = need_input_grad || idx > 0;
            g = match (layer.spec, saved) {
                (LayerSpec::Conv2d { .. }, Saved::Input(x)) => {
                    let r = layers::conv2d_backward(x, &layer.params()?.weight, &g, want_input)?;
                    grads[idx] = Some(Params {
                        weight: r.kernels,
                        bias: r.bias,
                    });
                    match r.input {
                        Some(t) => t,
                        None => break,
                    }
                }
                (LayerSpec::TConv2d { .. }, Saved::Input(x)) => {
                    let r = layers::tconv2d_backward(x, &layer.params()?.weight, &g, want_input)?;
                    grads[idx] = Some(Params {
                        weight: r.kernels,
                        bias: r.bias,
                    });
                    match r.input {
                        Some(t) => t,
                        None => break,
                    }
                }
                (LayerSpec::Dense { .. }, Saved::Input(x)) => {
                    let r = layers::dense_backward(x, &layer.params()?.weight, &g, want_input)?;
                    grads[idx] = Some(Params {
                        weight: r.weights,
                        bias: r.bias,
                    });
                    match r.input {
                        Some(t) => t,
                        None => break,
                    }
                }
                (
                    LayerSpec::MaxPool2d,
                    Saved::PoolIndices {
                        indices,
                        input_shape,
                    },
                ) => layers::maxpool2d_backward(&g, indices, input_shape)?,
                (LayerSpec::Upsample2d, _) => layers::upsample2d_backward(&g)?,
                (LayerSpec::Flatten | LayerSpec::Reshape { .. }, Saved::Shape(shape)) => {
                    g.reshape(shape)?
                }
                (LayerSpec::Relu, Saved::Input(x)) => layers::relu_backward(x, &g),
                (LayerSpec::Sigmoid, Saved::Output(y)) => layers::sigmoid_backward(y, &g),
                (spec, _) => return shape_err(format!("forward cache does not fit {spec:?}")),
            };
        }
        let input_grad = need_input_grad.then_some(g);
        Ok((Gradients { layers: grads }, input_grad))
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .filter_map(|l| l.params.as_ref())
            .map(|p| p.weight.len() + p.bias.len())
            .sum()
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut Tensor<T>> {
        self.layers
            .iter_mut()
            .filter_map(|l| l.params.as_mut())
            .flat_map(|p| [&mut p.weight, &mut p.bias])
    }

    pub fn params(&self) -> impl Iterator<Item = &Tensor<T>> {
        self.layers
            .iter()
            .filter_map(|l| l.params.as_ref())
            .flat_map(|p| [&p.weight, &p.bias])
    }
}

fn batch_len<T: Scalar>(x: &Tensor<T>) -> Result<usize> {
    match x.shape() {
        [n, _, ..] => Ok(*n),
        s => shape_err(format!("expected a batched tensor, got {s:?}")),
    }
}
