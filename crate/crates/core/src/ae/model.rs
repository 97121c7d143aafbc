//! Encoder/decoder stacks and their named weight sets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::patch::{
    reassemble, split_pixels, Patch, PatchPosition, N_PATCHES, PATCH_PIXELS, PATCH_SIZE,
};
use crate::dsp::{RDI_PIXELS, RDI_SIZE};
use crate::error::{shape_err, Error, Result};
use crate::nn::{Init, Layer, LayerSpec, Network, Scalar, Tensor};
use crate::radar::derive_seed;

pub const LATENT_DIM: usize = 128;
const INIT_TAG: u64 = 0x1a17;

/// Which input the autoencoder sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Shared weights over the four 32×32 quadrants.
    Patch,
    /// One pass over the whole 64×64 map.
    FullImage,
}

impl Variant {
    pub fn input_side(self) -> usize {
        match self {
            Variant::Patch => PATCH_SIZE,
            Variant::FullImage => RDI_SIZE,
        }
    }

    /// Spatial side of the deepest feature map.
    fn bottleneck_side(self) -> usize {
        self.input_side() / 8
    }

    fn flat_features(self) -> usize {
        self.bottleneck_side() * self.bottleneck_side() * 64
    }

    /// Network inputs contributed by one 64×64 frame.
    pub fn inputs_per_frame(self) -> usize {
        match self {
            Variant::Patch => N_PATCHES,
            Variant::FullImage => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Patch => "patch",
            Variant::FullImage => "full-image",
        }
    }
}

fn encoder_layers() -> [(LayerSpec, Option<&'static str>); 11] {
    use LayerSpec::*;
    [
        (Conv2d { filters: 16 }, Some("enc.conv1")),
        (Relu, None),
        (MaxPool2d, None),
        (Conv2d { filters: 32 }, Some("enc.conv2")),
        (Relu, None),
        (MaxPool2d, None),
        (Conv2d { filters: 64 }, Some("enc.conv3")),
        (Relu, None),
        (MaxPool2d, None),
        (Flatten, None),
        (Dense { units: LATENT_DIM }, Some("enc.dense")),
    ]
}

fn decoder_layers(variant: Variant) -> [(LayerSpec, Option<&'static str>); 13] {
    use LayerSpec::*;
    let s = variant.bottleneck_side();
    [
        (
            Dense {
                units: variant.flat_features(),
            },
            Some("dec.dense"),
        ),
        (Reshape { shape: [s, s, 64] }, None),
        (TConv2d { filters: 64 }, Some("dec.tconv1")),
        (Relu, None),
        (Upsample2d, None),
        (TConv2d { filters: 32 }, Some("dec.tconv2")),
        (Relu, None),
        (Upsample2d, None),
        (TConv2d { filters: 16 }, Some("dec.tconv3")),
        (Relu, None),
        (Upsample2d, None),
        (TConv2d { filters: 1 }, Some("dec.tconv4")),
        (Sigmoid, None),
    ]
}

/// Walks a layer list, calling `f(spec, name, input_shape)` for each
/// parameterized layer.
fn trace(
    layers: &[(LayerSpec, Option<&'static str>)],
    input: Vec<usize>,
    mut f: impl FnMut(LayerSpec, &'static str, &[usize]) -> Result<()>,
) -> Result<()> {
    let mut shape = input;
    for &(spec, name) in layers {
        if let Some(name) = name {
            f(spec, name, &shape)?;
        }
        shape = Layer::<f64>::plain(spec).output_shape(&shape)?;
    }
    Ok(())
}

fn encoder_input(variant: Variant) -> Vec<usize> {
    vec![variant.input_side(), variant.input_side(), 1]
}

/// Tensor names and shapes, weight before bias, in file order.
pub fn manifest(variant: Variant, encoder_only: bool) -> Vec<(String, Vec<usize>)> {
    let mut out = Vec::new();
    let mut push = |_: LayerSpec, name: &str, w: Vec<usize>| {
        let units = *w.last().unwrap();
        out.push((format!("{name}.weight"), w));
        out.push((format!("{name}.bias"), vec![units]));
    };
    let enc = encoder_layers();
    trace(&enc, encoder_input(variant), |spec, name, input| {
        push(spec, name, Layer::<f64>::weight_shape(spec, input).unwrap());
        Ok(())
    })
    .expect("encoder stack is well formed");
    if !encoder_only {
        trace(
            &decoder_layers(variant),
            vec![LATENT_DIM],
            |spec, name, input| {
                push(spec, name, Layer::<f64>::weight_shape(spec, input).unwrap());
                Ok(())
            },
        )
        .expect("decoder stack is well formed");
    }
    out
}

/// Named parameter tensors plus training metadata. Values are stored in
/// `f32`, the precision of weight files.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelWeights {
    pub tensors: Vec<(String, Tensor<f32>)>,
    pub seed: u64,
    /// Not stored in weight files, so `None` after loading.
    pub epochs: Option<u32>,
}

impl ModelWeights {
    pub fn get(&self, name: &str) -> Option<&Tensor<f32>> {
        self.tensors.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn has_decoder(&self) -> bool {
        self.tensors.iter().any(|(n, _)| n.starts_with("dec."))
    }

    /// Checks the tensors against a known manifest and returns its variant.
    pub fn variant(&self) -> Result<Variant> {
        let encoder_only = !self.has_decoder();
        for variant in [Variant::Patch, Variant::FullImage] {
            let expected = manifest(variant, encoder_only);
            if expected.len() == self.tensors.len()
                && expected
                    .iter()
                    .zip(&self.tensors)
                    .all(|((en, es), (n, t))| en == n && es[..] == *t.shape())
            {
                return Ok(variant);
            }
        }
        let got: Vec<String> = self
            .tensors
            .iter()
            .map(|(n, t)| format!("{n}{:?}", t.shape()))
            .collect();
        shape_err(format!(
            "weights match no known manifest: {}",
            got.join(", ")
        ))
    }

    pub fn encoder_only(&self) -> ModelWeights {
        ModelWeights {
            tensors: self
                .tensors
                .iter()
                .filter(|(n, _)| n.starts_with("enc."))
                .cloned()
                .collect(),
            seed: self.seed,
            epochs: self.epochs,
        }
    }

    pub fn param_count(&self) -> usize {
        self.tensors.iter().map(|(_, t)| t.len()).sum()
    }

    fn tensor<T: Scalar>(&self, name: &str) -> Result<Tensor<T>> {
        self.get(name)
            .map(Tensor::cast)
            .ok_or_else(|| Error::Shape(format!("missing tensor {name}")))
    }
}

fn build_from<T: Scalar>(
    layers: &[(LayerSpec, Option<&'static str>)],
    weights: &ModelWeights,
) -> Result<Network<T>> {
    layers
        .iter()
        .map(|&(spec, name)| match name {
            Some(name) => Ok(Layer::with_params(
                spec,
                name,
                weights.tensor(&format!("{name}.weight"))?,
                weights.tensor(&format!("{name}.bias"))?,
            )),
            None => Ok(Layer::plain(spec)),
        })
        .collect::<Result<Vec<_>>>()
        .map(Network::new)
}

fn build_init<T: Scalar>(
    layers: &[(LayerSpec, Option<&'static str>)],
    input: Vec<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<Network<T>> {
    let mut out = Vec::with_capacity(layers.len());
    let mut shape = input;
    for (i, &(spec, name)) in layers.iter().enumerate() {
        let layer = match name {
            Some(name) => {
                let init = match (spec, layers.get(i + 1).map(|l| l.0)) {
                    (LayerSpec::Dense { .. }, _) | (_, Some(LayerSpec::Sigmoid)) => {
                        Init::GlorotUniform
                    }
                    _ => Init::HeUniform,
                };
                Layer::init(spec, name, &shape, init, rng)?
            }
            None => Layer::plain(spec),
        };
        shape = layer.output_shape(&shape)?;
        out.push(layer);
    }
    Ok(Network::new(out))
}

/// Stacks row-major 64×64 maps into the network input batch: four patches
/// per frame in [`PatchPosition::ALL`] order for the patch variant, one map
/// per frame otherwise.
pub fn input_batch<T: Scalar>(variant: Variant, images: &[&[T]]) -> Result<Tensor<T>> {
    let per_frame = variant.inputs_per_frame();
    let side = variant.input_side();
    let mut data = Vec::with_capacity(images.len() * RDI_PIXELS);
    for image in images {
        if image.len() != RDI_PIXELS {
            return shape_err(format!("expected {RDI_PIXELS} pixels, got {}", image.len()));
        }
        match variant {
            Variant::Patch => {
                for p in split_pixels(image)? {
                    data.extend_from_slice(&p.pixels);
                }
            }
            Variant::FullImage => data.extend_from_slice(image),
        }
    }
    Tensor::new(vec![images.len() * per_frame, side, side, 1], data)
}

/// The 128-dimensional code of one patch (or of a full image for the
/// baseline variant).
#[derive(Debug, Clone, PartialEq)]
pub struct LatentCode<T = f32> {
    pub values: Vec<T>,
    pub position: PatchPosition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Encoder<T = f32> {
    pub variant: Variant,
    pub net: Network<T>,
}

impl<T: Scalar> Encoder<T> {
    /// Needs only the `enc.*` tensors.
    pub fn from_weights(weights: &ModelWeights) -> Result<Self> {
        let variant = weights.variant()?;
        Ok(Self {
            variant,
            net: build_from(&encoder_layers(), weights)?,
        })
    }

    /// `(N, s, s, 1)` inputs to `(N, 128)` codes.
    pub fn encode_batch(&self, input: &Tensor<T>) -> Result<Tensor<T>> {
        self.net.forward(input)
    }

    /// Encodes a row-major square map of the variant's input side.
    pub fn encode_pixels(&self, pixels: &[T]) -> Result<Vec<T>> {
        let side = self.variant.input_side();
        let input = Tensor::new(vec![1, side, side, 1], pixels.to_vec())?;
        Ok(self.net.forward(&input)?.into_data())
    }

    pub fn encode(&self, patch: &Patch<T>) -> Result<LatentCode<T>> {
        if self.variant != Variant::Patch {
            return shape_err("full-image encoder cannot take a 32x32 patch");
        }
        Ok(LatentCode {
            values: self.encode_pixels(&patch.pixels)?,
            position: patch.position,
        })
    }

    /// One latent per patch for the patch variant, a single latent for the
    /// full-image variant.
    pub fn encode_image(&self, image: &[T]) -> Result<Vec<Vec<T>>> {
        let z = self.encode_batch(&input_batch(self.variant, &[image])?)?;
        Ok(z.data()
            .chunks_exact(LATENT_DIM)
            .map(<[T]>::to_vec)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoder<T = f32> {
    pub variant: Variant,
    pub net: Network<T>,
}

impl<T: Scalar> Decoder<T> {
    pub fn from_weights(weights: &ModelWeights) -> Result<Self> {
        let variant = weights.variant()?;
        if !weights.has_decoder() {
            return shape_err("weights carry no decoder tensors");
        }
        Ok(Self {
            variant,
            net: build_from(&decoder_layers(variant), weights)?,
        })
    }

    /// `(N, 128)` codes to `(N, s, s, 1)` maps.
    pub fn decode_batch(&self, latents: &Tensor<T>) -> Result<Tensor<T>> {
        self.net.forward(latents)
    }

    pub fn decode_values(&self, latent: &[T]) -> Result<Vec<T>> {
        if latent.len() != LATENT_DIM {
            return shape_err(format!(
                "latent has {} values, expected {LATENT_DIM}",
                latent.len()
            ));
        }
        let input = Tensor::new(vec![1, LATENT_DIM], latent.to_vec())?;
        Ok(self.net.forward(&input)?.into_data())
    }

    pub fn decode(&self, latent: &LatentCode<T>) -> Result<Patch<T>> {
        if self.variant != Variant::Patch {
            return shape_err("full-image decoder does not produce patches");
        }
        Ok(Patch {
            pixels: self.decode_values(&latent.values)?,
            position: latent.position,
        })
    }
}

pub fn encode(patch: &Patch, weights: &ModelWeights) -> Result<LatentCode> {
    Encoder::from_weights(weights)?.encode(patch)
}

pub fn decode(latent: &LatentCode, weights: &ModelWeights) -> Result<Patch> {
    Decoder::from_weights(weights)?.decode(latent)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Autoencoder<T = f32> {
    pub encoder: Encoder<T>,
    pub decoder: Decoder<T>,
}

impl<T: Scalar> Autoencoder<T> {
    /// Seeded initialization.
    pub fn init(variant: Variant, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, INIT_TAG));
        let encoder = build_init(&encoder_layers(), encoder_input(variant), &mut rng)?;
        let decoder = build_init(&decoder_layers(variant), vec![LATENT_DIM], &mut rng)?;
        Ok(Self {
            encoder: Encoder {
                variant,
                net: encoder,
            },
            decoder: Decoder {
                variant,
                net: decoder,
            },
        })
    }

    pub fn from_weights(weights: &ModelWeights) -> Result<Self> {
        Ok(Self {
            encoder: Encoder::from_weights(weights)?,
            decoder: Decoder::from_weights(weights)?,
        })
    }

    pub fn variant(&self) -> Variant {
        self.encoder.variant
    }

    pub fn to_weights(&self, seed: u64, epochs: Option<u32>) -> ModelWeights {
        let tensors = [&self.encoder.net, &self.decoder.net]
            .into_iter()
            .flat_map(|net| &net.layers)
            .filter_map(|l| Some((l.name.as_ref()?, l.params.as_ref()?)))
            .flat_map(|(name, p)| {
                [
                    (format!("{name}.weight"), p.weight.cast()),
                    (format!("{name}.bias"), p.bias.cast()),
                ]
            })
            .collect();
        ModelWeights {
            tensors,
            seed,
            epochs,
        }
    }

    /// Codes `(N, 128)` and reconstructions `(N, s, s, 1)` of an input batch
    /// built by [`input_batch`].
    pub fn forward_batch(&self, input: &Tensor<T>) -> Result<(Tensor<T>, Tensor<T>)> {
        let z = self.encoder.encode_batch(input)?;
        let y = self.decoder.decode_batch(&z)?;
        Ok((z, y))
    }

    /// Reconstructs a row-major 64×64 map.
    pub fn reconstruct(&self, image: &[T]) -> Result<Vec<T>> {
        let (_, y) = self.forward_batch(&input_batch(self.variant(), &[image])?)?;
        match self.variant() {
            Variant::Patch => {
                let patches: Vec<Patch<T>> = PatchPosition::ALL
                    .into_iter()
                    .zip(y.data().chunks_exact(PATCH_PIXELS))
                    .map(|(position, px)| Patch {
                        pixels: px.to_vec(),
                        position,
                    })
                    .collect();
                reassemble(&patches)
            }
            Variant::FullImage => Ok(y.into_data()),
        }
    }
}
