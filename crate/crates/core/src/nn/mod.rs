//! Minimal dense-tensor engine: the layers the autoencoder needs, their
//! exact gradients, binary cross-entropy and Adam.

pub mod adam;
pub mod layers;
pub mod network;
pub mod scalar;
pub mod tensor;

pub use adam::AdamState;
pub use layers::{
    bce_grad, bce_loss, conv2d_backward, conv2d_forward, dense_backward, dense_forward,
    maxpool2d_backward, maxpool2d_forward, relu, relu_backward, sigmoid, sigmoid_backward,
    tconv2d_backward, tconv2d_forward, upsample2d, upsample2d_backward, BCE_EPS,
};
pub use network::{ForwardCache, Gradients, Init, Layer, LayerSpec, Network, Params};
pub use scalar::Scalar;
pub use tensor::Tensor;
