//! Convolutional autoencoder over range-Doppler maps: quadrant patches
//! with shared weights, or the whole map for the baseline.

pub mod file;
pub mod model;
pub mod patch;
pub mod train;

pub use file::{
    load_weights, read_weights, save_weights, write_weights, WEIGHTS_MAGIC, WEIGHTS_VERSION,
};
pub use model::{
    decode, encode, input_batch, manifest, Autoencoder, Decoder, Encoder, LatentCode, ModelWeights,
    Variant, LATENT_DIM,
};
pub use patch::{
    reassemble, split_patches, split_pixels, Patch, PatchPosition, N_PATCHES, PATCH_PIXELS,
    PATCH_SIZE,
};
pub use train::{
    batch_gradients, epoch_order, train, train_baseline, train_variant, BatchGradients,
    TrainConfig, TrainOutcome,
};
