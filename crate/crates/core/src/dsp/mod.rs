//! Range-Doppler preprocessing: ADC frames to normalized 64×64 images.

pub mod chain;
pub mod file;
pub mod window;

pub use chain::{
    mti_filter, normalize_rdi, Preprocessor, RangeDopplerImage, RangeSpectrum, RDI_PIXELS, RDI_SIZE,
};
pub use file::{load_rdis, read_rdis, save_rdis, write_rdis};
pub use window::chebyshev_window;
