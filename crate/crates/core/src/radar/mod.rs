//! Synthetic FMCW radar front end.

pub mod config;
pub mod dataset;
pub mod file;
pub mod scene;
pub mod sim;

pub use config::{RadarConfig, SPEED_OF_LIGHT};
pub use dataset::{derive_seed, DatasetSpec, Split};
pub use file::{load_adc, read_adc, save_adc, write_adc};
pub use scene::{MicroDoppler, Motion, Scatterer, ScattererKind, Scene, SceneLabel, Sinusoid};
pub use sim::{
    beat_signal, build_dataset, noise_std_for_peak_snr, simulate_frame, simulate_scene, AdcFrameSet,
};
