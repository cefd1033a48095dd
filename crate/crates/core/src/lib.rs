//! Core library for filter-bank cepstral features and spoofing-detector
//! back ends: WAV input, power-spectrum front end, manual and learned filter
//! banks, cepstral post-processing, a constrained filter-bank network, GMM
//! classifiers and EER evaluation.

pub mod audio;
pub mod cepstral;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod fbnn;
pub mod filterbank;
pub mod gmm;
pub mod io;

pub use audio::AudioBuffer;
pub use error::{Error, Result};
