//! One-dimensional signal decomposition for bolt-anchoring echo records.
//!
//! The pipeline is morphological pre-filtering ([`morphology`]) followed by
//! variational mode decomposition ([`vmd`]), with Hilbert instantaneous
//! frequency analysis ([`hilbert`]) of the extracted modes. [`bolt`] ties the
//! stages together and turns a picked echo into an anchor length.

pub mod bolt;
pub mod csv;
mod error;
mod fft;
pub mod hilbert;
pub mod morphology;
pub mod signal;
pub mod synthesis;
pub mod vmd;

pub use error::{Error, Result};
pub use signal::{ComplexSignal, Signal};
