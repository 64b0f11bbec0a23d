//! Space-time channel modulation (STCM) and its baselines: classical SIMO,
//! space shift keying, media-based modulation and the Alamouti code.
//!
//! The crate covers the whole link: constellations and bit mapping, Rayleigh
//! extended channels, encoders, exact ML detectors, union-bound error
//! analysis, and a deterministic Monte Carlo BER engine with a CSV front end.

pub mod analysis;
pub mod bits;
pub mod channel;
pub mod cli;
pub mod codec;
pub mod constellation;
pub mod detect;
pub mod error;
pub mod math;
pub mod matrix;
pub mod sim;

pub use bits::BitBlock;
pub use channel::{ExtendedChannel, RngStream};
pub use codec::{Codeword, Scheme, SchemeConfig, StcmCodeword};
pub use constellation::{Constellation, ConstellationKind};
pub use error::{Error, Result};
pub use matrix::CMatrix;
