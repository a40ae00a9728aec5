//! Interference modulation: a single-RF-chain multi-antenna transmitter
//! serves a primary user (PU) with OFDM while switching between two
//! beamforming weights to send on-off keyed bits to a secondary user (SU).
//!
//! The numeric modules are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the CLI uses.

// `!(x >= lo)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod detector;
pub mod error;
pub mod scalar;
pub mod simulator;
pub mod sumrate;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;

pub type ComplexVector64 = channel::ComplexVector<f64>;
pub type ChannelPair64 = channel::ChannelPair<f64>;
pub type TargetGains64 = weights::TargetGains<f64>;
pub type WeightSet64 = weights::WeightSet<f64>;
pub type NormSummary64 = weights::NormSummary<f64>;
pub type DetectorModel64 = detector::DetectorModel<f64>;
pub type OfdmStats64 = detector::OfdmStats<f64>;
pub type ScenarioConfig64 = simulator::ScenarioConfig<f64>;
pub type BerResult64 = simulator::BerResult<f64>;
pub type SumRatePoint64 = sumrate::SumRatePoint<f64>;

pub type ChannelPair32 = channel::ChannelPair<f32>;
pub type WeightSet32 = weights::WeightSet<f32>;
pub type DetectorModel32 = detector::DetectorModel<f32>;
