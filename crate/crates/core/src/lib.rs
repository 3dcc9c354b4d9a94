//! Analytics and Monte-Carlo simulation for physical-layer key exchange
//! between a full-duplex master and an IoT slave.
//!
//! The master broadcasts interference while the slave transmits key symbols
//! as continuous random phases. The master cancels its own interference and
//! decodes; an eavesdropper sees the phase compressed by the interference
//! and decodes with a high error rate everywhere except close to the slave.
//!
//! - [`linkbudget`]: free-space gains, SNR/SIR/SINR, reliable-range limits.
//! - [`modem`]: restricted-range M-PSK BER, Eve's phase compression, key codec.
//! - [`geometry`]: Apollonius eavesdropping regions, sectors, security factors.
//! - [`simkernel`]: seeded baseband Monte-Carlo of the exchange.
//!
//! Analytic code is generic over [`Real`] (`f32` or `f64`). The aliases below
//! fix the scalar for callers that do not need the generality.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod linkbudget;
pub mod modem;
pub mod num;
pub mod simkernel;
pub mod special;

pub use error::{Error, Result};
pub use num::{Point2, Real};

pub type Point64 = num::Point2<f64>;
pub type Point32 = num::Point2<f32>;
pub type RadioParams64 = linkbudget::RadioParams<f64>;
pub type RadioParams32 = linkbudget::RadioParams<f32>;
pub type AntennaPattern64 = linkbudget::AntennaPattern<f64>;
pub type AntennaPattern32 = linkbudget::AntennaPattern<f32>;
pub type NodeSpec64 = linkbudget::NodeSpec<f64>;
pub type NodeSpec32 = linkbudget::NodeSpec<f32>;
pub type Scenario64 = linkbudget::Scenario<f64>;
pub type Scenario32 = linkbudget::Scenario<f32>;
pub type ModScheme64 = modem::ModScheme<f64>;
pub type ModScheme32 = modem::ModScheme<f32>;
pub type EveRegion64 = geometry::EveRegion<f64>;
pub type EveRegion32 = geometry::EveRegion<f32>;
pub type SecurityReport64 = geometry::SecurityReport<f64>;
pub type SecurityReport32 = geometry::SecurityReport<f32>;
pub type BerField64 = geometry::BerField<f64>;
pub type BerField32 = geometry::BerField<f32>;
