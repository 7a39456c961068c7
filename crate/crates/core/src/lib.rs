//! Pulse propagation in absorbing, dispersive waveguides.
//!
//! A source at `z = 0` emits a quasi-monochromatic pulse whose spectrum is a
//! windowed step spectrum around a carrier just below the waveguide cut-off.
//! In an absorbing guide the temporal intensity maximum then arrives at
//! nearly the same time over a broad range of distances. This crate computes
//! the exact field by oscillatory-integral quadrature, predicts the effect
//! window with a saddle-pole approximation, and implements the receiver
//! protocol that detects and decodes the simultaneous peaks.
//!
//! The closed-form layers (`medium`, `source` windows, `asymptotics`) are
//! generic over the scalar type through [`real::Real`]; the quadrature and
//! FFT engine (`propagation`) and the receiver run on `f64`. Concrete `f64`
//! aliases for the generic types live at the crate root.

pub mod asymptotics;
pub mod czt;
pub mod error;
pub mod medium;
pub mod propagation;
pub mod quadrature;
pub mod real;
pub mod receiver;
pub mod source;
pub mod special;

pub use error::{Error, Result};

/// Complex scalar used by the numerical engine.
pub type Complex64 = num_complex::Complex<f64>;

/// `f64` medium parameters.
pub type GuideMedium = medium::GuideMedium<f64>;
/// `f64` Lorentz-model parameters.
pub type LorentzParams = medium::LorentzParams<f64>;
/// `f64` validity report.
pub type ValidityReport = medium::ValidityReport<f64>;
/// `f64` window description.
pub type WindowSpec = source::WindowSpec<f64>;
/// `f64` source description.
pub type SourceSpec = source::SourceSpec<f64>;
/// `f64` pulse train.
pub type PulseTrain = source::PulseTrain<f64>;
/// `f64` saddle-pole decomposition at one `(z, t)`.
pub type SaddleEval = asymptotics::SaddleEval<f64>;
/// `f64` predicted effect window.
pub type EffectRange = asymptotics::EffectRange<f64>;

/// Vacuum speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
