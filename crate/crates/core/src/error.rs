//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("frequency must be nonzero")]
    ZeroFrequency,

    #[error("frequency band [{lo:e}, {hi:e}] rad/s crosses zero")]
    BandCrossesZero { lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("(z = {z} m, t = {t:e} s) lies on or outside the light cone (t <= z/c)")]
    OutsideLightCone { z: f64, t: f64 },

    #[error("xi = omega_c/omega_0 = {xi} violates the bound {bound}")]
    XiOutOfRange { xi: f64, bound: &'static str },

    #[error("sharp-edge (kind 1) sources have unbounded spectral support; use the asymptotics module")]
    UnsupportedSource,

    #[error("quadrature residual {residual:e} exceeds tolerance {tolerance:e}")]
    Tolerance { residual: f64, tolerance: f64 },

    #[error("the positive-saddle intensity has no interior maximum at z = {z} m")]
    SaddlePeakVanished { z: f64 },

    #[error("no sample above the noise floor")]
    NoPeak,

    #[error("calibration needs at least two peaks, got {got}")]
    CalibrationImpossible { got: usize },

    #[error("first two peak heights {h1:e} and {h2:e} are within 10%; calibration is ambiguous")]
    AmbiguousCalibration { h1: f64, h2: f64 },

    #[error("receivers report different peak counts: {details}")]
    PeakCountMismatch { details: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed series file: {0}")]
    MalformedSeries(String),
}

pub type Result<T> = std::result::Result<T, Error>;
