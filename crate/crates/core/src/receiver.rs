//! Operational peak detection with a noise floor and hold window,
//! calibration-based bit decoding, and the multi-receiver simultaneity
//! report.
//!
//! Receivers share no clock; every detection time is on the receiver's own
//! time axis. The simultaneity report compares them anyway, which is only
//! meaningful here because simulation time is global.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagation::TimeSeries;

/// Detection parameters: floor, hold window, sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverConfig {
    /// Noise floor l₀ on |φ|²; samples below it read as zero.
    pub l0: f64,
    /// Hold window Δt in seconds: a candidate maximum must stay unbeaten
    /// this long to count as a peak.
    pub hold_time: f64,
    /// Sampling period of the incoming series, seconds.
    pub sample_period: f64,
}

impl ReceiverConfig {
    pub fn new(l0: f64, hold_time: f64, sample_period: f64) -> Result<Self> {
        if !(l0 > 0.0) {
            return Err(Error::InvalidParameter("l0 must be positive".into()));
        }
        if !(sample_period > 0.0) {
            return Err(Error::InvalidParameter("sample_period must be positive".into()));
        }
        if hold_time <= sample_period {
            return Err(Error::InvalidParameter(
                "hold_time must exceed sample_period".into(),
            ));
        }
        Ok(Self { l0, hold_time, sample_period })
    }
}

/// One confirmed peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakEvent {
    /// Detection time τ_P = peak time + hold window.
    pub tau_p: f64,
    /// Time of the maximum itself, τ_P − Δt.
    pub peak_time: f64,
    /// |φ|² at the maximum.
    pub height: f64,
}

/// Bits recovered from a peak sequence with the two calibration levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedMessage {
    pub bits: Vec<u8>,
    pub level_one: f64,
    pub level_zero: f64,
}

impl DecodedMessage {
    pub fn as_string(&self) -> String {
        self.bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
    }
}

/// Streaming scan for peaks.
///
/// Samples below the floor are treated as zero. A candidate maximum is
/// confirmed once no later sample exceeds it for a full hold window; after
/// a confirmation, detection re-arms only when the signal next drops below
/// the floor.
pub fn detect_peaks(ts: &TimeSeries, cfg: &ReceiverConfig) -> Result<Vec<PeakEvent>> {
    if ts.times.len() >= 2 {
        let step = ts.times[1] - ts.times[0];
        if (step - cfg.sample_period).abs() > 1e-9 * cfg.sample_period.abs() {
            return Err(Error::InvalidParameter(format!(
                "series sampled at {step:e} s but receiver expects {:e} s",
                cfg.sample_period
            )));
        }
    }
    let mut events = Vec::new();
    let mut armed = true;
    let mut candidate: Option<(f64, f64)> = None;
    for (&t, v) in ts.times.iter().zip(&ts.values) {
        let s = {
            let a = v.norm_sqr();
            if a < cfg.l0 {
                0.0
            } else {
                a
            }
        };
        if !armed {
            if s == 0.0 {
                armed = true;
            }
            continue;
        }
        match candidate {
            None => {
                if s > 0.0 {
                    candidate = Some((t, s));
                }
            }
            Some((ct, cv)) => {
                if s > cv {
                    candidate = Some((t, s));
                } else if t - ct >= cfg.hold_time {
                    events.push(PeakEvent {
                        tau_p: ct + cfg.hold_time,
                        peak_time: ct,
                        height: cv,
                    });
                    candidate = None;
                    armed = s == 0.0;
                }
            }
        }
    }
    Ok(events)
}

/// Calibrates on the first two peaks and classifies every peak by the
/// midpoint threshold.
pub fn decode(events: &[PeakEvent]) -> Result<DecodedMessage> {
    if events.len() < 2 {
        return Err(Error::CalibrationImpossible { got: events.len() });
    }
    let (h1, h2) = (events[0].height, events[1].height);
    let gap = (h1 - h2).abs() / h1.max(h2);
    if gap < 0.1 {
        return Err(Error::AmbiguousCalibration { h1, h2 });
    }
    let level_one = h1.max(h2);
    let level_zero = h1.min(h2);
    let threshold = 0.5 * (level_one + level_zero);
    let bits = events.iter().map(|e| u8::from(e.height > threshold)).collect();
    Ok(DecodedMessage { bits, level_one, level_zero })
}

/// Margin of one ordered receiver pair at one peak index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairMargin {
    pub z1: f64,
    pub z2: f64,
    pub peak_index: usize,
    /// τ_P(z1) + (z2−z1)/c − τ_P(z2); positive beats the light relay.
    pub margin: f64,
}

/// Cross-receiver timing comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimultaneityReport {
    /// Max − min of τ_P across receivers, per peak index.
    pub spread: Vec<f64>,
    pub margins: Vec<PairMargin>,
    /// True when every margin is positive.
    pub pass: bool,
}

/// Compares detection times across receivers against the light-relay
/// baseline: a downstream receiver must fire before the nearest one could
/// have re-sent the signal at speed `c`.
pub fn simultaneity_report(
    per_receiver: &[(f64, Vec<PeakEvent>)],
    c: f64,
) -> Result<SimultaneityReport> {
    if per_receiver.len() < 2 {
        return Err(Error::InvalidParameter("need at least two receivers".into()));
    }
    let n_peaks = per_receiver[0].1.len();
    for (_, events) in per_receiver {
        if events.len() != n_peaks {
            let details = per_receiver
                .iter()
                .map(|(zz, ee)| format!("z={zz} m: {} peaks", ee.len()))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::PeakCountMismatch { details });
        }
    }
    if n_peaks == 0 {
        return Err(Error::NoPeak);
    }
    let mut spread = Vec::with_capacity(n_peaks);
    for p in 0..n_peaks {
        let taus = per_receiver.iter().map(|(_, e)| e[p].tau_p);
        let max = taus.clone().fold(f64::NEG_INFINITY, f64::max);
        let min = taus.fold(f64::INFINITY, f64::min);
        spread.push(max - min);
    }
    let mut margins = Vec::new();
    for i in 0..per_receiver.len() {
        for j in 0..per_receiver.len() {
            let (z1, e1) = &per_receiver[i];
            let (z2, e2) = &per_receiver[j];
            if z2 <= z1 {
                continue;
            }
            for p in 0..n_peaks {
                margins.push(PairMargin {
                    z1: *z1,
                    z2: *z2,
                    peak_index: p,
                    margin: e1[p].tau_p + (z2 - z1) / c - e2[p].tau_p,
                });
            }
        }
    }
    let pass = margins.iter().all(|m| m.margin > 0.0);
    Ok(SimultaneityReport { spread, margins, pass })
}
