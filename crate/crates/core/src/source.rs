//! Frequency-domain window functions, source-plane boundary signals and
//! weighted delayed pulse trains.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagation::{self, QuadratureConfig};
use crate::real::Real;
use crate::Complex64;

/// Edge family of the spectral window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowKind {
    /// m = 1: no window, the bare step spectrum.
    Sharp,
    /// m = 2: linear edges, discontinuous first derivative.
    LinearEdge,
    /// m = 3: smooth C¹ edges.
    SmoothEdge,
}

/// Spectral window with a central plateau of half-width `delta_omega` and
/// edges of width `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec<T> {
    pub kind: WindowKind,
    /// Plateau half-width Δω in rad/s.
    pub delta_omega: T,
    /// Edge width α in rad/s.
    pub alpha: T,
}

impl<T: Real> WindowSpec<T> {
    pub fn new(kind: WindowKind, delta_omega: T, alpha: T) -> Result<Self> {
        if kind != WindowKind::Sharp && (delta_omega <= T::zero() || alpha <= T::zero()) {
            return Err(Error::InvalidParameter(
                "windowed kinds need delta_omega > 0 and alpha > 0".into(),
            ));
        }
        Ok(Self { kind, delta_omega, alpha })
    }

    pub fn sharp() -> Self {
        Self { kind: WindowKind::Sharp, delta_omega: T::zero(), alpha: T::zero() }
    }

    /// Support half-width Δω + α; `None` for the sharp kind.
    pub fn support_halfwidth(&self) -> Option<T> {
        match self.kind {
            WindowKind::Sharp => None,
            _ => Some(self.delta_omega + self.alpha),
        }
    }
}

/// Window value f_m at an offset from the carrier; 1 on the plateau, 0
/// outside the support, even in the offset.
pub fn window_value<T: Real>(w: &WindowSpec<T>, offset: T) -> T {
    let a = offset.abs();
    match w.kind {
        WindowKind::Sharp => T::one(),
        WindowKind::LinearEdge => {
            if a < w.delta_omega {
                T::one()
            } else if a < w.delta_omega + w.alpha {
                T::one() - (a - w.delta_omega) / w.alpha
            } else {
                T::zero()
            }
        }
        WindowKind::SmoothEdge => {
            if a < w.delta_omega {
                T::one()
            } else if a < w.delta_omega + w.alpha {
                let x = a - w.delta_omega;
                (-(x * x) / (w.alpha * w.alpha - x * x)).exp()
            } else {
                T::zero()
            }
        }
    }
}

/// Carrier plus window: the single-pulse source description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec<T> {
    /// Carrier frequency ω₀ in rad/s.
    pub omega0: T,
    pub window: WindowSpec<T>,
}

impl<T: Real> SourceSpec<T> {
    pub fn new(omega0: T, window: WindowSpec<T>) -> Result<Self> {
        if omega0 <= T::zero() {
            return Err(Error::InvalidParameter("omega0 must be positive".into()));
        }
        if let Some(hw) = window.support_halfwidth() {
            if omega0 - hw <= T::zero() {
                return Err(Error::InvalidParameter(
                    "window support must stay at positive frequencies".into(),
                ));
            }
        }
        Ok(Self { omega0, window })
    }
}

/// One weighted, delayed term of a pulse train.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainTerm<T> {
    /// Real weight b.
    pub weight: T,
    /// Delay in seconds, ≥ 0.
    pub t_shift: T,
}

/// Weighted, delayed superposition of identical single pulses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseTrain<T> {
    pub source: SourceSpec<T>,
    pub terms: Vec<TrainTerm<T>>,
}

impl<T: Real> PulseTrain<T> {
    pub fn new(source: SourceSpec<T>, terms: Vec<TrainTerm<T>>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("pulse train needs at least one term".into()));
        }
        if terms[0].t_shift != T::zero() {
            return Err(Error::InvalidParameter("first train term must have t_shift = 0".into()));
        }
        for pair in terms.windows(2) {
            if pair[1].t_shift <= pair[0].t_shift {
                return Err(Error::InvalidParameter(
                    "train delays must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self { source, terms })
    }
}

/// Source boundary signal φ₀(t).
///
/// The sharp kind is the closed form e^(−iω₀t)·Θ(t) with Θ(0) = 1. The
/// windowed kinds run the same pole-split quadrature as the propagation
/// engine, at z = 0.
pub fn source_amplitude(s: &SourceSpec<f64>, t: f64, q: &QuadratureConfig) -> Result<Complex64> {
    match s.window.kind {
        WindowKind::Sharp => {
            if t < 0.0 {
                Ok(Complex64::new(0.0, 0.0))
            } else {
                Ok(Complex::from_polar(1.0, -s.omega0 * t))
            }
        }
        _ => {
            // z = 0: the dispersion relation drops out; any medium works.
            let m = crate::medium::GuideMedium::new(1.0, 0.0)?;
            propagation::field_at(0.0, t, s, &m, q)
        }
    }
}

/// Pulse-train boundary signal Φ₀(t) = Σᵢ bᵢ φ₀(t − tᵢ).
pub fn pulse_train_amplitude(
    p: &PulseTrain<f64>,
    t: f64,
    q: &QuadratureConfig,
) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for term in &p.terms {
        sum += source_amplitude(&p.source, t - term.t_shift, q)? * term.weight;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(kind: WindowKind) -> WindowSpec<f64> {
        WindowSpec::new(kind, 0.8e9, 0.8e9).unwrap()
    }

    #[test]
    fn window_examples() {
        assert_eq!(window_value(&w(WindowKind::LinearEdge), 0.0), 1.0);
        assert_eq!(window_value(&w(WindowKind::LinearEdge), 1.6e9), 0.0);
        let v = window_value(&w(WindowKind::SmoothEdge), 0.8e9 + 0.4e9);
        assert!((v - (-1.0f64 / 3.0).exp()).abs() < 1e-15);
        assert!((v - 0.71653).abs() < 1e-5);
        assert_eq!(window_value(&WindowSpec::<f64>::sharp(), 1e12), 1.0);
    }

    #[test]
    fn window_even_and_bounded() {
        for kind in [WindowKind::LinearEdge, WindowKind::SmoothEdge] {
            let spec = w(kind);
            for i in 0..10_000 {
                let u = -2.0e9 + 4.0e9 * i as f64 / 9_999.0;
                let v = window_value(&spec, u);
                assert!((0.0..=1.0).contains(&v));
                assert_eq!(v, window_value(&spec, -u));
            }
        }
    }

    #[test]
    fn smooth_edge_is_c1() {
        // Value and first difference continuous across both edge ends.
        let spec = w(WindowKind::SmoothEdge);
        let h = 1e2; // rad/s; tiny against alpha = 0.8e9
        for edge in [0.8e9, 1.6e9] {
            let lo = window_value(&spec, edge - h);
            let hi = window_value(&spec, edge + h);
            assert!((lo - hi).abs() < 1e-6, "value jump at {edge}");
            let dlo = (window_value(&spec, edge - h) - window_value(&spec, edge - 2.0 * h)) / h;
            let dhi = (window_value(&spec, edge + 2.0 * h) - window_value(&spec, edge + h)) / h;
            assert!((dlo - dhi).abs() * 0.8e9 < 1e-3, "slope jump at {edge}");
        }
    }

    #[test]
    fn sharp_source_closed_form() {
        let s = SourceSpec::new(9.49e9, WindowSpec::sharp()).unwrap();
        let q = QuadratureConfig::default_for(&s.window).unwrap();
        assert_eq!(source_amplitude(&s, -1e-9, &q).unwrap().norm(), 0.0);
        let v = source_amplitude(&s, 0.0, &q).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
        let v = source_amplitude(&s, 1e-9, &q).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn train_validation() {
        let s = SourceSpec::new(9.49e9, w(WindowKind::SmoothEdge)).unwrap();
        assert!(PulseTrain::new(s, vec![]).is_err());
        assert!(PulseTrain::new(s, vec![TrainTerm { weight: 1.0, t_shift: 1e-6 }]).is_err());
        let bad = vec![
            TrainTerm { weight: 1.0, t_shift: 0.0 },
            TrainTerm { weight: 0.5, t_shift: 2e-6 },
            TrainTerm { weight: 0.5, t_shift: 2e-6 },
        ];
        assert!(PulseTrain::new(s, bad).is_err());
        let good = vec![
            TrainTerm { weight: 1.0, t_shift: 0.0 },
            TrainTerm { weight: -0.5, t_shift: 80e-6 },
            TrainTerm { weight: 1.0, t_shift: 150e-6 },
            TrainTerm { weight: -0.5, t_shift: 240e-6 },
        ];
        assert!(PulseTrain::new(s, good).is_ok());
    }

    #[test]
    fn support_must_stay_positive() {
        let win = WindowSpec::new(WindowKind::LinearEdge, 9.0e9, 1.0e9).unwrap();
        assert!(SourceSpec::new(9.49e9, win).is_err());
    }
}
