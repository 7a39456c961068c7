//! Absorbing, dispersive waveguide medium: refraction index models, the
//! reduction-validity check, the dispersion relation and penetration length.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{speed_of_light, Real};

/// Lorentz-model parameters of the filling dielectric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzParams<T> {
    /// Plasma frequency in rad/s.
    pub omega_p: T,
    /// Resonance frequency in rad/s.
    pub omega_l: T,
    /// Damping rate in rad/s.
    pub delta: T,
}

impl<T: Real> LorentzParams<T> {
    pub fn new(omega_p: T, omega_l: T, delta: T) -> Result<Self> {
        if omega_p <= T::zero() || omega_l <= T::zero() || delta <= T::zero() {
            return Err(Error::InvalidParameter(
                "Lorentz parameters must be strictly positive".into(),
            ));
        }
        Ok(Self { omega_p, omega_l, delta })
    }

    /// Absorption parameter n₁ = ω_p²/(4δ) implied by these parameters.
    pub fn absorption(&self) -> T {
        self.omega_p * self.omega_p / (T::lit(4.0) * self.delta)
    }
}

/// Waveguide plus absorber: cut-off frequency and the reduced absorption
/// parameter, optionally backed by the full Lorentz model it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuideMedium<T> {
    /// Vacuum speed of light in m/s.
    pub c: T,
    /// Cut-off frequency ω_c = cγ in rad/s.
    pub omega_c: T,
    /// Absorption parameter n₁ = ω_p²/(4δ) in rad/s.
    pub n1: T,
    /// Full Lorentz parameters, when known.
    pub lorentz: Option<LorentzParams<T>>,
}

impl<T: Real> GuideMedium<T> {
    pub fn new(omega_c: T, n1: T) -> Result<Self> {
        if omega_c <= T::zero() {
            return Err(Error::InvalidParameter("omega_c must be positive".into()));
        }
        if n1 < T::zero() {
            return Err(Error::InvalidParameter("n1 must be non-negative".into()));
        }
        Ok(Self { c: speed_of_light(), omega_c, n1, lorentz: None })
    }

    /// Attaches Lorentz parameters; they must reproduce `n1` to 1e-12
    /// relative.
    pub fn with_lorentz(mut self, p: LorentzParams<T>) -> Result<Self> {
        let implied = p.absorption();
        let rel = ((implied - self.n1) / self.n1).abs();
        if rel > T::lit(1e-12) {
            return Err(Error::InvalidParameter(format!(
                "Lorentz parameters imply n1 = {} but medium declares {}",
                implied, self.n1
            )));
        }
        self.lorentz = Some(p);
        Ok(self)
    }
}

/// Result of checking the two conditions under which the full Lorentz index
/// collapses to the reduced 1 + i n₁/ω form over a frequency band.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ValidityReport<T> {
    pub band_center: T,
    pub band_halfwidth: T,
    /// min over band of δ / |(ω² − ω_L²)/(2ω)|
    pub margin_resonance: T,
    /// min over band of δ / (ω_p²/(2ω))
    pub margin_plasma: T,
    /// Threshold both margins must exceed for `valid`.
    pub threshold: T,
    pub valid: bool,
}

/// Full Lorentz-model complex refraction index; branch with Im ≥ 0.
pub fn lorentz_refraction<T: Real>(omega: T, p: &LorentzParams<T>) -> Result<Complex<T>> {
    if omega == T::zero() {
        return Err(Error::ZeroFrequency);
    }
    let two = T::lit(2.0);
    let d = omega * omega - p.omega_l * p.omega_l;
    let denom = d * d + T::lit(4.0) * p.delta * p.delta * omega * omega;
    let num = Complex::new(d, -two * p.delta * omega);
    let arg = Complex::new(T::one(), T::zero())
        - Complex::new(p.omega_p * p.omega_p / denom, T::zero()) * num;
    let mut r = arg.sqrt();
    if r.im < T::zero() {
        r = -r;
    }
    Ok(r)
}

/// Reduced refraction index 1 + i n₁/ω.
pub fn reduced_refraction<T: Real>(omega: T, n1: T) -> Result<Complex<T>> {
    if omega == T::zero() {
        return Err(Error::ZeroFrequency);
    }
    Ok(Complex::new(T::one(), n1 / omega))
}

/// Minimizes the two reduction-condition margins over a dense grid across
/// the band `band_center ± band_halfwidth`.
pub fn assumption_margins<T: Real>(
    band_center: T,
    band_halfwidth: T,
    p: &LorentzParams<T>,
    threshold: T,
) -> Result<ValidityReport<T>> {
    let lo = band_center - band_halfwidth;
    let hi = band_center + band_halfwidth;
    if lo <= T::zero() {
        return Err(Error::BandCrossesZero { lo: lo.as_f64(), hi: hi.as_f64() });
    }
    let n = 2001usize;
    let mut m_res = T::infinity();
    let mut m_pla = T::infinity();
    for i in 0..n {
        let frac = T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap();
        let w = lo + (hi - lo) * frac;
        let two = T::lit(2.0);
        let res_scale = ((w * w - p.omega_l * p.omega_l) / (two * w)).abs();
        let pla_scale = p.omega_p * p.omega_p / (two * w);
        let mr = if res_scale == T::zero() { T::infinity() } else { p.delta / res_scale };
        let mp = p.delta / pla_scale;
        if mr < m_res {
            m_res = mr;
        }
        if mp < m_pla {
            m_pla = mp;
        }
    }
    Ok(ValidityReport {
        band_center,
        band_halfwidth,
        margin_resonance: m_res,
        margin_plasma: m_pla,
        threshold,
        valid: m_res > threshold && m_pla > threshold,
    })
}

/// Complex wavenumber k(ω) = (1/c)·√((ω + i n₁)² − ω_c²).
///
/// Branch: principal square root with the overall sign fixed so Im k ≥ 0 on
/// the whole real line and k → ω/c as ω → +∞. Continuous in ω.
pub fn wavenumber<T: Real>(omega: T, m: &GuideMedium<T>) -> Complex<T> {
    let radicand = Complex::new(omega, m.n1) * Complex::new(omega, m.n1)
        - Complex::new(m.omega_c * m.omega_c, T::zero());
    let mut r = radicand.sqrt();
    // For ω < 0 the radicand sits in the lower half plane and the principal
    // root lands in the fourth quadrant; flip to keep Im k ≥ 0.
    if r.im < T::zero() || (r.im == T::zero() && omega < T::zero()) {
        r = -r;
    }
    r / m.c
}

/// Penetration length l = 1/(2 Im k); +∞ when the medium does not absorb at
/// this frequency.
pub fn penetration_length<T: Real>(omega: T, m: &GuideMedium<T>) -> T {
    let im_k = wavenumber(omega, m).im;
    if im_k <= T::zero() {
        T::infinity()
    } else {
        (T::lit(2.0) * im_k).recip()
    }
}
