//! Saddle-pole approximation of the propagation integral: saddle
//! frequencies, the pole-presence indicator, component fields and
//! envelopes, the peak-time predictor, the closed-form plateau arrival
//! time, and the spatial boundaries of the simultaneity effect.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::medium::{wavenumber, GuideMedium};
use crate::real::Real;
use crate::source::SourceSpec;

/// Saddle-pole decomposition at one `(z, t)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SaddleEval<T> {
    pub z: T,
    pub t: T,
    /// Saddle frequency scale β = ω_c/√(1 − z²/(c²t²)).
    pub beta: T,
    pub omega_s_plus: Complex<T>,
    pub omega_s_minus: Complex<T>,
    /// Pole-presence indicator g(z, t); the pole term enters for g > 0.
    pub g: T,
    /// True when the indicator's inner radicand went negative and only its
    /// real part (zero) was used.
    pub g_radicand_negative: bool,
    pub phi_pole: Complex<T>,
    pub phi_s_plus: Complex<T>,
    pub phi_s_minus: Complex<T>,
    /// Θ(g)·φ_p + φ_s+ + φ_s−.
    pub approx: Complex<T>,
    /// Lower envelope I₋ = (|φ_s+| − |φ_s−|)².
    pub env_lo: T,
    /// Upper envelope I₊ = (|φ_s+| + |φ_s−|)².
    pub env_hi: T,
}

/// Predicted spatial window of the simultaneous-arrival effect.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EffectRange<T> {
    /// Below this the peak still moves slower than c.
    pub z_min: T,
    /// Saddle leaves the window support: c·τ_M·√(1 − ω_c²/(ω₀+Δω)²).
    pub z_max: T,
    /// The interior saddle maximum itself vanishes.
    pub z_m: T,
    /// Attenuation pushes the predicted peak below the noise floor, when a
    /// floor was given and it binds before `z_m`.
    pub z_noise: Option<T>,
    /// Plateau arrival time τ_M.
    pub tau_m: T,
    /// ξ = ω_c/ω₀.
    pub xi: T,
}

/// Group-velocity evaluation at the positive saddle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GroupVelocity<T> {
    /// 1/Re[dk/dω] at ω_s+, in m/s.
    pub v_g: T,
    /// Re ω_s+ > ω_c.
    pub above_cutoff: bool,
}

fn light_cone_check<T: Real>(z: T, t: T, m: &GuideMedium<T>) -> Result<()> {
    if z < T::zero() {
        return Err(Error::InvalidParameter("z must be non-negative".into()));
    }
    if t <= z / m.c {
        return Err(Error::OutsideLightCone { z: z.as_f64(), t: t.as_f64() });
    }
    Ok(())
}

/// √(1 − z²/(c²t²)) ∈ (0, 1].
fn cone_factor<T: Real>(z: T, t: T, m: &GuideMedium<T>) -> T {
    let r = z / (m.c * t);
    (T::one() - r * r).sqrt()
}

/// Saddle frequencies ω_s± = ±β − i n₁ with β = ω_c/√(1 − z²/(c²t²)).
pub fn saddle_frequencies<T: Real>(
    z: T,
    t: T,
    m: &GuideMedium<T>,
) -> Result<(T, Complex<T>, Complex<T>)> {
    light_cone_check(z, t, m)?;
    let beta = m.omega_c / cone_factor(z, t, m);
    Ok((
        beta,
        Complex::new(beta, -m.n1),
        Complex::new(-beta, -m.n1),
    ))
}

/// Pole indicator g(z,t) = (ω₀−β)(ω₀β−ω_c²) + n₁√((β²−ω_c²)(−ω₀²+2βω₀−ω_c²)).
///
/// When the second radicand factor is negative the square root is imaginary
/// and only its (zero) real part enters; the returned flag records this.
pub fn pole_indicator<T: Real>(
    z: T,
    t: T,
    s: &SourceSpec<T>,
    m: &GuideMedium<T>,
) -> Result<(T, bool)> {
    let (beta, _, _) = saddle_frequencies(z, t, m)?;
    let w0 = s.omega0;
    let wc2 = m.omega_c * m.omega_c;
    let first = (w0 - beta) * (w0 * beta - wc2);
    let two = T::lit(2.0);
    let radicand = (beta * beta - wc2) * (-(w0 * w0) + two * beta * w0 - wc2);
    if radicand < T::zero() {
        Ok((first, true))
    } else {
        Ok((first + m.n1 * radicand.sqrt(), false))
    }
}

/// Full saddle-pole decomposition for the sharp-onset source (the window is
/// ignored; the approximation is derived for the bare step spectrum).
pub fn approx_field<T: Real>(
    z: T,
    t: T,
    s: &SourceSpec<T>,
    m: &GuideMedium<T>,
) -> Result<SaddleEval<T>> {
    let (beta, ws_p, ws_m) = saddle_frequencies(z, t, m)?;
    let (g, g_flag) = pole_indicator(z, t, s, m)?;
    let k0 = wavenumber(s.omega0, m);
    let i = Complex::<T>::i();
    let phi_pole = -((i * z) * k0 - i * (s.omega0 * t)).exp();
    let phi_s_plus = saddle_component(z, t, s, m, true);
    let phi_s_minus = saddle_component(z, t, s, m, false);
    let pole_on = if g > T::zero() { T::one() } else { T::zero() };
    let approx = phi_pole * pole_on + phi_s_plus + phi_s_minus;
    let (ap, am) = (phi_s_plus.norm(), phi_s_minus.norm());
    Ok(SaddleEval {
        z,
        t,
        beta,
        omega_s_plus: ws_p,
        omega_s_minus: ws_m,
        g,
        g_radicand_negative: g_flag,
        phi_pole,
        phi_s_plus,
        phi_s_minus,
        approx,
        env_lo: (ap - am) * (ap - am),
        env_hi: (ap + am) * (ap + am),
    })
}

/// One saddle contribution φ_s± (plus = true selects the positive saddle).
fn saddle_component<T: Real>(
    z: T,
    t: T,
    s: &SourceSpec<T>,
    m: &GuideMedium<T>,
    plus: bool,
) -> Complex<T> {
    let sf = cone_factor(z, t, m);
    let i = Complex::<T>::i();
    // √(∓i): e^(−iπ/4) for the positive saddle, e^(+iπ/4) for the negative.
    let quarter_turn = if plus {
        Complex::from_polar(T::one(), -T::FRAC_PI_4())
    } else {
        Complex::from_polar(T::one(), T::FRAC_PI_4())
    };
    let pref = i * quarter_turn
        * (z * m.omega_c.sqrt() / ((T::lit(2.0) * T::PI()).sqrt() * m.c * t.powf(T::lit(1.5)) * sf.sqrt()));
    let sign = if plus { T::one() } else { -T::one() };
    let phase = Complex::new(-t * m.n1, -sign * t * m.omega_c * sf).exp();
    let denom = Complex::new(m.omega_c, T::zero())
        - Complex::new(s.omega0, m.n1) * (sign * sf);
    pref * phase / denom
}

/// Time of the interior maximum of |φ_s+|² beyond the light cone.
///
/// The saddle amplitude diverges toward the causal front where the two
/// saddles coalesce; the relevant maximum is the interior one after the
/// first dip. A log-spaced scan brackets it and golden-section refines it.
pub fn tau_ts_plus<T: Real>(z: T, s: &SourceSpec<T>, m: &GuideMedium<T>) -> Result<T> {
    if z <= T::zero() {
        return Err(Error::InvalidParameter("z must be positive".into()));
    }
    let t_front = z / m.c;
    let lo = t_front * (T::one() + T::lit(1e-9));
    let hi = T::lit(4.0) / (T::lit(2.0) * m.n1) + T::lit(3.0) * t_front;
    let amp2 = |t: T| saddle_component(z, t, s, m, true).norm_sqr();

    let n = 3000usize;
    let log_lo = (lo - t_front).ln();
    let log_hi = (hi - t_front).ln();
    let grid = |idx: usize| {
        let frac = T::from_usize(idx).unwrap() / T::from_usize(n - 1).unwrap();
        t_front + (log_lo + (log_hi - log_lo) * frac).exp()
    };
    let mut prev_v = amp2(grid(0));
    let mut seen_dip = false;
    let mut rising = false;
    let mut bracket: Option<(T, T)> = None;
    for idx in 1..n {
        let t = grid(idx);
        let v = amp2(t);
        if v > prev_v {
            if !rising {
                seen_dip = true;
            }
            rising = true;
        } else if rising && seen_dip {
            // prev_t was a discrete local maximum past the front dip.
            bracket = Some((grid(idx.saturating_sub(2)), t));
            break;
        } else {
            rising = false;
        }
        prev_v = v;
    }
    let (mut a, mut b) = bracket.ok_or(Error::SaddlePeakVanished { z: z.as_f64() })?;
    // Golden-section ascent.
    let inv_phi = T::lit(0.618_033_988_749_894_9);
    let mut c1 = b - (b - a) * inv_phi;
    let mut c2 = a + (b - a) * inv_phi;
    let mut f1 = amp2(c1);
    let mut f2 = amp2(c2);
    for _ in 0..200 {
        if (b - a) < T::lit(1e-14) * b.max(T::lit(1e-12)) {
            break;
        }
        if f1 < f2 {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + (b - a) * inv_phi;
            f2 = amp2(c2);
        } else {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - (b - a) * inv_phi;
            f1 = amp2(c1);
        }
    }
    Ok((a + b) * T::lit(0.5))
}

/// Closed-form plateau arrival time
/// τ_M = (1/(2n₁))·(3 − 2ξ² − 3(ξ² − 1)^(2/3))/ξ², for 1 < ξ < 3/2^(3/2).
pub fn tau_m<T: Real>(s: &SourceSpec<T>, m: &GuideMedium<T>) -> Result<T> {
    let xi = m.omega_c / s.omega0;
    if m.n1 / s.omega0 >= T::lit(1e-3) {
        return Err(Error::InvalidParameter(
            "tau_M assumes weak absorption, n1/omega0 < 1e-3".into(),
        ));
    }
    if xi <= T::one() {
        return Err(Error::XiOutOfRange { xi: xi.as_f64(), bound: "xi > 1" });
    }
    let upper = T::lit(3.0) / T::lit(2.0).powf(T::lit(1.5));
    if xi >= upper {
        return Err(Error::XiOutOfRange { xi: xi.as_f64(), bound: "xi < 3/2^(3/2)" });
    }
    let xi2 = xi * xi;
    let three = T::lit(3.0);
    let num = three - T::lit(2.0) * xi2 - three * (xi2 - T::one()).powf(T::lit(2.0) / three);
    Ok(num / (T::lit(2.0) * m.n1 * xi2))
}

/// Group velocity 1/Re[dk/dω] at the positive saddle.
pub fn group_velocity_at_saddle<T: Real>(
    z: T,
    t: T,
    m: &GuideMedium<T>,
) -> Result<GroupVelocity<T>> {
    let (_, ws_p, _) = saddle_frequencies(z, t, m)?;
    // dk/dω = (ω + i n₁)/(c² k), continued to the complex saddle.
    let radicand = (ws_p + Complex::new(T::zero(), m.n1)) * (ws_p + Complex::new(T::zero(), m.n1))
        - Complex::new(m.omega_c * m.omega_c, T::zero());
    let mut root = radicand.sqrt();
    if root.re < T::zero() {
        root = -root;
    }
    let k = root / m.c;
    let slowness = (ws_p + Complex::new(T::zero(), m.n1)) / (k * (m.c * m.c));
    Ok(GroupVelocity {
        v_g: slowness.re.recip(),
        above_cutoff: ws_p.re > m.omega_c,
    })
}

/// Spatial boundaries of the effect window.
pub fn effect_range<T: Real>(
    s: &SourceSpec<T>,
    m: &GuideMedium<T>,
    noise_floor: Option<T>,
) -> Result<EffectRange<T>> {
    let tau = tau_m(s, m)?;
    let xi = m.omega_c / s.omega0;
    let omega_edge = s.omega0 + s.window.delta_omega;
    let z_max = m.c * tau * (T::one() - (m.omega_c / omega_edge) * (m.omega_c / omega_edge)).sqrt();

    // dτ_Ts+/dz by central differences with relative step 1e-3.
    let dtau = |z: T| -> Result<T> {
        let h = z * T::lit(1e-3);
        let hi = tau_ts_plus(z + h, s, m)?;
        let lo = tau_ts_plus(z - h, s, m)?;
        Ok((hi - lo) / (T::lit(2.0) * h))
    };
    let inv_c = m.c.recip();

    // z_min: first z where |dτ/dz| drops below 1/c. The derivative is large
    // near the source and falls toward the plateau.
    let mut z_min = None;
    let n = 400usize;
    let z_lo = z_max * T::lit(1e-3);
    let mut prev = (z_lo, dtau(z_lo)?.abs() - inv_c);
    for i in 1..=n {
        let z = z_lo + (z_max - z_lo) * T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
        let val = dtau(z)?.abs() - inv_c;
        if prev.1 > T::zero() && val <= T::zero() {
            // Bisect the bracket.
            let (mut a, mut b) = (prev.0, z);
            for _ in 0..80 {
                let mid = (a + b) * T::lit(0.5);
                if dtau(mid)?.abs() - inv_c > T::zero() {
                    a = mid;
                } else {
                    b = mid;
                }
                if (b - a) < T::lit(1e-9) * z_max {
                    break;
                }
            }
            z_min = Some((a + b) * T::lit(0.5));
            break;
        }
        prev = (z, val);
    }
    let z_min = z_min.ok_or_else(|| {
        Error::InvalidParameter("no z_min crossing of |d tau/dz| = 1/c found".into())
    })?;

    // z_m: supremum of z still having an interior saddle maximum.
    let mut z_ok = z_max;
    while tau_ts_plus(z_ok, s, m).is_err() {
        z_ok = z_ok * T::lit(0.5);
        if z_ok < z_min {
            return Err(Error::SaddlePeakVanished { z: z_ok.as_f64() });
        }
    }
    let mut z_bad = z_ok * T::lit(2.0);
    let mut doublings = 0;
    while tau_ts_plus(z_bad, s, m).is_ok() {
        z_bad = z_bad * T::lit(2.0);
        doublings += 1;
        if doublings > 30 {
            return Err(Error::InvalidParameter("saddle maximum never vanishes".into()));
        }
    }
    for _ in 0..80 {
        let mid = (z_ok + z_bad) * T::lit(0.5);
        if tau_ts_plus(mid, s, m).is_ok() {
            z_ok = mid;
        } else {
            z_bad = mid;
        }
        if (z_bad - z_ok) < T::lit(1e-9) * z_bad {
            break;
        }
    }
    let z_m = z_ok;

    // z_noise: largest z (up to z_m) whose predicted peak still clears the
    // floor; None when the floor never binds.
    let z_noise = match noise_floor {
        None => None,
        Some(floor) => {
            let height = |z: T| -> Result<T> {
                let t = tau_ts_plus(z, s, m)?;
                Ok(saddle_component(z, t, s, m, true).norm_sqr())
            };
            let near_end = z_m * T::lit(0.999);
            if height(near_end)? >= floor {
                None
            } else if height(z_min)? < floor {
                Some(z_min)
            } else {
                let (mut a, mut b) = (z_min, near_end);
                for _ in 0..80 {
                    let mid = (a + b) * T::lit(0.5);
                    if height(mid)? >= floor {
                        a = mid;
                    } else {
                        b = mid;
                    }
                    if (b - a) < T::lit(1e-9) * z_m {
                        break;
                    }
                }
                Some((a + b) * T::lit(0.5))
            }
        }
    };

    Ok(EffectRange { z_min, z_max, z_m, z_noise, tau_m: tau, xi })
}
