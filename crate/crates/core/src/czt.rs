//! Chirp-z evaluation of Fourier sums on arbitrary uniform time grids.
//!
//! The propagation engine needs S(t_k) = Σ_j h_j e^(−i ω_j t_k) with both
//! grids uniform but incommensurate, which a plain FFT cannot produce.
//! Bluestein's identity jk = (j² + k² − (k−j)²)/2 turns the sum into a
//! linear convolution with a fixed chirp, done here with three FFTs.

use rustfft::FftPlanner;

use crate::Complex64;

/// Computes S_k = Σ_{j<N} h[j]·e^(−i (omega0 + j·domega)(t0 + k·dt)) for
/// k = 0..n_t.
pub fn fourier_sum(
    h: &[Complex64],
    omega0: f64,
    domega: f64,
    t0: f64,
    dt: f64,
    n_t: usize,
) -> Vec<Complex64> {
    let n = h.len();
    if n == 0 || n_t == 0 {
        return vec![Complex64::new(0.0, 0.0); n_t];
    }
    // Small problems: the direct sum is faster than three FFTs.
    if n * n_t <= 1 << 14 {
        return direct_sum(h, omega0, domega, t0, dt, n_t);
    }

    let theta = domega * dt;
    let len = (n + n_t - 1).next_power_of_two();

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(len);
    let ifft = planner.plan_fft_inverse(len);

    // x_j = h_j e^(−i j domega t0) e^(−i θ j²/2), zero-padded.
    let mut x = vec![Complex64::new(0.0, 0.0); len];
    for (j, xv) in x.iter_mut().enumerate().take(n) {
        let jf = j as f64;
        let phase = jf * domega * t0 + 0.5 * theta * jf * jf;
        *xv = h[j] * Complex64::from_polar(1.0, -phase);
    }

    // Chirp v_m = e^(+i θ m²/2), m ∈ [−(n−1), n_t−1], laid out circularly.
    let mut v = vec![Complex64::new(0.0, 0.0); len];
    for m in 0..n_t {
        let mf = m as f64;
        v[m] = Complex64::from_polar(1.0, 0.5 * theta * mf * mf);
    }
    for m in 1..n {
        let mf = m as f64;
        v[len - m] = Complex64::from_polar(1.0, 0.5 * theta * mf * mf);
    }

    fft.process(&mut x);
    fft.process(&mut v);
    for (xv, vv) in x.iter_mut().zip(v.iter()) {
        *xv *= *vv;
    }
    ifft.process(&mut x);

    let scale = 1.0 / len as f64;
    (0..n_t)
        .map(|k| {
            let kf = k as f64;
            let t_k = t0 + kf * dt;
            let phase = 0.5 * theta * kf * kf + omega0 * t_k;
            x[k] * scale * Complex64::from_polar(1.0, -phase)
        })
        .collect()
}

fn direct_sum(
    h: &[Complex64],
    omega0: f64,
    domega: f64,
    t0: f64,
    dt: f64,
    n_t: usize,
) -> Vec<Complex64> {
    (0..n_t)
        .map(|k| {
            let t = t0 + k as f64 * dt;
            h.iter()
                .enumerate()
                .map(|(j, hj)| {
                    hj * Complex64::from_polar(1.0, -(omega0 + j as f64 * domega) * t)
                })
                .sum()
        })
        .collect()
}
