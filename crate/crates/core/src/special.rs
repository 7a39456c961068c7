//! Sine integral, needed for the closed-form principal-value compensator.

use num_complex::Complex;

use crate::Complex64;

/// Sine integral Si(x) = ∫₀ˣ sin(u)/u du.
///
/// Power series below `x = 4`, otherwise through the exponential integral on
/// the imaginary axis, `Si(x) = π/2 + Im E₁(ix)`. Odd in `x`; accurate to a
/// few ulp over the full range used here (|x| up to ~1e7).
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x <= 4.0 {
        si_series(x)
    } else {
        std::f64::consts::FRAC_PI_2 + e1(Complex64::new(0.0, x)).im
    }
}

/// Σₖ (−1)ᵏ x^(2k+1) / ((2k+1)(2k+1)!), converges fast for x ≤ 4.
fn si_series(x: f64) -> f64 {
    let x2 = x * x;
    // u_k = (−1)^k x^(2k+1)/(2k+1)!; the summand is u_k/(2k+1).
    let mut u = x;
    let mut sum = x;
    for k in 1..200u32 {
        u *= -x2 / ((2 * k) as f64 * (2 * k + 1) as f64);
        let term = u / (2 * k + 1) as f64;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Exponential integral E₁(z) by the modified Lentz continued fraction,
/// valid away from the negative real axis; used here on the imaginary axis.
fn e1(z: Complex64) -> Complex64 {
    const FPMIN: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let one = Complex64::new(1.0, 0.0);
    let mut b = z + one;
    let mut c = Complex64::new(1.0 / FPMIN, 0.0);
    let mut d = one / b;
    let mut h = d;
    for i in 1..=2000 {
        let a = Complex::new(-((i * i) as f64), 0.0);
        b += Complex64::new(2.0, 0.0);
        d = one / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - one).norm() < EPS {
            return h * (-z).exp();
        }
    }
    h * (-z).exp()
}
