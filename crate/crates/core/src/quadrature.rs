//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands.
//!
//! Serves as the slow per-point reference against which the fast Fourier
//! summation path is checked. Panels start from caller-supplied breakpoints
//! and the worst panel is bisected until the global error estimate meets the
//! target.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::Complex64;

// 15-point Kronrod extension of 7-point Gauss (QUADPACK qk15 tables).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let sum = f(center - x) + f(center + x);
        kronrod += sum * WGK[j];
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }
    let integral = kronrod * half;
    let err = (kronrod - gauss).norm() * half.abs();
    (integral, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// Adaptive integrator configuration.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveConfig {
    /// Relative error target against max(|I|, `abs_scale`).
    pub tol_rel: f64,
    /// Scale floor protecting near-zero integrals from an impossible
    /// relative target.
    pub abs_scale: f64,
    /// Hard panel budget.
    pub max_panels: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self { tol_rel: 1e-9, abs_scale: 1e-6, max_panels: 2_000_000 }
    }
}

/// Integrates `f` over the union of `[breakpoints[i], breakpoints[i+1]]`.
///
/// Returns the integral and the final error estimate; fails with
/// [`Error::Tolerance`] when the panel budget is exhausted first.
pub fn integrate_adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    breakpoints: &[f64],
    cfg: &AdaptiveConfig,
) -> Result<(Complex64, f64)> {
    assert!(breakpoints.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for pair in breakpoints.windows(2) {
        let (value, err) = gk15(f, pair[0], pair[1]);
        total += value;
        total_err += err;
        heap.push(Panel { a: pair[0], b: pair[1], value, err });
    }
    while total_err > cfg.tol_rel * total.norm().max(cfg.abs_scale) {
        if heap.len() >= cfg.max_panels {
            return Err(Error::Tolerance {
                residual: total_err,
                tolerance: cfg.tol_rel * total.norm().max(cfg.abs_scale),
            });
        }
        let worst = heap.pop().expect("heap non-empty");
        if worst.err == 0.0 {
            // Every remaining panel is at floating-point resolution.
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; accept its estimate.
            total_err -= worst.err;
            heap.push(Panel { err: 0.0, ..worst });
            continue;
        }
        total -= worst.value;
        total_err -= worst.err;
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err) = gk15(f, a, b);
            total += value;
            total_err += err;
            heap.push(Panel { a, b, value, err });
        }
    }
    Ok((total, total_err))
}

/// Builds a sorted, deduplicated breakpoint list for `[a, b]`, keeping only
/// the interior points that fall inside and splitting long spans so that no
/// initial panel exceeds `max_span`.
pub fn breakpoints(a: f64, b: f64, interior: &[f64], max_span: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = vec![a, b];
    pts.extend(interior.iter().copied().filter(|&x| x > a && x < b));
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let mut out = Vec::new();
    for pair in pts.windows(2) {
        let span = pair[1] - pair[0];
        let n = (span / max_span).ceil().max(1.0) as usize;
        for i in 0..n {
            out.push(pair[0] + span * i as f64 / n as f64);
        }
    }
    out.push(b);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let f = |x: f64| Complex64::new(x * x * x - 2.0 * x, 1.0);
        let cfg = AdaptiveConfig::default();
        let (v, _) = integrate_adaptive(&f, &[0.0, 2.0], &cfg).unwrap();
        assert!((v.re - 0.0).abs() < 1e-12);
        assert!((v.im - 2.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_against_closed_form() {
        // ∫_0^1 e^{i 500 x} dx = (e^{i500} − 1)/(i 500)
        let f = |x: f64| Complex64::from_polar(1.0, 500.0 * x);
        let cfg = AdaptiveConfig { tol_rel: 1e-12, abs_scale: 1e-12, max_panels: 100_000 };
        let bps = breakpoints(0.0, 1.0, &[], 0.01);
        let (v, _) = integrate_adaptive(&f, &bps, &cfg).unwrap();
        let want = (Complex64::from_polar(1.0, 500.0) - 1.0) / Complex64::new(0.0, 500.0);
        assert!((v - want).norm() < 1e-11, "{v} vs {want}");
    }

    #[test]
    fn budget_exhaustion_reports_tolerance() {
        let f = |x: f64| Complex64::new((1e6 * x).sin() / (x + 1e-9), 0.0);
        let cfg = AdaptiveConfig { tol_rel: 1e-14, abs_scale: 1e-14, max_panels: 8 };
        assert!(matches!(
            integrate_adaptive(&f, &[0.0, 1.0], &cfg),
            Err(Error::Tolerance { .. })
        ));
    }

    #[test]
    fn breakpoint_builder() {
        let bps = breakpoints(0.0, 10.0, &[2.5, -1.0, 20.0], 5.0);
        assert_eq!(bps.first(), Some(&0.0));
        assert_eq!(bps.last(), Some(&10.0));
        assert!(bps.contains(&2.5));
        assert!(bps.windows(2).all(|p| p[1] > p[0] && p[1] - p[0] <= 5.0 + 1e-12));
    }
}
