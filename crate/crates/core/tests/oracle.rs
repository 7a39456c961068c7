//! Cross-checks of the fast spectral path against slow, independently
//! constructed references: per-point adaptive quadrature and the
//! contour-shift pole treatment extrapolated to zero shift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use upwave::medium::GuideMedium;
use upwave::propagation::{
    contour_shift_extrapolated, field_at, field_series, QuadratureConfig,
};
use upwave::source::{SourceSpec, WindowKind, WindowSpec};

fn setup() -> (SourceSpec<f64>, GuideMedium<f64>, QuadratureConfig) {
    let w = WindowSpec::new(WindowKind::SmoothEdge, 0.8e9, 0.8e9).unwrap();
    let s = SourceSpec::new(9.49e9, w).unwrap();
    let m = GuideMedium::new(9.5e9, 0.2e6).unwrap();
    let q = QuadratureConfig::default_for(&w).unwrap();
    (s, m, q)
}

#[test]
fn fast_path_matches_adaptive_quadrature() {
    let (s, m, q) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    // 20 random grid points spread over 4 distances.
    let zs = [50.0, 120.0, 200.0, 280.0];
    let cases: Vec<(f64, usize)> = zs
        .iter()
        .flat_map(|&z| {
            let mut r = ChaCha8Rng::seed_from_u64(rng.gen());
            (0..5)
                .map(|_| (z, r.gen_range(q.t_grid.n_t / 8..q.t_grid.n_t)))
                .collect::<Vec<_>>()
        })
        .collect();
    let series: Vec<_> = zs
        .par_iter()
        .map(|&z| (z, field_series(z, &s, &m, &q).unwrap()))
        .collect();
    for (z, k) in cases {
        let ts = &series.iter().find(|(sz, _)| *sz == z).unwrap().1;
        let t = ts.times[k];
        let reference = field_at(z, t, &s, &m, &q).unwrap();
        let got = ts.values[k];
        assert!(
            (got - reference).norm() < 10.0 * q.tolerance,
            "z = {z}, t = {t:e}: fast {got} vs reference {reference}"
        );
    }
}

#[test]
fn plemelj_matches_contour_shift() {
    let (s, m, q) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases: Vec<(f64, f64)> = (0..10)
        .map(|_| (rng.gen_range(50.0..300.0), rng.gen_range(0.8e-6..4.0e-6)))
        .collect();
    cases.par_iter().for_each(|&(z, t)| {
        let a = field_at(z, t, &s, &m, &q).unwrap();
        let b = contour_shift_extrapolated(z, t, &s, &m, q.tolerance, [1e4, 5e3, 2.5e3])
            .unwrap();
        // Agreement to 1e-6 on the unit-source amplitude scale.
        assert!(
            (a - b).norm() < 1e-6 * a.norm().max(1.0),
            "z = {z}, t = {t:e}: {a} vs {b}"
        );
    });
}
