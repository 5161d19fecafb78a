use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use wigson::analysis::compute_moments;
use wigson::config::MapConfig;
use wigson::grid::{sample_field, GridSpec};
use wigson::render::{stft_sonogram, synth_mono};
use wigson::sonify::{method1_grid, method4_moments};
use wigson::wigner::{eval_cat, eval_coherent, eval_fock, hermite_function, PhasePoint, StateSpec};

fn disk_mass(state: &StateSpec, radius: f64, cells: usize) -> f64 {
    let c = state.frame_center();
    let field = sample_field(state, &GridSpec::square(c, radius, cells).unwrap()).unwrap();
    field
        .cells()
        .filter(|(_, _, pt, _, _)| (pt.r - c.r).powi(2) + (pt.p - c.p).powi(2) <= radius * radius)
        .map(|(_, _, _, a, v)| v * a)
        .sum()
}

#[test]
fn disk_normalization() {
    for m in 0..4 {
        let mass = disk_mass(&StateSpec::fock(m), 8.0, 512);
        assert!((mass - 1.0).abs() < 1e-4, "fock {m}: {mass}");
    }
    for d in [-0.5, -1.0, -2.0, -3.0] {
        let mass = disk_mass(&StateSpec::cat(d).unwrap(), 8.0, 512);
        assert!((mass - 1.0).abs() < 1e-4, "cat {d}: {mass}");
    }
}

#[test]
fn fock_marginals_are_densities() {
    // trapezoid over p on [-10, 10]
    let n = 4001;
    let h = 20.0 / (n - 1) as f64;
    for m in 0..4 {
        for r in [-2.0, -0.7, 0.0, 0.3, 1.5] {
            let mut sum = 0.0;
            for k in 0..n {
                let p = -10.0 + k as f64 * h;
                let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                sum += w * eval_fock(m, PhasePoint::new(r, p));
            }
            let density = hermite_function(m, r).powi(2);
            assert!((sum * h - density).abs() < 1e-5, "m={m} r={r}");
        }
    }
}

#[test]
fn sweep_moments_shrink_with_shift() {
    // σ_r falls monotonically along the kitten-to-coherent path
    let sigma = |d: f64| {
        let s = StateSpec::cat(d).unwrap();
        compute_moments(&sample_field(&s, &GridSpec::default_for(&s).unwrap()).unwrap())
            .unwrap()
            .sigma_r
    };
    let values: Vec<f64> = (1..=30).map(|k| sigma(-0.1 * k as f64)).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
}

#[test]
fn sonogram_of_method_four_shows_every_line() {
    let state = StateSpec::cat(-1.0).unwrap();
    let m = compute_moments(&sample_field(&state, &GridSpec::default_for(&state).unwrap()).unwrap()).unwrap();
    let cfg = MapConfig::default();
    let bank = method4_moments(&m, &cfg, 1.0).unwrap();
    let sono = stft_sonogram(&synth_mono(&bank, 48_000).unwrap()).unwrap();
    let col = &sono.magnitudes[sono.frame_count() / 2];
    let bin_hz = sono.frequencies[1];
    let lo = ((bank.partials[0].freq - 2.0 * bin_hz) / bin_hz) as usize;
    let hi = ((bank.partials[20].freq + 2.0 * bin_hz) / bin_hz) as usize;
    let maxima: Vec<usize> = (lo..=hi)
        .filter(|&k| col[k] > col[k - 1] && col[k] >= col[k + 1] && col[k] > -100.0)
        .collect();
    assert_eq!(maxima.len(), 21, "{maxima:?}");
    for (k, p) in maxima.iter().zip(&bank.partials) {
        assert!((*k as f64 * bin_hz - p.freq).abs() <= bin_hz);
    }
    // brightest near the centre, falling off on both sides
    let loud = |i: usize| col[maxima[i]];
    assert!(loud(10) > loud(5) && loud(5) > loud(0));
    assert!(loud(10) > loud(15) && loud(15) > loud(20));
}

#[test]
fn method_one_bank_peaks_at_minus_one_dbfs() {
    let state = StateSpec::fock(1);
    let field = sample_field(&state, &GridSpec::regular(-5.0, 5.0, -5.0, 5.0, 30, 30).unwrap()).unwrap();
    let bank = method1_grid(&field, &MapConfig::default(), 0.5).unwrap();
    assert_eq!(bank.partials.len(), 900);
    let peak = synth_mono(&bank, 48_000).unwrap().peak() as f64;
    assert!((20.0 * peak.log10() + 1.0).abs() < 1e-6);
}

proptest! {
    #[test]
    fn fock_parity_and_radial_symmetry(m in 0u32..12, r in -6.0f64..6.0, p in -6.0f64..6.0, t in 0.0f64..6.3) {
        let v = eval_fock(m, PhasePoint::new(r, p));
        prop_assert_eq!(v, eval_fock(m, PhasePoint::new(-r, -p)));
        let rho = (r * r + p * p).sqrt();
        let rotated = eval_fock(m, PhasePoint::new(rho * t.cos(), rho * t.sin()));
        prop_assert!((v - rotated).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_are_bounded(
        m in 0u32..12,
        d_re in -6.0f64..6.0,
        d_im in -6.0f64..6.0,
        r in -8.0f64..8.0,
        p in -8.0f64..8.0,
    ) {
        let pt = PhasePoint::new(r, p);
        let bound = 2.0 / PI + 1e-12;
        prop_assert!(eval_fock(m, pt).abs() <= bound);
        prop_assert!(eval_coherent(Complex64::new(d_re, d_im), pt).abs() <= bound);
        let d = Complex64::new(d_re, d_im);
        if d.norm() > 1e-3 {
            prop_assert!(eval_cat(d, pt).unwrap().abs() <= bound);
        }
    }
}
