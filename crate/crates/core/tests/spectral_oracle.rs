mod common;

use pdeeg::dsp::BandDefinition;
use pdeeg::spectral::{band_power_spectral, band_power_time, fft, power_spectrum};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn fft_matches_naive_dft_on_powers_of_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [1usize, 2, 4, 8, 64, 256, 1024] {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let got = fft(&x).unwrap();
        let want = common::naive_dft(&x);
        for (g, (re, im)) in got.values.iter().zip(&want) {
            assert!((g.re - re).abs() < 1e-9 && (g.im - im).abs() < 1e-9, "n={n}");
        }
    }
}

#[test]
fn fft_zero_pads_other_lengths() {
    let x: Vec<f64> = (0..100).map(|i| (i as f64 * 0.3).sin()).collect();
    let s = fft(&x).unwrap();
    assert_eq!(s.n_fft(), 128);
    assert_eq!(s.input_len, 100);
    let mut padded = x.clone();
    padded.resize(128, 0.0);
    for (g, (re, im)) in s.values.iter().zip(common::naive_dft(&padded)) {
        assert!((g.re - re).abs() < 1e-9 && (g.im - im).abs() < 1e-9);
    }
}

#[test]
fn sine_peaks_at_its_bin() {
    let fs = 128.0;
    let x = common::tone(10.0, fs, 256);
    let ps = power_spectrum(&x, fs).unwrap();
    assert_eq!(ps.freqs_hz[ps.peak_bin()], 10.0);
    assert_eq!(ps.resolution_hz(), 0.5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_power_of_two(exp in 4u32..11, seed in any::<u64>()) {
        let n = 1usize << exp;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let time = band_power_time(&x).unwrap();
        let s = fft(&x).unwrap();
        let spectral = s.values.iter().map(|c| c.norm_sqr()).sum::<f64>() / (n * n) as f64;
        prop_assert!((time - spectral).abs() <= 1e-10 * time);
        let ps = power_spectrum(&x, 100.0).unwrap();
        let full = BandDefinition::new("all", 0.0, 50.0);
        let integral = band_power_spectral(&ps, &full).unwrap();
        prop_assert!((time - integral).abs() <= 1e-10 * time);
    }

    #[test]
    fn band_powers_add_up(split in 1.0f64..49.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..256).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ps = power_spectrum(&x, 100.0).unwrap();
        let lo = band_power_spectral(&ps, &BandDefinition::new("lo", 0.0, split)).unwrap();
        let hi = band_power_spectral(&ps, &BandDefinition::new("hi", split, 50.0)).unwrap();
        let all = band_power_spectral(&ps, &BandDefinition::new("all", 0.0, 50.0)).unwrap();
        prop_assert!(((lo + hi) - all).abs() <= 1e-10 * all);
    }
}
