//! Seed-sweep checks of statistical behaviour.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wavecv_core::cv::{initial_cascade, search_threshold, CvContext, CvMode, SearchConfig, Statistic};
use wavecv_core::harness::{noisy_realization, Cell};
use wavecv_core::signals::{sample_noise, test_function, NoiseFamily, TestFunction};
use wavecv_core::threshold::{estimate_sigma, visushrink};
use wavecv_core::wavelet::{dwt, FilterBank, FilterName};
use wavecv_core::Rule;

fn normal_noise(n: usize, seed: u64) -> Vec<f64> {
    sample_noise(NoiseFamily::Normal, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[test]
fn sigma_estimate_is_calibrated_for_gaussian_noise() {
    let filter = FilterBank::new(FilterName::La8);
    let hits = (0..100)
        .filter(|&seed| {
            let d = dwt(&normal_noise(2048, seed), &filter, 7).unwrap();
            (0.9..=1.1).contains(&estimate_sigma(&d))
        })
        .count();
    assert!(hits >= 95, "{hits}/100");
}

#[test]
fn visushrink_removes_pure_noise() {
    let filter = FilterBank::new(FilterName::La8);
    for seed in 0..100 {
        let d = dwt(&normal_noise(1024, 1000 + seed), &filter, 6).unwrap();
        let out = visushrink(&d, Rule::Hard);
        let total: usize = out.details.iter().map(Vec::len).sum();
        let zeros = out.details.iter().flatten().filter(|&&c| c == 0.0).count();
        assert!(zeros as f64 >= 0.95 * total as f64, "seed {seed}: {zeros}/{total}");
        assert_eq!(out.coarse, d.coarse);
    }
}

#[test]
fn pure_noise_search_thresholds_heavily() {
    let filter = FilterBank::new(FilterName::La8);
    let cfg = SearchConfig::default();
    let upper = (0..100)
        .filter(|&seed| {
            let y = normal_noise(512, 5000 + seed);
            let ctx = CvContext::new(&y, &filter, 4, CvMode::Block, Statistic::WithAgreement).unwrap();
            let levels: Vec<usize> = ctx.levels().collect();
            let hi = ctx.range_hi(&levels);
            let lambda = search_threshold(&ctx, &levels, &ctx.zero_profile(), hi, &cfg).unwrap();
            assert!((0.0..=hi).contains(&lambda));
            lambda >= 0.5 * hi
        })
        .count();
    assert!(upper >= 90, "{upper}/100");
}

#[test]
fn cascade_is_level_dependent_on_blip() {
    let filter = FilterBank::new(FilterName::La8);
    let cfg = SearchConfig::default();
    let cell = Cell { function: TestFunction::Blip, n: 512, snr: 5.0, noise: NoiseFamily::T3 };
    let truth = test_function(cell.function, cell.n).unwrap();
    let varied = (0..100)
        .filter(|&rep| {
            let y = noisy_realization(&cell, &truth, 99, rep).unwrap();
            // full-data j0 = J - 4 = 5, so the halves start one level lower
            let ctx = CvContext::new(&y, &filter, 4, CvMode::Block, Statistic::WithAgreement).unwrap();
            let profile = initial_cascade(&ctx, &cfg).unwrap();
            profile.values.windows(2).any(|w| w[0] != w[1])
        })
        .count();
    assert!(varied >= 80, "{varied}/100");
}
