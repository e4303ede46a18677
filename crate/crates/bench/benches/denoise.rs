use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wavecv_core::harness::{denoise, DenoiseOptions, Method};
use wavecv_core::signals::{sample_noise, scale_to_snr, test_function, NoiseFamily, TestFunction};
use wavecv_core::wavelet::{dwt, idwt, FilterBank, FilterName};

fn noisy(n: usize) -> Vec<f64> {
    let f = test_function(TestFunction::Heavisine, n).unwrap();
    let e = sample_noise(NoiseFamily::T3, n, &mut ChaCha8Rng::seed_from_u64(1));
    scale_to_snr(&f, &e, 5.0).unwrap()
}

fn transform(c: &mut Criterion) {
    let filter = FilterBank::new(FilterName::La8);
    let mut group = c.benchmark_group("dwt_round_trip");
    for n in [1024usize, 4096, 16384] {
        let y = noisy(n);
        let j0 = n.trailing_zeros() as usize - 4;
        group.bench_with_input(BenchmarkId::from_parameter(n), &y, |b, y| {
            b.iter(|| idwt(&dwt(black_box(y), &filter, j0).unwrap()).unwrap())
        });
    }
    group.finish();
}

fn methods(c: &mut Criterion) {
    let opts = DenoiseOptions::default();
    let mut group = c.benchmark_group("denoise_2048");
    group.sample_size(20);
    let y = noisy(2048);
    for method in [Method::LdBlock, Method::Nason, Method::Sureshrink, Method::VisushrinkHard] {
        group.bench_with_input(BenchmarkId::from_parameter(method), &y, |b, y| {
            b.iter(|| denoise(black_box(y), method, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, transform, methods);
criterion_main!(benches);
