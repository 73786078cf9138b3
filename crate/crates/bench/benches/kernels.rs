use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use hsmix_core::{
    compute_superpixels, fine_grained_saliency, hsmix_pair, one_hot, AugConfig, ImageTensor,
    PairRng,
};

fn texture(size: usize, phase: usize) -> ImageTensor {
    ImageTensor::from_fn(size, size, 3, |r, c, ch| {
        let v = ((r * 7 + c * 13 + ch * 5 + phase) % 29) as f64 / 28.0;
        if (r / 16 + c / 16) % 2 == 0 {
            v * 0.5
        } else {
            0.5 + v * 0.5
        }
    })
    .unwrap()
}

fn slic(c: &mut Criterion) {
    let img = texture(224, 0);
    let mut group = c.benchmark_group("slic_224");
    for l in [50, 300] {
        group.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, &l| {
            b.iter(|| compute_superpixels(black_box(&img), l, 10.0, 10).unwrap())
        });
    }
    group.finish();
}

fn saliency(c: &mut Criterion) {
    let img = texture(224, 3);
    c.bench_function("saliency_224", |b| {
        b.iter(|| fine_grained_saliency(black_box(&img)))
    });
}

fn pair(c: &mut Criterion) {
    let x1 = texture(224, 1);
    let x2 = texture(224, 9);
    let ids: Vec<u32> = (0..224 * 224).map(|i| u32::from(i % 224 > 100)).collect();
    let y1 = one_hot(224, 224, &ids, 2).unwrap();
    let y2 = one_hot(224, 224, &vec![1; 224 * 224], 2).unwrap();
    let cfg = AugConfig::default();
    c.bench_function("hsmix_pair_224", |b| {
        b.iter(|| hsmix_pair(&x1, &x2, &y1, &y2, &cfg, &PairRng::new(0, 0)).unwrap())
    });
}

criterion_group!(benches, slic, saliency, pair);
criterion_main!(benches);
