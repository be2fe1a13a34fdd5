use criterion::{criterion_group, criterion_main, Criterion};
use lenia_bench::noise_patch;
use lenia_core::evaluation::{diversity, AnalyticSpace, DiversityConfig};
use lenia_core::nn::{Init, Trainer, Vae, VaeConfig};
use lenia_core::rng::{stream_rng, Stream};
use rand::Rng as _;

fn vae(c: &mut Criterion) {
    let cfg = VaeConfig { size: 64, ..VaeConfig::default() };
    let mut rng = stream_rng(1, Stream::Training, 0);
    let model = Vae::new(cfg, Init::FanIn, &mut rng).unwrap();
    let batch: Vec<_> = (0..16).map(|i| noise_patch(64, i)).collect();
    c.bench_function("vae_encode_64", |b| b.iter(|| model.encode_one(&batch[0]).unwrap()));
    let mut trainer = Trainer::new(model);
    let mut group = c.benchmark_group("vae_train");
    group.sample_size(10);
    group.bench_function("batch16_64", |b| b.iter(|| trainer.train_batch(&batch, &mut rng).unwrap()));
    group.finish();
}

fn binning(c: &mut Criterion) {
    let space = AnalyticSpace::behavior(8);
    let mut rng = stream_rng(2, Stream::Evaluation, 0);
    let points: Vec<Vec<f64>> = (0..5000).map(|_| (0..13).map(|_| rng.random_range(-6.0..6.0)).collect()).collect();
    c.bench_function("diversity_5000x13", |b| {
        b.iter(|| diversity(&points, &space, DiversityConfig { bins_inside: 5 }).unwrap())
    });
}

criterion_group!(benches, vae, binning);
criterion_main!(benches);
