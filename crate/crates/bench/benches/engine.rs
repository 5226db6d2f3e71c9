use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gangan::gan::AdversarialPair;
use gangan::{adam_step, AdamConfig, AdamState, GanArch, Matrix, Mlp, Prng};

fn noise(prng: &mut Prng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_vec(rows, cols, prng.standard_normal(rows * cols)).unwrap()
}

fn mnist_generator(c: &mut Criterion) {
    let spec = GanArch::MNIST.generator_spec().unwrap();
    let mut prng = Prng::new(0);
    let net: Mlp = Mlp::init(&spec, &mut prng);
    let z = noise(&mut prng, 128, 64);
    let tape = net.forward(&z).unwrap();
    let upstream = noise(&mut prng, 128, 784);

    c.bench_function("generator forward b128", |b| {
        b.iter(|| net.forward(black_box(&z)).unwrap())
    });
    c.bench_function("generator backward b128", |b| {
        b.iter(|| {
            net.backward(black_box(&tape), black_box(&upstream), false)
                .unwrap()
        })
    });
}

fn adam(c: &mut Criterion) {
    let n = 113_745;
    let mut params = vec![0.1f32; n];
    let grads = vec![0.01f32; n];
    let mut state = AdamState::<f32>::new([n]);
    let cfg = AdamConfig::default();
    c.bench_function("adam step 113745", |b| {
        b.iter(|| adam_step(&mut [&mut params[..]], &[&grads[..]], &mut state, &cfg).unwrap())
    });
}

fn gan_batch(c: &mut Criterion) {
    let mut prng = Prng::new(1);
    let mut pair =
        AdversarialPair::init(&GanArch::MNIST, AdamConfig::default(), &mut prng).unwrap();
    let real = noise(&mut prng, 128, 784).map(|v| v.tanh());
    c.bench_function("mnist gan train_batch b128", |b| {
        b.iter(|| pair.train_batch(black_box(&real), &mut prng, 1).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = mnist_generator, adam, gan_batch
}
criterion_main!(benches);
