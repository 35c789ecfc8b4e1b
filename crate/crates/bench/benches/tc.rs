use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use sqgen_bench::{random_sentences, random_tc};
use std::hint::black_box;

fn inference(c: &mut Criterion) {
    let model = random_tc(50_000, 1);
    let mut group = c.benchmark_group("tc_predict");
    for len in [8usize, 32, 64] {
        let sentences = random_sentences(50_000, len, 64, 2);
        group.throughput(Throughput::Elements(sentences.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(len), &sentences, |b, s| {
            b.iter(|| {
                for text in s {
                    black_box(model.predict(text).unwrap());
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, inference);
criterion_main!(benches);
