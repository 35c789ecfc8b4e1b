use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use sqgen_bench::trained_stack;
use sqgen_core::generate_questions;
use std::hint::black_box;

fn generate(c: &mut Criterion) {
    let (bundle, models) = trained_stack(5);
    let jobs = &bundle.jobs.test;
    let mut group = c.benchmark_group("generate_questions");
    group.throughput(Throughput::Elements(jobs.len() as u64));
    group.bench_function("test_postings", |b| {
        b.iter(|| {
            for job in jobs {
                black_box(generate_questions(job, &models).unwrap());
            }
        })
    });
    group.finish();
}

criterion_group!(benches, generate);
criterion_main!(benches);
