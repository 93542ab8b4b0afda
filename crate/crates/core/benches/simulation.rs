use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use regwait_core::population::{
    killed_fixation_chain_sim, moran_excursion_simulate, KilledChainConfig, PopulationParams,
};
use regwait_core::sequence_sim::{simulate_segment_waiting, SimConfig};
use regwait_core::word_stats::scan_all_words;
use regwait_core::{DnaWord, Execution};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn segment_waiting(c: &mut Criterion) {
    let mut group = c.benchmark_group("segment_waiting_W6");
    group.sample_size(10);
    let word: DnaWord = "AACCGT".parse().unwrap();
    for (name, mode) in MODES {
        let mut config = SimConfig::new(word, 1024, 2000, 1);
        config.execution = mode;
        group.bench_with_input(BenchmarkId::from_parameter(name), &config, |b, cfg| {
            b.iter(|| simulate_segment_waiting(cfg).unwrap())
        });
    }
    group.finish();
}

fn killed_chain(c: &mut Criterion) {
    let mut group = c.benchmark_group("killed_chain_W8");
    group.sample_size(10);
    let word: DnaWord = "ACAGCTGT".parse().unwrap();
    for (name, mode) in MODES {
        let mut config = KilledChainConfig::new(word, PopulationParams::default(), 5000, 1);
        config.execution = mode;
        group.bench_with_input(BenchmarkId::from_parameter(name), &config, |b, cfg| {
            b.iter(|| killed_fixation_chain_sim(cfg).unwrap())
        });
    }
    group.finish();
}

fn word_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("scan_W8");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(name, |b| b.iter(|| scan_all_words(8, 1024, 1.0, mode).unwrap()));
    }
    group.finish();
}

fn moran(c: &mut Criterion) {
    let mut group = c.benchmark_group("moran_N50");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(name, |b| b.iter(|| moran_excursion_simulate(50, 20_000, 1, mode).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, segment_waiting, killed_chain, word_scan, moran);
criterion_main!(benches);
