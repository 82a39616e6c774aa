use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use nfagen::baseline::{tabakov_vardi, TvParams};
use nfagen::chain::{step_in_place, ChainParams};
use nfagen::class::{ClassSpec, Family};
use nfagen::dfa::minimal_dfa_size;
use nfagen::metropolis::{chain_rng, metropolis_step, MetropolisState};
use nfagen_bench::{alphabet, sampled_bullet, sampled_trim};

fn chain_steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("chain_step");
    for n in [10usize, 20, 50] {
        let class = ClassSpec::trim();
        let params = ChainParams::default_for(&class);
        let start = sampled_trim(n, 42);
        group.bench_function(format!("plain_trim_n{n}"), |b| {
            let mut rng = chain_rng(1, 0);
            let mut x = start.clone();
            b.iter(|| step_in_place(&mut x, &class, &params, &mut rng));
        });
    }
    for n in [10usize, 20] {
        let class = ClassSpec::trim();
        let params = ChainParams::default_for(&class);
        group.bench_function(format!("metropolis_trim_n{n}"), |b| {
            let mut rng = chain_rng(2, 0);
            let mut state = MetropolisState::start(&class, n, alphabet()).unwrap();
            b.iter(|| metropolis_step(&mut state, &class, &params, &mut rng, None));
        });
    }
    group.finish();
}

fn generators(c: &mut Criterion) {
    let mut group = c.benchmark_group("generators");
    let tv = TvParams {
        n: 20,
        alphabet: 2,
        sigma: 2.0,
        p_f: 0.2,
        p_i: None,
    };
    group.bench_function("tabakov_vardi_n20", |b| {
        let mut rng = chain_rng(3, 0);
        b.iter(|| tabakov_vardi(&tv, &mut rng).unwrap());
    });
    group.finish();
}

fn evaluation(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluation");
    let a = sampled_bullet(11, 7);
    group.bench_function("determinize_minimize_bullet_n11", |b| {
        b.iter_batched(
            || a.clone(),
            |a| minimal_dfa_size(&a),
            BatchSize::SmallInput,
        );
    });
    let class = ClassSpec::new(Family::DegPerLetter(2), true).unwrap();
    assert!(class.contains(&a));
    group.bench_function("class_membership_bullet_n11", |b| {
        b.iter(|| class.contains(&a));
    });
    group.finish();
}

criterion_group!(benches, chain_steps, generators, evaluation);
criterion_main!(benches);
