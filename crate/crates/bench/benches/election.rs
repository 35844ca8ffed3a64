use std::collections::{BTreeMap, BTreeSet};
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use phids_core::election::default_r_max;
use phids_core::sim::{run, Mode, Scenario};
use phids_core::{build_pol, elect_monitors, fixtures, Graph, HopRadius, NodeId, PlaneValue};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(n: u32, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = BTreeSet::new();
    for i in 2..=n {
        edges.insert((rng.random_range(1..i), i));
    }
    for _ in 0..n {
        let (a, b) = (rng.random_range(1..=n), rng.random_range(1..=n));
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    Graph::from_edges(&edges.into_iter().collect::<Vec<_>>()).unwrap()
}

fn elections(c: &mut Criterion) {
    let g = fixtures::example_network();
    let pol = build_pol(&fixtures::example_plane_values(), PlaneValue::ZERO);
    c.bench_function("elect/example", |b| {
        b.iter(|| elect_monitors(black_box(&g), black_box(&pol), HopRadius::ONE, HopRadius::ONE).unwrap())
    });

    let mut group = c.benchmark_group("elect/random");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [40u32, 200, 1000] {
        let g = random_graph(n, &mut rng);
        let values: BTreeMap<NodeId, PlaneValue> =
            (1..=n).map(|i| (NodeId(i), PlaneValue::new(rng.random_range(1.0..100.0)).unwrap())).collect();
        let pol = build_pol(&values, PlaneValue::ZERO);
        let r_max = default_r_max(&g);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| elect_monitors(&g, &pol, HopRadius::ONE, r_max).unwrap())
        });
    }
    group.finish();
}

fn simulations(c: &mut Criterion) {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/scenarios");
    let text = std::fs::read_to_string(format!("{dir}/three_cliques.json")).unwrap();
    let sc = Scenario::from_json(&text).unwrap().resolve(Some(dir.as_ref())).unwrap();
    let mut group = c.benchmark_group("simulate/three-cliques");
    group.sample_size(10);
    for mode in [Mode::Phids, Mode::SpaidBaseline] {
        let sc = sc.with_mode(mode);
        group.bench_function(mode.to_string(), |b| b.iter(|| run(&sc).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, elections, simulations);
criterion_main!(benches);
