use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hidpos::algebra::rational::int;
use hidpos::algebra::{buchberger, normal_form};
use hidpos::explore::{gap_report, DomainDescription, GapOptions, VarietyOptions};
use hidpos::sos::{lower_bound, solve_sdp, SdpOptions, SdpProblem, SparseSym};
use hidpos::tower::{CharVariant, SamplingConfig};
use hidpos::{certify_positivity, sample_variety, BaseSpec, Polynomial, TermOrder, TowerState};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn names(ns: &[&str]) -> Vec<String> {
    ns.iter().map(|s| s.to_string()).collect()
}

/// `[-1, 1]` with `|t|` and the indicator of `t >= 0`.
fn abs_indicator(samples: usize) -> TowerState {
    let mut spec = BaseSpec::new(DomainDescription::interval("t", int(-1), int(1)));
    spec.gens = vec![(Polynomial::parse("1 - t^2", &names(&["t"])).unwrap(), true)];
    let config = SamplingConfig { samples, ..SamplingConfig::default() };
    let tw = TowerState::init(spec, config).unwrap();
    let tw = tw.adjoin_even_root("u", &tw.parse_poly("t^2").unwrap(), 2).unwrap();
    tw.adjoin_characteristic("c", &tw.parse_poly("t").unwrap(), CharVariant::CompactContinuous, false).unwrap()
}

fn groebner(c: &mut Criterion) {
    let n = names(&["x", "y", "z"]);
    let p = |s: &str| Polynomial::parse(s, &n).unwrap();
    let gens = [p("x^2 + y^2 - 1"), p("z^2 - x"), p("x*y*z - y^3")];
    let order = TermOrder::tower(3);
    c.bench_function("buchberger three variables", |b| b.iter(|| buchberger(black_box(&gens), &order)));
    let gb = buchberger(&gens, &order);
    let f = p("(x + y + z)^6");
    c.bench_function("normal form degree six", |b| b.iter(|| normal_form(black_box(&f), &gb)));
}

fn sdp(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sizes = vec![12, 8, 4];
    let mut cost = SparseSym::new();
    let mut trace = SparseSym::new();
    for (k, &n) in sizes.iter().enumerate() {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.random_range(-1.0..1.0);
                m[(i, j)] = v;
                cost.push(k, i, j, v);
            }
            trace.push(k, i, i, 1.0);
        }
    }
    let problem = SdpProblem { block_sizes: sizes, c: cost, constraints: vec![trace], b: vec![1.0] };
    c.bench_function("sdp trace-constrained eigenvalue", |b| {
        b.iter(|| solve_sdp(black_box(&problem), &SdpOptions::default()))
    });
}

fn sampling(c: &mut Criterion) {
    let tw = abs_indicator(2000);
    let opts = VarietyOptions::from_tower(&tw);
    c.bench_function("variety sampling 2000 points", |b| b.iter(|| sample_variety(black_box(&tw), &opts)));
    let gap = GapOptions::from_tower(&tw);
    c.bench_function("gap report 2000 points", |b| b.iter(|| gap_report(black_box(&tw), &gap)));
}

fn certification(c: &mut Criterion) {
    let tw = abs_indicator(2000);
    let f = tw.parse_poly("u").unwrap();
    let mut group = c.benchmark_group("sos");
    group.sample_size(10);
    group.bench_function("lower bound degree two", |b| b.iter(|| lower_bound(black_box(&tw), &f, 2)));
    group.bench_function("certify abs with shift", |b| {
        b.iter(|| certify_positivity(black_box(&tw), &f, &hidpos::algebra::rational::ratio(1, 10), 2))
    });
    group.finish();
}

criterion_group!(benches, groebner, sdp, sampling, certification);
criterion_main!(benches);
