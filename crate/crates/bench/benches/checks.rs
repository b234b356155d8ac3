use criterion::{criterion_group, criterion_main, Criterion};

use subreg_bench::{compl_product, parabola_wedge, square_zero};
use subreg_core::cones::{limiting_normal_cone, tangent_cone};
use subreg_core::rational::zeros;
use subreg_core::verify::empirical_modulus;
use subreg_core::{report_chain, CheckConfig, SamplingConfig};

fn cones(c: &mut Criterion) {
    for k in [1, 2, 3] {
        let s = compl_product(k);
        let p = s.point(&zeros(2 * k)).unwrap();
        c.bench_function(&format!("limiting_normal_cone/compl^{k}"), |b| {
            b.iter(|| limiting_normal_cone(&s, &p).unwrap())
        });
        c.bench_function(&format!("tangent_cone/compl^{k}"), |b| {
            b.iter(|| tangent_cone(&s, &p).unwrap())
        });
    }
}

fn checks(c: &mut Criterion) {
    let inst = parabola_wedge();
    let cfg = CheckConfig::default();
    c.bench_function("report_chain/parabola_wedge", |b| b.iter(|| report_chain(&inst, &cfg).unwrap()));
    let sq = square_zero();
    c.bench_function("report_chain/square_zero", |b| b.iter(|| report_chain(&sq, &cfg).unwrap()));
}

fn modulus(c: &mut Criterion) {
    let inst = square_zero();
    let cfg = SamplingConfig {
        radii: vec![1e-2, 1e-3],
        samples_per_radius: 50,
        ..SamplingConfig::default()
    };
    c.bench_function("empirical_modulus/square_zero", |b| {
        b.iter(|| empirical_modulus(&inst, &cfg).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = cones, checks, modulus
}
criterion_main!(benches);
