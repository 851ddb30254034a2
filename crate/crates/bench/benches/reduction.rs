use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use plrmat_core::catalog::{entry, load_entry};
use plrmat_core::fd::Stencil;
use plrmat_core::reduction::{rho, sample_points, Reduced, SampleConfig, ZeroR, COND_THRESHOLD};
use plrmat_core::suite::{run_verify, Suite, SuiteConfig};
use plrmat_core::verify::plcdybe_residual;

fn validate(c: &mut Criterion) {
    for name in ["sl2_dj", "sl3_dj_levi"] {
        let spec = entry(name).unwrap().spec;
        c.bench_function(&format!("validate/{name}"), |b| b.iter(|| black_box(spec.to_setup().unwrap())));
    }
}

fn rho_eval(c: &mut Criterion) {
    for name in ["sl2_dj", "sl3_dj_cartan", "sl3_dj_levi"] {
        let s = load_entry(name).unwrap();
        let p = sample_points(
            &s,
            &SampleConfig {
                num_points: 1,
                ..Default::default()
            },
        )
        .unwrap()
        .remove(0);
        c.bench_function(&format!("rho/{name}"), |b| {
            b.iter(|| black_box(rho(&s, &p.word, COND_THRESHOLD).unwrap()))
        });
        let z = ZeroR { dim: s.k_pair.g.dim() };
        let r = Reduced::new(&s, &z, COND_THRESHOLD);
        c.bench_function(&format!("plcdybe/{name}"), |b| {
            b.iter(|| black_box(plcdybe_residual(&s, &r, &p.word, 1e-5, Stencil::Central4).unwrap()))
        });
    }
}

fn suites(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    for name in ["sl2_dj", "sl3_dj_levi"] {
        let spec = entry(name).unwrap().spec;
        let cfg = SuiteConfig {
            num_points: 2,
            jacobi_points: 1,
            ..SuiteConfig::from_spec(&spec)
        };
        for suite in [Suite::Cdybe, Suite::Jacobi] {
            g.bench_function(format!("{name}/{suite:?}"), |b| {
                b.iter(|| black_box(run_verify(&spec, &cfg, suite).unwrap()))
            });
        }
    }
    g.finish();
}

criterion_group!(benches, validate, rho_eval, suites);
criterion_main!(benches);
