//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use plrmat_core::catalog::{entry, list_entries, load_entry};
use plrmat_core::fd::Stencil;
use plrmat_core::linalg;
use plrmat_core::reduction::{
    constraint_matrix, rho, sample_points, sample_points_where, Reduced, SampleConfig, ZeroR, COND_THRESHOLD, MAX_ATTEMPTS,
};
use plrmat_core::suite::{run_reduce, run_verify, Report, Suite, SuiteConfig};
use plrmat_core::verify::{plcdybe_residual, EquationId};
use plrmat_core::{Error, Matrix, Vector};

// Pinned tolerances.
const JACOBI_TOL: f64 = 1e-10;
const ANTISYM_TOL: f64 = 1e-12;
const INVARIANCE_TOL: f64 = 1e-10;
const CLOSURE_TOL: f64 = 1e-10;
const VALIDATE_BUDGET: Duration = Duration::from_secs(1);
const ORACLE_TOL: f64 = 1e-9;
const CDYBE_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-5;
const MIN_POINTS: usize = 10;
const PL_BUDGET: Duration = Duration::from_secs(30);
const CONSISTENCY_TOL: f64 = 1e-9;
const SIGMA_PAIRS: usize = 20;
const DIRAC_TOL: f64 = 1e-6;
const DIRAC_PAIRS: usize = 10;
const CONSTRAINT_TOL: f64 = 1e-7;
const JACOBIATOR_TOL: f64 = 1e-4;
const JACOBIATOR_STEP: f64 = 1e-3;
const JACOBIATOR_POINTS: usize = 5;
const CONTROL_MIN: f64 = 1e-2;

struct Gate {
    failed: usize,
}

impl Gate {
    fn line(&mut self, id: &str, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn report(r: &Report, id: EquationId) -> &plrmat_core::verify::ResidualReport {
    r.reports.iter().find(|x| x.equation_id == id).expect("report present")
}

fn criterion_1(gate: &mut Gate) {
    let mut ok = true;
    let mut worst = [0.0f64; 4];
    let mut slowest = Duration::ZERO;
    for name in list_entries() {
        let t = Instant::now();
        let s = match load_entry(name) {
            Ok(s) => s,
            Err(e) => {
                ok = false;
                println!("  {name}: {e}");
                continue;
            }
        };
        let el = t.elapsed();
        slowest = slowest.max(el);
        let d = &s.diagnostics;
        let closure = d.closure_h_m.max(d.closure_h_mstar);
        let vals = [d.jacobi.max(d.double_jacobi), d.antisymmetry, d.double_invariance, closure];
        for (w, v) in worst.iter_mut().zip(vals) {
            *w = w.max(v);
        }
        ok &= vals[0] <= JACOBI_TOL && vals[1] <= ANTISYM_TOL && vals[2] <= INVARIANCE_TOL && vals[3] <= CLOSURE_TOL && el < VALIDATE_BUDGET;
    }
    gate.line(
        "1 structural validation",
        ok,
        format!(
            "jacobi {:.1e} antisym {:.1e} invariance {:.1e} closure {:.1e} slowest {:.3}s",
            worst[0],
            worst[1],
            worst[2],
            worst[3],
            slowest.as_secs_f64()
        ),
    );
}

// sl2 basis (h, e, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h.
fn sl2_bracket(i: usize, j: usize) -> [f64; 3] {
    match (i, j) {
        (0, 1) => [0.0, 2.0, 0.0],
        (1, 0) => [0.0, -2.0, 0.0],
        (0, 2) => [0.0, 0.0, -2.0],
        (2, 0) => [0.0, 0.0, 2.0],
        (1, 2) => [1.0, 0.0, 0.0],
        (2, 1) => [-1.0, 0.0, 0.0],
        _ => [0.0; 3],
    }
}

/// Classical CDYBE residual `CYBE(r) + Alt(h ⊗ dr/dx)` of the hand formula
/// `r(x) = (e⊗f - f⊗e)/x`, assembled entrywise.
fn classical_oracle_residual(x: f64) -> f64 {
    let mut r = [[0.0; 3]; 3];
    r[1][2] = 1.0 / x;
    r[2][1] = -1.0 / x;
    let mut dr = [[0.0; 3]; 3];
    dr[1][2] = -1.0 / (x * x);
    dr[2][1] = 1.0 / (x * x);
    let mut t = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let c = r[i][j] * r[k][l];
                    if c == 0.0 {
                        continue;
                    }
                    let b = sl2_bracket(i, k);
                    for (m, bm) in b.iter().enumerate() {
                        t[m][j][l] += c * bm;
                    }
                    let b = sl2_bracket(j, k);
                    for (m, bm) in b.iter().enumerate() {
                        t[i][m][l] += c * bm;
                    }
                    let b = sl2_bracket(j, l);
                    for (m, bm) in b.iter().enumerate() {
                        t[i][k][m] += c * bm;
                    }
                }
            }
        }
    }
    for a in 0..3 {
        for b in 0..3 {
            t[0][a][b] += dr[a][b];
            t[b][0][a] += dr[a][b];
            t[a][b][0] += dr[a][b];
        }
    }
    t.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

fn criterion_2(gate: &mut Gate) {
    let s = load_entry("sl2_classical").expect("catalog entry");
    let z = ZeroR { dim: 3 };
    let rstar = Reduced::new(&s, &z, COND_THRESHOLD);
    let (mut c_err, mut rho_err, mut res, mut oracle) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut ok = true;
    for x in [0.5, 1.0, 2.0] {
        let w = s.native_word(&[Vector::from_vec(vec![x])]).and_then(|n| s.lift_native(&n));
        let Ok(w) = w else {
            ok = false;
            continue;
        };
        // C^{ab} = {ξ_a, ξ_b} for ξ = (e, f) on exp(x h*): linear in x,
        // antisymmetric, with C^{ef} = -x.
        let c_hand = Matrix::from_row_slice(2, 2, &[0.0, -x, x, 0.0]);
        c_err = c_err.max(linalg::max_abs(&(&constraint_matrix(&s, &w).entries - c_hand)));
        let mut rho_hand = Matrix::zeros(3, 3);
        rho_hand[(1, 2)] = 1.0 / x;
        rho_hand[(2, 1)] = -1.0 / x;
        match rho(&s, &w, COND_THRESHOLD) {
            Ok(r) => rho_err = rho_err.max(linalg::max_abs(&(r.matrix() - rho_hand))),
            Err(_) => ok = false,
        }
        match plcdybe_residual(&s, &rstar, &w, FD_STEP, Stencil::Central4) {
            Ok(t) => res = res.max(t.max_abs()),
            Err(_) => ok = false,
        }
        oracle = oracle.max(classical_oracle_residual(x));
    }
    ok &= c_err <= ORACLE_TOL && rho_err <= ORACLE_TOL && res <= CDYBE_TOL && oracle <= ORACLE_TOL;
    gate.line(
        "2 classical oracle",
        ok,
        format!("|C - hand| {c_err:.1e} |rho - hand| {rho_err:.1e} CDYBE {res:.1e} hand-formula CDYBE {oracle:.1e}"),
    );
}

fn full_reports() -> Vec<(String, Result<Report, Error>, Duration)> {
    list_entries()
        .iter()
        .map(|name| {
            let spec = entry(name).expect("catalog entry").spec;
            let cfg = SuiteConfig {
                num_points: MIN_POINTS,
                fd_step: FD_STEP,
                tolerance: CDYBE_TOL,
                dirac_pairs: DIRAC_PAIRS,
                dirac_tolerance: DIRAC_TOL,
                constraint_tolerance: CONSTRAINT_TOL,
                consistency_tolerance: CONSISTENCY_TOL,
                characterization_pairs: SIGMA_PAIRS,
                jacobi_step: JACOBIATOR_STEP,
                jacobi_tolerance: JACOBIATOR_TOL,
                jacobi_points: JACOBIATOR_POINTS,
                control_threshold: CONTROL_MIN,
                ..SuiteConfig::from_spec(&spec)
            };
            let t = Instant::now();
            let r = run_verify(&spec, &cfg, Suite::All);
            (name.to_string(), r, t.elapsed())
        })
        .collect()
}

fn max_of(reports: &[(String, Result<Report, Error>, Duration)], names: &[&str], ids: &[(EquationId, f64)]) -> (bool, Vec<f64>) {
    let mut ok = true;
    let mut worst = vec![0.0f64; ids.len()];
    for (name, r, _) in reports.iter().filter(|(n, _, _)| names.contains(&n.as_str())) {
        let Ok(r) = r else {
            println!("  {name}: {:?}", r.as_ref().err());
            ok = false;
            continue;
        };
        for (k, (id, tol)) in ids.iter().enumerate() {
            let rep = report(r, *id);
            worst[k] = worst[k].max(rep.max_residual);
            ok &= rep.max_residual.is_finite() && rep.max_residual <= *tol;
        }
    }
    (ok, worst)
}

fn criterion_3(gate: &mut Gate, all: &[(String, Result<Report, Error>, Duration)]) {
    let pl = ["sl2_dj", "sl3_dj_cartan", "sl3_dj_levi"];
    let (mut ok, worst) = max_of(all, &pl, &[(EquationId::PL_CDYBE, CDYBE_TOL), (EquationId::EQUIVARIANCE, CDYBE_TOL)]);
    let mut slowest = Duration::ZERO;
    for (_, r, t) in all.iter().filter(|(n, _, _)| pl.contains(&n.as_str())) {
        slowest = slowest.max(*t);
        if let Ok(r) = r {
            ok &= report(r, EquationId::PL_CDYBE).per_point.len() >= MIN_POINTS;
            ok &= report(r, EquationId::EQUIVARIANCE).per_point.len() >= MIN_POINTS;
            ok &= report(r, EquationId::PL_CDYBE).fd_step == Some(FD_STEP);
        }
    }
    ok &= slowest < PL_BUDGET;
    gate.line(
        "3 PL-CDYBE and equivariance",
        ok,
        format!(
            "PL-CDYBE {:.1e} equivariance {:.1e} at h = {FD_STEP:.0e}, slowest full suite {:.2}s",
            worst[0],
            worst[1],
            slowest.as_secs_f64()
        ),
    );
}

fn criterion_4(gate: &mut Gate, all: &[(String, Result<Report, Error>, Duration)]) {
    let (ok, worst) = max_of(
        all,
        list_entries(),
        &[
            (EquationId::RHO_N_FORMS, CONSISTENCY_TOL),
            (EquationId::SIGMA_CHARACTERIZATION, CONSISTENCY_TOL),
        ],
    );
    gate.line(
        "4 consistency of rho forms",
        ok,
        format!("forms {:.1e} characterization {:.1e} ({SIGMA_PAIRS} pairs/point)", worst[0], worst[1]),
    );
}

fn criterion_5(gate: &mut Gate, all: &[(String, Result<Report, Error>, Duration)]) {
    let (ok, worst) = max_of(
        all,
        list_entries(),
        &[(EquationId::DIRAC_EQ_HSTAR, DIRAC_TOL), (EquationId::CONSTRAINT_PB, CONSTRAINT_TOL)],
    );
    gate.line(
        "5 Dirac reduction",
        ok,
        format!(
            "Dirac - native {:.1e} ({DIRAC_PAIRS} pairs/point) constraint brackets {:.1e}",
            worst[0], worst[1]
        ),
    );
}

fn criterion_6(gate: &mut Gate, all: &[(String, Result<Report, Error>, Duration)]) {
    let (mut ok, worst) = max_of(
        all,
        list_entries(),
        &[(EquationId::Q_JACOBI, JACOBIATOR_TOL), (EquationId::P_JACOBI, JACOBIATOR_TOL)],
    );
    let mut control_min = f64::INFINITY;
    for (name, r, _) in all {
        let Ok(r) = r else { continue };
        ok &= report(r, EquationId::Q_JACOBI).per_point.len() == JACOBIATOR_POINTS;
        ok &= report(r, EquationId::P_JACOBI).fd_step == Some(JACOBIATOR_STEP);
        let c = r.controls.iter().find(|c| c.name == "corrupted_rho_q_jacobi").expect("control present");
        if c.applicable {
            let m = c.max_residual.unwrap_or(0.0);
            control_min = control_min.min(m);
            if m <= CONTROL_MIN {
                println!("  {name}: corrupted control only {m:.1e}");
                ok = false;
            }
        }
    }
    gate.line(
        "6 Jacobiators",
        ok,
        format!(
            "Q {:.1e} P {:.1e} at h = {JACOBIATOR_STEP:.0e}, weakest corrupted-r control {control_min:.1e}",
            worst[0], worst[1]
        ),
    );
}

fn criterion_7(gate: &mut Gate) {
    let s = load_entry("sl2_dj").expect("catalog entry");
    let id = plrmat_core::dual_group::GroupWord::identity(s.k_double());
    let identity = matches!(rho(&s, &id, COND_THRESHOLD), Err(Error::CDegenerate { odd_dimension: false, .. }));

    let g = plrmat_core::LieAlgebra::abelian(3);
    let e: Vec<Vector> = (0..3).map(|i| Vector::from_fn(3, |k, _| if k == i { 1.0 } else { 0.0 })).collect();
    let odd_setup = plrmat_core::bialgebra::validate_setup(&g, &plrmat_core::Tensor2::zeros(3), &plrmat_core::Subspace::full(3), &e[..2], &e[2..]);
    let odd = match odd_setup {
        Ok(o) => {
            let w = o.native_word(&[Vector::from_vec(vec![0.4, -0.3])]).and_then(|n| o.lift_native(&n));
            let direct = w
                .map(|w| matches!(rho(&o, &w, COND_THRESHOLD), Err(Error::CDegenerate { odd_dimension: true, .. })))
                .unwrap_or(false);
            let sampled = matches!(
                sample_points(&o, &SampleConfig::default()),
                Err(Error::CDegenerate { odd_dimension: true, .. })
            );
            direct && sampled
        }
        Err(_) => false,
    };

    let never = SampleConfig {
        num_points: 1,
        cond_threshold: 0.5,
        ..Default::default()
    };
    let exhausted = matches!(sample_points(&s, &never), Err(Error::SamplingExhausted { attempts: MAX_ATTEMPTS }));
    let cfg = SampleConfig {
        num_points: 10,
        ..Default::default()
    };
    let picky = sample_points_where(&s, &cfg, |w| s.project_native(w).map(|n| n.dual_factors()[0][0] > 0.8).unwrap_or(false));
    let max_attempts = picky
        .as_ref()
        .map(|p| p.iter().map(|p| p.attempts).max().unwrap_or(0))
        .unwrap_or(usize::MAX);
    let bounded = max_attempts <= MAX_ATTEMPTS;
    gate.line(
        "7 degeneracy handling",
        identity && odd && exhausted && bounded,
        format!(
            "identity -> CDegenerate {identity}, odd M diagnosed {odd}, exhausted after {MAX_ATTEMPTS} {exhausted}, most draws for one point {max_attempts}"
        ),
    );
}

fn criterion_8(gate: &mut Gate) {
    let mut ok = true;
    for name in ["sl2_dj", "sl3_dj_levi"] {
        let spec = entry(name).expect("catalog entry").spec;
        let cfg = SuiteConfig {
            num_points: 4,
            jacobi_points: 2,
            ..SuiteConfig::from_spec(&spec)
        };
        let v1 = run_verify(&spec, &cfg, Suite::All).map(|r| r.to_json());
        let v2 = run_verify(&spec, &cfg, Suite::All).map(|r| r.to_json());
        let r1 = run_reduce(&spec, &cfg).map(|r| r.to_json());
        let r2 = run_reduce(&spec, &cfg).map(|r| r.to_json());
        ok &= v1.is_ok() && r1.is_ok() && v1 == v2 && r1 == r2;
    }
    gate.line(
        "8 determinism",
        ok,
        "verify and reduce reports byte-identical across two runs".to_string(),
    );
}

fn main() {
    let mut gate = Gate { failed: 0 };
    criterion_1(&mut gate);
    criterion_2(&mut gate);
    let all = full_reports();
    criterion_3(&mut gate, &all);
    criterion_4(&mut gate, &all);
    criterion_5(&mut gate, &all);
    criterion_6(&mut gate, &all);
    criterion_7(&mut gate);
    criterion_8(&mut gate);
    if gate.failed > 0 {
        println!("{} criteria failed", gate.failed);
        std::process::exit(1);
    }
}
