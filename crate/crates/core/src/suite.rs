//! The standard residual suites over sampled points, and the report they
//! produce.

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bialgebra::{unit, ReductionSetup, SetupDiagnostics};
use crate::error::{Error, Result};
use crate::fd::Stencil;
use crate::linalg::Matrix;
use crate::reduction::{
    characterization_residual, constraint_pb_check, dirac_bracket, n_vectors, native_bracket, random_m_vector, rho, rho_operator_residual, rho_via_n,
    sample_points, DynamicalRMatrix, Extended, Reduced, SampleConfig, SamplePoint, ZeroR, MAX_ATTEMPTS,
};
use crate::specfile::SpecFile;
use crate::verify::{
    equivariance_residual, mcybe_residual, p_jacobi_residual, plcdybe_residual, q_jacobi_residual, random_group_word, random_kappa_function,
    random_phase_function, triangularity_check, BracketSteps, EquationId, PointResidual, ResidualReport,
};

pub const REPORT_SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Cdybe,
    Equivariance,
    Dirac,
    Jacobi,
    All,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cdybe" => Ok(Suite::Cdybe),
            "equivariance" => Ok(Suite::Equivariance),
            "dirac" => Ok(Suite::Dirac),
            "jacobi" => Ok(Suite::Jacobi),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!("unknown suite `{other}`"))),
        }
    }
}

/// Every knob of a suite run. Defaults follow the spec-file defaults; the
/// fixed tolerances below are not exposed on the command line.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub num_points: usize,
    pub box_radius: f64,
    pub max_attempts: usize,
    pub cond_threshold: f64,
    /// Step for the dynamical derivatives in PL-CDYBE and equivariance.
    pub fd_step: f64,
    /// Tolerance for PL-CDYBE, triangularity, equivariance and mCYBE.
    pub tolerance: f64,
    /// Step and tolerance for gradients inside Dirac brackets.
    pub dirac_step: f64,
    pub dirac_tolerance: f64,
    pub dirac_pairs: usize,
    pub constraint_tolerance: f64,
    /// Tolerance for the two `N`-forms of `ρ` and the characterizing identity.
    pub consistency_tolerance: f64,
    pub characterization_pairs: usize,
    pub jacobi_step: f64,
    pub jacobi_stencil: Stencil,
    pub jacobi_tolerance: f64,
    pub jacobi_points: usize,
    /// The corrupted r-matrix must exceed this PL-CDYBE residual somewhere.
    pub control_threshold: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 20240611,
            num_points: 10,
            box_radius: 1.0,
            max_attempts: MAX_ATTEMPTS,
            cond_threshold: 1e8,
            fd_step: 1e-5,
            tolerance: 1e-6,
            dirac_step: 1e-4,
            dirac_tolerance: 1e-6,
            dirac_pairs: 10,
            constraint_tolerance: 1e-7,
            consistency_tolerance: 1e-9,
            characterization_pairs: 20,
            jacobi_step: 1e-3,
            jacobi_stencil: Stencil::Central8,
            jacobi_tolerance: 1e-4,
            jacobi_points: 5,
            control_threshold: 1e-2,
        }
    }
}

impl SuiteConfig {
    pub fn from_spec(spec: &SpecFile) -> Self {
        Self {
            seed: spec.sampling.seed,
            num_points: spec.sampling.num_points,
            box_radius: spec.sampling.box_radius,
            cond_threshold: spec.tolerances.cond_threshold,
            fd_step: spec.tolerances.fd_step,
            tolerance: spec.tolerances.residual,
            ..Self::default()
        }
    }

    pub fn sample_config(&self) -> SampleConfig {
        SampleConfig {
            seed: self.seed,
            num_points: self.num_points,
            box_radius: self.box_radius,
            max_attempts: self.max_attempts,
            cond_threshold: self.cond_threshold,
        }
    }

    fn rng(&self, tag: u64, index: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (tag << 48) ^ index as u64)
    }
}

/// A sample point with `C`, `ρ` and `r* = 0 + ρ` (both in `g ⊗ g`).
#[derive(Clone, Debug, Serialize)]
pub struct SampleRecord {
    pub index: usize,
    pub attempts: usize,
    pub coords: Vec<f64>,
    pub cond: f64,
    pub c_matrix: Vec<Vec<f64>>,
    pub rho: Vec<Vec<f64>>,
    pub r_star: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ControlRecord {
    pub name: String,
    pub applicable: bool,
    pub threshold: f64,
    pub max_residual: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub pass: bool,
    pub checks: usize,
    pub failed: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: String,
    pub command: String,
    pub name: Option<String>,
    /// SHA-256 of the canonical JSON of the input spec.
    pub input_digest: String,
    pub suite: Option<Suite>,
    pub config: SuiteConfig,
    pub diagnostics: SetupDiagnostics,
    pub samples: Vec<SampleRecord>,
    pub reports: Vec<ResidualReport>,
    pub controls: Vec<ControlRecord>,
    pub summary: Summary,
}

impl Report {
    /// Pretty JSON with every float written with 17 significant digits.
    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn input_digest(spec: &SpecFile) -> String {
    hex::encode(Sha256::digest(spec.to_json().as_bytes()))
}

/// `{:.16e}` for every float; integers stay integers.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    fn fix(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Number(n) => {
                let is_float = n.as_u64().is_none() && n.as_i64().is_none();
                if is_float {
                    if let Some(x) = n.as_f64() {
                        let text = format!("{x:.16e}");
                        *n = serde_json::Number::from_str(&text).expect("formatted float parses");
                    }
                }
            }
            serde_json::Value::Array(a) => a.iter_mut().for_each(fix),
            serde_json::Value::Object(o) => o.values_mut().for_each(fix),
            _ => {}
        }
    }
    let mut v = serde_json::to_value(value).expect("reports serialize");
    fix(&mut v);
    serde_json::to_string_pretty(&v).expect("values serialize")
}

fn sample_record(s: &ReductionSetup, p: &SamplePoint, cond_threshold: f64) -> Result<SampleRecord> {
    let c = crate::reduction::constraint_matrix(s, &p.word);
    let rho = rho(s, &p.word, cond_threshold)?;
    let r_star = Reduced::new(s, &ZeroR { dim: s.k_pair.g.dim() }, cond_threshold).eval(&p.word)?;
    Ok(SampleRecord {
        index: p.index,
        attempts: p.attempts,
        coords: p.coords.iter().copied().collect(),
        cond: p.cond,
        c_matrix: rows(&c.entries),
        rho: rows(rho.matrix()),
        r_star: rows(r_star.matrix()),
    })
}

fn coords(p: &SamplePoint) -> Vec<f64> {
    p.coords.iter().copied().collect()
}

fn per_point<F>(points: &[SamplePoint], f: F) -> Result<Vec<PointResidual>>
where
    F: Fn(&SamplePoint) -> Result<f64> + Sync,
{
    points
        .par_iter()
        .map(|p| {
            Ok(PointResidual {
                index: p.index,
                coords: coords(p),
                residual: f(p)?,
            })
        })
        .collect()
}

const TAG_DIRAC: u64 = 1;
const TAG_CONSTRAINT: u64 = 2;
const TAG_SIGMA: u64 = 3;
const TAG_JACOBI: u64 = 4;

fn cdybe_reports(s: &ReductionSetup, cfg: &SuiteConfig, pts: &[SamplePoint], rfun: &dyn DynamicalRMatrix) -> Result<Vec<ResidualReport>> {
    let st = Stencil::Central4;
    let mcybe = ResidualReport::new(
        EquationId::MCYBE,
        cfg.tolerance,
        None,
        vec![PointResidual {
            index: 0,
            coords: Vec::new(),
            residual: mcybe_residual(s)?,
        }],
    );
    let pl = per_point(pts, |p| Ok(plcdybe_residual(s, rfun, &p.word, cfg.fd_step, st)?.max_abs()))?;
    let triples: Vec<_> = pts.iter().map(|p| (p.index, coords(p), p.word.clone())).collect();
    let tri = triangularity_check(s, rfun, &triples, cfg.fd_step, st, cfg.tolerance)?;
    Ok(vec![
        mcybe,
        ResidualReport::new(EquationId::PL_CDYBE, cfg.tolerance, Some(cfg.fd_step), pl),
        tri,
    ])
}

fn equivariance_report(s: &ReductionSetup, cfg: &SuiteConfig, pts: &[SamplePoint], rfun: &dyn DynamicalRMatrix) -> Result<ResidualReport> {
    let hd = s.h_dim();
    let res = per_point(pts, |p| {
        let mut worst: f64 = 0.0;
        for a in 0..hd {
            let r = equivariance_residual(s, rfun, &p.word, &unit(hd, a), cfg.fd_step, Stencil::Central4)?;
            worst = worst.max(r.max_abs());
        }
        Ok(worst)
    })?;
    Ok(ResidualReport::new(EquationId::EQUIVARIANCE, cfg.tolerance, Some(cfg.fd_step), res))
}

fn dirac_reports(s: &ReductionSetup, cfg: &SuiteConfig, pts: &[SamplePoint]) -> Result<Vec<ResidualReport>> {
    let (h, st, ct) = (cfg.dirac_step, Stencil::Central4, cfg.cond_threshold);
    let dirac = per_point(pts, |p| {
        let mut rng = cfg.rng(TAG_DIRAC, p.index);
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.dirac_pairs {
            let f1 = random_kappa_function(s, &mut rng);
            let f2 = random_kappa_function(s, &mut rng);
            let d = dirac_bracket(s, &p.word, &f1, &f2, h, st, ct)?;
            let n = native_bracket(s, &p.word, &f1, &f2, h, st)?;
            worst = worst.max((d - n).abs());
        }
        Ok(worst)
    })?;
    let constraint = per_point(pts, |p| {
        let mut rng = cfg.rng(TAG_CONSTRAINT, p.index);
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.dirac_pairs {
            let f = random_kappa_function(s, &mut rng);
            let e = Extended { setup: s, f: &f };
            let m = random_m_vector(s, &mut rng);
            worst = worst.max(constraint_pb_check(s, &p.word, &e, &m, h, st)?.abs());
        }
        Ok(worst)
    })?;
    let forms = per_point(pts, |p| {
        let direct = rho(s, &p.word, ct)?;
        let (a, b) = rho_via_n(s, &p.word, ct)?;
        let op = rho_operator_residual(s, &p.word, ct)?;
        Ok((&direct - &a).max_abs().max((&direct - &b).max_abs()).max(op))
    })?;
    let sigma = per_point(pts, |p| {
        let mut rng = cfg.rng(TAG_SIGMA, p.index);
        let nvec = n_vectors(s, &p.word, ct)?;
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.characterization_pairs {
            let u = random_m_vector(s, &mut rng);
            let v = random_m_vector(s, &mut rng);
            worst = worst.max(characterization_residual(s, &p.word, &nvec, &u, &v));
        }
        Ok(worst)
    })?;
    Ok(vec![
        ResidualReport::new(EquationId::DIRAC_EQ_HSTAR, cfg.dirac_tolerance, Some(h), dirac),
        ResidualReport::new(EquationId::CONSTRAINT_PB, cfg.constraint_tolerance, Some(h), constraint),
        ResidualReport::new(EquationId::RHO_N_FORMS, cfg.consistency_tolerance, None, forms),
        ResidualReport::new(EquationId::SIGMA_CHARACTERIZATION, cfg.consistency_tolerance, None, sigma),
    ])
}

fn jacobi_reports(s: &ReductionSetup, cfg: &SuiteConfig, pts: &[SamplePoint], rfun: &dyn DynamicalRMatrix) -> Result<Vec<ResidualReport>> {
    let steps = BracketSteps {
        step: cfg.jacobi_step,
        stencil: cfg.jacobi_stencil,
    };
    let used = &pts[..cfg.jacobi_points.min(pts.len())];
    let n = used.len();
    let mut q = Vec::new();
    let mut p = Vec::new();
    let results: Vec<(PointResidual, PointResidual)> = used
        .par_iter()
        .enumerate()
        .map(|(k, pt)| {
            let mut rng = cfg.rng(TAG_JACOBI, pt.index);
            let g = random_group_word(s, &mut rng);
            let fq: Vec<_> = (0..3).map(|_| random_phase_function(s, false, &mut rng)).collect();
            let fp: Vec<_> = (0..3).map(|_| random_phase_function(s, true, &mut rng)).collect();
            let qr = q_jacobi_residual(s, rfun, &g, &pt.native, [&fq[0], &fq[1], &fq[2]], steps)?;
            // P pairs each point with the next one as (κ̃, κ̂).
            let hat = &used[(k + 1) % n].native;
            let pr = p_jacobi_residual(s, rfun, &pt.native, &g, hat, [&fp[0], &fp[1], &fp[2]], steps)?;
            let rec = |r| PointResidual {
                index: pt.index,
                coords: coords(pt),
                residual: r,
            };
            Ok((rec(qr), rec(pr)))
        })
        .collect::<Result<_>>()?;
    for (a, b) in results {
        q.push(a);
        p.push(b);
    }
    Ok(vec![
        ResidualReport::new(EquationId::Q_JACOBI, cfg.jacobi_tolerance, Some(cfg.jacobi_step), q),
        ResidualReport::new(EquationId::P_JACOBI, cfg.jacobi_tolerance, Some(cfg.jacobi_step), p),
    ])
}

fn control_record(name: &str, s: &ReductionSetup, cfg: &SuiteConfig, res: Option<Vec<PointResidual>>) -> ControlRecord {
    match res.filter(|_| s.m_dim() > 0) {
        None => ControlRecord {
            name: name.to_string(),
            applicable: false,
            threshold: cfg.control_threshold,
            max_residual: None,
            pass: true,
        },
        Some(res) => {
            let max = res.iter().map(|r| r.residual).fold(0.0, f64::max);
            ControlRecord {
                name: name.to_string(),
                applicable: true,
                threshold: cfg.control_threshold,
                max_residual: Some(max),
                pass: max > cfg.control_threshold,
            }
        }
    }
}

/// PL-CDYBE residual of `r - ρ` instead of `r + ρ`; must be large somewhere.
fn corrupted_control(s: &ReductionSetup, cfg: &SuiteConfig, pts: &[SamplePoint]) -> Result<ControlRecord> {
    let name = "corrupted_rho_plcdybe";
    if s.m_dim() == 0 {
        return Ok(control_record(name, s, cfg, None));
    }
    let z = ZeroR { dim: s.k_pair.g.dim() };
    let bad = Reduced::corrupted(s, &z, cfg.cond_threshold);
    let res = per_point(pts, |p| Ok(plcdybe_residual(s, &bad, &p.word, cfg.fd_step, Stencil::Central4)?.max_abs()))?;
    Ok(control_record(name, s, cfg, Some(res)))
}

/// Q Jacobiator with `r - ρ`, same points and functions as `Q_JACOBI`.
fn corrupted_jacobi_control(s: &ReductionSetup, cfg: &SuiteConfig, pts: &[SamplePoint]) -> Result<ControlRecord> {
    let name = "corrupted_rho_q_jacobi";
    if s.m_dim() == 0 {
        return Ok(control_record(name, s, cfg, None));
    }
    let z = ZeroR { dim: s.k_pair.g.dim() };
    let bad = Reduced::corrupted(s, &z, cfg.cond_threshold);
    let steps = BracketSteps {
        step: cfg.jacobi_step,
        stencil: cfg.jacobi_stencil,
    };
    let used = &pts[..cfg.jacobi_points.min(pts.len())];
    let res = per_point(used, |pt| {
        let mut rng = cfg.rng(TAG_JACOBI, pt.index);
        let g = random_group_word(s, &mut rng);
        let fq: Vec<_> = (0..3).map(|_| random_phase_function(s, false, &mut rng)).collect();
        q_jacobi_residual(s, &bad, &g, &pt.native, [&fq[0], &fq[1], &fq[2]], steps)
    })?;
    Ok(control_record(name, s, cfg, Some(res)))
}

fn summarize(reports: &[ResidualReport], controls: &[ControlRecord]) -> Summary {
    let mut failed: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| format!("{:?}", r.equation_id)).collect();
    failed.extend(controls.iter().filter(|c| !c.pass).map(|c| c.name.clone()));
    Summary {
        pass: failed.is_empty(),
        checks: reports.len() + controls.len(),
        failed,
    }
}

fn base_report(spec: &SpecFile, s: &ReductionSetup, cfg: &SuiteConfig, command: &str, suite: Option<Suite>) -> Result<(Report, Vec<SamplePoint>)> {
    let pts = sample_points(s, &cfg.sample_config())?;
    let samples = pts
        .par_iter()
        .map(|p| sample_record(s, p, cfg.cond_threshold))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        Report {
            schema_version: REPORT_SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            name: spec.name.clone(),
            input_digest: input_digest(spec),
            suite,
            config: *cfg,
            diagnostics: s.diagnostics.clone(),
            samples,
            reports: Vec::new(),
            controls: Vec::new(),
            summary: Summary {
                pass: true,
                checks: 0,
                failed: Vec::new(),
            },
        },
        pts,
    ))
}

/// Sample the second-class region and dump `C`, `ρ` and `r*` at each point.
pub fn run_reduce(spec: &SpecFile, cfg: &SuiteConfig) -> Result<Report> {
    let s = spec.to_setup()?;
    Ok(base_report(spec, &s, cfg, "reduce", None)?.0)
}

/// Run the selected suites on the reduced r-matrix `r* = ρ` of `spec`.
pub fn run_verify(spec: &SpecFile, cfg: &SuiteConfig, suite: Suite) -> Result<Report> {
    let s = spec.to_setup()?;
    let (mut report, pts) = base_report(spec, &s, cfg, "verify", Some(suite))?;
    let z = ZeroR { dim: s.k_pair.g.dim() };
    let rfun = Reduced::new(&s, &z, cfg.cond_threshold);
    if suite.includes(Suite::Cdybe) {
        report.reports.extend(cdybe_reports(&s, cfg, &pts, &rfun)?);
        report.controls.push(corrupted_control(&s, cfg, &pts)?);
    }
    if suite.includes(Suite::Equivariance) {
        report.reports.push(equivariance_report(&s, cfg, &pts, &rfun)?);
    }
    if suite.includes(Suite::Dirac) {
        report.reports.extend(dirac_reports(&s, cfg, &pts)?);
    }
    if suite.includes(Suite::Jacobi) {
        report.reports.extend(jacobi_reports(&s, cfg, &pts, &rfun)?);
        report.controls.push(corrupted_jacobi_control(&s, cfg, &pts)?);
    }
    report.summary = summarize(&report.reports, &report.controls);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::entry;

    fn quick(name: &str) -> (SpecFile, SuiteConfig) {
        let spec = entry(name).unwrap().spec;
        let cfg = SuiteConfig {
            num_points: 3,
            jacobi_points: 2,
            dirac_pairs: 3,
            characterization_pairs: 3,
            ..SuiteConfig::from_spec(&spec)
        };
        (spec, cfg)
    }

    #[test]
    fn suite_names() {
        for (text, s) in [("cdybe", Suite::Cdybe), ("all", Suite::All), ("jacobi", Suite::Jacobi)] {
            assert_eq!(text.parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn sl2_dj_passes_everything() {
        let (spec, cfg) = quick("sl2_dj");
        let r = run_verify(&spec, &cfg, Suite::All).unwrap();
        assert!(r.summary.pass, "{:?}", r.summary.failed);
        assert_eq!(r.reports.len(), 10);
        assert!(r.controls[0].applicable && r.controls[0].pass);
        let ids: Vec<_> = r.reports.iter().map(|r| r.equation_id).collect();
        assert!(ids.contains(&EquationId::P_JACOBI));
    }

    #[test]
    fn abelian_control_not_applicable() {
        let (spec, cfg) = quick("abelian2");
        let r = run_verify(&spec, &cfg, Suite::Cdybe).unwrap();
        assert!(!r.controls[0].applicable);
        assert!(r.summary.pass);
    }

    #[test]
    fn reports_are_byte_identical() {
        let (spec, cfg) = quick("sl3_dj_levi");
        let a = run_verify(&spec, &cfg, Suite::Dirac).unwrap().to_json();
        let b = run_verify(&spec, &cfg, Suite::Dirac).unwrap().to_json();
        assert_eq!(a, b);
        let r1 = run_reduce(&spec, &cfg).unwrap().to_json();
        assert_eq!(r1, run_reduce(&spec, &cfg).unwrap().to_json());
    }

    #[test]
    fn floats_have_17_digits() {
        #[derive(Serialize)]
        struct T {
            x: f64,
            n: usize,
            y: f64,
        }
        let text = to_canonical_json(&T { x: 0.1, n: 3, y: -2.0 });
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
        assert!(text.contains("\"n\": 3"));
        assert!(text.contains("-2.0000000000000000e+0"), "{text}");
    }

    #[test]
    fn digest_tracks_input() {
        let a = entry("sl2_dj").unwrap().spec;
        let mut b = a.clone();
        assert_eq!(input_digest(&a), input_digest(&b));
        b.sampling.seed += 1;
        assert_ne!(input_digest(&a), input_digest(&b));
        assert_eq!(input_digest(&a).len(), 64);
    }
}
