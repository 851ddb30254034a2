//! Residuals of the equations a reduced r-matrix must satisfy, evaluated at
//! sample points of the dual group, and the two phase-space brackets whose
//! Jacobi identities encode them.

use rand::Rng;
use serde::Serialize;

use crate::bialgebra::{unit, ReductionSetup};
use crate::dual_group::{DualFunction, GroupWord, TestFunction, Word};
use crate::error::Result;
use crate::fd::{self, Stencil};
use crate::lie_core::{cybe_lhs, invariance_residual3, Tensor2, Tensor3};
use crate::linalg::{Matrix, Vector};
use crate::reduction::DynamicalRMatrix;

/// Equations covered by [`ResidualReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[allow(non_camel_case_types, clippy::upper_case_acronyms)]
pub enum EquationId {
    /// Invariance of `[R12, R13] + [R12, R23] + [R13, R23]`.
    MCYBE,
    PL_CDYBE,
    TRIANGULARITY,
    EQUIVARIANCE,
    Q_JACOBI,
    P_JACOBI,
    /// Dirac bracket of extended functions against the native `H*` bracket.
    DIRAC_EQ_HSTAR,
    /// `{f, ξ_M} = 0` on `H*` for extended `f`.
    CONSTRAINT_PB,
    /// `ρ` against `-Σ N_i ⊗ M^i` and `Σ M^i ⊗ N_i`.
    RHO_N_FORMS,
    /// The identity pinning `ρ` down among `Σ M^i ⊗ N_i` expressions.
    SIGMA_CHARACTERIZATION,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointResidual {
    pub index: usize,
    /// `H*` coordinates of the sample point (empty for point-free checks).
    pub coords: Vec<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub equation_id: EquationId,
    pub tolerance: f64,
    pub fd_step: Option<f64>,
    pub max_residual: f64,
    pub per_point: Vec<PointResidual>,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(equation_id: EquationId, tolerance: f64, fd_step: Option<f64>, mut per_point: Vec<PointResidual>) -> Self {
        per_point.sort_by_key(|p| p.index);
        let max_residual = per_point.iter().map(|p| p.residual).fold(0.0, f64::max);
        let finite = per_point.iter().all(|p| p.residual.is_finite());
        Self {
            equation_id,
            tolerance,
            fd_step,
            max_residual,
            pass: finite && max_residual <= tolerance,
            per_point,
        }
    }
}

/// Invariance defect of `ℐ_R = cybe_lhs(R)`, relative to `1 + |ℐ_R|`.
pub fn mcybe_residual(s: &ReductionSetup) -> Result<f64> {
    let g = &s.k_pair.g;
    let t = cybe_lhs(g, &s.k_pair.r)?;
    Ok(invariance_residual3(g, &t) / (1.0 + t.max_abs()))
}

fn r_matrix(r: &dyn DynamicalRMatrix, lambda: &GroupWord) -> Result<Matrix> {
    Ok(r.eval(lambda)?.into_matrix())
}

/// `ℒ_{H_a} r` at `λ`, the derivative of `r(exp(t H_a) λ)`; the step is
/// halved if a stencil point leaves the second-class region.
pub fn dynamical_derivatives(s: &ReductionSetup, rfun: &dyn DynamicalRMatrix, lambda: &GroupWord, h: f64, stencil: Stencil) -> Result<Vec<Tensor2>> {
    let d = s.k_double();
    (0..s.h_dim())
        .map(|a| {
            let x = d.from_kstar(&s.hstar_in_kstar().column(a).into_owned());
            let (m, _) = fd::derivative_halving(|t| r_matrix(rfun, &lambda.prepend(&x, t)), h, stencil)?;
            Ok(Tensor2::from_matrix(m))
        })
        .collect()
}

/// Left side of the dynamical equation,
/// `CYB(R + r) + Σ_cyc Σ_a H^a ⊗ ℒ_{H_a} r`.
pub fn plcdybe_lhs(s: &ReductionSetup, rfun: &dyn DynamicalRMatrix, lambda: &GroupWord, h: f64, stencil: Stencil) -> Result<Tensor3> {
    let g = &s.k_pair.g;
    let r = rfun.eval(lambda)?;
    let mut t = cybe_lhs(g, &(&s.k_pair.r + &r))?;
    let h_in_g = s.h_pair.embedding();
    let mut deriv = Tensor3::zeros(g.dim());
    for (a, dr) in dynamical_derivatives(s, rfun, lambda, h, stencil)?.iter().enumerate() {
        deriv += &Tensor3::vector_tensor(&h_in_g.column(a).into_owned(), dr);
    }
    t += &deriv.cyclic_sum();
    Ok(t)
}

/// `CYB(R + r) - CYB(R) + Σ_cyc Σ_a H^a ⊗ ℒ_{H_a} r`, which vanishes for a
/// triangular dynamical r-matrix on the dual group of `H`.
pub fn plcdybe_residual(s: &ReductionSetup, rfun: &dyn DynamicalRMatrix, lambda: &GroupWord, h: f64, stencil: Stencil) -> Result<Tensor3> {
    let i_r = cybe_lhs(&s.k_pair.g, &s.k_pair.r)?;
    Ok(&plcdybe_lhs(s, rfun, lambda, h, stencil)? - &i_r)
}

/// `d/dt r(λ exp(t Y)) - (ad_X ⊗ 1 + 1 ⊗ ad_X) r(λ)` with
/// `Y = (λ⁻¹ X λ)_{H*}` the dressing vector of `X ∈ H` (native coordinates).
pub fn equivariance_residual(
    s: &ReductionSetup,
    rfun: &dyn DynamicalRMatrix,
    lambda: &GroupWord,
    x: &Vector,
    h: f64,
    stencil: Stencil,
) -> Result<Tensor2> {
    let native = s.project_native(lambda)?;
    let y = crate::dual_group::dressing_vector(&native, x);
    let d = s.k_double();
    let yk = d.from_kstar(&(s.hstar_in_kstar() * y));
    let (m, _) = fd::derivative_halving(|t| r_matrix(rfun, &lambda.append(&yk, t)), h, stencil)?;
    let r = rfun.eval(lambda)?;
    let xg = s.h_pair.embedding() * x;
    Ok(&Tensor2::from_matrix(m) - &r.ad_action(&s.k_pair.g, &xg))
}

/// Report the left side of the dynamical equation against `ℐ_R`: for a
/// triangular solution the two coincide.
pub fn triangularity_check(
    s: &ReductionSetup,
    rfun: &dyn DynamicalRMatrix,
    points: &[(usize, Vec<f64>, GroupWord)],
    h: f64,
    stencil: Stencil,
    tolerance: f64,
) -> Result<ResidualReport> {
    let i_r = cybe_lhs(&s.k_pair.g, &s.k_pair.r)?;
    let per_point = points
        .iter()
        .map(|(index, coords, w)| {
            let lhs = plcdybe_lhs(s, rfun, w, h, stencil)?;
            Ok(PointResidual {
                index: *index,
                coords: coords.clone(),
                residual: (&lhs - &i_r).max_abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::new(EquationId::TRIANGULARITY, tolerance, Some(h), per_point))
}

/// `Λ(κ̃, κ̂) = κ̃ κ̂⁻¹`
pub fn momentum_map(tilde: &GroupWord, hat: &GroupWord) -> GroupWord {
    tilde.concat(&hat.inverse())
}

/// A function on the dual group of `H`: a polynomial in `Ad` entries, or,
/// when that double is abelian (so `Ad` is constant), a polynomial in the
/// linear coordinates of the group.
#[derive(Clone, Debug, PartialEq)]
pub enum KappaFunction {
    Ad(TestFunction),
    Abelian(Vec<(f64, Vec<usize>)>),
}

fn abelian_coords(w: &Word) -> Vec<f64> {
    let n = w.algebra().dim() / 2;
    let mut x = vec![0.0; n];
    for f in w.factors() {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += f[n + i];
        }
    }
    x
}

/// `d/dt f(exp(t e_a) w)` (left) or `d/dt f(w exp(t e_a))` for an
/// `Ad`-polynomial, exactly.
fn ad_derivative(f: &TestFunction, w: &Word, a: usize, left: bool) -> f64 {
    let x = w.algebra().ad_basis(a);
    let tangent = if left { x * w.ad() } else { w.ad() * x };
    f.differential(w.ad(), &tangent)
}

impl KappaFunction {
    pub fn eval_word(&self, w: &Word) -> f64 {
        match self {
            KappaFunction::Ad(f) => f.eval(w.ad()),
            KappaFunction::Abelian(terms) => {
                let x = abelian_coords(w);
                terms.iter().map(|(c, idx)| c * idx.iter().map(|&i| x[i]).product::<f64>()).sum()
            }
        }
    }

    /// Derivative along left or right translation by the basis vector `a`
    /// of the double.
    fn derivative(&self, w: &Word, a: usize, left: bool) -> f64 {
        match self {
            KappaFunction::Ad(f) => ad_derivative(f, w, a, left),
            KappaFunction::Abelian(terms) => {
                let n = w.algebra().dim() / 2;
                let x = abelian_coords(w);
                let Some(i) = a.checked_sub(n) else { return 0.0 };
                let mut total = 0.0;
                for (c, idx) in terms {
                    for k in 0..idx.len() {
                        if idx[k] == i {
                            total += c * idx.iter().enumerate().filter(|&(l, _)| l != k).map(|(_, &j)| x[j]).product::<f64>();
                        }
                    }
                }
                total
            }
        }
    }

    pub fn constant(c: f64) -> Self {
        KappaFunction::Ad(TestFunction::constant(c))
    }
}

impl DualFunction for KappaFunction {
    fn value(&self, w: &GroupWord) -> Result<f64> {
        Ok(self.eval_word(w.word()))
    }
}

/// `c1 Ad[a1,b1] + c2 Ad[a2,b2] Ad[a3,b3]` with random indices.
pub fn random_ad_function(dim: usize, rng: &mut impl Rng) -> TestFunction {
    let mut e = || TestFunction::entry(rng.random_range(0..dim), rng.random_range(0..dim));
    let (a, b, c) = (e(), e(), e());
    let c1 = rng.random_range(-1.0..=1.0);
    let c2 = rng.random_range(-1.0..=1.0);
    a.scaled(c1).plus(&b.times(&c).scaled(c2))
}

/// A random function on the dual group of `H`, of the kind that separates
/// points there.
pub fn random_kappa_function(s: &ReductionSetup, rng: &mut impl Rng) -> KappaFunction {
    let d = &s.h_pair.double;
    let n = d.half_dim();
    if d.algebra().triplets().is_empty() {
        let mut terms = Vec::new();
        for _ in 0..2 {
            let c = rng.random_range(-1.0..=1.0);
            terms.push((c, vec![rng.random_range(0..n)]));
        }
        let c = rng.random_range(-1.0..=1.0);
        terms.push((c, vec![rng.random_range(0..n), rng.random_range(0..n)]));
        KappaFunction::Abelian(terms)
    } else {
        KappaFunction::Ad(random_ad_function(2 * n, rng))
    }
}

/// Component of a phase-space point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    /// The group `G`, all directions of `g`.
    Group,
    /// The dual group of `H`, directions in `H*`.
    Dual,
}

fn directions(slot: Slot, w: &Word) -> std::ops::Range<usize> {
    let dim = w.algebra().dim();
    match slot {
        Slot::Group => 0..dim,
        Slot::Dual => dim / 2..dim,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ComponentFunction {
    Group(TestFunction),
    Dual(KappaFunction),
}

impl ComponentFunction {
    fn eval(&self, w: &Word) -> f64 {
        match self {
            ComponentFunction::Group(f) => f.eval(w.ad()),
            ComponentFunction::Dual(f) => f.eval_word(w),
        }
    }

    fn derivative(&self, w: &Word, a: usize, left: bool) -> f64 {
        match self {
            ComponentFunction::Group(f) => ad_derivative(f, w, a, left),
            ComponentFunction::Dual(f) => f.derivative(w, a, left),
        }
    }
}

/// A function on a product of groups: a sum of products of one function per
/// component.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseFunction {
    /// Each term lists `(coefficient, per-component factors)`; a `None`
    /// factor is the constant 1.
    terms: Vec<(f64, Vec<Option<ComponentFunction>>)>,
}

impl PhaseFunction {
    pub fn new(terms: Vec<(f64, Vec<Option<ComponentFunction>>)>) -> Self {
        Self { terms }
    }

    pub fn eval(&self, point: &[Word]) -> f64 {
        self.terms
            .iter()
            .map(|(c, fs)| c * fs.iter().zip(point).map(|(f, w)| f.as_ref().map_or(1.0, |f| f.eval(w))).product::<f64>())
            .sum()
    }

    /// Exact derivative along left or right translation of component `c` by
    /// basis vector `a`.
    fn derivative(&self, point: &[Word], c: usize, a: usize, left: bool) -> f64 {
        let mut total = 0.0;
        for (coef, fs) in &self.terms {
            let Some(fc) = &fs[c] else { continue };
            let mut prod = coef * fc.derivative(&point[c], a, left);
            for (o, (f, w)) in fs.iter().zip(point).enumerate() {
                if o != c {
                    prod *= f.as_ref().map_or(1.0, |f| f.eval(w));
                }
            }
            total += prod;
        }
        total
    }
}

type PointFn<'a> = dyn Fn(&[Word]) -> Result<f64> + Sync + 'a;

/// Left and right gradients of a function in every component.
struct PhaseGradients {
    left: Vec<Vector>,
    right: Vec<Vector>,
}

fn analytic_gradients(slots: &[Slot], point: &[Word], f: &PhaseFunction) -> PhaseGradients {
    let mut left = Vec::with_capacity(point.len());
    let mut right = Vec::with_capacity(point.len());
    for (c, slot) in slots.iter().enumerate() {
        let dirs = directions(*slot, &point[c]);
        left.push(Vector::from_iterator(dirs.len(), dirs.clone().map(|a| f.derivative(point, c, a, true))));
        right.push(Vector::from_iterator(dirs.len(), dirs.map(|a| f.derivative(point, c, a, false))));
    }
    PhaseGradients { left, right }
}

fn numeric_gradients(slots: &[Slot], point: &[Word], f: &PointFn, h: f64, stencil: Stencil) -> Result<PhaseGradients> {
    let mut left = Vec::with_capacity(point.len());
    let mut right = Vec::with_capacity(point.len());
    for (c, slot) in slots.iter().enumerate() {
        let dirs = directions(*slot, &point[c]);
        let mut l = Vector::zeros(dirs.len());
        let mut r = Vector::zeros(dirs.len());
        for (i, a) in dirs.enumerate() {
            let x = unit(point[c].algebra().dim(), a);
            let shifted = |t: f64, left_side: bool| {
                let mut p = point.to_vec();
                p[c] = if left_side { point[c].prepend(&x, t) } else { point[c].append(&x, t) };
                f(&p)
            };
            l[i] = fd::derivative_halving(|t| shifted(t, true), h, stencil)?.0;
            r[i] = fd::derivative_halving(|t| shifted(t, false), h, stencil)?.0;
        }
        left.push(l);
        right.push(r);
    }
    Ok(PhaseGradients { left, right })
}

/// Finite-difference parameters for the Jacobiators: the gradients of a
/// bracket (which involves `r`) are taken numerically with this step, while
/// those of the polynomial test functions are exact. The eighth-order
/// stencil keeps the truncation error below `1e-4` at `h = 1e-3` even for
/// points a few hundredths away from the poles of `r`.
#[derive(Clone, Copy, Debug)]
pub struct BracketSteps {
    pub step: f64,
    pub stencil: Stencil,
}

impl Default for BracketSteps {
    fn default() -> Self {
        Self {
            step: 1e-3,
            stencil: Stencil::Central8,
        }
    }
}

/// Shared data for brackets on `G × H*` and `H* × G × H*`.
pub struct PhaseSpace<'a> {
    setup: &'a ReductionSetup,
    rfun: &'a dyn DynamicalRMatrix,
    slots: Vec<Slot>,
    steps: BracketSteps,
}

impl<'a> PhaseSpace<'a> {
    /// `Q = G × H*`, points `[g, κ]`.
    pub fn q(setup: &'a ReductionSetup, rfun: &'a dyn DynamicalRMatrix, steps: BracketSteps) -> Self {
        Self {
            setup,
            rfun,
            slots: vec![Slot::Group, Slot::Dual],
            steps,
        }
    }

    /// `P = H* × G × H*`, points `[κ̃, g, κ̂]`.
    pub fn p(setup: &'a ReductionSetup, rfun: &'a dyn DynamicalRMatrix, steps: BracketSteps) -> Self {
        Self {
            setup,
            rfun,
            slots: vec![Slot::Dual, Slot::Group, Slot::Dual],
            steps,
        }
    }

    fn is_p(&self) -> bool {
        self.slots.len() == 3
    }

    fn r_at(&self, kappa: &Word) -> Result<Matrix> {
        let gw = GroupWord::from_word(&self.setup.h_pair.double, kappa.clone());
        r_matrix(self.rfun, &self.setup.lift_native(&gw)?)
    }

    /// `<<∇f1, Ad_κ ∇'f2>>` in the double of `H`.
    fn dual_term(&self, kappa: &Word, grad1: &Vector, grad2_prime: &Vector) -> f64 {
        let d = &self.setup.h_pair.double;
        d.pair(&d.from_k(grad1), &(kappa.ad() * d.from_k(grad2_prime)))
    }

    fn bracket_from(&self, point: &[Word], a: &PhaseGradients, b: &PhaseGradients) -> Result<f64> {
        let iota = self.setup.h_pair.embedding();
        let rr = self.setup.k_pair.r.matrix();
        let form = |x: &Vector, m: &Matrix, y: &Vector| (x.transpose() * m * y)[(0, 0)];
        if !self.is_p() {
            let (g, k) = (0, 1);
            let r = self.r_at(&point[k])?;
            let mut v = self.dual_term(&point[k], &a.left[k], &b.right[k]);
            v += a.right[g].dot(&(iota * &b.left[k])) - b.right[g].dot(&(iota * &a.left[k]));
            v += form(&a.right[g], &(rr + r), &b.right[g]) - form(&a.left[g], rr, &b.left[g]);
            Ok(v)
        } else {
            let (kt, g, kh) = (0, 1, 2);
            let r_hat = self.r_at(&point[kh])?;
            let r_tilde = self.r_at(&point[kt])?;
            let mut v = self.dual_term(&point[kh], &a.left[kh], &b.right[kh]) - self.dual_term(&point[kt], &a.left[kt], &b.right[kt]);
            v += a.right[g].dot(&(iota * &b.left[kh])) - b.right[g].dot(&(iota * &a.left[kh]));
            v += a.left[g].dot(&(iota * &b.left[kt])) - b.left[g].dot(&(iota * &a.left[kt]));
            v += form(&a.right[g], &(rr + r_hat), &b.right[g]) - form(&a.left[g], &(rr + r_tilde), &b.left[g]);
            Ok(v)
        }
    }

    /// The bracket of two phase functions at a point.
    pub fn bracket(&self, point: &[Word], f1: &PhaseFunction, f2: &PhaseFunction) -> Result<f64> {
        let a = analytic_gradients(&self.slots, point, f1);
        let b = analytic_gradients(&self.slots, point, f2);
        self.bracket_from(point, &a, &b)
    }

    /// The bracket with both gradients taken numerically; for checking the
    /// exact gradients.
    pub fn bracket_numeric(&self, point: &[Word], f1: &PhaseFunction, f2: &PhaseFunction) -> Result<f64> {
        let e1 = |p: &[Word]| Ok(f1.eval(p));
        let e2 = |p: &[Word]| Ok(f2.eval(p));
        let a = numeric_gradients(&self.slots, point, &e1, self.steps.step, self.steps.stencil)?;
        let b = numeric_gradients(&self.slots, point, &e2, self.steps.step, self.steps.stencil)?;
        self.bracket_from(point, &a, &b)
    }

    /// `{f1, {f2, f3}} + {f2, {f3, f1}} + {f3, {f1, f2}}`, with the inner
    /// brackets differentiated numerically.
    pub fn jacobiator(&self, point: &[Word], f: [&PhaseFunction; 3]) -> Result<f64> {
        let mut total = 0.0;
        for i in 0..3 {
            let (a, b, c) = (f[i], f[(i + 1) % 3], f[(i + 2) % 3]);
            let inner = |p: &[Word]| self.bracket(p, b, c);
            let ga = analytic_gradients(&self.slots, point, a);
            let gi = numeric_gradients(&self.slots, point, &inner, self.steps.step, self.steps.stencil)?;
            total += self.bracket_from(point, &ga, &gi)?;
        }
        Ok(total)
    }

    /// Build a point from a `G` word and native `H*` words.
    pub fn point_q(g: &Word, kappa: &GroupWord) -> Vec<Word> {
        vec![g.clone(), kappa.word().clone()]
    }

    pub fn point_p(tilde: &GroupWord, g: &Word, hat: &GroupWord) -> Vec<Word> {
        vec![tilde.word().clone(), g.clone(), hat.word().clone()]
    }
}

/// `{F1, F2}_Q` at `(g, κ)`.
pub fn q_bracket(
    s: &ReductionSetup,
    rfun: &dyn DynamicalRMatrix,
    g: &Word,
    kappa: &GroupWord,
    f1: &PhaseFunction,
    f2: &PhaseFunction,
    steps: BracketSteps,
) -> Result<f64> {
    PhaseSpace::q(s, rfun, steps).bracket(&PhaseSpace::point_q(g, kappa), f1, f2)
}

pub fn q_jacobi_residual(
    s: &ReductionSetup,
    rfun: &dyn DynamicalRMatrix,
    g: &Word,
    kappa: &GroupWord,
    f: [&PhaseFunction; 3],
    steps: BracketSteps,
) -> Result<f64> {
    Ok(PhaseSpace::q(s, rfun, steps).jacobiator(&PhaseSpace::point_q(g, kappa), f)?.abs())
}

/// `{F1, F2}_P` at `(κ̃, g, κ̂)`.
#[allow(clippy::too_many_arguments)]
pub fn p_bracket(
    s: &ReductionSetup,
    rfun: &dyn DynamicalRMatrix,
    tilde: &GroupWord,
    g: &Word,
    hat: &GroupWord,
    f1: &PhaseFunction,
    f2: &PhaseFunction,
    steps: BracketSteps,
) -> Result<f64> {
    PhaseSpace::p(s, rfun, steps).bracket(&PhaseSpace::point_p(tilde, g, hat), f1, f2)
}

#[allow(clippy::too_many_arguments)]
pub fn p_jacobi_residual(
    s: &ReductionSetup,
    rfun: &dyn DynamicalRMatrix,
    tilde: &GroupWord,
    g: &Word,
    hat: &GroupWord,
    f: [&PhaseFunction; 3],
    steps: BracketSteps,
) -> Result<f64> {
    Ok(PhaseSpace::p(s, rfun, steps).jacobiator(&PhaseSpace::point_p(tilde, g, hat), f)?.abs())
}

/// A random phase function: a product term coupling all components plus
/// one single-component term per component.
pub fn random_phase_function(s: &ReductionSetup, p_space: bool, rng: &mut impl Rng) -> PhaseFunction {
    let gdim = s.k_pair.g.dim();
    let group = |rng: &mut _| Some(ComponentFunction::Group(random_ad_function(gdim, rng)));
    let dual = |rng: &mut _| Some(ComponentFunction::Dual(random_kappa_function(s, rng)));
    let mut terms = Vec::new();
    if p_space {
        terms.push((1.0, vec![dual(rng), group(rng), dual(rng)]));
        terms.push((1.0, vec![dual(rng), None, None]));
        terms.push((1.0, vec![None, group(rng), None]));
        terms.push((1.0, vec![None, None, dual(rng)]));
    } else {
        terms.push((1.0, vec![group(rng), dual(rng)]));
        terms.push((1.0, vec![group(rng), None]));
        terms.push((1.0, vec![None, dual(rng)]));
    }
    PhaseFunction::new(terms)
}

/// A random element of `G` as a single exponential, coordinates in `[-1, 1]`.
pub fn random_group_word(s: &ReductionSetup, rng: &mut impl Rng) -> Word {
    let g = s.k_pair.g.clone();
    let x = Vector::from_fn(g.dim(), |_, _| rng.random_range(-1.0..=1.0));
    Word::new(g, vec![x]).expect("dimension matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::load_entry;
    use crate::linalg;
    use crate::reduction::{sample_points, Reduced, SampleConfig, ZeroR, COND_THRESHOLD};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(n: usize) -> SampleConfig {
        SampleConfig {
            num_points: n,
            ..Default::default()
        }
    }

    #[test]
    fn constant_r_on_full_h_collapses_to_cybe() {
        // H = K = g, r = 0: only CYB(R) - CYB(R) remains.
        let s = load_entry("abelian2").unwrap();
        let z = ZeroR { dim: 2 };
        let id = GroupWord::identity(s.k_double());
        assert_eq!(plcdybe_residual(&s, &z, &id, 1e-5, Stencil::Central4).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn reduced_r_solves_the_dynamical_equation_sl2() {
        let s = load_entry("sl2_dj").unwrap();
        let z = ZeroR { dim: 3 };
        let r = Reduced::new(&s, &z, COND_THRESHOLD);
        for p in sample_points(&s, &cfg(3)).unwrap() {
            let res = plcdybe_residual(&s, &r, &p.word, 1e-5, Stencil::Central4).unwrap();
            assert!(res.max_abs() < 1e-6, "{}", res.max_abs());
            let eq = equivariance_residual(&s, &r, &p.word, &Vector::from_vec(vec![1.0]), 1e-5, Stencil::Central4).unwrap();
            assert!(eq.max_abs() < 1e-6, "{}", eq.max_abs());
        }
    }

    #[test]
    fn corrupted_rho_fails() {
        let s = load_entry("sl2_dj").unwrap();
        let z = ZeroR { dim: 3 };
        let bad = Reduced::corrupted(&s, &z, COND_THRESHOLD);
        let worst = sample_points(&s, &cfg(3))
            .unwrap()
            .iter()
            .map(|p| plcdybe_residual(&s, &bad, &p.word, 1e-5, Stencil::Central4).unwrap().max_abs())
            .fold(0.0, f64::max);
        assert!(worst > 1e-2);
    }

    #[test]
    fn equivariance_with_zero_x() {
        let s = load_entry("sl3_dj_levi").unwrap();
        let z = ZeroR { dim: 8 };
        let r = Reduced::new(&s, &z, COND_THRESHOLD);
        let p = &sample_points(&s, &cfg(1)).unwrap()[0];
        let res = equivariance_residual(&s, &r, &p.word, &Vector::zeros(4), 1e-5, Stencil::Central4).unwrap();
        assert!(res.max_abs() < 1e-9);
    }

    #[test]
    fn momentum_map_identities() {
        let s = load_entry("sl3_dj_levi").unwrap();
        let pts = sample_points(&s, &cfg(2)).unwrap();
        let (a, b) = (&pts[0].native, &pts[1].native);
        let l = momentum_map(a, b);
        assert!(linalg::max_abs(&(l.ad() * b.ad() - a.ad())) < 1e-9);
        let same = momentum_map(a, a);
        assert!(linalg::max_abs(&(same.ad() - Matrix::identity(8, 8))) < 1e-9);
        let id = GroupWord::identity(&s.h_pair.double);
        assert!(linalg::max_abs(&(momentum_map(a, &id).ad() - a.ad())) < 1e-12);
    }

    #[test]
    fn q_bracket_blocks() {
        let s = load_entry("sl2_dj").unwrap();
        let z = ZeroR { dim: 3 };
        let r = Reduced::new(&s, &z, COND_THRESHOLD);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = &sample_points(&s, &cfg(1)).unwrap()[0];
        let g = random_group_word(&s, &mut rng);
        let f1 = random_phase_function(&s, false, &mut rng);
        let f2 = random_phase_function(&s, false, &mut rng);
        let steps = BracketSteps::default();
        let ab = q_bracket(&s, &r, &g, &p.native, &f1, &f2, steps).unwrap();
        let ba = q_bracket(&s, &r, &g, &p.native, &f2, &f1, steps).unwrap();
        assert!(ab.abs() > 1e-3);
        assert!((ab + ba).abs() < 1e-7);
        // functions of g alone with R = 0, r = 0 commute
        let s0 = load_entry("abelian2").unwrap();
        let z0 = ZeroR { dim: 2 };
        let g0 = random_group_word(&s0, &mut rng);
        let phi = PhaseFunction::new(vec![(1.0, vec![Some(ComponentFunction::Group(TestFunction::entry(0, 0))), None])]);
        let k0 = GroupWord::identity(&s0.h_pair.double);
        assert_eq!(q_bracket(&s0, &z0, &g0, &k0, &phi, &phi, steps).unwrap(), 0.0);
    }

    #[test]
    fn exact_gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for name in ["sl3_dj_levi", "sl3_dj_cartan"] {
            let s = load_entry(name).unwrap();
            let z = ZeroR { dim: 8 };
            let r = Reduced::new(&s, &z, COND_THRESHOLD);
            let pts = sample_points(&s, &cfg(2)).unwrap();
            let g = random_group_word(&s, &mut rng);
            let f1 = random_phase_function(&s, true, &mut rng);
            let f2 = random_phase_function(&s, true, &mut rng);
            let steps = BracketSteps {
                step: 1e-3,
                stencil: Stencil::Central4,
            };
            let space = PhaseSpace::p(&s, &r, steps);
            let point = PhaseSpace::point_p(&pts[0].native, &g, &pts[1].native);
            let exact = space.bracket(&point, &f1, &f2).unwrap();
            let numeric = space.bracket_numeric(&point, &f1, &f2).unwrap();
            assert!((exact - numeric).abs() < 1e-8 * (1.0 + exact.abs()), "{name}: {exact} vs {numeric}");
        }
    }

    #[test]
    fn q_and_p_jacobi_sl2() {
        let s = load_entry("sl2_dj").unwrap();
        let z = ZeroR { dim: 3 };
        let r = Reduced::new(&s, &z, COND_THRESHOLD);
        let bad = Reduced::corrupted(&s, &z, COND_THRESHOLD);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts = sample_points(&s, &cfg(2)).unwrap();
        let g = random_group_word(&s, &mut rng);
        let fq: Vec<_> = (0..3).map(|_| random_phase_function(&s, false, &mut rng)).collect();
        let fp: Vec<_> = (0..3).map(|_| random_phase_function(&s, true, &mut rng)).collect();
        let steps = BracketSteps::default();
        let q = q_jacobi_residual(&s, &r, &g, &pts[0].native, [&fq[0], &fq[1], &fq[2]], steps).unwrap();
        assert!(q < 1e-4, "Q {q}");
        let p = p_jacobi_residual(&s, &r, &pts[0].native, &g, &pts[1].native, [&fp[0], &fp[1], &fp[2]], steps).unwrap();
        assert!(p < 1e-4, "P {p}");
        let qb = q_jacobi_residual(&s, &bad, &g, &pts[0].native, [&fq[0], &fq[1], &fq[2]], steps).unwrap();
        assert!(qb > 1e-3, "corrupted Q {qb}");
    }
}
